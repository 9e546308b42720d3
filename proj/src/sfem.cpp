#include "seit/sfem.hpp"

#include <cmath>
#include <string>

namespace seit {

namespace {
void check_consistent(const StiffnessDecomposition& decomp, const PixelAnomaly& anomaly,
                      const ChaosBasis& basis) {
    if (anomaly.count() != decomp.pixel_count() || basis.Q != anomaly.count())
        throw ContractError("sfem: anomaly does not match the assembled pixel blocks");
    for (int q = 0; q < anomaly.count(); ++q)
        if (anomaly.pixels[q].id != decomp.pixel_ids[q])
            throw ContractError("sfem: pixel ids must be sorted and match the mesh tags");
}
}  // namespace

SfemSolver::SfemSolver(const StiffnessDecomposition& decomp, const PixelAnomaly& anomaly,
                       const ChaosBasis& basis, double tol)
    : decomp_(decomp), basis_(basis), tol_(tol) {
    check_consistent(decomp, anomaly, basis);
    coupling_ = coupling_matrices(basis_);
    for (int q = 0; q < decomp.pixel_count(); ++q)
        pixel_loads_.push_back(difference_loads(decomp, decomp.pixel_ids[q]));

    const Eigen::VectorXd& c = decomp.boundary_mass;
    Eigen::SparseMatrix<double> K_mean = decomp.stiffness(basis_.mid);
    penalty_scale_ = K_mean.diagonal().sum() / K_mean.rows() / c.squaredNorm();
    std::vector<int> support;
    for (int i = 0; i < c.size(); ++i)
        if (c[i] != 0.0) support.push_back(i);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(support.size() * support.size());
    for (int i : support)
        for (int j : support) trip.emplace_back(i, j, penalty_scale_ * c[i] * c[j]);
    Eigen::SparseMatrix<double> penalty(c.size(), c.size());
    penalty.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseMatrix<double> augmented = K_mean + penalty;
    precond_.compute(augmented);
    if (precond_.info() != Eigen::Success)
        throw NumericError("sfem: preconditioner factorization failed");
}

Eigen::MatrixXd SfemSolver::apply(const Eigen::MatrixXd& x) const {
    Eigen::MatrixXd y = decomp_.K0 * x;
    const Eigen::VectorXd& c = decomp_.boundary_mass;
    y.noalias() += penalty_scale_ * c * (c.transpose() * x);
    for (int q = 0; q < decomp_.pixel_count(); ++q)
        y.noalias() += decomp_.Kq[q] * (x * coupling_.G[q]);
    return y;
}

Eigen::MatrixXd sfem_apply_for_test(const SfemSolver& solver, const Eigen::MatrixXd& x) {
    return solver.apply(x);
}

SfemSolution SfemSolver::solve(int pattern) const {
    if (pattern < 0 || pattern >= decomp_.basis.size())
        throw ContractError("sfem: pattern index out of range");
    const int N = static_cast<int>(decomp_.K0.rows());
    const int M = basis_.size();

    // Right-hand side blocks r_i = sum_q E[theta_q psi_i] b_{q,t}; the chaos
    // expansion of the data is degree <= 1 exactly, so only |i| <= 1 blocks
    // are nonzero: E[theta_q psi_i] = G^q(i, 0).
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(N, M);
    for (int q = 0; q < decomp_.pixel_count(); ++q) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(coupling_.G[q], 0); it; ++it)
            rhs.col(it.row()) += it.value() * pixel_loads_[q].col(pattern);
    }

    SfemSolution sol;
    sol.pattern = pattern;
    sol.chaos_degree = basis_.degree;
    double rhs_norm = rhs.norm();
    if (rhs_norm == 0.0) {
        sol.coeffs = Eigen::MatrixXd::Zero(N, M);
        return sol;
    }

    // Preconditioned CG on the block system, Frobenius inner products.
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(N, M);
    Eigen::MatrixXd r = rhs;
    Eigen::MatrixXd z = precond_.solve(r);
    Eigen::MatrixXd p = z;
    double rz = (r.array() * z.array()).sum();
    const int max_iters = 5000;
    int it = 0;
    double rel = 1.0;
    for (; it < max_iters; ++it) {
        Eigen::MatrixXd ap = apply(p);
        double pap = (p.array() * ap.array()).sum();
        if (!(pap > 0.0))
            throw NumericError("sfem: block operator lost positive definiteness");
        double alpha = rz / pap;
        x.noalias() += alpha * p;
        r.noalias() -= alpha * ap;
        rel = r.norm() / rhs_norm;
        if (rel <= tol_) break;
        z = precond_.solve(r);
        double rz_next = (r.array() * z.array()).sum();
        p = z + (rz_next / rz) * p;
        rz = rz_next;
    }
    if (rel > tol_)
        throw NumericError("sfem: block CG stalled at residual " + std::to_string(rel));

    // Exact zero boundary mean per chaos block.
    const Eigen::VectorXd& c = decomp_.boundary_mass;
    double c1 = c.sum();
    for (int i = 0; i < M; ++i) x.col(i).array() -= c.dot(x.col(i)) / c1;

    sol.coeffs = std::move(x);
    sol.iterations = it + 1;
    sol.residual = rel;
    return sol;
}

NtDDifferenceMatrix SfemSolver::expectation_matrix() const {
    const int n = decomp_.basis.size();
    Eigen::MatrixXd traces(decomp_.mesh->boundary_count(), n);
    parallel_for(n, [&](int p) {
        SfemSolution sol = solve(p);
        traces.col(p) = expectation_trace(sol, *decomp_.mesh);
    });
    NtDDifferenceMatrix out = assemble_L(traces, decomp_.basis.T, "sfem");
    return out;
}

SfemSolution solve_sfem_difference(const StiffnessDecomposition& decomp,
                                   const PixelAnomaly& anomaly, const ChaosBasis& basis,
                                   int pattern, double tol) {
    return SfemSolver(decomp, anomaly, basis, tol).solve(pattern);
}

Eigen::VectorXd expectation_trace(const SfemSolution& sol, const DiskMesh& mesh) {
    return boundary_trace(mesh, sol.coeffs.col(0));
}

NtDDifferenceMatrix sfem_expectation_matrix(const StiffnessDecomposition& decomp,
                                            const PixelAnomaly& anomaly,
                                            const ChaosBasis& basis, double tol) {
    return SfemSolver(decomp, anomaly, basis, tol).expectation_matrix();
}

MonteCarloExpectation monte_carlo_expectation(const StiffnessDecomposition& decomp,
                                              const PixelAnomaly& anomaly, int n,
                                              std::uint64_t seed, double tol) {
    if (n < 2) throw ContractError("monte_carlo_expectation: need n >= 2");
    ChaosBasis probe = build_basis(anomaly, 0);
    check_consistent(decomp, anomaly, probe);
    const int dim = decomp.basis.size();
    Eigen::MatrixXd draws = sample_contrasts(anomaly, seed, n);
    std::vector<Eigen::MatrixXd> loads;
    for (int q = 0; q < decomp.pixel_count(); ++q)
        loads.push_back(difference_loads(decomp, decomp.pixel_ids[q]));

    constexpr int kChunk = 32;  // fixed chunking keeps the reduction order stable
    const int chunks = (n + kChunk - 1) / kChunk;
    std::vector<Eigen::MatrixXd> sums(chunks), squares(chunks);
    parallel_for(chunks, [&](int ci) {
        Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(dim, dim);
        Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(dim, dim);
        int lo = ci * kChunk;
        int hi = std::min(n, lo + kChunk);
        for (int s = lo; s < hi; ++s) {
            Eigen::VectorXd theta = draws.row(s).transpose();
            Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(decomp.K0.rows(), dim);
            for (int q = 0; q < decomp.pixel_count(); ++q)
                if (theta[q] != 0.0) rhs.noalias() += theta[q] * loads[q];
            FemSolver solver(decomp, theta, tol);
            Eigen::MatrixXd sample(dim, dim);
            for (int p = 0; p < dim; ++p) {
                Eigen::VectorXd w = solver.solve(rhs.col(p));
                sample.col(p) =
                    fourier_project(boundary_trace(*decomp.mesh, w), decomp.basis.T);
            }
            sum += sample;
            sq.array() += sample.array().square();
        }
        sums[ci] = std::move(sum);
        squares[ci] = std::move(sq);
    });

    Eigen::MatrixXd total = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::MatrixXd total_sq = Eigen::MatrixXd::Zero(dim, dim);
    for (int ci = 0; ci < chunks; ++ci) {
        total += sums[ci];
        total_sq += squares[ci];
    }
    MonteCarloExpectation out;
    out.samples = n;
    out.matrix.T = decomp.basis.T;
    out.matrix.provenance = "monte-carlo";
    out.matrix.L = total / n;
    Eigen::ArrayXXd var =
        (total_sq.array() - n * out.matrix.L.array().square()) / (n - 1.0);
    out.standard_error = (var.max(0.0) / n).sqrt().matrix();
    return out;
}

}  // namespace seit
