#include "seit/fem.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <string>

#include "seit/ntd.hpp"

namespace seit {

namespace {
constexpr double kPi = std::numbers::pi;
const double kSqrtPi = std::sqrt(kPi);

using Cplx = std::complex<double>;

Cplx cpow_int(Cplx z, int k) {
    Cplx r(1.0, 0.0);
    while (k > 0) {
        if (k & 1) r *= z;
        z *= z;
        k >>= 1;
    }
    return r;
}
}  // namespace

double current_pattern_value(const CurrentPattern& pat, double gamma) {
    double a = pat.frequency * gamma;
    return (pat.sine ? std::sin(a) : std::cos(a)) / kSqrtPi;
}

double background_potential(const CurrentPattern& pat, const Vec2& p) {
    Cplx zt = cpow_int(Cplx(p.x(), p.y()), pat.frequency);
    double v = pat.sine ? zt.imag() : zt.real();
    return v / (pat.frequency * kSqrtPi);
}

Vec2 background_potential_gradient(const CurrentPattern& pat, const Vec2& p) {
    Cplx w = cpow_int(Cplx(p.x(), p.y()), pat.frequency - 1);
    if (pat.sine) return Vec2(w.imag(), w.real()) / kSqrtPi;
    return Vec2(w.real(), -w.imag()) / kSqrtPi;
}

int StiffnessDecomposition::pixel_index(int id) const {
    auto it = std::lower_bound(pixel_ids.begin(), pixel_ids.end(), id);
    if (it == pixel_ids.end() || *it != id) return -1;
    return static_cast<int>(it - pixel_ids.begin());
}

Eigen::SparseMatrix<double> StiffnessDecomposition::stiffness(
    const Eigen::VectorXd& theta) const {
    if (theta.size() != pixel_count())
        throw ContractError("stiffness: contrast vector length does not match pixels");
    Eigen::SparseMatrix<double> K = K0;
    for (int q = 0; q < pixel_count(); ++q)
        if (theta[q] != 0.0) K += theta[q] * Kq[q];
    return K;
}

StiffnessDecomposition assemble(std::shared_ptr<const DiskMesh> mesh,
                                const CurrentBasis& basis) {
    if (!mesh) throw ContractError("assemble: null mesh");
    if (basis.T < 1) throw ContractError("assemble: need T >= 1");
    const DiskMesh& m = *mesh;
    const int N = m.vertex_count();

    StiffnessDecomposition out;
    out.mesh = mesh;
    out.basis = basis;

    std::map<int, std::vector<Eigen::Triplet<double>>> trip_q;
    std::vector<Eigen::Triplet<double>> trip0;
    trip0.reserve(9 * m.triangles.size());
    for (int t = 0; t < m.triangle_count(); ++t) {
        const auto& tr = m.triangles[t];
        const Vec2& p0 = m.vertices[tr[0]];
        const Vec2& p1 = m.vertices[tr[1]];
        const Vec2& p2 = m.vertices[tr[2]];
        double area2 = (p1 - p0).x() * (p2 - p0).y() - (p1 - p0).y() * (p2 - p0).x();
        if (!(area2 > 1e-30))
            throw NumericError("assemble: degenerate triangle " + std::to_string(t));
        double area = 0.5 * area2;
        Vec2 g[3];
        for (int i = 0; i < 3; ++i) {
            Vec2 e = m.vertices[tr[(i + 2) % 3]] - m.vertices[tr[(i + 1) % 3]];
            g[i] = Vec2(-e.y(), e.x()) / area2;
        }
        int region = m.region_of_triangle[t];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double v = area * g[i].dot(g[j]);
                trip0.emplace_back(tr[i], tr[j], v);
                if (region > 0) trip_q[region].emplace_back(tr[i], tr[j], v);
            }
    }
    out.K0.resize(N, N);
    out.K0.setFromTriplets(trip0.begin(), trip0.end());
    for (auto& [id, trip] : trip_q) {
        out.pixel_ids.push_back(id);
        Eigen::SparseMatrix<double> K(N, N);
        K.setFromTriplets(trip.begin(), trip.end());
        out.Kq.push_back(std::move(K));
    }

    // Boundary mass vector and analytically integrated pattern loads.
    const int nb = m.boundary_count();
    out.boundary_mass = Eigen::VectorXd::Zero(N);
    out.boundary_loads = Eigen::MatrixXd::Zero(N, basis.size());
    const double step = 2.0 * kPi / nb;
    for (int j = 0; j < nb; ++j) {
        int u = m.boundary_vertices[j];
        int v = m.boundary_vertices[(j + 1) % nb];
        double g1 = m.boundary_angles[j];
        double len = (m.vertices[v] - m.vertices[u]).norm();
        out.boundary_mass[u] += 0.5 * len;
        out.boundary_mass[v] += 0.5 * len;
        for (int p = 0; p < basis.size(); ++p) {
            CurrentPattern pat = basis.pattern(p);
            double a = pat.frequency * g1;
            double kap = pat.frequency * step / len;
            double ae = a + kap * len;
            double i_all, i_lin;  // int trig ds and int s trig ds over [0,len]
            if (pat.sine) {
                i_all = (std::cos(a) - std::cos(ae)) / kap;
                i_lin = (std::sin(ae) - std::sin(a)) / (kap * kap) - len * std::cos(ae) / kap;
            } else {
                i_all = (std::sin(ae) - std::sin(a)) / kap;
                i_lin = (std::cos(ae) - std::cos(a)) / (kap * kap) + len * std::sin(ae) / kap;
            }
            out.boundary_loads(u, p) += (i_all - i_lin / len) / kSqrtPi;
            out.boundary_loads(v, p) += (i_lin / len) / kSqrtPi;
        }
    }
    return out;
}

Eigen::MatrixXd difference_loads(const StiffnessDecomposition& decomp, int pixel_id) {
    int q = decomp.pixel_index(pixel_id);
    if (q < 0) throw ContractError("difference_loads: unknown pixel id");
    const DiskMesh& m = *decomp.mesh;
    const int N = m.vertex_count();
    const int T = decomp.basis.T;
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(N, 2 * T);

    // Complex moments int_T z^k dA = 2A h_k(z0,z1,z2)/((k+1)(k+2)) with h_k
    // the complete homogeneous symmetric polynomial (prefix recurrence), so
    // the polynomial integrand is integrated exactly for every frequency.
    std::vector<Cplx> g(T), h(T);
    for (int t = 0; t < m.triangle_count(); ++t) {
        if (m.region_of_triangle[t] != pixel_id) continue;
        const auto& tr = m.triangles[t];
        const Vec2& p0 = m.vertices[tr[0]];
        const Vec2& p1 = m.vertices[tr[1]];
        const Vec2& p2 = m.vertices[tr[2]];
        Cplx z0(p0.x(), p0.y()), z1(p1.x(), p1.y()), z2(p2.x(), p2.y());
        double area2 = (p1 - p0).x() * (p2 - p0).y() - (p1 - p0).y() * (p2 - p0).x();
        Vec2 grad[3];
        for (int i = 0; i < 3; ++i) {
            Vec2 e = m.vertices[tr[(i + 2) % 3]] - m.vertices[tr[(i + 1) % 3]];
            grad[i] = Vec2(-e.y(), e.x()) / area2;
        }
        g[0] = Cplx(1, 0);
        h[0] = Cplx(1, 0);
        Cplx z2p(1, 0);
        for (int k = 1; k < T; ++k) {
            z2p *= z2;
            g[k] = z1 * g[k - 1] + z2p;
            h[k] = z0 * h[k - 1] + g[k];
        }
        for (int p = 0; p < 2 * T; ++p) {
            CurrentPattern pat = decomp.basis.pattern(p);
            int k = pat.frequency - 1;
            Cplx mom = area2 * h[k] / static_cast<double>((k + 1) * (k + 2));
            Vec2 gint = pat.sine ? Vec2(mom.imag(), mom.real()) / kSqrtPi
                                 : Vec2(mom.real(), -mom.imag()) / kSqrtPi;
            for (int i = 0; i < 3; ++i) B(tr[i], p) -= grad[i].dot(gint);
        }
    }
    return B;
}

FemSolver::FemSolver(const StiffnessDecomposition& decomp, const Eigen::VectorXd& theta,
                     double tol)
    : decomp_(decomp), theta_(theta), tol_(tol) {
    for (int q = 0; q < theta.size(); ++q)
        if (!(1.0 + theta[q] > 0.0))
            throw ContractError("solver: conductivity 1 + theta must stay positive");
    system_ = decomp.stiffness(theta);
    const Eigen::VectorXd& c = decomp.boundary_mass;
    c_dot_one_ = c.sum();
    double scale = system_.diagonal().sum() / system_.rows() / c.squaredNorm();
    std::vector<int> support;
    for (int i = 0; i < c.size(); ++i)
        if (c[i] != 0.0) support.push_back(i);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(support.size() * support.size());
    for (int i : support)
        for (int j : support) trip.emplace_back(i, j, scale * c[i] * c[j]);
    Eigen::SparseMatrix<double> penalty(c.size(), c.size());
    penalty.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseMatrix<double> augmented = system_ + penalty;
    ldlt_.compute(augmented);
    if (ldlt_.info() != Eigen::Success)
        throw NumericError("solver: LDLT factorization failed");
}

Eigen::VectorXd FemSolver::solve(const Eigen::VectorXd& load) const {
    if (load.size() != system_.rows()) throw ContractError("solver: load size mismatch");
    double load_norm = load.norm();
    if (load_norm == 0.0) return Eigen::VectorXd::Zero(system_.rows());
    Eigen::VectorXd u = ldlt_.solve(load);
    const Eigen::VectorXd& c = decomp_.boundary_mass;
    // The multiplier absorbs the data imbalance; shift to exact zero mean.
    u -= (c.dot(u) / c_dot_one_) * Eigen::VectorXd::Ones(u.size());
    double mu = load.sum() / c_dot_one_;
    double res = (load - system_ * u - mu * c).norm() / load_norm;
    if (!(res <= tol_))
        throw NumericError("solver: residual " + std::to_string(res) +
                           " exceeds tolerance");
    return u;
}

NodalPotential solve_pattern(const StiffnessDecomposition& decomp,
                             const Eigen::VectorXd& theta, int pattern, double tol) {
    if (pattern < 0 || pattern >= decomp.basis.size())
        throw ContractError("solve_pattern: pattern index out of range");
    FemSolver solver(decomp, theta, tol);
    NodalPotential out;
    out.values = solver.solve(decomp.boundary_loads.col(pattern));
    out.pattern = pattern;
    out.theta = theta;
    return out;
}

Eigen::VectorXd boundary_trace(const DiskMesh& mesh, const Eigen::VectorXd& nodal) {
    Eigen::VectorXd tr(mesh.boundary_count());
    for (int j = 0; j < mesh.boundary_count(); ++j)
        tr[j] = nodal[mesh.boundary_vertices[j]];
    return tr;
}

Eigen::MatrixXd ntd_matrix(const StiffnessDecomposition& decomp,
                           const Eigen::VectorXd& theta, double tol) {
    const int n = decomp.basis.size();
    FemSolver solver(decomp, theta, tol);
    Eigen::MatrixXd L(n, n);
    for (int p = 0; p < n; ++p) {
        Eigen::VectorXd u = solver.solve(decomp.boundary_loads.col(p));
        L.col(p) = fourier_project(boundary_trace(*decomp.mesh, u), decomp.basis.T);
    }
    return L;
}

Eigen::MatrixXd ntd_difference_matrix(const StiffnessDecomposition& decomp,
                                      const Eigen::VectorXd& theta, double tol) {
    if (theta.size() != decomp.pixel_count())
        throw ContractError("ntd_difference_matrix: contrast vector length mismatch");
    const int n = decomp.basis.size();
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(decomp.mesh->vertex_count(), n);
    for (int q = 0; q < decomp.pixel_count(); ++q)
        if (theta[q] != 0.0)
            rhs += theta[q] * difference_loads(decomp, decomp.pixel_ids[q]);
    FemSolver solver(decomp, theta, tol);
    Eigen::MatrixXd L(n, n);
    for (int p = 0; p < n; ++p) {
        Eigen::VectorXd w = solver.solve(rhs.col(p));
        L.col(p) = fourier_project(boundary_trace(*decomp.mesh, w), decomp.basis.T);
    }
    return L;
}

}  // namespace seit
