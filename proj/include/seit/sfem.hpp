#ifndef SEIT_SFEM_HPP
#define SEIT_SFEM_HPP

#include <Eigen/SparseCholesky>
#include <cstdint>
#include <vector>

#include "seit/chaos.hpp"
#include "seit/fem.hpp"
#include "seit/ntd.hpp"

namespace seit {

struct SfemSolution {
    Eigen::MatrixXd coeffs;  // N x M chaos coefficient blocks, column i = w_i
    int pattern = 0;
    int chaos_degree = 0;
    int iterations = 0;
    double residual = 0.0;
};

// Stochastic Galerkin solver for the difference-potential problem. The block
// operator A = I (x) K0 + sum_q G^q (x) K_q is applied matrix-free; the
// Kronecker product is never materialized. Blocks are preconditioned by the
// mean-contrast stiffness K(E(theta)) (one LDLT, reused for every block and
// pattern). Zero boundary mean is enforced per block as in the deterministic
// solver.
class SfemSolver {
public:
    SfemSolver(const StiffnessDecomposition& decomp, const PixelAnomaly& anomaly,
               const ChaosBasis& basis, double tol = 1e-8);

    SfemSolution solve(int pattern) const;

    // E(Lambda(sigma)) - Lambda(1) over all patterns: column t is the Fourier
    // projection of the expectation trace of pattern t.
    NtDDifferenceMatrix expectation_matrix() const;

    const ChaosBasis& basis() const { return basis_; }

private:
    const StiffnessDecomposition& decomp_;
    ChaosBasis basis_;
    CouplingMatrices coupling_;
    std::vector<Eigen::MatrixXd> pixel_loads_;  // b_q for all patterns, per pixel
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> precond_;
    double tol_;
    double penalty_scale_ = 0.0;

    Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
    friend Eigen::MatrixXd sfem_apply_for_test(const SfemSolver&, const Eigen::MatrixXd&);
};

SfemSolution solve_sfem_difference(const StiffnessDecomposition& decomp,
                                   const PixelAnomaly& anomaly, const ChaosBasis& basis,
                                   int pattern, double tol = 1e-8);

// Boundary values of E(w^{g_t}|dD): the index-0 chaos coefficient trace.
Eigen::VectorXd expectation_trace(const SfemSolution& sol, const DiskMesh& mesh);

NtDDifferenceMatrix sfem_expectation_matrix(const StiffnessDecomposition& decomp,
                                            const PixelAnomaly& anomaly,
                                            const ChaosBasis& basis, double tol = 1e-8);

struct MonteCarloExpectation {
    NtDDifferenceMatrix matrix;
    Eigen::MatrixXd standard_error;  // per-entry standard error of the mean
    int samples = 0;
};

// Sample-average oracle for the same expectation: per sample one deterministic
// difference solve over all patterns. Reduction is chunked in fixed order, so
// results are bit-identical for a given seed regardless of the thread count.
MonteCarloExpectation monte_carlo_expectation(const StiffnessDecomposition& decomp,
                                              const PixelAnomaly& anomaly, int n,
                                              std::uint64_t seed, double tol = 1e-10);

// Exposed for the block-operator test oracle.
Eigen::MatrixXd sfem_apply_for_test(const SfemSolver& solver, const Eigen::MatrixXd& x);

}  // namespace seit

#endif
