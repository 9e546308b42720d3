#ifndef SEIT_CHAOS_HPP
#define SEIT_CHAOS_HPP

#include <Eigen/Core>
#include <Eigen/Sparse>
#include <vector>

#include "seit/random_field.hpp"

namespace seit {

// Multivariate Legendre chaos: Q-variate polynomials of total degree <= m,
// orthonormal under the product uniform measure on prod_q [a_q, b_q].
// Multi-indices are graded-lexicographically ordered; index 0 is all-zeros,
// so psi_0 == 1 and expectations are index-0 coefficients.
struct ChaosBasis {
    int Q = 0;
    int degree = 0;
    std::vector<std::vector<int>> indices;
    Eigen::VectorXd mid, half;  // theta_q = mid_q + half_q * xi, xi in [-1,1]

    int size() const { return static_cast<int>(indices.size()); }
};

ChaosBasis build_basis(const PixelAnomaly& anomaly, int m);

// psi_i evaluated at a contrast vector (orthonormal scaled Legendre product).
double chaos_eval(const ChaosBasis& basis, int i, const Eigen::VectorXd& theta);

// G^(q)_{ij} = E[theta_q psi_i psi_j]; symmetric, and nonzero only when the
// multi-indices agree off q and differ by at most 1 in q.
struct CouplingMatrices {
    std::vector<Eigen::SparseMatrix<double>> G;
};

CouplingMatrices coupling_matrices(const ChaosBasis& basis);

}  // namespace seit

#endif
