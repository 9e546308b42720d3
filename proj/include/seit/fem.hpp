#ifndef SEIT_FEM_HPP
#define SEIT_FEM_HPP

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <memory>
#include <vector>

#include "seit/geometry.hpp"

namespace seit {

// Fourier current patterns: pattern 2t-1 (1-based) is sin(t*gamma)/sqrt(pi),
// pattern 2t is cos(t*gamma)/sqrt(pi). Indices here are 0-based.
struct CurrentPattern {
    int frequency = 1;
    bool sine = true;
};

struct CurrentBasis {
    int T = 50;
    int size() const { return 2 * T; }
    CurrentPattern pattern(int p) const { return {p / 2 + 1, p % 2 == 0}; }
};

double current_pattern_value(const CurrentPattern& pat, double gamma);

// Background potential u0 = r^t trig(t gamma)/(t sqrt(pi)) and its gradient,
// evaluated through complex powers of z = x + iy.
double background_potential(const CurrentPattern& pat, const Vec2& p);
Vec2 background_potential_gradient(const CurrentPattern& pat, const Vec2& p);

// Affine stiffness split K(theta) = K0 + sum_q theta_q Kq together with the
// boundary mass vector (zero-mean constraint) and the per-pattern loads.
struct StiffnessDecomposition {
    std::shared_ptr<const DiskMesh> mesh;
    CurrentBasis basis;
    Eigen::SparseMatrix<double> K0;
    std::vector<int> pixel_ids;  // sorted region ids present in the mesh
    std::vector<Eigen::SparseMatrix<double>> Kq;
    Eigen::VectorXd boundary_mass;
    Eigen::MatrixXd boundary_loads;  // N x 2T

    int pixel_count() const { return static_cast<int>(pixel_ids.size()); }
    int pixel_index(int id) const;  // -1 if unknown
    // K(theta) without the mean constraint.
    Eigen::SparseMatrix<double> stiffness(const Eigen::VectorXd& theta) const;
};

StiffnessDecomposition assemble(std::shared_ptr<const DiskMesh> mesh,
                                const CurrentBasis& basis);

// Difference-problem right-hand sides b_{q,t} = -int_{pixel q} grad u0 . grad phi
// for all patterns t; exact integration of the polynomial integrand.
Eigen::MatrixXd difference_loads(const StiffnessDecomposition& decomp, int pixel_id);

struct NodalPotential {
    Eigen::VectorXd values;
    int pattern = -1;  // -1 when the load is not one of the basis patterns
    Eigen::VectorXd theta;
};

// Direct solver for the mean-constrained conductivity system. The zero-mean
// condition is enforced with a scalar multiplier on the boundary mass vector,
// realized as the rank-one augmented SPD system K + s c c^T.
class FemSolver {
public:
    FemSolver(const StiffnessDecomposition& decomp, const Eigen::VectorXd& theta,
              double tol = 1e-10);

    // Solves K(theta) u + mu c = load, c^T u = 0; throws NumericError if the
    // relative residual exceeds tol.
    Eigen::VectorXd solve(const Eigen::VectorXd& load) const;

    const Eigen::VectorXd& theta() const { return theta_; }

private:
    const StiffnessDecomposition& decomp_;
    Eigen::VectorXd theta_;
    double tol_;
    Eigen::SparseMatrix<double> system_;  // K(theta), without penalty
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
    double c_dot_one_ = 0.0;
};

NodalPotential solve_pattern(const StiffnessDecomposition& decomp,
                             const Eigen::VectorXd& theta, int pattern,
                             double tol = 1e-10);

// Nodal values at the boundary vertices in angular order.
Eigen::VectorXd boundary_trace(const DiskMesh& mesh, const Eigen::VectorXd& nodal);

// Full NtD matrix in the Fourier basis (FFT over the equiangular boundary).
Eigen::MatrixXd ntd_matrix(const StiffnessDecomposition& decomp,
                           const Eigen::VectorXd& theta, double tol = 1e-10);

// Difference route: Fourier matrix of Lambda(sigma) - Lambda(1) computed from
// the difference potential with analytic background gradients on the right.
Eigen::MatrixXd ntd_difference_matrix(const StiffnessDecomposition& decomp,
                                      const Eigen::VectorXd& theta, double tol = 1e-10);

}  // namespace seit

#endif
