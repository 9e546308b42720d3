#ifndef SEIT_MONOTONICITY_HPP
#define SEIT_MONOTONICITY_HPP

#include <Eigen/Core>

#include "seit/factorization.hpp"
#include "seit/random_field.hpp"

namespace seit {

struct TestBall {
    Vec2 center = Vec2::Zero();
    double radius = 0.0;
};

// Gauss order that integrates the degree-(2T-2) polynomial integrand of the
// sensitivity quadratic form to roundoff in polar coordinates.
int sensitivity_quad_order(int T);

// Discretization of Lambda'(1)chi_B through its quadratic form:
// S_B[s][t] = -int_B grad u0^{g_s} . grad u0^{g_t} dx, symmetric negative
// semidefinite. Tensor Gauss rule in polar coordinates around the ball
// center; quad_order 0 picks sensitivity_quad_order(T).
Eigen::MatrixXd sensitivity_matrix(const TestBall& ball, int T, int quad_order = 0);

struct MonotonicityDecision {
    TestBall ball;
    ContrastCase kind = ContrastCase::neither;
    double beta = 0.0;
    double eigenvalue = 0.0;  // smallest relevant eigenvalue of the test matrix
    bool pass = false;
};

// Linearized test (sign conventions: L ~ E(Lambda(sigma)) - Lambda(1) and
// S_B <= 0):
//   case (a), beta in (0, alpha/(1+alpha)]: pass iff
//       lambda_min(sym(beta S_B - L)) >= -eps;
//   case (b), beta in (0, alpha): pass iff
//       lambda_min(sym(L + beta S_B)) >= -eps.
MonotonicityDecision linearized_test(const Eigen::MatrixXd& L, const TestBall& ball,
                                     ContrastCase kind, double alpha, double beta,
                                     double eps, int quad_order = 32);

// Nonlinear test: Lambda(1 +- alpha chi_B) - Lambda(1) is simulated on a
// fresh mesh resolving the ball as a temporary pixel and compared with L in
// the semidefinite order at tolerance eps.
MonotonicityDecision nonlinear_test(const TestBall& ball, ContrastCase kind,
                                    double alpha, const Eigen::MatrixXd& L, double eps,
                                    int mesh_level = 2);

struct BallLattice {
    int n = 41;           // lattice points per axis over [-1,1]
    double clip = 0.9;    // keep centers with |c| <= clip
    double radius = 0.05;
};

// Union of all passing balls from the linearized test, rasterized as a
// boolean mask on the indicator grid.
IndicatorGrid reconstruct_mask(const Eigen::MatrixXd& L, const BallLattice& lattice,
                               ContrastCase kind, double alpha, double beta, double eps,
                               const GridSpec& grid_spec = {});

}  // namespace seit

#endif
