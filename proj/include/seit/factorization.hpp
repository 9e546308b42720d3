#ifndef SEIT_FACTORIZATION_HPP
#define SEIT_FACTORIZATION_HPP

#include <Eigen/Core>
#include <string>
#include <vector>

#include "seit/common.hpp"

namespace seit {

// Fourier coefficients of the boundary trace of the unit-disk dipole
// potential Phi_{z,d} (zero Neumann data, zero boundary mean).
struct DipoleTrace {
    Vec2 z = Vec2::Zero();
    Vec2 d = Vec2::UnitX();
    Eigen::VectorXd coeffs;  // 2T entries in the sqrt(pi)-normalized basis
};

DipoleTrace dipole_trace(const Vec2& z, const Vec2& d, int T);

struct SvdTriplets {
    Eigen::VectorXd lambda;  // singular values, decreasing
    Eigen::MatrixXd U, V;    // L V = U diag(lambda)
};

SvdTriplets svd_of(const Eigen::MatrixXd& L);

// tau = max { t : lambda_t >= error_estimate }, clamped to [1, 2T].
int select_cutoff(const Eigen::VectorXd& lambda, double error_estimate);

// Picard quotient sum (F.v_t)^2 / sum (F.v_t)^2/lambda_t over t <= tau.
// Singular values below 1e-14*lambda_1 are excluded from both sums.
double indicator(const Eigen::VectorXd& F, const SvdTriplets& svd, int tau);

struct GridSpec {
    int n = 101;         // lattice points per axis over [-1,1]
    double clip = 0.95;  // evaluate only where |z| <= clip
};

// Regular lattice with values and an inside flag per point.
struct IndicatorGrid {
    int n = 0;
    double clip = 0.0;
    Eigen::MatrixXd values;                  // (iy, ix), y and x ascending
    std::vector<std::uint8_t> inside;        // row-major (iy * n + ix)
    int tau = 0;
    bool degenerate = false;                 // all-zero input matrix

    double x(int ix) const { return -1.0 + 2.0 * ix / (n - 1); }
    double y(int iy) const { return -1.0 + 2.0 * iy / (n - 1); }
};

// Summed indicator over the three dipole moments d_r = (cos(2 pi r/3),
// sin(2 pi r/3)), r = 1,2,3, evaluated at every lattice point inside the clip
// radius.
IndicatorGrid scan(const Eigen::MatrixXd& L, const GridSpec& spec, int tau);

// CSV ("x,y,value,inside") and 8-bit PGM (row-major, scaled by the grid max,
// top row = largest y) exports.
void save_grid_csv(const std::string& path, const IndicatorGrid& grid);
void save_grid_pgm(const std::string& path, const IndicatorGrid& grid);

}  // namespace seit

#endif
