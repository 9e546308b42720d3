#ifndef SEIT_NTD_HPP
#define SEIT_NTD_HPP

#include <Eigen/Core>
#include <cstdint>
#include <string>

#include "seit/common.hpp"

namespace seit {

// Discrete measurement operator L ~ E(Lambda(sigma)) - Lambda(1) in the
// Fourier current basis.
struct NtDDifferenceMatrix {
    Eigen::MatrixXd L;       // 2T x 2T
    int T = 0;
    std::string provenance;  // "sfem", "monte-carlo", "deterministic", ...
    double noise_level = 0.0;
    std::uint64_t noise_seed = 0;
};

// Coefficients of a boundary trace sampled at n equiangular boundary points
// (angle 2*pi*j/n) with respect to the sqrt(pi)-normalized Fourier basis;
// trigonometric interpolation evaluated by FFT. Requires n >= 4T.
Eigen::VectorXd fourier_project(const Eigen::VectorXd& trace, int T);

// Columns of `traces` are per-pattern boundary traces.
NtDDifferenceMatrix assemble_L(const Eigen::MatrixXd& traces, int T,
                               const std::string& provenance);

// Largest singular value to relative accuracy 1e-10 (subspace iteration).
double spectral_norm(const Eigen::MatrixXd& M);

// L_eps = L + level * ||L||_2 * E / ||E||_2 with E uniform on [-1,1],
// drawn row-major from the seed. E is not symmetrized.
NtDDifferenceMatrix add_noise(const NtDDifferenceMatrix& L, double level,
                              std::uint64_t seed);

// Plain-text "ntd-diff v1" interchange format.
void save_ntd(const std::string& path, const NtDDifferenceMatrix& m);
NtDDifferenceMatrix load_ntd(const std::string& path);

}  // namespace seit

#endif
