#ifndef SEIT_RANDOM_FIELD_HPP
#define SEIT_RANDOM_FIELD_HPP

#include <Eigen/Core>
#include <cstdint>

#include "seit/geometry.hpp"

namespace seit {

// Anomaly with pixelwise uniform random contrasts:
// sigma(theta) = 1 + sum_q theta_q chi_q, theta_q ~ U[a_q, b_q].
struct PixelAnomaly {
    std::vector<PixelRegion> pixels;
    int count() const { return static_cast<int>(pixels.size()); }
};

// E(sigma) inside each pixel: 1 + (a_q + b_q)/2.
Eigen::VectorXd expected_sigma(const PixelAnomaly& anomaly);

// E(sigma^{-1}) inside each pixel: log((1+b)/(1+a))/(b-a), with the
// degenerate limit 1/(1+a) for widths below 1e-12.
Eigen::VectorXd expected_inverse_sigma(const PixelAnomaly& anomaly);

enum class ContrastCase { case_a, case_b, neither };

struct ContrastClassification {
    ContrastCase kind = ContrastCase::neither;
    double alpha_max = 0.0;  // largest admissible alpha, 0 if neither
};

// Detects which of the two definiteness conditions holds and the tightest
// admissible alpha: (a) min_q E(sigma^-1)^-1 >= 1 + alpha, or
// (b) max_q E(sigma) <= 1 - alpha.
ContrastClassification classify_contrast(const PixelAnomaly& anomaly);

// n independent contrast vectors, row s = theta^(s). Deterministic given the
// seed; the stream is drawn pixel-major, sample-minor: all n draws of pixel 1
// first, then pixel 2, and so on.
Eigen::MatrixXd sample_contrasts(const PixelAnomaly& anomaly, std::uint64_t seed, int n);

}  // namespace seit

#endif
