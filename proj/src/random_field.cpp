#include "seit/random_field.hpp"

#include <cmath>

namespace seit {

Eigen::VectorXd expected_sigma(const PixelAnomaly& anomaly) {
    Eigen::VectorXd e(anomaly.count());
    for (int q = 0; q < anomaly.count(); ++q) {
        const PixelRegion& px = anomaly.pixels[q];
        e[q] = 1.0 + 0.5 * (px.contrast_lo + px.contrast_hi);
    }
    return e;
}

Eigen::VectorXd expected_inverse_sigma(const PixelAnomaly& anomaly) {
    Eigen::VectorXd e(anomaly.count());
    for (int q = 0; q < anomaly.count(); ++q) {
        double a = anomaly.pixels[q].contrast_lo;
        double b = anomaly.pixels[q].contrast_hi;
        if (!(a > -1.0) || !(a <= b))
            throw ContractError("expected_inverse_sigma: invalid contrast interval");
        if (b - a < 1e-12)
            e[q] = 1.0 / (1.0 + a);
        else
            e[q] = std::log1p((b - a) / (1.0 + a)) / (b - a);  // cancellation-free
    }
    return e;
}

ContrastClassification classify_contrast(const PixelAnomaly& anomaly) {
    if (anomaly.count() == 0)
        throw ContractError("classify_contrast: anomaly has no pixels");
    Eigen::VectorXd inv = expected_inverse_sigma(anomaly);
    Eigen::VectorXd dir = expected_sigma(anomaly);
    double harm_min = (1.0 / inv.array()).minCoeff();  // min_q E(sigma^-1)^-1
    double dir_max = dir.maxCoeff();
    ContrastClassification out;
    if (harm_min - 1.0 > 0.0) {
        out.kind = ContrastCase::case_a;
        out.alpha_max = harm_min - 1.0;
    } else if (1.0 - dir_max > 0.0) {
        out.kind = ContrastCase::case_b;
        out.alpha_max = 1.0 - dir_max;
    }
    return out;
}

Eigen::MatrixXd sample_contrasts(const PixelAnomaly& anomaly, std::uint64_t seed, int n) {
    if (n < 1) throw ContractError("sample_contrasts: need n >= 1");
    Eigen::MatrixXd draws(n, anomaly.count());
    UniformSampler rng(seed);
    for (int q = 0; q < anomaly.count(); ++q) {
        double a = anomaly.pixels[q].contrast_lo;
        double b = anomaly.pixels[q].contrast_hi;
        for (int s = 0; s < n; ++s) draws(s, q) = rng.next(a, b);
    }
    return draws;
}

}  // namespace seit
