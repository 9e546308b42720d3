#include "doctest.h"

#include <cmath>

#include "seit/random_field.hpp"

using namespace seit;

namespace {
PixelAnomaly single(double a, double b) {
    PixelRegion px;
    px.id = 1;
    px.shape = DiskShape{Vec2(0.3, 0.0), 0.2};
    px.contrast_lo = a;
    px.contrast_hi = b;
    return PixelAnomaly{{px}};
}

PixelAnomaly with_intervals(const std::vector<std::pair<double, double>>& iv) {
    PixelAnomaly an;
    int id = 1;
    for (auto [a, b] : iv) {
        PixelRegion px;
        px.id = id;
        px.shape = DiskShape{Vec2(-0.5 + 0.3 * id, 0.0), 0.1};
        px.contrast_lo = a;
        px.contrast_hi = b;
        an.pixels.push_back(px);
        ++id;
    }
    return an;
}
}  // namespace

TEST_CASE("expected sigma: midpoint formula") {
    CHECK(expected_sigma(single(8.0, 10.0))[0] == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(expected_sigma(single(0.7, 0.7))[0] == doctest::Approx(1.7).epsilon(1e-15));
    CHECK(expected_sigma(single(-0.5, 2.5))[0] == doctest::Approx(2.0).epsilon(1e-15));

    // Monte Carlo oracle, 1e6 draws, 3-sigma band.
    PixelAnomaly an = single(-0.5, 2.5);
    const int n = 1000000;
    Eigen::MatrixXd th = sample_contrasts(an, 99, n);
    double mean = th.col(0).mean();
    double band = 3.0 * 3.0 / std::sqrt(12.0) / 1000.0;  // 3 sdev of mean, width 3
    CHECK(std::abs(1.0 + mean - 2.0) < band);
}

TEST_CASE("expected inverse sigma: log formula and paper statistics") {
    // Test 1 interval: E(sigma^-1)^-1 = 2/log(11/9) = 9.9666..., i.e. ~9.97.
    double inv1 = expected_inverse_sigma(single(8.0, 10.0))[0];
    CHECK(1.0 / inv1 == doctest::Approx(2.0 / std::log(11.0 / 9.0)).epsilon(1e-14));
    CHECK(std::round(100.0 / inv1) / 100.0 == doctest::Approx(9.97));
    // Test 4 interval: 3/log 7 = 1.5417 ~ 1.54.
    double inv4 = expected_inverse_sigma(single(-0.5, 2.5))[0];
    CHECK(1.0 / inv4 == doctest::Approx(3.0 / std::log(7.0)).epsilon(1e-14));
    CHECK(std::round(100.0 / inv4) / 100.0 == doctest::Approx(1.54));
    // Degenerate interval.
    CHECK(1.0 / expected_inverse_sigma(single(0.7, 0.7))[0] ==
          doctest::Approx(1.7).epsilon(1e-15));
}

TEST_CASE("expected inverse sigma is continuous at a == b") {
    // The true Taylor gap is w/(2(1+a)) relative, so 1e-9 agreement holds in
    // the regime approaching the 1e-12 limit-branch threshold.
    for (double a : {-0.9, -0.2, 0.0, 1.3, 8.0}) {
        double limit = 1.0 / (1.0 + a);
        for (double w : {1e-13, 1e-12, 2e-12, 1e-11}) {
            double v = expected_inverse_sigma(single(a, a + w))[0];
            CHECK(std::abs(v - limit) <= 1e-9 * limit);
        }
    }
}

TEST_CASE("both expectations increase in the interval endpoints") {
    const double h = 1e-6;
    for (auto [a, b] : std::vector<std::pair<double, double>>{{-0.6, 0.4}, {2.0, 5.0}}) {
        double base_s = expected_sigma(single(a, b))[0];
        double base_i = 1.0 / expected_inverse_sigma(single(a, b))[0];
        CHECK(expected_sigma(single(a + h, b))[0] > base_s);
        CHECK(expected_sigma(single(a, b + h))[0] > base_s);
        CHECK(1.0 / expected_inverse_sigma(single(a + h, b))[0] > base_i);
        CHECK(1.0 / expected_inverse_sigma(single(a, b + h))[0] > base_i);
    }
}

TEST_CASE("Jensen: E(sigma) >= E(sigma^-1)^-1 with equality iff degenerate") {
    UniformSampler rng(7);
    for (int k = 0; k < 200; ++k) {
        double a = rng.next(-0.95, 4.0);
        double b = a + rng.next(0.0, 5.0);
        PixelAnomaly an = single(a, b);
        double direct = expected_sigma(an)[0];
        double harmonic = 1.0 / expected_inverse_sigma(an)[0];
        CHECK(direct >= harmonic - 1e-12 * std::abs(direct));
        if (b - a > 1e-6) CHECK(direct > harmonic);
    }
    PixelAnomaly deg = single(2.0, 2.0);
    CHECK(expected_sigma(deg)[0] ==
          doctest::Approx(1.0 / expected_inverse_sigma(deg)[0]).epsilon(1e-14));
}

TEST_CASE("contrast classification") {
    ContrastClassification c1 = classify_contrast(single(8.0, 10.0));
    CHECK(c1.kind == ContrastCase::case_a);
    CHECK(c1.alpha_max == doctest::Approx(2.0 / std::log(11.0 / 9.0) - 1.0).epsilon(1e-14));
    CHECK(c1.alpha_max == doctest::Approx(8.9666).epsilon(1e-4));

    ContrastClassification c2 = classify_contrast(
        with_intervals({{-0.99, -0.41}, {-0.99, -0.01}, {-0.99, 0.39}}));
    CHECK(c2.kind == ContrastCase::case_b);
    CHECK(c2.alpha_max == doctest::Approx(0.3).epsilon(1e-14));

    CHECK(classify_contrast(single(-0.5, 0.5)).kind == ContrastCase::neither);
    CHECK(classify_contrast(single(-0.5, 0.5)).alpha_max == 0.0);

    CHECK_THROWS_AS(classify_contrast(PixelAnomaly{}), ContractError);
}

TEST_CASE("contrast sampling: determinism, range, degenerate intervals, CLT") {
    PixelAnomaly an = with_intervals({{-0.5, 2.5}, {1.0, 1.0}, {0.0, 4.0}});
    Eigen::MatrixXd s1 = sample_contrasts(an, 1234, 500);
    Eigen::MatrixXd s2 = sample_contrasts(an, 1234, 500);
    CHECK((s1 - s2).lpNorm<Eigen::Infinity>() == 0.0);
    Eigen::MatrixXd s3 = sample_contrasts(an, 1235, 500);
    CHECK((s1 - s3).lpNorm<Eigen::Infinity>() != 0.0);

    for (int s = 0; s < s1.rows(); ++s) {
        CHECK(s1(s, 1) == 1.0);  // a == b draws the endpoint exactly
        CHECK(s1(s, 0) >= -0.5);
        CHECK(s1(s, 0) <= 2.5);
    }

    const int n = 1000000;
    Eigen::MatrixXd big = sample_contrasts(an, 42, n);
    for (int q : {0, 2}) {
        double width = an.pixels[q].contrast_hi - an.pixels[q].contrast_lo;
        double mid = 0.5 * (an.pixels[q].contrast_hi + an.pixels[q].contrast_lo);
        double band = 3.0 * width / std::sqrt(12.0) / 1000.0;
        CHECK(std::abs(big.col(q).mean() - mid) < band);
    }
}
