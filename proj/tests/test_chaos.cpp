#include "doctest.h"

#include <array>
#include <cmath>

#include "seit/chaos.hpp"

using namespace seit;

namespace {
PixelAnomaly anomaly_with(const std::vector<std::pair<double, double>>& iv) {
    PixelAnomaly an;
    int id = 1;
    for (auto [a, b] : iv) {
        PixelRegion px;
        px.id = id;
        px.shape = DiskShape{Vec2(0.05 * id, 0.0), 0.02};
        px.contrast_lo = a;
        px.contrast_hi = b;
        an.pixels.push_back(px);
        ++id;
    }
    return an;
}

// 32-point Gauss-Legendre nodes/weights on [-1,1], generated by Newton on
// the Legendre polynomial; used as the quadrature oracle.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < n; ++i) {
        double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int d = 1; d < n; ++d) {
                double p2 = ((2 * d + 1) * t * p1 - d * p0) / (d + 1);
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (t * p1 - p0) / (t * t - 1.0);
            double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) {
                double p0b = 1.0, p1b = t;
                for (int d = 1; d < n; ++d) {
                    double p2 = ((2 * d + 1) * t * p1b - d * p0b) / (d + 1);
                    p0b = p1b;
                    p1b = p2;
                }
                dp = n * (t * p1b - p0b) / (t * t - 1.0);
                break;
            }
        }
        double p0 = 1.0, p1 = t;
        for (int d = 1; d < n; ++d) {
            double p2 = ((2 * d + 1) * t * p1 - d * p0) / (d + 1);
            p0 = p1;
            p1 = p2;
        }
        double dp = n * (t * p1 - p0) / (t * t - 1.0);
        x[i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
}
}  // namespace

TEST_CASE("chaos dimension M = (Q+m)!/(Q! m!)") {
    CHECK(build_basis(anomaly_with({{0, 1}, {0, 1}, {0, 1}}), 3).size() == 20);
    CHECK(build_basis(anomaly_with(std::vector<std::pair<double, double>>(9, {0, 1})), 3)
              .size() == 220);
    ChaosBasis b = build_basis(anomaly_with({{0, 1}}), 0);
    CHECK(b.size() == 1);
    Eigen::VectorXd th(1);
    th << 0.73;
    CHECK(chaos_eval(b, 0, th) == 1.0);  // psi_0 == 1
}

TEST_CASE("graded ordering with the zero index first") {
    ChaosBasis b = build_basis(anomaly_with({{0, 1}, {0, 1}}), 2);
    REQUIRE(b.size() == 6);
    CHECK(b.indices[0] == std::vector<int>{0, 0});
    int prev_deg = 0;
    for (const auto& idx : b.indices) {
        int deg = idx[0] + idx[1];
        CHECK(deg >= prev_deg);
        prev_deg = deg;
    }
}

TEST_CASE("orthonormality under the product uniform measure") {
    PixelAnomaly an = anomaly_with({{-0.5, 2.5}, {8.0, 10.0}});
    ChaosBasis basis = build_basis(an, 3);
    std::vector<double> x, w;
    gauss_legendre(16, x, w);
    for (int i = 0; i < basis.size(); ++i) {
        for (int j = i; j < basis.size(); ++j) {
            double acc = 0.0;
            for (std::size_t n1 = 0; n1 < x.size(); ++n1)
                for (std::size_t n2 = 0; n2 < x.size(); ++n2) {
                    Eigen::VectorXd th(2);
                    th << basis.mid[0] + basis.half[0] * x[n1],
                        basis.mid[1] + basis.half[1] * x[n2];
                    acc += 0.25 * w[n1] * w[n2] * chaos_eval(basis, i, th) *
                           chaos_eval(basis, j, th);
                }
            CHECK(acc == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12).scale(1.0));
        }
    }
}

TEST_CASE("coupling matrix entries") {
    // Q=1 on [-1,1]: E[theta] = 0 and E[theta psi_0 psi_1] = 1/sqrt(3).
    ChaosBasis b1 = build_basis(anomaly_with({{-1.0 + 1e-14, 1.0}}), 3);
    b1.mid[0] = 0.0;  // exact symmetric interval for the algebraic check
    b1.half[0] = 1.0;
    CouplingMatrices c1 = coupling_matrices(b1);
    Eigen::MatrixXd G = Eigen::MatrixXd(c1.G[0]);
    CHECK(G(0, 0) == 0.0);
    CHECK(G(0, 1) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
    CHECK(G == G.transpose());

    // Quadrature oracle for E[theta psi_i psi_j] on a general interval.
    PixelAnomaly an = anomaly_with({{-0.5, 2.5}});
    ChaosBasis b = build_basis(an, 4);
    CouplingMatrices c = coupling_matrices(b);
    Eigen::MatrixXd Gq = Eigen::MatrixXd(c.G[0]);
    CHECK(Gq(0, 0) == doctest::Approx(1.0).epsilon(1e-15));  // (a+b)/2
    std::vector<double> x, w;
    gauss_legendre(24, x, w);
    for (int i = 0; i < b.size(); ++i)
        for (int j = 0; j < b.size(); ++j) {
            double acc = 0.0;
            for (std::size_t n = 0; n < x.size(); ++n) {
                Eigen::VectorXd th(1);
                th << b.mid[0] + b.half[0] * x[n];
                acc += 0.5 * w[n] * th[0] * chaos_eval(b, i, th) * chaos_eval(b, j, th);
            }
            CHECK(Gq(i, j) == doctest::Approx(acc).epsilon(1e-12).scale(1.0));
        }
}

TEST_CASE("coupling sparsity pattern") {
    PixelAnomaly an = anomaly_with({{0.0, 2.0}, {1.0, 3.0}, {-0.5, 0.5}});
    ChaosBasis b = build_basis(an, 3);
    CouplingMatrices c = coupling_matrices(b);
    for (int q = 0; q < 3; ++q) {
        Eigen::MatrixXd G = Eigen::MatrixXd(c.G[q]);
        for (int i = 0; i < b.size(); ++i)
            for (int j = 0; j < b.size(); ++j) {
                if (G(i, j) == 0.0) continue;
                for (int r = 0; r < 3; ++r) {
                    int d = std::abs(b.indices[i][r] - b.indices[j][r]);
                    CHECK(d <= (r == q ? 1 : 0));
                }
            }
    }
}

TEST_CASE("degenerate interval collapses the coupling to a*I") {
    PixelAnomaly an = anomaly_with({{1.5, 1.5}, {0.0, 1.0}});
    ChaosBasis b = build_basis(an, 2);
    CouplingMatrices c = coupling_matrices(b);
    Eigen::MatrixXd G = Eigen::MatrixXd(c.G[0]);
    CHECK((G - 1.5 * Eigen::MatrixXd::Identity(b.size(), b.size())).norm() == 0.0);
}
