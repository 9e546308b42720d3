#include "seit/factorization.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <numbers>

namespace seit {

namespace {
constexpr double kPi = std::numbers::pi;
const double kSqrtPi = std::sqrt(kPi);
}

DipoleTrace dipole_trace(const Vec2& z, const Vec2& d, int T) {
    if (T < 1) throw ContractError("dipole_trace: need T >= 1");
    if (z.norm() > 0.99)
        throw NumericError("dipole_trace: dipole too close to the boundary");
    if (d.norm() == 0.0) throw ContractError("dipole_trace: zero dipole moment");
    Vec2 dn = d / d.norm();

    // On |x| = 1 the trace expands as (1/pi) sum_t Re(conj(d) conj(z)^{t-1} x^t),
    // so the cos/sin amplitudes are Re and -Im of conj(d) conj(z)^{t-1}.
    DipoleTrace out;
    out.z = z;
    out.d = dn;
    out.coeffs.resize(2 * T);
    std::complex<double> zbar(z.x(), -z.y());
    std::complex<double> dbar(dn.x(), -dn.y());
    std::complex<double> w = dbar;  // conj(d) * conj(z)^{t-1}
    for (int t = 1; t <= T; ++t) {
        out.coeffs[2 * t - 2] = -w.imag() / kSqrtPi;  // sin(t gamma) pattern
        out.coeffs[2 * t - 1] = w.real() / kSqrtPi;   // cos(t gamma) pattern
        w *= zbar;
    }
    return out;
}

SvdTriplets svd_of(const Eigen::MatrixXd& L) {
    if (!L.allFinite()) throw ContractError("svd_of: non-finite entries");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(L, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return SvdTriplets{svd.singularValues(), svd.matrixU(), svd.matrixV()};
}

int select_cutoff(const Eigen::VectorXd& lambda, double error_estimate) {
    if (error_estimate < 0.0) throw ContractError("select_cutoff: negative error estimate");
    const int n = static_cast<int>(lambda.size());
    int tau = 0;
    for (int t = 0; t < n; ++t)
        if (lambda[t] >= error_estimate) tau = t + 1;
    return std::max(1, std::min(tau, n));
}

double indicator(const Eigen::VectorXd& F, const SvdTriplets& svd, int tau) {
    const int n = static_cast<int>(svd.lambda.size());
    if (tau < 1 || tau > n) throw ContractError("indicator: tau out of range");
    if (!(svd.lambda[0] > 0.0)) return 0.0;
    const double floor = 1e-14 * svd.lambda[0];  // regularization floor
    double num = 0.0, den = 0.0;
    for (int t = 0; t < tau; ++t) {
        if (svd.lambda[t] < floor) break;  // sorted: all later values are below too
        double proj = F.dot(svd.V.col(t));
        num += proj * proj;
        den += proj * proj / svd.lambda[t];
    }
    if (den == 0.0) return 0.0;  // all projections vanish
    return num / den;
}

IndicatorGrid scan(const Eigen::MatrixXd& L, const GridSpec& spec, int tau) {
    if (spec.n < 2) throw ContractError("scan: need at least a 2x2 grid");
    const int T = static_cast<int>(L.rows()) / 2;
    SvdTriplets svd = svd_of(L);
    IndicatorGrid grid;
    grid.n = spec.n;
    grid.clip = spec.clip;
    grid.tau = tau;
    grid.values = Eigen::MatrixXd::Zero(spec.n, spec.n);
    grid.inside.assign(static_cast<std::size_t>(spec.n) * spec.n, 0);
    grid.degenerate = !(svd.lambda[0] > 0.0);

    const Vec2 moments[3] = {Vec2(std::cos(2 * kPi / 3), std::sin(2 * kPi / 3)),
                             Vec2(std::cos(4 * kPi / 3), std::sin(4 * kPi / 3)),
                             Vec2(1.0, 0.0)};
    parallel_for(spec.n, [&](int iy) {
        for (int ix = 0; ix < spec.n; ++ix) {
            Vec2 p(grid.x(ix), grid.y(iy));
            if (p.norm() > spec.clip) continue;
            grid.inside[static_cast<std::size_t>(iy) * spec.n + ix] = 1;
            if (grid.degenerate) continue;
            double v = 0.0;
            for (const Vec2& d : moments)
                v += indicator(dipole_trace(p, d, T).coeffs, svd, tau);
            grid.values(iy, ix) = v;
        }
    });
    return grid;
}

void save_grid_csv(const std::string& path, const IndicatorGrid& grid) {
    std::ofstream out(path);
    if (!out) throw NumericError("cannot open grid file for writing: " + path);
    out << "x,y,value,inside\n";
    char buf[96];
    for (int iy = 0; iy < grid.n; ++iy)
        for (int ix = 0; ix < grid.n; ++ix) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%d\n", grid.x(ix),
                          grid.y(iy), grid.values(iy, ix),
                          grid.inside[static_cast<std::size_t>(iy) * grid.n + ix]);
            out << buf;
        }
    if (!out) throw NumericError("failed writing grid file: " + path);
}

void save_grid_pgm(const std::string& path, const IndicatorGrid& grid) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw NumericError("cannot open image file for writing: " + path);
    double vmax = grid.values.maxCoeff();
    out << "P5\n# seit indicator grid, values scaled by max " << vmax << "\n"
        << grid.n << " " << grid.n << "\n255\n";
    // Top row = largest y.
    for (int iy = grid.n - 1; iy >= 0; --iy)
        for (int ix = 0; ix < grid.n; ++ix) {
            double v = vmax > 0.0 ? grid.values(iy, ix) / vmax : 0.0;
            unsigned char byte =
                static_cast<unsigned char>(std::lround(255.0 * std::clamp(v, 0.0, 1.0)));
            out.put(static_cast<char>(byte));
        }
    if (!out) throw NumericError("failed writing image file: " + path);
}

}  // namespace seit
