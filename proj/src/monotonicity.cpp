#include "seit/monotonicity.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <vector>

#include "seit/fem.hpp"

namespace seit {

namespace {
constexpr double kPi = std::numbers::pi;

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < n; ++i) {
        double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 64; ++it) {
            double p0 = 1.0, p1 = t;
            for (int d = 1; d < n; ++d) {
                double p2 = ((2 * d + 1) * t * p1 - d * p0) / (d + 1);
                p0 = p1;
                p1 = p2;
            }
            dp = n * (t * p1 - p0) / (t * t - 1.0);
            double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        x[i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
}

double lambda_min_sym(const Eigen::MatrixXd& M) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()));
    return es.eigenvalues().minCoeff();
}

void check_ball(const TestBall& ball) {
    if (!(ball.radius > 0.0)) throw ContractError("test ball needs positive radius");
    if (ball.center.norm() + ball.radius >= 1.0)
        throw ContractError("test ball must stay inside the unit disk");
}
}  // namespace

int sensitivity_quad_order(int T) {
    return std::max(32, (5 * T) / 4 + 8);
}

Eigen::MatrixXd sensitivity_matrix(const TestBall& ball, int T, int quad_order) {
    check_ball(ball);
    if (quad_order == 0) quad_order = sensitivity_quad_order(T);
    if (T < 1 || quad_order < 2) throw ContractError("sensitivity_matrix: bad parameters");
    std::vector<double> gx, gw;
    gauss_legendre(quad_order, gx, gw);

    const int n = 2 * T;
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd G(2, n);
    std::vector<std::complex<double>> zp(T);
    const double sqrt_pi = std::sqrt(kPi);
    for (int i = 0; i < quad_order; ++i) {
        double r = 0.5 * ball.radius * (gx[i] + 1.0);
        double wr = 0.5 * ball.radius * gw[i] * r;  // polar Jacobian
        for (int j = 0; j < quad_order; ++j) {
            double phi = kPi * (gx[j] + 1.0);
            double w = wr * kPi * gw[j];
            Vec2 p = ball.center + r * Vec2(std::cos(phi), std::sin(phi));
            std::complex<double> z(p.x(), p.y());
            zp[0] = {1.0, 0.0};
            for (int k = 1; k < T; ++k) zp[k] = zp[k - 1] * z;
            for (int t = 1; t <= T; ++t) {
                const std::complex<double>& v = zp[t - 1];
                G(0, 2 * t - 2) = v.imag() / sqrt_pi;  // sin pattern gradient
                G(1, 2 * t - 2) = v.real() / sqrt_pi;
                G(0, 2 * t - 1) = v.real() / sqrt_pi;  // cos pattern gradient
                G(1, 2 * t - 1) = -v.imag() / sqrt_pi;
            }
            S.noalias() -= w * (G.transpose() * G);
        }
    }
    return S;
}

MonotonicityDecision linearized_test(const Eigen::MatrixXd& L, const TestBall& ball,
                                     ContrastCase kind, double alpha, double beta,
                                     double eps, int quad_order) {
    check_ball(ball);
    if (!(alpha > 0.0)) throw ContractError("linearized_test: need alpha > 0");
    if (kind == ContrastCase::case_a) {
        if (!(beta > 0.0) || beta > alpha / (1.0 + alpha) + 1e-15)
            throw ContractError("linearized_test: case (a) needs beta in (0, alpha/(1+alpha)]");
    } else if (kind == ContrastCase::case_b) {
        if (!(beta > 0.0) || !(beta < alpha))
            throw ContractError("linearized_test: case (b) needs beta in (0, alpha)");
    } else {
        throw ContractError("linearized_test: anomaly satisfies neither contrast condition");
    }
    const int T = static_cast<int>(L.rows()) / 2;
    Eigen::MatrixXd S = sensitivity_matrix(ball, T, quad_order);
    MonotonicityDecision out;
    out.ball = ball;
    out.kind = kind;
    out.beta = beta;
    out.eigenvalue = kind == ContrastCase::case_a ? lambda_min_sym(beta * S - L)
                                                  : lambda_min_sym(L + beta * S);
    out.pass = out.eigenvalue >= -eps;
    return out;
}

MonotonicityDecision nonlinear_test(const TestBall& ball, ContrastCase kind,
                                    double alpha, const Eigen::MatrixXd& L, double eps,
                                    int mesh_level) {
    check_ball(ball);
    if (!(alpha > 0.0)) throw ContractError("nonlinear_test: need alpha > 0");
    if (kind == ContrastCase::case_b && !(alpha < 1.0))
        throw ContractError("nonlinear_test: case (b) needs alpha < 1");
    if (kind == ContrastCase::neither)
        throw ContractError("nonlinear_test: anomaly satisfies neither contrast condition");

    PixelRegion px;
    px.id = 1;
    px.shape = DiskShape{ball.center, ball.radius};
    double theta_val = kind == ContrastCase::case_a ? alpha : -alpha;
    px.contrast_lo = theta_val;
    px.contrast_hi = theta_val;
    auto mesh = std::make_shared<const DiskMesh>(build_disk_mesh(mesh_level, {px}));
    const int T = static_cast<int>(L.rows()) / 2;
    StiffnessDecomposition decomp = assemble(mesh, CurrentBasis{T});
    Eigen::VectorXd theta(1);
    theta << theta_val;
    Eigen::MatrixXd D = ntd_difference_matrix(decomp, theta);

    MonotonicityDecision out;
    out.ball = ball;
    out.kind = kind;
    out.beta = alpha;
    out.eigenvalue = kind == ContrastCase::case_a ? lambda_min_sym(D - L)
                                                  : lambda_min_sym(L - D);
    out.pass = out.eigenvalue >= -eps;
    return out;
}

IndicatorGrid reconstruct_mask(const Eigen::MatrixXd& L, const BallLattice& lattice,
                               ContrastCase kind, double alpha, double beta, double eps,
                               const GridSpec& grid_spec) {
    if (lattice.n < 2) throw ContractError("reconstruct_mask: need at least 2x2 centers");
    const int T = static_cast<int>(L.rows()) / 2;

    std::vector<Vec2> centers;
    for (int iy = 0; iy < lattice.n; ++iy)
        for (int ix = 0; ix < lattice.n; ++ix) {
            Vec2 c(-1.0 + 2.0 * ix / (lattice.n - 1), -1.0 + 2.0 * iy / (lattice.n - 1));
            if (c.norm() <= lattice.clip) centers.push_back(c);
        }
    std::vector<std::uint8_t> pass(centers.size(), 0);
    parallel_for(static_cast<int>(centers.size()), [&](int i) {
        TestBall ball{centers[i], lattice.radius};
        pass[i] = linearized_test(L, ball, kind, alpha, beta, eps).pass ? 1 : 0;
    });

    IndicatorGrid grid;
    grid.n = grid_spec.n;
    grid.clip = grid_spec.clip;
    grid.tau = 0;
    grid.values = Eigen::MatrixXd::Zero(grid_spec.n, grid_spec.n);
    grid.inside.assign(static_cast<std::size_t>(grid_spec.n) * grid_spec.n, 0);
    grid.degenerate = true;
    for (std::size_t i = 0; i < centers.size(); ++i)
        if (pass[i]) grid.degenerate = false;
    for (int iy = 0; iy < grid_spec.n; ++iy)
        for (int ix = 0; ix < grid_spec.n; ++ix) {
            Vec2 p(grid.x(ix), grid.y(iy));
            if (p.norm() <= grid_spec.clip)
                grid.inside[static_cast<std::size_t>(iy) * grid_spec.n + ix] = 1;
            for (std::size_t i = 0; i < centers.size(); ++i) {
                if (!pass[i]) continue;
                if ((p - centers[i]).norm() <= lattice.radius) {
                    grid.values(iy, ix) = 1.0;
                    break;
                }
            }
        }
    return grid;
}

}  // namespace seit
