#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <numbers>

#include "seit/fem.hpp"
#include "seit/ntd.hpp"

using namespace seit;

namespace {
constexpr double kPi = std::numbers::pi;
const double kSqrtPi = std::sqrt(kPi);

std::shared_ptr<const DiskMesh> shared_mesh(int level, std::vector<PixelRegion> px) {
    return std::make_shared<const DiskMesh>(build_disk_mesh(level, px));
}

PixelRegion disk_pixel(int id, Vec2 c, double r, double a, double b) {
    PixelRegion px;
    px.id = id;
    px.shape = DiskShape{c, r};
    px.contrast_lo = a;
    px.contrast_hi = b;
    return px;
}

const StiffnessDecomposition& test1_decomp_level2() {
    static StiffnessDecomposition d = assemble(
        shared_mesh(2, {disk_pixel(1, Vec2(0.4, 0.25), 0.25, 8.0, 10.0)}), CurrentBasis{12});
    return d;
}

double lambda_max_sym(const Eigen::MatrixXd& M) {
    Eigen::MatrixXd S = 0.5 * (M + M.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    return es.eigenvalues().maxCoeff();
}
}  // namespace

TEST_CASE("background potential gradients") {
    CurrentPattern sin1{1, true};
    // u0 = y/sqrt(pi): constant gradient everywhere.
    for (Vec2 p : {Vec2(0.0, 0.0), Vec2(0.3, -0.7), Vec2(-0.9, 0.1)}) {
        Vec2 g = background_potential_gradient(sin1, p);
        CHECK(g.x() == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(g.y() == doctest::Approx(1.0 / kSqrtPi).epsilon(1e-15));
    }
    // Gradient magnitude r^{t-1}/sqrt(pi) for all patterns.
    Vec2 p(0.31, -0.52);
    double r = p.norm();
    CurrentBasis basis{7};
    for (int k = 0; k < basis.size(); ++k) {
        CurrentPattern pat = basis.pattern(k);
        double mag = background_potential_gradient(pat, p).norm();
        CHECK(mag ==
              doctest::Approx(std::pow(r, pat.frequency - 1) / kSqrtPi).epsilon(1e-12));
    }
    // Central differences of the scalar potential at h = 1e-5.
    const double h = 1e-5;
    for (int k = 0; k < basis.size(); ++k) {
        CurrentPattern pat = basis.pattern(k);
        Vec2 g = background_potential_gradient(pat, p);
        double gx = (background_potential(pat, p + Vec2(h, 0)) -
                     background_potential(pat, p - Vec2(h, 0))) /
                    (2 * h);
        double gy = (background_potential(pat, p + Vec2(0, h)) -
                     background_potential(pat, p - Vec2(0, h))) /
                    (2 * h);
        CHECK(std::abs(gx - g.x()) < 1e-6);
        CHECK(std::abs(gy - g.y()) < 1e-6);
    }
}

TEST_CASE("assembly: background-only meshes have no pixel blocks, zero row sums") {
    auto mesh = shared_mesh(0, {});
    StiffnessDecomposition d = assemble(mesh, CurrentBasis{4});
    CHECK(d.pixel_count() == 0);
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(mesh->vertex_count());
    CHECK((d.K0 * ones).lpNorm<Eigen::Infinity>() < 1e-12);
    // Load columns integrate to ~0: patterns have zero boundary mean.
    for (int p = 0; p < d.basis.size(); ++p)
        CHECK(std::abs(d.boundary_loads.col(p).sum()) < 1e-13);
}

TEST_CASE("affine stiffness decomposition reproduces weighted assembly") {
    const StiffnessDecomposition& d = test1_decomp_level2();
    const DiskMesh& m = *d.mesh;
    const double c = 2.75;
    Eigen::VectorXd theta(1);
    theta << c;
    Eigen::SparseMatrix<double> K = d.stiffness(theta);

    // Oracle: direct assembly with coefficient 1 + c inside the pixel.
    std::vector<Eigen::Triplet<double>> trip;
    for (int t = 0; t < m.triangle_count(); ++t) {
        const auto& tr = m.triangles[t];
        const Vec2& p0 = m.vertices[tr[0]];
        const Vec2& p1 = m.vertices[tr[1]];
        const Vec2& p2 = m.vertices[tr[2]];
        double area2 = (p1 - p0).x() * (p2 - p0).y() - (p1 - p0).y() * (p2 - p0).x();
        Vec2 g[3];
        for (int i = 0; i < 3; ++i) {
            Vec2 e = m.vertices[tr[(i + 2) % 3]] - m.vertices[tr[(i + 1) % 3]];
            g[i] = Vec2(-e.y(), e.x()) / area2;
        }
        double w = (m.region_of_triangle[t] == 1) ? 1.0 + c : 1.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                trip.emplace_back(tr[i], tr[j], w * 0.5 * area2 * g[i].dot(g[j]));
    }
    Eigen::SparseMatrix<double> K_oracle(m.vertex_count(), m.vertex_count());
    K_oracle.setFromTriplets(trip.begin(), trip.end());
    Eigen::VectorXd probe = Eigen::VectorXd::Random(m.vertex_count());
    CHECK((K * probe - K_oracle * probe).lpNorm<Eigen::Infinity>() <
          1e-12 * (K_oracle * probe).lpNorm<Eigen::Infinity>() + 1e-14);
}

TEST_CASE("solver basics") {
    const StiffnessDecomposition& d = test1_decomp_level2();
    Eigen::VectorXd theta(1);
    theta << 2.0;
    FemSolver solver(d, theta);

    Eigen::VectorXd zero = Eigen::VectorXd::Zero(d.mesh->vertex_count());
    CHECK(solver.solve(zero).norm() == 0.0);

    // Random compatible load: residual of the constrained system stays below
    // tolerance (checked internally, and rechecked here).
    Eigen::VectorXd load = Eigen::VectorXd::Random(d.mesh->vertex_count());
    load.array() -= load.sum() / load.size();
    Eigen::VectorXd u = solver.solve(load);
    CHECK(std::abs(d.boundary_mass.dot(u)) < 1e-12 * u.norm());
    double mu = load.sum() / d.boundary_mass.sum();
    Eigen::VectorXd r = load - d.stiffness(theta) * u - mu * d.boundary_mass;
    CHECK(r.norm() <= 1e-10 * load.norm());

    Eigen::VectorXd bad(1);
    bad << -1.0;
    CHECK_THROWS_AS(FemSolver(d, bad), ContractError);
}

TEST_CASE("unit-conductivity NtD matrix matches the analytic spectrum 1/t") {
    auto mesh = shared_mesh(2, {});
    StiffnessDecomposition d = assemble(mesh, CurrentBasis{10});
    Eigen::MatrixXd L = ntd_matrix(d, Eigen::VectorXd());
    // Symmetry invariant.
    CHECK(spectral_norm(L - L.transpose()) <= 1e-8 * spectral_norm(L));
    for (int p = 0; p < d.basis.size(); ++p) {
        int t = d.basis.pattern(p).frequency;
        CHECK(L(p, p) == doctest::Approx(1.0 / t).epsilon(t <= 5 ? 5e-3 : 2e-2));
        for (int s = 0; s < d.basis.size(); ++s)
            if (s != p) CHECK(std::abs(L(s, p)) < 2e-4);
    }
    // Quadratic-form identity against the discrete energy. The gap is the
    // trigonometric-interpolation ripple of the piecewise-linear trace,
    // O((t h_b)^2): measured 2.3e-5 * t^2 at this resolution (512 boundary
    // vertices).
    Eigen::VectorXd theta0;
    FemSolver solver(d, theta0);
    for (int p : {0, 3, 8}) {
        Eigen::VectorXd u = solver.solve(d.boundary_loads.col(p));
        double energy = u.dot(d.K0 * u);
        int t = d.basis.pattern(p).frequency;
        CHECK(L(p, p) == doctest::Approx(energy).epsilon(4e-5 * t * t));
    }
}

TEST_CASE("homogeneous conductivity scales the NtD matrix by 1/c") {
    auto mesh = shared_mesh(1, {});
    StiffnessDecomposition d = assemble(mesh, CurrentBasis{6});
    Eigen::MatrixXd L1 = ntd_matrix(d, Eigen::VectorXd());
    StiffnessDecomposition dc = d;
    dc.K0 = 2.0 * d.K0;  // conductivity 2 everywhere
    Eigen::MatrixXd L2 = ntd_matrix(dc, Eigen::VectorXd());
    CHECK((L2 - 0.5 * L1).lpNorm<Eigen::Infinity>() == 0.0);  // exact for c = 2
    dc.K0 = 3.0 * d.K0;
    Eigen::MatrixXd L3 = ntd_matrix(dc, Eigen::VectorXd());
    CHECK((L3 - L1 / 3.0).lpNorm<Eigen::Infinity>() < 1e-13 * L1.norm());
}

TEST_CASE("monotonicity: nonnegative contrast lowers the NtD matrix") {
    const StiffnessDecomposition& d = test1_decomp_level2();
    Eigen::VectorXd zero_theta = Eigen::VectorXd::Zero(1);
    Eigen::VectorXd theta(1);
    theta << 1.0;
    Eigen::MatrixXd L0 = ntd_matrix(d, zero_theta);
    Eigen::MatrixXd L1 = ntd_matrix(d, theta);
    CHECK(lambda_max_sym(L1 - L0) <= 1e-8 * spectral_norm(L0));
}

TEST_CASE("difference loads: support and two-path consistency") {
    const StiffnessDecomposition& d = test1_decomp_level2();
    CHECK_THROWS_AS(difference_loads(d, 99), ContractError);

    Eigen::MatrixXd B = difference_loads(d, 1);
    // Support: only vertices of pixel triangles receive load.
    std::vector<bool> on_pixel(d.mesh->vertex_count(), false);
    for (int t = 0; t < d.mesh->triangle_count(); ++t)
        if (d.mesh->region_of_triangle[t] == 1)
            for (int v : d.mesh->triangles[t]) on_pixel[v] = true;
    for (int i = 0; i < d.mesh->vertex_count(); ++i)
        if (!on_pixel[i]) CHECK(B.row(i).lpNorm<Eigen::Infinity>() == 0.0);
    // Compatibility: each load column sums to ~0.
    for (int p = 0; p < d.basis.size(); ++p) CHECK(std::abs(B.col(p).sum()) < 1e-12);

    // Two code paths for Lambda(1 + c chi) - Lambda(1): the difference-route
    // solution plus the analytic background trace against full solves. The
    // routes carry independent O(h^2) discretization errors plus the trace
    // sampling ripple of the background part; measured 4.5e-4 at level 2 and
    // ~4x smaller per refinement. Freeze the level-2 bound and check the
    // convergence ratio against level 3.
    const double c = 2.0;
    Eigen::VectorXd theta(1);
    theta << c;
    auto two_path_gap = [](const StiffnessDecomposition& dec, const Eigen::VectorXd& th) {
        Eigen::MatrixXd D = ntd_difference_matrix(dec, th);
        Eigen::MatrixXd Lfull = ntd_matrix(dec, th);
        double gap = 0.0;
        for (int p = 0; p < dec.basis.size(); ++p) {
            Eigen::VectorXd diff_col = D.col(p);
            diff_col[p] += 1.0 / dec.basis.pattern(p).frequency;  // analytic u0 trace
            gap = std::max(gap, (diff_col - Lfull.col(p)).lpNorm<Eigen::Infinity>());
        }
        return gap;
    };
    double gap2 = two_path_gap(d, theta);
    CHECK(gap2 < 6e-4);
    StiffnessDecomposition d3 = assemble(
        shared_mesh(3, {disk_pixel(1, Vec2(0.4, 0.25), 0.25, 8.0, 10.0)}), CurrentBasis{12});
    double gap3 = two_path_gap(d3, theta);
    CHECK(gap3 < gap2 / 2.5);  // observed order ~2
}
