#ifndef SEIT_TESTS_SUPPORT_HPP
#define SEIT_TESTS_SUPPORT_HPP

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <vector>

#include "seit/fem.hpp"
#include "seit/ntd.hpp"

namespace seit::testsupport {

inline PixelRegion disk_pixel(int id, Vec2 c, double r, double a, double b) {
    PixelRegion px;
    px.id = id;
    px.shape = DiskShape{c, r};
    px.contrast_lo = a;
    px.contrast_hi = b;
    return px;
}

inline std::shared_ptr<const DiskMesh> shared_mesh(int level,
                                                   std::vector<PixelRegion> px = {}) {
    return std::make_shared<const DiskMesh>(build_disk_mesh(level, px));
}

inline double lambda_min_sym(const Eigen::MatrixXd& M) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()));
    return es.eigenvalues().minCoeff();
}

inline double lambda_max_sym(const Eigen::MatrixXd& M) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()));
    return es.eigenvalues().maxCoeff();
}

// Adds w * phi_i(p) to the load vector for every hat touching p.
inline void add_point_source(const DiskMesh& mesh, const MeshLocator& locator,
                             const Vec2& p, double w, Eigen::VectorXd& load) {
    int t = locator.locate(p);
    if (t < 0) throw ContractError("point source outside the mesh");
    const auto& tr = mesh.triangles[t];
    const Vec2& a = mesh.vertices[tr[0]];
    const Vec2& b = mesh.vertices[tr[1]];
    const Vec2& c = mesh.vertices[tr[2]];
    double area2 = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
    double l0 = ((b - p).x() * (c - p).y() - (b - p).y() * (c - p).x()) / area2;
    double l1 = ((c - p).x() * (a - p).y() - (c - p).y() * (a - p).x()) / area2;
    load[tr[0]] += w * l0;
    load[tr[1]] += w * l1;
    load[tr[2]] += w * (1.0 - l0 - l1);
}

// Mollified-dipole FEM oracle: two opposite point sources of strength 1/h at
// z +- (h/2) d, unit conductivity, mean-normalized trace, Fourier-projected.
inline Eigen::VectorXd mollified_dipole_coeffs(const StiffnessDecomposition& decomp,
                                               const MeshLocator& locator, const Vec2& z,
                                               const Vec2& d, double h = 1e-3) {
    const DiskMesh& mesh = *decomp.mesh;
    Eigen::VectorXd load = Eigen::VectorXd::Zero(mesh.vertex_count());
    Vec2 dn = d / d.norm();
    add_point_source(mesh, locator, z + 0.5 * h * dn, 1.0 / h, load);
    add_point_source(mesh, locator, z - 0.5 * h * dn, -1.0 / h, load);
    load.array() -= load.sum() / load.size();  // exact compatibility
    FemSolver solver(decomp, Eigen::VectorXd::Zero(decomp.pixel_count()));
    Eigen::VectorXd u = solver.solve(load);
    return fourier_project(boundary_trace(mesh, u), decomp.basis.T);
}

}  // namespace seit::testsupport

#endif
