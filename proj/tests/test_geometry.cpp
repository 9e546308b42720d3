#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>

#include "seit/geometry.hpp"

using namespace seit;

namespace {
constexpr double kPi = std::numbers::pi;

PixelRegion disk_pixel(int id, Vec2 c, double r, double a, double b) {
    PixelRegion px;
    px.id = id;
    px.shape = DiskShape{c, r};
    px.contrast_lo = a;
    px.contrast_hi = b;
    return px;
}

double tagged_area(const DiskMesh& mesh, int region) {
    double s = 0.0;
    for (int t = 0; t < mesh.triangle_count(); ++t)
        if (mesh.region_of_triangle[t] == region) s += mesh.triangle_area(t);
    return s;
}
}  // namespace

TEST_CASE("empty pixel list meshes and carries only background tags") {
    for (int level : {0, 1}) {
        DiskMesh mesh = build_disk_mesh(level, {});
        validate_mesh(mesh);
        for (int r : mesh.region_of_triangle) CHECK(r == 0);
    }
}

TEST_CASE("vertex count grows ~4x per refinement level") {
    std::vector<PixelRegion> px{disk_pixel(1, Vec2(0.4, 0.25), 0.25, 8.0, 10.0)};
    DiskMesh m0 = build_disk_mesh(0, px);
    DiskMesh m1 = build_disk_mesh(1, px);
    DiskMesh m2 = build_disk_mesh(2, px);
    double g1 = static_cast<double>(m1.vertex_count()) / m0.vertex_count();
    double g2 = static_cast<double>(m2.vertex_count()) / m1.vertex_count();
    CHECK(g1 > 3.3);
    CHECK(g1 < 4.7);
    CHECK(g2 > 3.5);
    CHECK(g2 < 4.5);
}

TEST_CASE("level-3 mesh of the one-disk anomaly is near 33000 vertices") {
    std::vector<PixelRegion> px{disk_pixel(1, Vec2(0.4, 0.25), 0.25, 8.0, 10.0)};
    DiskMesh mesh = build_disk_mesh(3, px);
    MESSAGE("level-3 vertices: ", mesh.vertex_count(), ", boundary: ", mesh.boundary_count());
    CHECK(mesh.vertex_count() >= 29000);
    CHECK(mesh.vertex_count() <= 37000);
    CHECK(mesh.boundary_count() >= 200);  // 4T anti-aliasing headroom at T=50
    validate_mesh(mesh);
}

TEST_CASE("centered disk pixel area matches the exact k-gon area") {
    const double R = 0.3;
    const int k = 64;
    std::vector<PixelRegion> px{disk_pixel(1, Vec2(0, 0), R, 1.0, 2.0)};
    const double kgon = 0.5 * k * R * R * std::sin(2.0 * kPi / k);  // exact oracle
    for (int level : {0, 3}) {
        DiskMesh mesh = build_disk_mesh(level, px);
        double area = tagged_area(mesh, 1);
        // Interfaces are resolved exactly, so the tagged area equals the
        // k-gon area up to roundoff at every level.
        CHECK(area == doctest::Approx(kgon).epsilon(1e-10));
        // Against the ideal disk the k-gon is within 1 percent.
        CHECK(std::abs(area - kPi * R * R) < 0.01 * kPi * R * R);
    }
}

TEST_CASE("region tagging with several pixels") {
    std::vector<PixelRegion> pxs;
    pxs.push_back(disk_pixel(1, Vec2(-0.4, 0.0), 0.2, 1.0, 2.0));
    PixelRegion sq;
    sq.id = 2;
    sq.shape = PolygonShape{{Vec2(0.2, -0.2), Vec2(0.6, -0.2), Vec2(0.6, 0.2), Vec2(0.2, 0.2)}};
    sq.contrast_lo = -0.5;
    sq.contrast_hi = 0.5;
    pxs.push_back(sq);
    DiskMesh mesh = build_disk_mesh(1, pxs);
    CHECK(tagged_area(mesh, 2) == doctest::Approx(0.16).epsilon(1e-10));
    double kgon = 0.5 * 64 * 0.04 * std::sin(2.0 * kPi / 64);
    CHECK(tagged_area(mesh, 1) == doctest::Approx(kgon).epsilon(1e-10));
}

TEST_CASE("pixel validation rejects bad inputs") {
    CHECK_THROWS_AS(build_disk_mesh(0, {disk_pixel(1, Vec2(0.9, 0.0), 0.09, 1, 2)}),
                    ContractError);  // touches the boundary margin
    CHECK_THROWS_AS(
        build_disk_mesh(0, {disk_pixel(1, Vec2(0.0, 0.0), 0.3, 1, 2),
                            disk_pixel(2, Vec2(0.25, 0.0), 0.3, 1, 2)}),
        ContractError);  // overlapping
    CHECK_THROWS_AS(
        build_disk_mesh(0, {disk_pixel(1, Vec2(0.0, 0.0), 0.2, 1, 2),
                            disk_pixel(2, Vec2(0.405, 0.0), 0.2, 1, 2)}),
        ContractError);  // separation below tolerance
    CHECK_THROWS_AS(build_disk_mesh(0, {disk_pixel(1, Vec2(0, 0), 0.2, 2.0, 1.0)}),
                    ContractError);  // a > b
    CHECK_THROWS_AS(build_disk_mesh(0, {disk_pixel(1, Vec2(0, 0), 0.2, -1.0, 1.0)}),
                    ContractError);  // a <= -1
}

TEST_CASE("locate_point basics and tie-breaking") {
    std::vector<PixelRegion> px{disk_pixel(1, Vec2(0.4, 0.25), 0.25, 8.0, 10.0)};
    DiskMesh mesh = build_disk_mesh(1, px);

    CHECK(locate_point(mesh, Vec2(2.0, 0.0)) == kOutsideMesh);
    CHECK(locate_point(mesh, mesh.triangle_centroid(0)) == 0);

    // A point on a shared edge belongs to the lower-indexed triangle.
    const auto& tr = mesh.triangles[0];
    Vec2 edge_mid = 0.5 * (mesh.vertices[tr[0]] + mesh.vertices[tr[1]]);
    int hit = locate_point(mesh, edge_mid);
    CHECK(hit >= 0);
    int other = -1;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        if (t == 0) continue;
        const auto& tt = mesh.triangles[t];
        int shared = 0;
        for (int i = 0; i < 3; ++i)
            if (tt[i] == tr[0] || tt[i] == tr[1]) ++shared;
        if (shared == 2) {
            other = t;
            break;
        }
    }
    if (other >= 0) CHECK(hit == std::min(0, other));

    MeshLocator locator(mesh);
    CHECK(locator.locate(Vec2(2.0, 0.0)) == kOutsideMesh);
    CHECK(locator.locate(mesh.triangle_centroid(7)) == 7);
    // Point inside the disk but in the sliver outside the boundary polygon
    // still resolves to a triangle (total function).
    int nb = mesh.boundary_count();
    double mid_angle = kPi / nb;
    Vec2 sliver(0.99999 * std::cos(mid_angle), 0.99999 * std::sin(mid_angle));
    CHECK(locator.locate(sliver) >= 0);
}

TEST_CASE("mesh file round-trip") {
    std::vector<PixelRegion> px{disk_pixel(1, Vec2(-0.2, 0.1), 0.22, 0.5, 1.5)};
    DiskMesh mesh = build_disk_mesh(1, px);
    std::string path = "roundtrip.diskmesh";
    save_diskmesh(path, mesh);
    DiskMesh back = load_diskmesh(path);
    std::remove(path.c_str());
    REQUIRE(back.vertex_count() == mesh.vertex_count());
    REQUIRE(back.triangle_count() == mesh.triangle_count());
    for (int i = 0; i < mesh.vertex_count(); ++i) {
        CHECK(back.vertices[i].x() == mesh.vertices[i].x());
        CHECK(back.vertices[i].y() == mesh.vertices[i].y());
    }
    CHECK(back.region_of_triangle == mesh.region_of_triangle);
    CHECK(back.boundary_vertices == mesh.boundary_vertices);
    CHECK(back.h_max == doctest::Approx(mesh.h_max).epsilon(1e-15));
    validate_mesh(back);
}
