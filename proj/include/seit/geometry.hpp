#ifndef SEIT_GEOMETRY_HPP
#define SEIT_GEOMETRY_HPP

#include <array>
#include <string>
#include <variant>
#include <vector>

#include "seit/common.hpp"

namespace seit {

struct DiskShape {
    Vec2 center;
    double radius = 0.0;
};

struct PolygonShape {
    std::vector<Vec2> vertices;  // counterclockwise, no repeated first vertex
};

// One anomaly pixel: a region strictly inside the unit disk carrying a
// uniform conductivity contrast theta in [contrast_lo, contrast_hi].
struct PixelRegion {
    int id = 0;  // >= 1; 0 is reserved for the background
    std::variant<DiskShape, PolygonShape> shape;
    double contrast_lo = 0.0;
    double contrast_hi = 0.0;
};

struct MeshOptions {
    int disk_sides = 64;            // k-gon approximation of disk pixels
    double boundary_margin = 0.05;  // required distance from pixels to |x|=1
    double min_separation = 0.02;   // required distance between pixels
};

// Triangulation of the unit disk. Boundary vertices are equiangular and
// listed in increasing polar angle starting at angle 0; pixel interfaces
// coincide with mesh edges so every triangle has a unique region.
struct DiskMesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;  // positively oriented
    std::vector<int> region_of_triangle;        // 0 = background, else pixel id
    std::vector<int> boundary_vertices;         // sorted by angle
    std::vector<double> boundary_angles;        // angle of boundary_vertices[i]
    double h_max = 0.0;                         // longest edge

    int vertex_count() const { return static_cast<int>(vertices.size()); }
    int triangle_count() const { return static_cast<int>(triangles.size()); }
    int boundary_count() const { return static_cast<int>(boundary_vertices.size()); }

    double triangle_area(int t) const;
    Vec2 triangle_centroid(int t) const;
};

// The polygon actually meshed for a pixel (k-gon for disks, the polygon
// itself otherwise). This polygon, not the ideal disk, defines the region.
std::vector<Vec2> pixel_polygon(const PixelRegion& pixel, int disk_sides);

double polygon_area(const std::vector<Vec2>& poly);
bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& p);
double distance_to_polygon(const std::vector<Vec2>& poly, const Vec2& p);

// Throws ContractError on overlap, boundary-margin or interval violations.
void validate_pixels(const std::vector<PixelRegion>& pixels, const MeshOptions& opt);

// Conforming mesh of the unit disk; vertex count grows ~4x per level.
DiskMesh build_disk_mesh(int refinement_level, const std::vector<PixelRegion>& pixels,
                         const MeshOptions& opt = {});

inline constexpr int kOutsideMesh = -1;

// Index of a triangle containing p (lowest index on ties) or kOutsideMesh.
int locate_point(const DiskMesh& mesh, const Vec2& p);

// Bucket grid over triangle bounding boxes for repeated queries.
class MeshLocator {
public:
    explicit MeshLocator(const DiskMesh& mesh);
    int locate(const Vec2& p) const;

private:
    const DiskMesh& mesh_;
    int cells_ = 0;
    double cell_size_ = 0.0;
    std::vector<std::vector<int>> buckets_;
    std::vector<int> candidates(const Vec2& p) const;
};

// Structural checks used by tests and after construction: conformity,
// orientation, equiangular boundary, resolved region interfaces.
void validate_mesh(const DiskMesh& mesh);

// Plain-text "diskmesh v1" round-trip.
void save_diskmesh(const std::string& path, const DiskMesh& mesh);
DiskMesh load_diskmesh(const std::string& path);

}  // namespace seit

#endif
