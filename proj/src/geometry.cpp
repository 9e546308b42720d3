#include "seit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "delaunay.hpp"

namespace seit {

namespace {

constexpr double kPi = std::numbers::pi;

// Level-0 generation constants, calibrated so that refinement level 3 of a
// typical preset lands near 33000 vertices with ~1024 boundary vertices.
constexpr int kBoundaryCount0 = 128;
constexpr double kCoreSpacing0 = 0.127;
constexpr double kRingGrowth = 1.30;
constexpr double kExclusion = 0.58;
constexpr int kMaxRefinement = 7;

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double segment_point_distance(const Vec2& a, const Vec2& b, const Vec2& p) {
    Vec2 ab = b - a;
    double len2 = ab.squaredNorm();
    if (len2 == 0.0) return (p - a).norm();
    double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    auto sgn = [](double x) { return (x > 0) - (x < 0); };
    double d1 = cross2(b - a, c - a), d2 = cross2(b - a, d - a);
    double d3 = cross2(d - c, a - c), d4 = cross2(d - c, b - c);
    return sgn(d1) * sgn(d2) < 0 && sgn(d3) * sgn(d4) < 0;
}

double segment_segment_distance(const Vec2& a, const Vec2& b, const Vec2& c,
                                const Vec2& d) {
    if (segments_intersect(a, b, c, d)) return 0.0;
    return std::min(std::min(segment_point_distance(a, b, c), segment_point_distance(a, b, d)),
                    std::min(segment_point_distance(c, d, a), segment_point_distance(c, d, b)));
}

// Spatial hash of accepted points used for dedupe during generation.
class PointFilter {
public:
    explicit PointFilter(double cell) : cell_(cell) {}

    // Returns false if p collides with an accepted point. `radius` is the
    // rejection distance for this candidate.
    bool try_accept(const Vec2& p, double radius) {
        long ix = static_cast<long>(std::floor(p.x() / cell_));
        long iy = static_cast<long>(std::floor(p.y() / cell_));
        int span = static_cast<int>(std::ceil(radius / cell_)) + 1;
        for (long dx = -span; dx <= span; ++dx)
            for (long dy = -span; dy <= span; ++dy) {
                auto it = grid_.find(key(ix + dx, iy + dy));
                if (it == grid_.end()) continue;
                for (const auto& q : it->second)
                    if ((q.first - p).norm() < std::max(radius, q.second)) return false;
            }
        grid_[key(ix, iy)].push_back({p, radius});
        return true;
    }

private:
    static std::uint64_t key(long x, long y) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) << 32) |
               static_cast<std::uint32_t>(y);
    }
    double cell_;
    std::unordered_map<std::uint64_t, std::vector<std::pair<Vec2, double>>> grid_;
};

struct GenPoints {
    std::vector<Vec2> points;                     // insertion order
    std::vector<std::vector<int>> chains;         // closed constraint loops
    std::vector<double> chain_spacing;            // subdivision length per chain
};

std::vector<Vec2> subdivide_loop(const std::vector<Vec2>& poly, double target) {
    std::vector<Vec2> out;
    int n = static_cast<int>(poly.size());
    for (int i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        double len = (b - a).norm();
        int m = std::max(1, static_cast<int>(std::ceil(len / target)));
        for (int j = 0; j < m; ++j)
            out.push_back(a + (static_cast<double>(j) / m) * (b - a));
    }
    return out;
}

GenPoints generate_points(const std::vector<PixelRegion>& pixels, const MeshOptions& opt) {
    GenPoints gen;
    const double hb = 2.0 * kPi / kBoundaryCount0;
    PointFilter filter(0.02);

    // Boundary ring: indices 0..n0-1, vertex j at angle 2*pi*j/n0.
    for (int j = 0; j < kBoundaryCount0; ++j) {
        double a = 2.0 * kPi * j / kBoundaryCount0;
        Vec2 p(std::cos(a), std::sin(a));
        filter.try_accept(p, 1e-7);
        gen.points.push_back(p);
    }

    // Pixel interface loops (mandatory, never filtered).
    std::vector<std::vector<Vec2>> polys;
    for (const auto& px : pixels) {
        std::vector<Vec2> poly = pixel_polygon(px, opt.disk_sides);
        polys.push_back(poly);
        std::vector<Vec2> loop = subdivide_loop(poly, 0.9 * kCoreSpacing0);
        std::vector<int> chain;
        double spacing = 0.0;
        for (std::size_t i = 0; i < loop.size(); ++i) {
            spacing = std::max(spacing, (loop[(i + 1) % loop.size()] - loop[i]).norm());
            if (!filter.try_accept(loop[i], 1e-7))
                throw ContractError("mesh: coincident pixel interface points");
            chain.push_back(static_cast<int>(gen.points.size()));
            gen.points.push_back(loop[i]);
        }
        gen.chains.push_back(std::move(chain));
        gen.chain_spacing.push_back(spacing);
    }

    auto filler_ok = [&](const Vec2& p, double sp) {
        if (1.0 - p.norm() < 0.55 * std::max(sp, hb)) return false;
        for (std::size_t k = 0; k < polys.size(); ++k) {
            double d = distance_to_polygon(polys[k], p);
            if (d < kExclusion * std::max(sp, gen.chain_spacing[k])) return false;
        }
        return filter.try_accept(p, 0.35 * sp);
    };
    auto add_ring = [&](Vec2 center, double radius, double sp, double stagger) {
        if (radius <= 0.0) return;
        int cnt = std::max(6, static_cast<int>(std::lround(2.0 * kPi * radius / sp)));
        for (int j = 0; j < cnt; ++j) {
            double a = 2.0 * kPi * (j + stagger) / cnt;
            Vec2 p = center + radius * Vec2(std::cos(a), std::sin(a));
            if (p.norm() < 1.0 && filler_ok(p, sp)) gen.points.push_back(p);
        }
    };

    // Graded annulus between the boundary and the interior lattice.
    {
        double sp = hb * kRingGrowth;
        double r = 1.0 - sp;
        int idx = 0;
        while (sp < kCoreSpacing0 && r > 0.3) {
            add_ring(Vec2(0, 0), r, sp, 0.25 + 0.5 * (idx % 2));
            double nxt = std::min(sp * kRingGrowth, kCoreSpacing0);
            r -= 0.5 * (sp + nxt);
            sp = nxt;
            ++idx;
            if (sp >= 0.999 * kCoreSpacing0) break;
        }
        // Interior hexagonal lattice, slightly rotated against symmetries.
        double r_latt = r;
        const double rot = 0.4;
        const double ca = std::cos(rot), sa = std::sin(rot);
        double ay = kCoreSpacing0 * std::sqrt(3.0) / 2.0;
        int rows = static_cast<int>(std::ceil(2.2 / ay));
        for (int i = -rows; i <= rows; ++i) {
            double y = i * ay + 0.0131;
            double x0 = (i % 2 == 0) ? 0.0171 : 0.0171 + kCoreSpacing0 / 2.0;
            int cols = static_cast<int>(std::ceil(2.2 / kCoreSpacing0));
            for (int j = -cols; j <= cols; ++j) {
                double x = x0 + j * kCoreSpacing0;
                Vec2 p(ca * x - sa * y, sa * x + ca * y);
                if (p.norm() <= r_latt && filler_ok(p, kCoreSpacing0))
                    gen.points.push_back(p);
            }
        }
    }

    // Density grading around fine disk-pixel interfaces.
    for (std::size_t k = 0; k < pixels.size(); ++k) {
        const auto* disk = std::get_if<DiskShape>(&pixels[k].shape);
        if (!disk) continue;
        double e = 2.0 * kPi * disk->radius / opt.disk_sides;
        if (e > 0.5 * kCoreSpacing0) continue;
        double offset = 2.5 * e, sp = 2.0 * e;
        while (sp < kCoreSpacing0) {
            add_ring(disk->center, disk->radius + offset, sp, 0.37);
            if (disk->radius - offset > 0.75 * sp)
                add_ring(disk->center, disk->radius - offset, sp, 0.63);
            offset += 2.0 * sp;
            sp *= 2.0;
        }
        if (disk->radius > 0.3 * kCoreSpacing0 && filler_ok(disk->center, sp))
            gen.points.push_back(disk->center);
    }
    return gen;
}

// Internal mesh with the boundary ring kept in tick order.
struct WorkMesh {
    std::vector<Vec2> verts;
    std::vector<std::array<int, 3>> tris;
    std::vector<int> region;
    std::vector<int> ring;  // ring[j] = vertex at angle 2*pi*j/ring.size()
};

void refine_once(WorkMesh& m) {
    const int n_old = static_cast<int>(m.ring.size());
    const int n_new = 2 * n_old;
    std::vector<int> ring_pos(m.verts.size(), -1);
    for (int j = 0; j < n_old; ++j) ring_pos[m.ring[j]] = j;
    std::vector<int> new_ring(n_new, -1);
    for (int j = 0; j < n_old; ++j) new_ring[2 * j] = m.ring[j];

    std::unordered_map<std::uint64_t, int> mid;
    auto midpoint = [&](int u, int v) {
        std::uint64_t key =
            (static_cast<std::uint64_t>(std::min(u, v)) << 32) | static_cast<std::uint32_t>(std::max(u, v));
        auto it = mid.find(key);
        if (it != mid.end()) return it->second;
        int idx = static_cast<int>(m.verts.size());
        int ju = ring_pos[u], jv = ring_pos[v];
        bool arc = false;
        int tick = -1;
        if (ju >= 0 && jv >= 0) {
            if ((ju + 1) % n_old == jv) {
                arc = true;
                tick = 2 * ju + 1;
            } else if ((jv + 1) % n_old == ju) {
                arc = true;
                tick = 2 * jv + 1;
            }
        }
        if (arc) {
            double a = 2.0 * kPi * tick / n_new;
            m.verts.push_back(Vec2(std::cos(a), std::sin(a)));
            new_ring[tick] = idx;
        } else {
            m.verts.push_back(0.5 * (m.verts[u] + m.verts[v]));
        }
        mid.emplace(key, idx);
        return idx;
    };

    std::vector<std::array<int, 3>> tris;
    std::vector<int> region;
    tris.reserve(4 * m.tris.size());
    region.reserve(4 * m.tris.size());
    for (std::size_t t = 0; t < m.tris.size(); ++t) {
        auto [a, b, c] = m.tris[t];
        int ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
        int r = m.region[t];
        tris.push_back({a, ab, ca});
        tris.push_back({ab, b, bc});
        tris.push_back({ca, bc, c});
        tris.push_back({ab, bc, ca});
        region.insert(region.end(), 4, r);
    }
    m.tris = std::move(tris);
    m.region = std::move(region);
    m.ring = std::move(new_ring);
    for (int v : m.ring)
        if (v < 0) throw NumericError("mesh refinement: boundary ring has a gap");
}

double tri_area(const std::vector<Vec2>& verts, const std::array<int, 3>& t) {
    return 0.5 * cross2(verts[t[1]] - verts[t[0]], verts[t[2]] - verts[t[0]]);
}

}  // namespace

double DiskMesh::triangle_area(int t) const { return tri_area(vertices, triangles[t]); }

Vec2 DiskMesh::triangle_centroid(int t) const {
    const auto& tr = triangles[t];
    return (vertices[tr[0]] + vertices[tr[1]] + vertices[tr[2]]) / 3.0;
}

std::vector<Vec2> pixel_polygon(const PixelRegion& pixel, int disk_sides) {
    if (const auto* disk = std::get_if<DiskShape>(&pixel.shape)) {
        std::vector<Vec2> poly;
        poly.reserve(disk_sides);
        for (int j = 0; j < disk_sides; ++j) {
            double a = 2.0 * kPi * (j + 0.5) / disk_sides;
            poly.push_back(disk->center + disk->radius * Vec2(std::cos(a), std::sin(a)));
        }
        return poly;
    }
    return std::get<PolygonShape>(pixel.shape).vertices;
}

double polygon_area(const std::vector<Vec2>& poly) {
    double s = 0.0;
    int n = static_cast<int>(poly.size());
    for (int i = 0; i < n; ++i) s += cross2(poly[i], poly[(i + 1) % n]);
    return 0.5 * s;
}

bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& p) {
    bool inside = false;
    int n = static_cast<int>(poly.size());
    for (int i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[j];
        if ((a.y() > p.y()) != (b.y() > p.y())) {
            double x = a.x() + (p.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
            if (p.x() < x) inside = !inside;
        }
    }
    return inside;
}

double distance_to_polygon(const std::vector<Vec2>& poly, const Vec2& p) {
    double d = std::numeric_limits<double>::infinity();
    int n = static_cast<int>(poly.size());
    for (int i = 0; i < n; ++i)
        d = std::min(d, segment_point_distance(poly[i], poly[(i + 1) % n], p));
    return d;
}

void validate_pixels(const std::vector<PixelRegion>& pixels, const MeshOptions& opt) {
    std::unordered_set<int> ids;
    std::vector<std::vector<Vec2>> polys;
    for (const auto& px : pixels) {
        if (px.id < 1) throw ContractError("pixel id must be >= 1");
        if (!ids.insert(px.id).second) throw ContractError("duplicate pixel id");
        if (!(px.contrast_lo <= px.contrast_hi))
            throw ContractError("pixel contrast interval must satisfy a <= b");
        if (!(px.contrast_lo > -1.0))
            throw ContractError("pixel contrast interval must satisfy a > -1");
        if (const auto* disk = std::get_if<DiskShape>(&px.shape)) {
            if (disk->radius <= 0.0) throw ContractError("disk pixel needs positive radius");
        } else {
            const auto& poly = std::get<PolygonShape>(px.shape).vertices;
            if (poly.size() < 3) throw ContractError("polygon pixel needs >= 3 vertices");
            if (polygon_area(poly) <= 0.0)
                throw ContractError("polygon pixel must be counterclockwise");
        }
        std::vector<Vec2> poly = pixel_polygon(px, opt.disk_sides);
        for (const Vec2& v : poly)
            if (v.norm() > 1.0 - opt.boundary_margin)
                throw ContractError("pixel too close to the unit-disk boundary");
        polys.push_back(std::move(poly));
    }
    for (std::size_t i = 0; i < polys.size(); ++i) {
        for (std::size_t j = i + 1; j < polys.size(); ++j) {
            if (point_in_polygon(polys[j], polys[i][0]) ||
                point_in_polygon(polys[i], polys[j][0]))
                throw ContractError("pixels overlap");
            double d = std::numeric_limits<double>::infinity();
            int ni = static_cast<int>(polys[i].size()), nj = static_cast<int>(polys[j].size());
            for (int a = 0; a < ni && d > 0.0; ++a)
                for (int b = 0; b < nj; ++b)
                    d = std::min(d, segment_segment_distance(
                                        polys[i][a], polys[i][(a + 1) % ni], polys[j][b],
                                        polys[j][(b + 1) % nj]));
            if (d < opt.min_separation)
                throw ContractError("pixels overlap or are separated by less than the mesh tolerance");
        }
    }
}

DiskMesh build_disk_mesh(int refinement_level, const std::vector<PixelRegion>& pixels,
                         const MeshOptions& opt) {
    if (refinement_level < 0 || refinement_level > kMaxRefinement)
        throw ContractError("refinement_level out of range");
    validate_pixels(pixels, opt);

    GenPoints gen = generate_points(pixels, opt);
    detail::Triangulator tri;
    for (const Vec2& p : gen.points) tri.insert(p);

    // Recover pixel interface segments by midpoint insertion.
    for (int round = 0; round <= 12; ++round) {
        auto edges = tri.real_edges();
        std::unordered_set<std::uint64_t> edge_set;
        for (const auto& e : edges)
            edge_set.insert((static_cast<std::uint64_t>(e[0]) << 32) |
                            static_cast<std::uint32_t>(e[1]));
        auto has_edge = [&](int u, int v) {
            if (u > v) std::swap(u, v);
            return edge_set.count((static_cast<std::uint64_t>(u) << 32) |
                                  static_cast<std::uint32_t>(v)) > 0;
        };
        bool any_missing = false;
        for (auto& chain : gen.chains) {
            for (std::size_t i = 0; i < chain.size(); ++i) {
                std::size_t j = (i + 1) % chain.size();
                if (has_edge(chain[i], chain[j])) continue;
                any_missing = true;
                Vec2 mp = 0.5 * (tri.point(chain[i]) + tri.point(chain[j]));
                int idx = tri.insert(mp);
                chain.insert(chain.begin() + static_cast<std::ptrdiff_t>(i) + 1, idx);
                ++i;  // skip past the new point this round
            }
        }
        if (!any_missing) break;
        if (round == 12)
            throw NumericError("mesh: failed to recover pixel interface segments");
    }

    WorkMesh wm;
    wm.verts.resize(tri.point_count());
    for (int i = 0; i < tri.point_count(); ++i) wm.verts[i] = tri.point(i);
    wm.tris = tri.real_triangles();
    wm.ring.resize(kBoundaryCount0);
    for (int j = 0; j < kBoundaryCount0; ++j) wm.ring[j] = j;

    // Region tags by centroid membership in the meshed pixel polygons.
    std::vector<std::vector<Vec2>> polys;
    for (const auto& px : pixels) polys.push_back(pixel_polygon(px, opt.disk_sides));
    wm.region.assign(wm.tris.size(), 0);
    for (std::size_t t = 0; t < wm.tris.size(); ++t) {
        if (tri_area(wm.verts, wm.tris[t]) <= 0.0)
            throw NumericError("mesh: non-positive triangle at base level");
        Vec2 c = (wm.verts[wm.tris[t][0]] + wm.verts[wm.tris[t][1]] + wm.verts[wm.tris[t][2]]) / 3.0;
        for (std::size_t k = 0; k < polys.size(); ++k) {
            if (point_in_polygon(polys[k], c)) {
                wm.region[t] = pixels[k].id;
                break;
            }
        }
    }

    for (int level = 0; level < refinement_level; ++level) refine_once(wm);

    DiskMesh mesh;
    mesh.vertices = std::move(wm.verts);
    mesh.triangles = std::move(wm.tris);
    mesh.region_of_triangle = std::move(wm.region);
    const int nb = static_cast<int>(wm.ring.size());
    mesh.boundary_vertices = std::move(wm.ring);
    mesh.boundary_angles.resize(nb);
    for (int j = 0; j < nb; ++j) mesh.boundary_angles[j] = 2.0 * kPi * j / nb;
    double hmax = 0.0;
    for (const auto& t : mesh.triangles)
        for (int i = 0; i < 3; ++i)
            hmax = std::max(hmax, (mesh.vertices[t[i]] - mesh.vertices[t[(i + 1) % 3]]).norm());
    mesh.h_max = hmax;

    validate_mesh(mesh);

    // No triangle may straddle a pixel interface: an edge with different
    // regions on its two sides must lie on the interface polygon.
    std::unordered_map<std::uint64_t, std::array<int, 2>> edge_owner;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        for (int i = 0; i < 3; ++i) {
            int u = mesh.triangles[t][i], v = mesh.triangles[t][(i + 1) % 3];
            if (u > v) std::swap(u, v);
            std::uint64_t key = (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint32_t>(v);
            auto it = edge_owner.find(key);
            if (it == edge_owner.end())
                edge_owner[key] = {static_cast<int>(t), -1};
            else
                it->second[1] = static_cast<int>(t);
        }
    }
    std::unordered_map<int, const std::vector<Vec2>*> poly_of_region;
    for (std::size_t k = 0; k < pixels.size(); ++k)
        poly_of_region[pixels[k].id] = &polys[k];
    for (const auto& [key, owners] : edge_owner) {
        if (owners[1] < 0) continue;
        int r0 = mesh.region_of_triangle[owners[0]];
        int r1 = mesh.region_of_triangle[owners[1]];
        if (r0 == r1) continue;
        int u = static_cast<int>(key >> 32), v = static_cast<int>(key & 0xFFFFFFFFu);
        for (int r : {r0, r1}) {
            if (r == 0) continue;
            const auto& poly = *poly_of_region.at(r);
            if (distance_to_polygon(poly, mesh.vertices[u]) > 1e-9 ||
                distance_to_polygon(poly, mesh.vertices[v]) > 1e-9)
                throw NumericError("mesh: triangle straddles a pixel interface");
        }
    }
    return mesh;
}

int locate_point(const DiskMesh& mesh, const Vec2& p) {
    constexpr double tol = 1e-12;
    int best_hit = kOutsideMesh;
    int best_near = kOutsideMesh;
    double best_violation = std::numeric_limits<double>::infinity();
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tr = mesh.triangles[t];
        const Vec2& a = mesh.vertices[tr[0]];
        const Vec2& b = mesh.vertices[tr[1]];
        const Vec2& c = mesh.vertices[tr[2]];
        double area2 = cross2(b - a, c - a);
        double s0 = cross2(b - p, c - p);
        double s1 = cross2(c - p, a - p);
        double s2 = cross2(a - p, b - p);
        double lo = std::min(s0, std::min(s1, s2)) / area2;
        if (lo >= -tol) {
            best_hit = t;
            break;  // triangles scanned in index order: first hit is lowest
        }
        if (-lo < best_violation) {
            best_violation = -lo;
            best_near = t;
        }
    }
    if (best_hit != kOutsideMesh) return best_hit;
    if (p.norm() <= 1.0) return best_near;
    return kOutsideMesh;
}

MeshLocator::MeshLocator(const DiskMesh& mesh) : mesh_(mesh) {
    cell_size_ = std::max(mesh.h_max, 0.01);
    cells_ = std::max(1, static_cast<int>(std::ceil(2.0 / cell_size_)));
    buckets_.assign(static_cast<std::size_t>(cells_) * cells_, {});
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tr = mesh.triangles[t];
        double xmin = 1e30, xmax = -1e30, ymin = 1e30, ymax = -1e30;
        for (int i = 0; i < 3; ++i) {
            const Vec2& v = mesh.vertices[tr[i]];
            xmin = std::min(xmin, v.x());
            xmax = std::max(xmax, v.x());
            ymin = std::min(ymin, v.y());
            ymax = std::max(ymax, v.y());
        }
        int cx0 = std::clamp(static_cast<int>((xmin + 1.0) / cell_size_), 0, cells_ - 1);
        int cx1 = std::clamp(static_cast<int>((xmax + 1.0) / cell_size_), 0, cells_ - 1);
        int cy0 = std::clamp(static_cast<int>((ymin + 1.0) / cell_size_), 0, cells_ - 1);
        int cy1 = std::clamp(static_cast<int>((ymax + 1.0) / cell_size_), 0, cells_ - 1);
        for (int cx = cx0; cx <= cx1; ++cx)
            for (int cy = cy0; cy <= cy1; ++cy)
                buckets_[static_cast<std::size_t>(cy) * cells_ + cx].push_back(t);
    }
}

std::vector<int> MeshLocator::candidates(const Vec2& p) const {
    int cx = std::clamp(static_cast<int>((p.x() + 1.0) / cell_size_), 0, cells_ - 1);
    int cy = std::clamp(static_cast<int>((p.y() + 1.0) / cell_size_), 0, cells_ - 1);
    return buckets_[static_cast<std::size_t>(cy) * cells_ + cx];
}

int MeshLocator::locate(const Vec2& p) const {
    constexpr double tol = 1e-12;
    int best = kOutsideMesh;
    for (int t : candidates(p)) {
        const auto& tr = mesh_.triangles[t];
        const Vec2& a = mesh_.vertices[tr[0]];
        const Vec2& b = mesh_.vertices[tr[1]];
        const Vec2& c = mesh_.vertices[tr[2]];
        double area2 = cross2(b - a, c - a);
        double lo = std::min({cross2(b - p, c - p), cross2(c - p, a - p), cross2(a - p, b - p)}) / area2;
        if (lo >= -tol && (best == kOutsideMesh || t < best)) best = t;
    }
    if (best != kOutsideMesh) return best;
    return locate_point(mesh_, p);  // rare: boundary slivers and outside points
}

void validate_mesh(const DiskMesh& mesh) {
    const int nb = mesh.boundary_count();
    if (nb < 3) throw NumericError("mesh: too few boundary vertices");
    for (const Vec2& v : mesh.vertices)
        if (v.norm() > 1.0 + 1e-12) throw NumericError("mesh: vertex outside closed disk");
    for (int j = 0; j < nb; ++j) {
        const Vec2& v = mesh.vertices[mesh.boundary_vertices[j]];
        if (std::abs(v.norm() - 1.0) > 1e-12)
            throw NumericError("mesh: boundary vertex not on the unit circle");
    }
    // Equiangular boundary: angles must form an arithmetic progression.
    const double step = 2.0 * kPi / nb;
    for (int j = 0; j < nb; ++j) {
        double expect = step * j;
        double got = mesh.boundary_angles[j];
        if (std::abs(got - expect) > 1e-10 * step)
            throw NumericError("mesh: boundary vertices not equiangular");
        const Vec2& v = mesh.vertices[mesh.boundary_vertices[j]];
        double a = std::atan2(v.y(), v.x());
        if (a < 0) a += 2.0 * kPi;
        double diff = std::abs(a - expect);
        diff = std::min(diff, 2.0 * kPi - diff);
        if (diff > 1e-10)
            throw NumericError("mesh: boundary angle mismatch with stored order");
    }

    double area = 0.0;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        double a = mesh.triangle_area(t);
        if (a <= 0.0) throw NumericError("mesh: non-positive triangle area");
        area += a;
    }
    double ngon = 0.5 * nb * std::sin(2.0 * kPi / nb);
    if (std::abs(area - ngon) > 1e-9 * ngon)
        throw NumericError("mesh: triangulated area does not match the boundary polygon");

    // Conformity: every edge in at most two triangles; single-owner edges
    // must connect boundary-ring neighbors.
    std::unordered_map<std::uint64_t, int> edge_count;
    for (const auto& tr : mesh.triangles) {
        for (int i = 0; i < 3; ++i) {
            int u = tr[i], v = tr[(i + 1) % 3];
            if (u > v) std::swap(u, v);
            ++edge_count[(static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint32_t>(v)];
        }
    }
    std::vector<int> ring_pos(mesh.vertex_count(), -1);
    for (int j = 0; j < nb; ++j) ring_pos[mesh.boundary_vertices[j]] = j;
    for (const auto& [key, cnt] : edge_count) {
        if (cnt > 2) throw NumericError("mesh: non-conforming edge");
        if (cnt == 1) {
            int u = static_cast<int>(key >> 32), v = static_cast<int>(key & 0xFFFFFFFFu);
            int ju = ring_pos[u], jv = ring_pos[v];
            if (ju < 0 || jv < 0)
                throw NumericError("mesh: open edge off the boundary");
            int d = std::abs(ju - jv);
            if (d != 1 && d != nb - 1)
                throw NumericError("mesh: boundary edge skips a boundary vertex");
        }
    }
}

void save_diskmesh(const std::string& path, const DiskMesh& mesh) {
    std::ofstream out(path);
    if (!out) throw NumericError("cannot open mesh file for writing: " + path);
    out << "diskmesh v1\n";
    out << mesh.vertex_count() << " " << mesh.triangle_count() << " " << mesh.boundary_count()
        << "\n";
    char buf[64];
    for (const Vec2& v : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v.x(), v.y());
        out << buf;
    }
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tr = mesh.triangles[t];
        out << tr[0] << " " << tr[1] << " " << tr[2] << " " << mesh.region_of_triangle[t]
            << "\n";
    }
    for (int j = 0; j < mesh.boundary_count(); ++j)
        out << mesh.boundary_vertices[j] << "\n";
    if (!out) throw NumericError("failed writing mesh file: " + path);
}

DiskMesh load_diskmesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NumericError("cannot open mesh file: " + path);
    std::string header;
    std::getline(in, header);
    if (header != "diskmesh v1") throw NumericError("bad mesh file header: " + path);
    int nv = 0, nt = 0, nb = 0;
    in >> nv >> nt >> nb;
    if (!in || nv <= 0 || nt <= 0 || nb <= 0) throw NumericError("bad mesh counts: " + path);
    DiskMesh mesh;
    mesh.vertices.resize(nv);
    for (auto& v : mesh.vertices) in >> v.x() >> v.y();
    mesh.triangles.resize(nt);
    mesh.region_of_triangle.resize(nt);
    for (int t = 0; t < nt; ++t) {
        auto& tr = mesh.triangles[t];
        in >> tr[0] >> tr[1] >> tr[2] >> mesh.region_of_triangle[t];
    }
    mesh.boundary_vertices.resize(nb);
    for (auto& b : mesh.boundary_vertices) in >> b;
    if (!in) throw NumericError("truncated mesh file: " + path);
    for (const auto& tr : mesh.triangles)
        for (int v : tr)
            if (v < 0 || v >= nv) throw NumericError("mesh file vertex index out of range");
    for (int b : mesh.boundary_vertices)
        if (b < 0 || b >= nv) throw NumericError("mesh file boundary index out of range");

    // Order boundary vertices by polar angle and rebuild the angle table.
    std::vector<std::pair<double, int>> ordered;
    for (int b : mesh.boundary_vertices) {
        double a = std::atan2(mesh.vertices[b].y(), mesh.vertices[b].x());
        if (a < -1e-9) a += 2.0 * kPi;
        if (a < 0) a = 0;
        ordered.push_back({a, b});
    }
    std::sort(ordered.begin(), ordered.end());
    mesh.boundary_vertices.clear();
    mesh.boundary_angles.clear();
    for (const auto& [a, b] : ordered) {
        mesh.boundary_angles.push_back(a);
        mesh.boundary_vertices.push_back(b);
    }
    double hmax = 0.0;
    for (const auto& t : mesh.triangles)
        for (int i = 0; i < 3; ++i)
            hmax = std::max(hmax, (mesh.vertices[t[i]] - mesh.vertices[t[(i + 1) % 3]]).norm());
    mesh.h_max = hmax;
    return mesh;
}

}  // namespace seit
