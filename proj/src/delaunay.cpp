#include "delaunay.hpp"

#include <cmath>
#include <cstddef>
#include <unordered_map>
#include <unordered_set>

namespace seit::detail {

namespace {
constexpr double kFrameHalf = 4.0;
// Absolute incircle tie threshold. Noise of the long double determinant is
// ~1e-16 at frame scale; genuine containment signals for point spacings
// >= 1e-3 exceed 1e-11.
constexpr long double kInCircleEps = 1e-13L;

inline std::uint64_t edge_key(int u, int v) {
    if (u > v) std::swap(u, v);
    return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint32_t>(v);
}
}  // namespace

Triangulator::Triangulator() {
    pts_.push_back(Vec2(-kFrameHalf, -kFrameHalf));
    pts_.push_back(Vec2(kFrameHalf, -kFrameHalf));
    pts_.push_back(Vec2(kFrameHalf, kFrameHalf));
    pts_.push_back(Vec2(-kFrameHalf, kFrameHalf));
    int t0 = new_tri(0, 1, 2);
    int t1 = new_tri(0, 2, 3);
    tris_[t0].adj = {-1, t1, -1};
    tris_[t1].adj = {-1, -1, t0};
    hint_ = t0;
}

int Triangulator::new_tri(int a, int b, int c) {
    int idx;
    if (!free_.empty()) {
        idx = free_.back();
        free_.pop_back();
        tris_[idx] = Tri{{a, b, c}, {-1, -1, -1}, true};
    } else {
        idx = static_cast<int>(tris_.size());
        tris_.push_back(Tri{{a, b, c}, {-1, -1, -1}, true});
    }
    return idx;
}

void Triangulator::kill_tri(int t) {
    tris_[t].alive = false;
    free_.push_back(t);
}

long double Triangulator::orient(const Vec2& a, const Vec2& b, const Vec2& c) {
    long double abx = static_cast<long double>(b.x()) - a.x();
    long double aby = static_cast<long double>(b.y()) - a.y();
    long double acx = static_cast<long double>(c.x()) - a.x();
    long double acy = static_cast<long double>(c.y()) - a.y();
    return abx * acy - aby * acx;
}

bool Triangulator::in_circumcircle(const Tri& t, const Vec2& p) const {
    const Vec2& a = pts_[t.v[0]];
    const Vec2& b = pts_[t.v[1]];
    const Vec2& c = pts_[t.v[2]];
    long double ax = static_cast<long double>(a.x()) - p.x();
    long double ay = static_cast<long double>(a.y()) - p.y();
    long double bx = static_cast<long double>(b.x()) - p.x();
    long double by = static_cast<long double>(b.y()) - p.y();
    long double cx = static_cast<long double>(c.x()) - p.x();
    long double cy = static_cast<long double>(c.y()) - p.y();
    long double a2 = ax * ax + ay * ay;
    long double b2 = bx * bx + by * by;
    long double c2 = cx * cx + cy * cy;
    long double det = a2 * (bx * cy - by * cx) - b2 * (ax * cy - ay * cx) +
                      c2 * (ax * by - ay * bx);
    return det > kInCircleEps;  // strictly inside; ties count as outside
}

int Triangulator::locate(const Vec2& p) const {
    int t = hint_;
    if (t < 0 || t >= static_cast<int>(tris_.size()) || !tris_[t].alive) t = -1;
    if (t < 0) {
        for (std::size_t i = 0; i < tris_.size(); ++i)
            if (tris_[i].alive) {
                t = static_cast<int>(i);
                break;
            }
    }
    std::size_t steps = 0;
    const std::size_t max_steps = 4 * tris_.size() + 64;
    while (true) {
        if (++steps > max_steps) break;  // fall through to linear scan
        const Tri& tri = tris_[t];
        int next = -1;
        for (int i = 0; i < 3; ++i) {
            const Vec2& u = pts_[tri.v[(i + 1) % 3]];
            const Vec2& w = pts_[tri.v[(i + 2) % 3]];
            if (orient(u, w, p) < 0) {
                next = tri.adj[i];
                break;
            }
        }
        if (next < 0) return t;  // inside or on an edge of t
        t = next;
    }
    for (std::size_t i = 0; i < tris_.size(); ++i) {
        if (!tris_[i].alive) continue;
        const Tri& tri = tris_[i];
        bool inside = true;
        for (int k = 0; k < 3 && inside; ++k) {
            const Vec2& u = pts_[tri.v[(k + 1) % 3]];
            const Vec2& w = pts_[tri.v[(k + 2) % 3]];
            if (orient(u, w, p) < 0) inside = false;
        }
        if (inside) return static_cast<int>(i);
    }
    throw NumericError("delaunay: point location failed");
}

int Triangulator::insert(const Vec2& p) {
    if (std::abs(p.x()) > 1.5 || std::abs(p.y()) > 1.5)
        throw NumericError("delaunay: point outside supported region");
    int start = locate(p);

    // Grow the cavity of triangles whose circumcircle strictly contains p.
    std::vector<int> cavity;
    std::unordered_set<int> in_cavity;
    std::vector<int> stack{start};
    in_cavity.insert(start);
    while (!stack.empty()) {
        int t = stack.back();
        stack.pop_back();
        cavity.push_back(t);
        for (int i = 0; i < 3; ++i) {
            int nb = tris_[t].adj[i];
            if (nb < 0 || in_cavity.count(nb)) continue;
            if (in_circumcircle(tris_[nb], p)) {
                in_cavity.insert(nb);
                stack.push_back(nb);
            }
        }
    }

    // Boundary edges of the cavity, with the outside neighbor.
    struct BEdge {
        int a, b, outer;
    };
    std::vector<BEdge> border;
    for (int t : cavity) {
        for (int i = 0; i < 3; ++i) {
            int nb = tris_[t].adj[i];
            if (nb >= 0 && in_cavity.count(nb)) continue;
            border.push_back({tris_[t].v[(i + 1) % 3], tris_[t].v[(i + 2) % 3], nb});
        }
    }

    int pid = static_cast<int>(pts_.size());
    pts_.push_back(p);
    for (int t : cavity) kill_tri(t);

    std::unordered_map<std::uint64_t, std::pair<int, int>> spoke;  // edge -> (tri, slot)
    int first_new = -1;
    for (const BEdge& e : border) {
        if (orient(pts_[e.a], pts_[e.b], p) <= 0)
            throw NumericError("delaunay: degenerate cavity fan");
        int nt = new_tri(e.a, e.b, pid);
        first_new = nt;
        tris_[nt].adj[2] = e.outer;  // across (a,b)
        if (e.outer >= 0) {
            Tri& out = tris_[e.outer];
            for (int i = 0; i < 3; ++i) {
                int u = out.v[(i + 1) % 3], w = out.v[(i + 2) % 3];
                if ((u == e.a && w == e.b) || (u == e.b && w == e.a)) out.adj[i] = nt;
            }
        }
        // Spokes (b,pid) slot 0 and (pid,a) slot 1 pair up with siblings.
        for (auto [u, slot] : {std::pair<int, int>{e.b, 0}, {e.a, 1}}) {
            auto key = edge_key(u, pid);
            auto it = spoke.find(key);
            if (it == spoke.end()) {
                spoke.emplace(key, std::make_pair(nt, slot));
            } else {
                tris_[nt].adj[slot] = it->second.first;
                tris_[it->second.first].adj[it->second.second] = nt;
            }
        }
    }
    if (first_new < 0) throw NumericError("delaunay: empty cavity");
    hint_ = first_new;
    return pid - kFrame;
}

std::vector<std::array<int, 2>> Triangulator::real_edges() const {
    std::unordered_set<std::uint64_t> seen;
    std::vector<std::array<int, 2>> edges;
    for (const Tri& t : tris_) {
        if (!t.alive) continue;
        for (int i = 0; i < 3; ++i) {
            int u = t.v[i], w = t.v[(i + 1) % 3];
            if (u < kFrame || w < kFrame) continue;
            auto key = edge_key(u, w);
            if (seen.insert(key).second)
                edges.push_back({std::min(u, w) - kFrame, std::max(u, w) - kFrame});
        }
    }
    return edges;
}

std::vector<std::array<int, 3>> Triangulator::real_triangles() const {
    std::vector<std::array<int, 3>> out;
    for (const Tri& t : tris_) {
        if (!t.alive) continue;
        if (t.v[0] < kFrame || t.v[1] < kFrame || t.v[2] < kFrame) continue;
        out.push_back({t.v[0] - kFrame, t.v[1] - kFrame, t.v[2] - kFrame});
    }
    return out;
}

}  // namespace seit::detail
