#ifndef SEIT_SRC_DELAUNAY_HPP
#define SEIT_SRC_DELAUNAY_HPP

#include <array>
#include <vector>

#include "seit/common.hpp"

namespace seit::detail {

// Incremental Bowyer-Watson triangulation inside a fixed square frame.
// All inserted points must lie in [-1.5, 1.5]^2; the frame corners sit at
// (+-4, +-4) so that no circumcircle of a quality triangle of real points
// can reach them. Predicates run in long double with an absolute tie
// threshold: cocircular configurations (all disk-boundary vertices lie on
// the unit circle) resolve to "outside", which keeps the cavity star-shaped.
class Triangulator {
public:
    Triangulator();

    // Returns the index of the inserted point (0-based over real points).
    int insert(const Vec2& p);

    int point_count() const { return static_cast<int>(pts_.size()) - kFrame; }
    const Vec2& point(int i) const { return pts_[i + kFrame]; }

    // Undirected edges between real points, as (min,max) pairs.
    std::vector<std::array<int, 2>> real_edges() const;

    // Alive triangles with no frame vertex, CCW, real indices.
    std::vector<std::array<int, 3>> real_triangles() const;

private:
    static constexpr int kFrame = 4;

    struct Tri {
        std::array<int, 3> v;    // CCW
        std::array<int, 3> adj;  // adj[i] across edge (v[i+1], v[i+2]); -1 none
        bool alive = true;
    };

    std::vector<Vec2> pts_;
    std::vector<Tri> tris_;
    std::vector<int> free_;
    int hint_ = 0;

    int new_tri(int a, int b, int c);
    void kill_tri(int t);
    int locate(const Vec2& p) const;
    bool in_circumcircle(const Tri& t, const Vec2& p) const;
    static long double orient(const Vec2& a, const Vec2& b, const Vec2& c);
};

}  // namespace seit::detail

#endif
