#include "mctr/triangulate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace mctr {

namespace {

constexpr double kPredicateEps = 1e-12;

double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
    return cross(b - a, c - a);
}

// > 0 when d is inside the circumcircle of CCW triangle (a, b, c).
double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const double adx = a.x - d.x, ady = a.y - d.y;
    const double bdx = b.x - d.x, bdy = b.y - d.y;
    const double cdx = c.x - d.x, cdy = c.y - d.y;
    const double ad2 = adx * adx + ady * ady;
    const double bd2 = bdx * bdx + bdy * bdy;
    const double cd2 = cdx * cdx + cdy * cdy;
    return adx * (bdy * cd2 - cdy * bd2) - ady * (bdx * cd2 - cdx * bd2) +
           ad2 * (bdx * cdy - cdx * bdy);
}

struct Tri {
    int a, b, c;
    bool alive = true;
};

}  // namespace

Triangulation delaunay(const BoundaryPoints& input) {
    const size_t n = input.points.size();
    if (n < 3) throw NotEnoughGeometry("delaunay: fewer than 3 points");

    // Normalize into the unit box so the predicate epsilon is scale-free.
    Vec2 lo = input.points[0], hi = input.points[0];
    for (const Vec2& p : input.points) {
        lo.x = std::min(lo.x, p.x);
        lo.y = std::min(lo.y, p.y);
        hi.x = std::max(hi.x, p.x);
        hi.y = std::max(hi.y, p.y);
    }
    const double span = std::max({hi.x - lo.x, hi.y - lo.y, 1e-12});

    std::vector<Vec2> pts;
    pts.reserve(n + 3);
    for (const Vec2& p : input.points) pts.push_back({(p.x - lo.x) / span, (p.y - lo.y) / span});

    bool collinear = true;
    for (size_t i = 2; i < n && collinear; ++i) {
        if (std::abs(orient2d(pts[0], pts[1], pts[i])) > kPredicateEps) collinear = false;
    }
    if (collinear) throw NotEnoughGeometry("delaunay: points are collinear");

    const int s0 = static_cast<int>(n), s1 = s0 + 1, s2 = s0 + 2;
    pts.push_back({-20.0, -20.0});
    pts.push_back({20.5, -20.0});
    pts.push_back({0.25, 20.0});

    std::vector<Tri> tris;
    tris.push_back({s0, s1, s2});

    std::vector<int> bad;
    std::map<std::pair<int, int>, int> boundary_count;
    for (int pi = 0; pi < static_cast<int>(n); ++pi) {
        const Vec2& p = pts[static_cast<size_t>(pi)];
        bad.clear();
        for (int ti = 0; ti < static_cast<int>(tris.size()); ++ti) {
            Tri& t = tris[static_cast<size_t>(ti)];
            if (!t.alive) continue;
            Vec2 a = pts[static_cast<size_t>(t.a)], b = pts[static_cast<size_t>(t.b)],
                 c = pts[static_cast<size_t>(t.c)];
            if (orient2d(a, b, c) < 0.0) std::swap(b, c);
            if (incircle(a, b, c, p) > kPredicateEps) bad.push_back(ti);
        }

        boundary_count.clear();
        auto add_edge = [&](int u, int v) {
            auto key = std::minmax(u, v);
            boundary_count[{key.first, key.second}]++;
        };
        for (int ti : bad) {
            const Tri& t = tris[static_cast<size_t>(ti)];
            add_edge(t.a, t.b);
            add_edge(t.b, t.c);
            add_edge(t.c, t.a);
            tris[static_cast<size_t>(ti)].alive = false;
        }
        for (const auto& [edge, count] : boundary_count) {
            if (count != 1) continue;  // interior edge of the cavity
            tris.push_back({edge.first, edge.second, pi});
        }
    }

    Triangulation out;
    out.vertices = input.points;
    std::set<std::pair<int, int>> edge_set;
    for (const Tri& t : tris) {
        if (!t.alive) continue;
        if (t.a >= s0 || t.b >= s0 || t.c >= s0) continue;
        std::array<int, 3> tri = {t.a, t.b, t.c};
        // store CCW in original coordinates
        if (orient2d(out.vertices[static_cast<size_t>(tri[0])],
                     out.vertices[static_cast<size_t>(tri[1])],
                     out.vertices[static_cast<size_t>(tri[2])]) < 0.0)
            std::swap(tri[1], tri[2]);
        out.triangles.push_back(tri);
        for (int k = 0; k < 3; ++k) {
            auto key = std::minmax(tri[static_cast<size_t>(k)], tri[static_cast<size_t>((k + 1) % 3)]);
            edge_set.insert({key.first, key.second});
        }
    }
    if (out.triangles.empty()) throw NotEnoughGeometry("delaunay: degenerate configuration");
    for (const auto& [u, v] : edge_set) out.edges.push_back({u, v});
    return out;
}

SideLabel classify_side(const Vec2& point, double heading, double side_epsilon) {
    const double c = cross(unit_from_angle(heading), point);
    const double band = side_epsilon * point.norm();
    if (c > band) return SideLabel::Left;
    if (c < -band) return SideLabel::Right;
    return SideLabel::On;
}

RawCenterpoints extract_midpoints(const Triangulation& tri, double heading,
                                  const ExtractionParams& params) {
    RawCenterpoints out;
    std::vector<SideLabel> labels(tri.vertices.size());
    for (size_t i = 0; i < tri.vertices.size(); ++i)
        labels[i] = classify_side(tri.vertices[i], heading, params.side_epsilon);

    for (const auto& e : tri.edges) {
        const SideLabel la = labels[static_cast<size_t>(e[0])];
        const SideLabel lb = labels[static_cast<size_t>(e[1])];
        const bool opposing = (la == SideLabel::Left && lb == SideLabel::Right) ||
                              (la == SideLabel::Right && lb == SideLabel::Left);
        if (!opposing) continue;
        const Vec2 mid = (tri.vertices[static_cast<size_t>(e[0])] +
                          tri.vertices[static_cast<size_t>(e[1])]) * 0.5;
        bool dup = false;
        for (const Vec2& q : out.points) {
            if (distance(q, mid) < 1e-9) { dup = true; break; }
        }
        if (dup) continue;
        out.points.push_back(mid);
        out.source_edges.push_back(e);
    }
    return out;
}

RawCenterpoints filter_pseudo(const RawCenterpoints& points, const Scan2D& scan,
                              double heading, const ExtractionParams& params) {
    RawCenterpoints out;
    const Vec2 fwd = unit_from_angle(heading);
    for (size_t i = 0; i < points.points.size(); ++i) {
        const Vec2& p = points.points[i];
        if (dot(p, fwd) < 0.0) continue;  // behind the vehicle
        const double r = p.norm();
        if (r > params.max_forward) continue;

        // scan range along this point's azimuth; missing beams count as range_max
        double beam_range = scan.range_max;
        if (scan.size() > 0 && scan.angle_increment > 0.0) {
            const double az = std::atan2(p.y, p.x);
            const long idx = std::lround((az - scan.angle_min) / scan.angle_increment);
            if (idx >= 0 && idx < static_cast<long>(scan.size()) &&
                scan.has_return(static_cast<size_t>(idx)))
                beam_range = scan.ranges[static_cast<size_t>(idx)];
        }
        if (r > beam_range - params.pseudo_margin) continue;

        out.points.push_back(p);
        out.source_edges.push_back(points.source_edges[i]);
    }
    return out;
}

std::vector<Vec2> interpolate_faraway(const std::vector<Vec2>& ordered, double threshold) {
    std::vector<Vec2> out;
    if (ordered.empty()) return out;
    out.push_back(ordered[0]);
    for (size_t i = 1; i < ordered.size(); ++i) {
        const Vec2& a = ordered[i - 1];
        const Vec2& b = ordered[i];
        const double gap = distance(a, b);
        if (gap > threshold) {
            const int pieces = static_cast<int>(std::ceil(gap / threshold));
            for (int k = 1; k < pieces; ++k) {
                const double t = static_cast<double>(k) / pieces;
                out.push_back(a + (b - a) * t);
            }
        }
        out.push_back(b);
    }
    return out;
}

bool satisfies_empty_circumcircle(const Triangulation& tri, double tol) {
    // normalize like delaunay() so the tolerance applies to comparable magnitudes
    if (tri.vertices.empty()) return true;
    Vec2 lo = tri.vertices[0], hi = tri.vertices[0];
    for (const Vec2& p : tri.vertices) {
        lo.x = std::min(lo.x, p.x);
        lo.y = std::min(lo.y, p.y);
        hi.x = std::max(hi.x, p.x);
        hi.y = std::max(hi.y, p.y);
    }
    const double span = std::max({hi.x - lo.x, hi.y - lo.y, 1e-12});
    std::vector<Vec2> pts;
    pts.reserve(tri.vertices.size());
    for (const Vec2& p : tri.vertices) pts.push_back({(p.x - lo.x) / span, (p.y - lo.y) / span});

    for (const auto& t : tri.triangles) {
        Vec2 a = pts[static_cast<size_t>(t[0])], b = pts[static_cast<size_t>(t[1])],
             c = pts[static_cast<size_t>(t[2])];
        if (orient2d(a, b, c) < 0.0) std::swap(b, c);
        for (size_t v = 0; v < pts.size(); ++v) {
            if (static_cast<int>(v) == t[0] || static_cast<int>(v) == t[1] ||
                static_cast<int>(v) == t[2])
                continue;
            if (incircle(a, b, c, pts[v]) > tol) return false;
        }
    }
    return true;
}

Vec2 circumcenter(const Vec2& a, const Vec2& b, const Vec2& c) {
    const double d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
    if (d == 0.0) return (a + b + c) / 3.0;
    const double a2 = a.squared_norm(), b2 = b.squared_norm(), c2 = c.squared_norm();
    return {(a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d,
            (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d};
}

bool point_in_triangle(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c) {
    const double d1 = orient2d(a, b, p);
    const double d2 = orient2d(b, c, p);
    const double d3 = orient2d(c, a, p);
    const bool has_neg = (d1 < 0) || (d2 < 0) || (d3 < 0);
    const bool has_pos = (d1 > 0) || (d2 > 0) || (d3 > 0);
    return !(has_neg && has_pos);
}

}  // namespace mctr
