#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mctr/triangulate.hpp"

using namespace mctr;

namespace {

BoundaryPoints make_points(std::vector<Vec2> pts) {
    BoundaryPoints bp;
    bp.points = std::move(pts);
    bp.source_beam.assign(bp.points.size(), -1);
    return bp;
}

}  // namespace

TEST_CASE("delaunay: single triangle") {
    const Triangulation tri = delaunay(make_points({{0, 0}, {1, 0}, {0, 1}}));
    CHECK(tri.triangles.size() == 1);
    CHECK(tri.edges.size() == 3);
    CHECK(satisfies_empty_circumcircle(tri));
}

TEST_CASE("delaunay: unit square gives 2 triangles, 5 edges, either diagonal") {
    const Triangulation tri = delaunay(make_points({{0, 0}, {1, 0}, {1, 1}, {0, 1}}));
    CHECK(tri.triangles.size() == 2);
    CHECK(tri.edges.size() == 5);
    CHECK(satisfies_empty_circumcircle(tri));
}

TEST_CASE("delaunay: errors on degenerate input") {
    CHECK_THROWS_AS(delaunay(make_points({{0, 0}, {1, 0}})), NotEnoughGeometry);
    CHECK_THROWS_AS(delaunay(make_points({{0, 0}, {1, 0}, {2, 0}, {3, 0}})), NotEnoughGeometry);
}

TEST_CASE("delaunay: random point sets satisfy the empty-circumcircle property") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Vec2> pts;
        const int n = 10 + trial * 2;
        for (int i = 0; i < n; ++i) pts.push_back({u(rng), u(rng)});
        const Triangulation tri = delaunay(make_points(pts));
        CHECK(satisfies_empty_circumcircle(tri, 1e-9));
    }
}

TEST_CASE("delaunay is deterministic for a fixed input order") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Vec2> pts;
    for (int i = 0; i < 50; ++i) pts.push_back({u(rng), u(rng)});
    const Triangulation a = delaunay(make_points(pts));
    const Triangulation b = delaunay(make_points(pts));
    REQUIRE(a.triangles.size() == b.triangles.size());
    for (size_t i = 0; i < a.triangles.size(); ++i) CHECK(a.triangles[i] == b.triangles[i]);
}

TEST_CASE("classify_side basic labels") {
    CHECK(classify_side({2, 1}, 0.0, 1e-6) == SideLabel::Left);
    CHECK(classify_side({2, -1}, 0.0, 1e-6) == SideLabel::Right);
    CHECK(classify_side({2, 0}, 0.0, 1e-6) == SideLabel::On);
}

TEST_CASE("extract_midpoints: ON vertices join no opposing edge") {
    Triangulation tri;
    tri.vertices = {{2, 1}, {2, -1}, {3, 0}};
    tri.triangles = {{0, 1, 2}};
    tri.edges = {{0, 1}, {0, 2}, {1, 2}};
    const RawCenterpoints out = extract_midpoints(tri, 0.0, {});
    // exactly one opposing edge: {(2,1),(2,-1)} with midpoint (2,0)
    REQUIRE(out.points.size() == 1);
    CHECK(out.points[0].x == doctest::Approx(2.0));
    CHECK(out.points[0].y == doctest::Approx(0.0));
}

TEST_CASE("extract_midpoints: same-side edge produces nothing") {
    Triangulation tri;
    tri.vertices = {{2, 1}, {3, 2}, {2.5, 3}};
    tri.triangles = {{0, 1, 2}};
    tri.edges = {{0, 1}, {0, 2}, {1, 2}};
    CHECK(extract_midpoints(tri, 0.0, {}).points.empty());
}

TEST_CASE("extract_midpoints: straight corridor midpoints stay near the axis") {
    // walls y = +-1 sampled at x in {1,2,3}
    const std::vector<Vec2> pts = {{1, 1}, {2, 1}, {3, 1}, {1, -1}, {2, -1}, {3, -1}};
    const Triangulation tri = delaunay(make_points(pts));
    const RawCenterpoints out = extract_midpoints(tri, 0.0, {});
    CHECK(!out.points.empty());
    // oracle: enumerate opposing edges by hand (top-bottom pairs only)
    size_t expected = 0;
    for (const auto& e : tri.edges) {
        const bool top_a = tri.vertices[static_cast<size_t>(e[0])].y > 0;
        const bool top_b = tri.vertices[static_cast<size_t>(e[1])].y > 0;
        if (top_a != top_b) ++expected;
    }
    CHECK(out.points.size() == expected);
    for (const Vec2& p : out.points) CHECK(std::abs(p.y) <= 0.5);
}

TEST_CASE("extract_midpoints: parent vertices carry strictly opposite labels") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::vector<Vec2> pts;
    for (int i = 0; i < 60; ++i) pts.push_back({u(rng) + 4.0, u(rng)});
    const Triangulation tri = delaunay(make_points(pts));
    const ExtractionParams params;
    const RawCenterpoints out = extract_midpoints(tri, 0.3, params);
    for (const auto& e : out.source_edges) {
        const SideLabel la = classify_side(tri.vertices[static_cast<size_t>(e[0])], 0.3,
                                           params.side_epsilon);
        const SideLabel lb = classify_side(tri.vertices[static_cast<size_t>(e[1])], 0.3,
                                           params.side_epsilon);
        CHECK(la != lb);
        CHECK(la != SideLabel::On);
        CHECK(lb != SideLabel::On);
    }
}

TEST_CASE("extract_midpoints is equivariant under rotation") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<Vec2> pts;
    for (int i = 0; i < 40; ++i) pts.push_back({u(rng) + 3.0, u(rng)});

    const double theta = 0.7;
    std::vector<Vec2> rotated;
    for (const Vec2& p : pts) rotated.push_back(rotate(p, theta));

    Triangulation tri = delaunay(make_points(pts));
    // rotate the same triangulation so connectivity matches exactly
    Triangulation tri_rot = tri;
    for (Vec2& v : tri_rot.vertices) v = rotate(v, theta);

    const ExtractionParams params;
    const RawCenterpoints a = extract_midpoints(tri, 0.2, params);
    const RawCenterpoints b = extract_midpoints(tri_rot, 0.2 + theta, params);
    REQUIRE(a.points.size() == b.points.size());
    for (size_t i = 0; i < a.points.size(); ++i) {
        const Vec2 expect = rotate(a.points[i], theta);
        CHECK(distance(expect, b.points[i]) < 1e-9);
    }
}

TEST_CASE("filter_pseudo rules") {
    Scan2D scan;
    scan.angle_min = -M_PI;
    scan.angle_increment = M_PI / 180.0;
    scan.range_max = 10.0;
    scan.ranges.assign(361, 10.0);

    ExtractionParams params;
    params.pseudo_margin = 0.3;
    params.max_forward = 8.0;

    RawCenterpoints raw;
    raw.points = {{9.9, 0.0}, {-1.0, 0.0}, {2.0, 0.0}};
    raw.source_edges = {{0, 1}, {2, 3}, {4, 5}};

    const RawCenterpoints out = filter_pseudo(raw, scan, 0.0, params);
    REQUIRE(out.points.size() == 1);
    CHECK(out.points[0].x == doctest::Approx(2.0));
}

TEST_CASE("interpolate_faraway") {
    SUBCASE("uniform subdivision") {
        const auto out = interpolate_faraway({{0, 0}, {3, 0}}, 1.0);
        REQUIRE(out.size() == 4);
        CHECK(out[1].x == doctest::Approx(1.0));
        CHECK(out[2].x == doctest::Approx(2.0));
    }
    SUBCASE("under threshold unchanged") {
        const auto out = interpolate_faraway({{0, 0}, {0.5, 0}}, 1.0);
        CHECK(out.size() == 2);
    }
    SUBCASE("fractional gap splits evenly below threshold") {
        const auto out = interpolate_faraway({{0, 0}, {2.5, 0}}, 1.0);
        REQUIRE(out.size() == 4);
        for (size_t i = 1; i < out.size(); ++i) {
            const double gap = distance(out[i - 1], out[i]);
            CHECK(gap == doctest::Approx(2.5 / 3.0).epsilon(1e-12));
            CHECK(gap <= 1.0);
        }
    }
    SUBCASE("existing points never move and max gap never grows") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(-5.0, 5.0);
        std::vector<Vec2> pts;
        for (int i = 0; i < 30; ++i) pts.push_back({u(rng), u(rng)});
        const auto out = interpolate_faraway(pts, 0.8);
        size_t j = 0;
        for (const Vec2& p : pts) {
            while (j < out.size() && distance(out[j], p) > 1e-12) ++j;
            CHECK(j < out.size());
        }
        for (size_t i = 1; i < out.size(); ++i) CHECK(distance(out[i - 1], out[i]) <= 0.8 + 1e-12);
    }
}

TEST_CASE("circumcenter: equilateral triangle circumcenter equals centroid") {
    const Vec2 a{0, 0}, b{1, 0}, c{0.5, std::sqrt(3.0) / 2.0};
    const Vec2 cc = circumcenter(a, b, c);
    const Vec2 centroid = (a + b + c) / 3.0;
    CHECK(distance(cc, centroid) < 1e-12);
    CHECK(point_in_triangle(cc, a, b, c));
}

TEST_CASE("circumcenter of an obtuse triangle falls outside the triangle") {
    const Vec2 a{0, 0}, b{4, 0}, c{2, 0.3};
    CHECK(!point_in_triangle(circumcenter(a, b, c), a, b, c));
}
