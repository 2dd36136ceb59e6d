#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "mctr/geometry.hpp"
#include "mctr/scan.hpp"

namespace mctr {

struct NotEnoughGeometry : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Triangulation {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<std::array<int, 2>> edges;  // undirected, unique, lo < hi
};

enum class SideLabel { Left, Right, On };

struct ExtractionParams {
    double box_size = 0.15;          // subsampling cluster gap
    double faraway_threshold = 1.0;  // gap above which interpolation kicks in
    double side_epsilon = 1e-6;
    double pseudo_margin = 0.3;      // distance to scan end that disqualifies a point
    double max_forward = 8.0;
};

struct RawCenterpoints {
    std::vector<Vec2> points;
    std::vector<std::array<int, 2>> source_edges;  // parent vertex pair per point
};

/// Incremental Bowyer-Watson triangulation. Deterministic for a fixed input
/// order. Throws NotEnoughGeometry for < 3 points or an all-collinear set.
Triangulation delaunay(const BoundaryPoints& points);

SideLabel classify_side(const Vec2& point, double heading, double side_epsilon);

/// Midpoints of edges whose endpoints straddle the driving direction.
RawCenterpoints extract_midpoints(const Triangulation& tri, double heading,
                                  const ExtractionParams& params);

/// Drops pseudo points: behind the vehicle, beyond max_forward, or within
/// pseudo_margin of the scan range along their azimuth.
RawCenterpoints filter_pseudo(const RawCenterpoints& points, const Scan2D& scan,
                              double heading, const ExtractionParams& params);

/// Bridges gaps larger than threshold with equally spaced inserted points.
std::vector<Vec2> interpolate_faraway(const std::vector<Vec2>& ordered, double threshold);

/// Brute-force Delaunay property check: true iff no vertex lies strictly
/// inside any triangle's circumcircle (tolerance on the in-circle determinant).
bool satisfies_empty_circumcircle(const Triangulation& tri, double tol = 1e-9);

/// Circumcenter of a triangle; used by the DTR baseline.
Vec2 circumcenter(const Vec2& a, const Vec2& b, const Vec2& c);

bool point_in_triangle(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c);

}  // namespace mctr
