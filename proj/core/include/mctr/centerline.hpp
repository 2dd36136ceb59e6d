#pragma once

#include <optional>
#include <vector>

#include "mctr/geometry.hpp"
#include "mctr/triangulate.hpp"

namespace mctr {

/// Ordered centerline with per-point cumulative arc length and signed
/// Menger curvature. The perception-to-control hand-off type.
struct CenterlinePath {
    std::vector<Vec2> points;
    std::vector<double> arc_length;
    std::vector<double> curvature;

    size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
};

struct SmoothingWeights {
    double lambda_vel = 0.5;  // second-difference penalty weight
    double mu_curv = 0.5;     // fourth-difference penalty weight
    int sg_window = 5;        // odd, >= 5
    int sg_order = 3;         // < sg_window
};

/// Greedy nearest-neighbor ordering starting from the raw point nearest the
/// vehicle among points ahead of it. Stops at gaps beyond chain_break.
std::vector<Vec2> order_points(const RawCenterpoints& raw, const Pose& vehicle_pose,
                               double chain_break);

/// Exact minimizer of the smoothing energy
///   E(q) = sum |q_i - p_i|^2 + lambda sum |second difference|^2
///        + mu sum |fourth difference|^2
/// solved per axis as a banded SPD system. Paths shorter than 5 points pass
/// through unchanged.
std::vector<Vec2> ccma_smooth(const std::vector<Vec2>& path, const SmoothingWeights& w);

/// Energy value the CCMA smoother minimizes; exposed for tests.
double ccma_energy(const std::vector<Vec2>& q, const std::vector<Vec2>& p,
                   const SmoothingWeights& w);

/// Per-axis Savitzky-Golay smoothing. Edge windows are handled by fitting the
/// window polynomial and evaluating at the edge positions, so polynomials up
/// to sg_order pass through exactly. Paths shorter than the window are
/// returned unchanged.
std::vector<Vec2> sg_smooth(const std::vector<Vec2>& path, const SmoothingWeights& w);

/// Attaches arc length and Menger curvature; drops repeated points first.
/// Requires at least 2 distinct points.
CenterlinePath finalize(const std::vector<Vec2>& path);

/// Full pipeline: order -> faraway interpolation -> CCMA -> SG -> finalize.
/// nullopt means the frame produced no usable centerline (fallback signal).
std::optional<CenterlinePath> build_centerline(const RawCenterpoints& raw, const Pose& pose,
                                               const ExtractionParams& params,
                                               const SmoothingWeights& weights,
                                               bool enable_ccma = true);

}  // namespace mctr
