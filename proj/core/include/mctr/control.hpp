#pragma once

#include <optional>

#include "mctr/centerline.hpp"
#include "mctr/scan.hpp"
#include "mctr/triangulate.hpp"

namespace mctr {

struct VehicleParams {
    double wheelbase = 0.33;
    double friction_mu = 0.6;
    double a_max_lat = 9.81;
    double v_max = 4.0;
    double v_min = 0.5;
    double max_steer = 0.42;
};

struct PursuitParams {
    double k_v = 0.15;   // seconds; speed-proportional lookahead gain
    double l_min = 0.35; // meters; minimum lookahead
};

struct ControlCommand {
    double steering = 0.0;      // radians, left positive
    double target_speed = 0.0;  // m/s
    double throttle = 0.0;      // [0,1], mode B
    double brake = 0.0;         // [0,1], mode B; at most one of throttle/brake nonzero
};

struct PidGains {
    double kp_throttle = 0.6, ki_throttle = 0.1, kd_throttle = 0.0;
    double kp_brake = 0.5, ki_brake = 0.0, kd_brake = 0.0;
    double integral_limit = 5.0;
};

struct PidState {
    double integral = 0.0;
    double prev_error = 0.0;
    bool has_prev = false;
};

enum class FallbackMode { BrakeStraight, HoldLast };

struct FallbackPolicy {
    FallbackMode mode = FallbackMode::BrakeStraight;
    int hold_ticks = 10;
};

enum class LongitudinalMode { DirectVelocity, ThrottleBrake };

struct ControllerConfig {
    VehicleParams vehicle;
    PursuitParams pursuit;
    ExtractionParams extraction;
    SmoothingWeights smoothing;
    PidGains pid;
    FallbackPolicy fallback;
    LongitudinalMode longitudinal = LongitudinalMode::DirectVelocity;
    double kappa_floor = 1e-3;
};

double lookahead_distance(double v, const PursuitParams& p);

/// First path point (by arc length) at distance >= l_d from the origin,
/// interpolated on the crossing segment; the last point when the whole path
/// is nearer. Also reports the curvature at the nearest path sample.
struct LookaheadPoint {
    Vec2 point;
    double curvature = 0.0;
};
std::optional<LookaheadPoint> select_lookahead_point(const CenterlinePath& path, double l_d);

/// Pure-pursuit steering toward a target in the vehicle frame.
double steering(const Vec2& target, const VehicleParams& vp, double l_d);

/// Curvature-limited target speed from the lateral-acceleration budget.
double target_speed(double kappa, const VehicleParams& vp, double kappa_floor = 1e-3);

struct PidOutput {
    double throttle = 0.0;
    double brake = 0.0;
};
PidOutput pid_longitudinal(double v_target, double v_actual, double dt, const PidGains& gains,
                           PidState& state);

class Controller;

/// Uniform interface the simulator drives: one command per scan frame.
class ReactiveController {
public:
    virtual ~ReactiveController() = default;
    virtual ControlCommand tick(const Scan2D& scan, double v_actual, double dt) = 0;
    virtual bool last_was_fallback() const = 0;
    /// Triangulation pipeline behind this controller, if any (for tracing).
    virtual const Controller* pipeline() const { return nullptr; }
};

/// Stateful per-vehicle controller running the full MCTR frame pipeline.
/// Variant hooks (centerpoint source, CCMA bypass) are wired by `baselines`.
class Controller : public ReactiveController {
public:
    enum class CenterpointSource { OpposingEdgeMidpoints, Circumcenters };

    Controller(ControllerConfig cfg, CenterpointSource source = CenterpointSource::OpposingEdgeMidpoints,
               bool enable_ccma = true)
        : cfg_(std::move(cfg)), source_(source), enable_ccma_(enable_ccma) {}

    /// scan is in the vehicle frame; never throws on degenerate sensor data.
    ControlCommand tick(const Scan2D& scan, double v_actual, double dt) override;

    const std::optional<CenterlinePath>& last_centerline() const { return last_centerline_; }
    bool last_was_fallback() const override { return last_was_fallback_; }
    const Controller* pipeline() const override { return this; }
    const ControllerConfig& config() const { return cfg_; }
    const std::optional<Triangulation>& last_triangulation() const { return last_triangulation_; }
    const RawCenterpoints& last_centerpoints() const { return last_centerpoints_; }

private:
    ControlCommand fallback(double v_actual, double dt);
    RawCenterpoints circumcenter_points(const Triangulation& tri) const;

    ControllerConfig cfg_;
    CenterpointSource source_;
    bool enable_ccma_;
    PidState pid_state_;
    std::optional<ControlCommand> last_command_;
    int held_ticks_ = 0;
    bool last_was_fallback_ = false;
    std::optional<CenterlinePath> last_centerline_;
    std::optional<Triangulation> last_triangulation_;
    RawCenterpoints last_centerpoints_;
};

}  // namespace mctr
