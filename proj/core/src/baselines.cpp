#include "mctr/baselines.hpp"

#include <cmath>
#include <stdexcept>

namespace mctr {

ControllerKind parse_controller_kind(const std::string& name) {
    if (name == "MCTR") return ControllerKind::Mctr;
    if (name == "MCTR_NO_CCMA") return ControllerKind::MctrNoCcma;
    if (name == "DTR") return ControllerKind::Dtr;
    if (name == "FTG") return ControllerKind::Ftg;
    throw std::invalid_argument("unknown controller kind: " + name);
}

const char* to_string(ControllerKind kind) {
    switch (kind) {
        case ControllerKind::Mctr: return "MCTR";
        case ControllerKind::MctrNoCcma: return "MCTR_NO_CCMA";
        case ControllerKind::Dtr: return "DTR";
        case ControllerKind::Ftg: return "FTG";
    }
    return "unknown";
}

std::vector<double> apply_bubble(const Scan2D& scan, double bubble_radius) {
    std::vector<double> masked(scan.size(), 0.0);
    double nearest = std::numeric_limits<double>::infinity();
    size_t nearest_idx = 0;
    for (size_t i = 0; i < scan.size(); ++i) {
        masked[i] = scan.has_return(i) ? scan.ranges[i] : scan.range_max;
        if (scan.has_return(i) && scan.ranges[i] < nearest) {
            nearest = scan.ranges[i];
            nearest_idx = i;
        }
    }
    if (!std::isfinite(nearest)) return masked;

    const Vec2 np = unit_from_angle(scan.angle(nearest_idx)) * nearest;
    for (size_t i = 0; i < scan.size(); ++i) {
        if (masked[i] <= 0.0) continue;
        const Vec2 p = unit_from_angle(scan.angle(i)) * masked[i];
        if (distance(p, np) < bubble_radius) masked[i] = 0.0;
    }
    return masked;
}

GapSelection widest_gap(const std::vector<double>& masked, double clearance) {
    GapSelection best;
    int run_start = -1;
    int best_len = 0;
    for (size_t i = 0; i <= masked.size(); ++i) {
        const bool free_beam = i < masked.size() && masked[i] > clearance;
        if (free_beam) {
            if (run_start < 0) run_start = static_cast<int>(i);
        } else if (run_start >= 0) {
            const int len = static_cast<int>(i) - run_start;
            if (len > best_len) {
                best_len = len;
                best.start = run_start;
                best.end = static_cast<int>(i) - 1;
            }
            run_start = -1;
        }
    }
    return best;
}

ControlCommand FtgController::tick(const Scan2D& scan, double v_actual, double dt) {
    fallback_ = false;
    const FtgParams& p = variant_.ftg;
    const VehicleParams& vp = variant_.config.vehicle;

    const std::vector<double> masked = apply_bubble(scan, p.bubble_radius);
    const GapSelection gap = widest_gap(masked, p.clearance);

    if (!gap.found() || gap.end - gap.start + 1 < p.min_gap_width) {
        fallback_ = true;
        ControlCommand cmd;
        cmd.target_speed = vp.v_min;
        if (variant_.config.longitudinal == LongitudinalMode::ThrottleBrake) cmd.brake = 1.0;
        return cmd;
    }

    // steer toward the furthest beam inside the gap
    int target_beam = gap.start;
    for (int i = gap.start; i <= gap.end; ++i)
        if (masked[static_cast<size_t>(i)] > masked[static_cast<size_t>(target_beam)])
            target_beam = i;

    const double alpha = scan.angle(static_cast<size_t>(target_beam));
    // the pursuit chord runs toward the gap's furthest return; the chord
    // length is that return's distance, floored by the speed-scaled
    // lookahead and capped so a distant target still turns the vehicle
    const double l_d = std::clamp(masked[static_cast<size_t>(target_beam)],
                                  lookahead_distance(v_actual, variant_.config.pursuit),
                                  p.max_lookahead);
    const double delta = std::clamp(std::atan(2.0 * vp.wheelbase * std::sin(alpha) / l_d),
                                    -vp.max_steer, vp.max_steer);

    ControlCommand cmd;
    cmd.steering = delta;
    const double kappa = std::tan(delta) / vp.wheelbase;  // curvature implied by the command
    cmd.target_speed = target_speed(kappa, vp, variant_.config.kappa_floor);
    if (variant_.config.longitudinal == LongitudinalMode::ThrottleBrake) {
        const PidOutput pid =
            pid_longitudinal(cmd.target_speed, v_actual, dt, variant_.config.pid, pid_state_);
        cmd.throttle = pid.throttle;
        cmd.brake = pid.brake;
    }
    return cmd;
}

std::unique_ptr<ReactiveController> make_controller(const ControllerVariant& variant) {
    switch (variant.kind) {
        case ControllerKind::Mctr:
            return std::make_unique<Controller>(variant.config,
                                                Controller::CenterpointSource::OpposingEdgeMidpoints,
                                                /*enable_ccma=*/true);
        case ControllerKind::MctrNoCcma:
            return std::make_unique<Controller>(variant.config,
                                                Controller::CenterpointSource::OpposingEdgeMidpoints,
                                                /*enable_ccma=*/false);
        case ControllerKind::Dtr:
            return std::make_unique<Controller>(variant.config,
                                                Controller::CenterpointSource::Circumcenters,
                                                /*enable_ccma=*/false);
        case ControllerKind::Ftg:
            return std::make_unique<FtgController>(variant);
    }
    throw std::invalid_argument("make_controller: unknown controller kind");
}

}  // namespace mctr
