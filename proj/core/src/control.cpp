#include "mctr/control.hpp"

#include <cmath>

namespace mctr {

double lookahead_distance(double v, const PursuitParams& p) {
    return p.k_v * v + p.l_min;
}

std::optional<LookaheadPoint> select_lookahead_point(const CenterlinePath& path, double l_d) {
    if (path.empty()) return std::nullopt;

    auto result = [&](const Vec2& pt, size_t nearest_idx) {
        return LookaheadPoint{pt, path.curvature[nearest_idx]};
    };

    if (path.points[0].norm() >= l_d) return result(path.points[0], 0);
    for (size_t i = 1; i < path.size(); ++i) {
        const double r = path.points[i].norm();
        if (r < l_d) continue;
        // intersect segment [a, b] with the circle |p| = l_d
        const Vec2 a = path.points[i - 1];
        const Vec2 b = path.points[i];
        const Vec2 d = b - a;
        const double qa = d.squared_norm();
        const double qb = 2.0 * dot(a, d);
        const double qc = a.squared_norm() - l_d * l_d;
        double t = 1.0;
        if (qa > 0.0) {
            const double disc = qb * qb - 4.0 * qa * qc;
            if (disc >= 0.0) {
                const double root = (-qb + std::sqrt(disc)) / (2.0 * qa);
                if (root >= 0.0 && root <= 1.0) t = root;
            }
        }
        const Vec2 pt = a + d * t;
        return result(pt, t < 0.5 ? i - 1 : i);
    }
    return result(path.points.back(), path.size() - 1);
}

double steering(const Vec2& target, const VehicleParams& vp, double l_d) {
    const double alpha = std::atan2(target.y, target.x);
    const double delta = std::atan(2.0 * vp.wheelbase * std::sin(alpha) / l_d);
    return std::clamp(delta, -vp.max_steer, vp.max_steer);
}

double target_speed(double kappa, const VehicleParams& vp, double kappa_floor) {
    const double k = std::max(std::abs(kappa), kappa_floor);
    const double v = std::sqrt(vp.friction_mu * vp.a_max_lat / k);
    return std::clamp(v, vp.v_min, vp.v_max);
}

PidOutput pid_longitudinal(double v_target, double v_actual, double dt, const PidGains& gains,
                           PidState& state) {
    const double e = v_target - v_actual;
    state.integral = std::clamp(state.integral + e * dt, -gains.integral_limit,
                                gains.integral_limit);
    const double de = state.has_prev ? (e - state.prev_error) / dt : 0.0;
    state.prev_error = e;
    state.has_prev = true;

    PidOutput out;
    if (e >= 0.0) {
        out.throttle = std::clamp(
            gains.kp_throttle * e + gains.ki_throttle * state.integral + gains.kd_throttle * de,
            0.0, 1.0);
    } else {
        out.brake = std::clamp(
            gains.kp_brake * (-e) + gains.ki_brake * (-state.integral) + gains.kd_brake * (-de),
            0.0, 1.0);
    }
    return out;
}

RawCenterpoints Controller::circumcenter_points(const Triangulation& tri) const {
    RawCenterpoints out;
    for (const auto& t : tri.triangles) {
        const Vec2& a = tri.vertices[static_cast<size_t>(t[0])];
        const Vec2& b = tri.vertices[static_cast<size_t>(t[1])];
        const Vec2& c = tri.vertices[static_cast<size_t>(t[2])];
        const Vec2 cc = circumcenter(a, b, c);
        // keep circumcenters within the triangle's bounding box; far-flung
        // centers of slivers are rejected, off-center ones of obtuse
        // triangles stay
        const double lo_x = std::min({a.x, b.x, c.x}), hi_x = std::max({a.x, b.x, c.x});
        const double lo_y = std::min({a.y, b.y, c.y}), hi_y = std::max({a.y, b.y, c.y});
        if (cc.x < lo_x || cc.x > hi_x || cc.y < lo_y || cc.y > hi_y) continue;
        if (cc.x <= 0.0) continue;  // behind the vehicle (vehicle frame)
        out.points.push_back(cc);
        out.source_edges.push_back({t[0], t[1]});
    }
    return out;
}

ControlCommand Controller::fallback(double v_actual, double dt) {
    last_was_fallback_ = true;
    if (cfg_.fallback.mode == FallbackMode::HoldLast && last_command_ &&
        held_ticks_ < cfg_.fallback.hold_ticks) {
        ++held_ticks_;
        return *last_command_;
    }
    ControlCommand cmd;
    cmd.steering = 0.0;
    cmd.target_speed = cfg_.vehicle.v_min;
    if (cfg_.longitudinal == LongitudinalMode::ThrottleBrake) {
        cmd.throttle = 0.0;
        cmd.brake = 1.0;
    }
    (void)dt;
    (void)v_actual;
    return cmd;
}

ControlCommand Controller::tick(const Scan2D& scan, double v_actual, double dt) {
    last_was_fallback_ = false;
    last_centerline_.reset();
    last_triangulation_.reset();
    last_centerpoints_ = {};

    std::optional<CenterlinePath> path;
    try {
        const BoundaryPoints boundary = subsample_scan(scan, cfg_.extraction.box_size);
        const Triangulation tri = delaunay(boundary);
        RawCenterpoints raw = source_ == CenterpointSource::OpposingEdgeMidpoints
                                  ? extract_midpoints(tri, 0.0, cfg_.extraction)
                                  : circumcenter_points(tri);
        raw = filter_pseudo(raw, scan, 0.0, cfg_.extraction);
        last_triangulation_ = tri;
        last_centerpoints_ = raw;
        path = build_centerline(raw, Pose{}, cfg_.extraction, cfg_.smoothing, enable_ccma_);
    } catch (const NotEnoughGeometry&) {
        path.reset();
    } catch (const std::invalid_argument&) {
        path.reset();
    }

    if (!path) return fallback(v_actual, dt);
    last_centerline_ = path;

    const double l_d = lookahead_distance(v_actual, cfg_.pursuit);
    const auto look = select_lookahead_point(*path, l_d);
    if (!look) return fallback(v_actual, dt);

    ControlCommand cmd;
    cmd.steering = steering(look->point, cfg_.vehicle, l_d);
    cmd.target_speed = target_speed(look->curvature, cfg_.vehicle, cfg_.kappa_floor);
    if (cfg_.longitudinal == LongitudinalMode::ThrottleBrake) {
        const PidOutput pid = pid_longitudinal(cmd.target_speed, v_actual, dt, cfg_.pid, pid_state_);
        cmd.throttle = pid.throttle;
        cmd.brake = pid.brake;
    }
    last_command_ = cmd;
    held_ticks_ = 0;
    return cmd;
}

}  // namespace mctr
