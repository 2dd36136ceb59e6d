#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mctr/control.hpp"

using namespace mctr;

namespace {

Scan2D corridor_scan(double half_width, int beams = 1081, double range_max = 10.0) {
    // infinite corridor along +x with walls at y = +-half_width
    const double fov = 270.0 * M_PI / 180.0;
    Scan2D scan;
    scan.range_max = range_max;
    scan.angle_min = -fov / 2.0;
    scan.angle_increment = fov / (beams - 1);
    for (int i = 0; i < beams; ++i) {
        const double a = scan.angle(static_cast<size_t>(i));
        const double s = std::sin(a);
        double r = Scan2D::kNoReturn;
        if (std::abs(s) > 1e-9) {
            r = half_width / std::abs(s);
            if (r > range_max) r = Scan2D::kNoReturn;
        }
        scan.ranges.push_back(r);
    }
    return scan;
}

CenterlinePath straight_path(double spacing, int n) {
    std::vector<Vec2> pts;
    for (int i = 1; i <= n; ++i) pts.push_back({spacing * i, 0.0});
    return finalize(pts);
}

}  // namespace

TEST_CASE("lookahead_distance is affine in speed") {
    PursuitParams p;
    p.k_v = 0.3;
    p.l_min = 0.6;
    CHECK(lookahead_distance(0.0, p) == doctest::Approx(0.6));
    CHECK(lookahead_distance(2.0, p) == doctest::Approx(1.2));
    CHECK(lookahead_distance(4.0, p) == doctest::Approx(1.8));
}

TEST_CASE("select_lookahead_point interpolates exactly on the lookahead circle") {
    const CenterlinePath path = straight_path(0.25, 20);
    for (double l_d : {0.3, 0.7, 1.1, 2.05, 3.99}) {
        const auto look = select_lookahead_point(path, l_d);
        REQUIRE(look.has_value());
        CHECK(look->point.norm() == doctest::Approx(l_d).epsilon(1e-12));
        CHECK(look->point.y == 0.0);
    }
}

TEST_CASE("select_lookahead_point saturates to the path end") {
    const CenterlinePath path = straight_path(0.25, 8);  // ends at x = 2
    const auto look = select_lookahead_point(path, 5.0);
    REQUIRE(look.has_value());
    CHECK(look->point.x == doctest::Approx(2.0));
}

TEST_CASE("select_lookahead_point: first point already outside the circle") {
    const CenterlinePath path = finalize({{3.0, 0.0}, {4.0, 0.0}, {5.0, 0.0}});
    const auto look = select_lookahead_point(path, 1.0);
    REQUIRE(look.has_value());
    CHECK(look->point.x == doctest::Approx(3.0));
}

TEST_CASE("select_lookahead_point on an arc reports the local curvature") {
    std::vector<Vec2> arc;
    const double radius = 2.0;
    for (int i = 0; i < 32; ++i) {
        const double t = -M_PI / 2.0 + M_PI * i / 31.0 * 0.5;
        arc.push_back({radius * std::cos(t), radius + radius * std::sin(t)});
    }
    const CenterlinePath path = finalize(arc);
    const auto look = select_lookahead_point(path, 1.5);
    REQUIRE(look.has_value());
    CHECK(std::abs(look->curvature) == doctest::Approx(1.0 / radius).epsilon(1e-6));
    CHECK(look->curvature > 0.0);  // left turn
}

TEST_CASE("steering matches the pure-pursuit formula") {
    VehicleParams vp;
    vp.wheelbase = 0.33;
    vp.max_steer = 0.42;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ang(-1.2, 1.2), dist(0.6, 3.0);
    for (int i = 0; i < 200; ++i) {
        const double alpha = ang(rng);
        const double l_d = dist(rng);
        const Vec2 target = unit_from_angle(alpha) * l_d;
        const double expect =
            std::clamp(std::atan(2.0 * vp.wheelbase * std::sin(alpha) / l_d), -vp.max_steer,
                       vp.max_steer);
        CHECK(std::abs(steering(target, vp, l_d) - expect) < 1e-12);
    }
}

TEST_CASE("steering: straight ahead is zero, left target steers left, clamp holds") {
    VehicleParams vp;
    CHECK(steering({2.0, 0.0}, vp, 2.0) == 0.0);
    CHECK(steering({1.0, 0.5}, vp, std::hypot(1.0, 0.5)) > 0.0);
    CHECK(steering({0.1, 0.6}, vp, 0.6) <= vp.max_steer);
    CHECK(steering({0.1, -0.6}, vp, 0.6) >= -vp.max_steer);
}

TEST_CASE("target_speed follows the lateral-acceleration budget with clamps") {
    VehicleParams vp;
    vp.friction_mu = 0.8;
    vp.a_max_lat = 9.81;
    vp.v_min = 0.5;
    vp.v_max = 4.0;
    const double kappa = 1.0;
    CHECK(target_speed(kappa, vp) == doctest::Approx(std::sqrt(0.8 * 9.81)).epsilon(1e-12));
    CHECK(target_speed(-kappa, vp) == target_speed(kappa, vp));
    CHECK(target_speed(0.0, vp) == vp.v_max);       // floor kicks in, then clamp
    CHECK(target_speed(100.0, vp) == vp.v_min);     // hairpin clamps to v_min
    CHECK(target_speed(1e-9, vp, 1e-3) ==
          doctest::Approx(std::min(vp.v_max, std::sqrt(0.8 * 9.81 / 1e-3))));
}

TEST_CASE("pid_longitudinal matches a hand-stepped reference") {
    PidGains g;
    g.kp_throttle = 0.6;
    g.ki_throttle = 0.1;
    g.kd_throttle = 0.05;
    g.kp_brake = 0.5;
    g.ki_brake = 0.02;
    g.kd_brake = 0.01;
    g.integral_limit = 5.0;

    PidState state;
    double integral = 0.0, prev_e = 0.0;
    bool has_prev = false;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> v(0.0, 4.0);
    const double dt = 0.02;
    for (int i = 0; i < 500; ++i) {
        const double vt = v(rng), va = v(rng);
        const PidOutput out = pid_longitudinal(vt, va, dt, g, state);

        const double e = vt - va;
        integral = std::clamp(integral + e * dt, -g.integral_limit, g.integral_limit);
        const double de = has_prev ? (e - prev_e) / dt : 0.0;
        prev_e = e;
        has_prev = true;
        double throttle = 0.0, brake = 0.0;
        if (e >= 0.0)
            throttle = std::clamp(g.kp_throttle * e + g.ki_throttle * integral + g.kd_throttle * de,
                                  0.0, 1.0);
        else
            brake = std::clamp(g.kp_brake * -e + g.ki_brake * -integral + g.kd_brake * -de, 0.0,
                               1.0);
        CHECK(out.throttle == throttle);
        CHECK(out.brake == brake);
        CHECK((out.throttle == 0.0 || out.brake == 0.0));
    }
}

TEST_CASE("pid integral saturates at the anti-windup limit") {
    PidGains g;
    g.integral_limit = 1.0;
    PidState state;
    for (int i = 0; i < 10000; ++i) pid_longitudinal(4.0, 0.0, 0.02, g, state);
    CHECK(state.integral == doctest::Approx(1.0));
}

TEST_CASE("controller tick: symmetric corridor gives near-zero steering") {
    ControllerConfig cfg;
    Controller ctl(cfg);
    const ControlCommand cmd = ctl.tick(corridor_scan(1.0), 1.0, 0.02);
    CHECK(!ctl.last_was_fallback());
    CHECK(std::abs(cmd.steering) < 0.05);
    CHECK(cmd.target_speed >= cfg.vehicle.v_min);
    CHECK(cmd.target_speed <= cfg.vehicle.v_max);
}

TEST_CASE("controller tick: empty scan triggers fallback") {
    ControllerConfig cfg;
    Controller ctl(cfg);
    Scan2D scan;
    scan.angle_min = -1.0;
    scan.angle_increment = 0.01;
    scan.range_max = 10.0;
    scan.ranges.assign(200, Scan2D::kNoReturn);
    const ControlCommand cmd = ctl.tick(scan, 2.0, 0.02);
    CHECK(ctl.last_was_fallback());
    CHECK(cmd.steering == 0.0);
    CHECK(cmd.target_speed == cfg.vehicle.v_min);
}

TEST_CASE("controller tick: hold-last fallback replays the previous command") {
    ControllerConfig cfg;
    cfg.fallback.mode = FallbackMode::HoldLast;
    cfg.fallback.hold_ticks = 3;
    Controller ctl(cfg);
    const ControlCommand good = ctl.tick(corridor_scan(1.0), 1.0, 0.02);
    REQUIRE(!ctl.last_was_fallback());

    Scan2D empty;
    empty.angle_min = -1.0;
    empty.angle_increment = 0.01;
    empty.range_max = 10.0;
    empty.ranges.assign(200, Scan2D::kNoReturn);
    for (int i = 0; i < 3; ++i) {
        const ControlCommand held = ctl.tick(empty, 1.0, 0.02);
        CHECK(ctl.last_was_fallback());
        CHECK(held.steering == good.steering);
        CHECK(held.target_speed == good.target_speed);
    }
    // budget exhausted, degrade to brake-straight
    const ControlCommand after = ctl.tick(empty, 1.0, 0.02);
    CHECK(after.steering == 0.0);
    CHECK(after.target_speed == cfg.vehicle.v_min);
}

TEST_CASE("controller tick: offset corridor steers back toward the middle") {
    // vehicle displaced toward the right wall: walls at y = +1.5 and y = -0.5
    const int beams = 1081;
    const double fov = 270.0 * M_PI / 180.0;
    Scan2D scan;
    scan.range_max = 10.0;
    scan.angle_min = -fov / 2.0;
    scan.angle_increment = fov / (beams - 1);
    for (int i = 0; i < beams; ++i) {
        const double a = scan.angle(static_cast<size_t>(i));
        const double s = std::sin(a);
        double r = Scan2D::kNoReturn;
        if (s > 1e-9) r = 1.5 / s;
        else if (s < -1e-9) r = -0.5 / s;
        if (r > scan.range_max) r = Scan2D::kNoReturn;
        scan.ranges.push_back(r);
    }
    ControllerConfig cfg;
    Controller ctl(cfg);
    const ControlCommand cmd = ctl.tick(scan, 1.0, 0.02);
    REQUIRE(!ctl.last_was_fallback());
    CHECK(cmd.steering > 0.0);  // middle is to the left
}

TEST_CASE("controller tick in throttle mode emits at most one pedal") {
    ControllerConfig cfg;
    cfg.longitudinal = LongitudinalMode::ThrottleBrake;
    Controller ctl(cfg);
    const ControlCommand slow = ctl.tick(corridor_scan(1.0), 0.2, 0.02);
    CHECK(!ctl.last_was_fallback());
    CHECK(slow.throttle > 0.0);
    CHECK(slow.brake == 0.0);
    const ControlCommand fast = ctl.tick(corridor_scan(1.0), 10.0, 0.02);
    CHECK(fast.brake > 0.0);
    CHECK(fast.throttle == 0.0);
}

TEST_CASE("controller exposes its pipeline trace state") {
    ControllerConfig cfg;
    Controller ctl(cfg);
    ctl.tick(corridor_scan(1.0), 1.0, 0.02);
    CHECK(ctl.last_triangulation().has_value());
    CHECK(!ctl.last_centerpoints().points.empty());
    CHECK(ctl.last_centerline().has_value());
    CHECK(ctl.pipeline() == &ctl);
}
