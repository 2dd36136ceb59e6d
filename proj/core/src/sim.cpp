#include "mctr/sim.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace mctr {

const char* to_string(EpisodeStatus s) {
    switch (s) {
        case EpisodeStatus::Completed: return "completed";
        case EpisodeStatus::Collision: return "collision";
        case EpisodeStatus::Timeout: return "timeout";
        case EpisodeStatus::FallbackStorm: return "fallback_storm";
    }
    return "unknown";
}

namespace {

// t along the ray to segment [a, b], or +inf when there is no hit.
double ray_segment(const Vec2& o, const Vec2& d, const Vec2& a, const Vec2& b) {
    const Vec2 s = b - a;
    const double denom = cross(d, s);
    if (std::abs(denom) < 1e-15) return std::numeric_limits<double>::infinity();
    const Vec2 ao = a - o;
    const double t = cross(ao, s) / denom;
    const double u = cross(ao, d) / denom;
    if (t < 0.0 || u < 0.0 || u > 1.0) return std::numeric_limits<double>::infinity();
    return t;
}

bool point_in_polygon(const Vec2& p, const Polyline& poly) {
    bool inside = false;
    const size_t n = poly.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double xint = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < xint) inside = !inside;
        }
    }
    return inside;
}

}  // namespace

Raycaster::Raycaster(const TrackMap& track, double cell_size) : cell_(cell_size) {
    auto add_polyline = [&](const Polyline& poly) {
        const size_t n = poly.size();
        for (size_t i = 0; i < n; ++i) segments_.push_back({poly[i], poly[(i + 1) % n]});
    };
    add_polyline(track.inner);
    add_polyline(track.outer);
    if (segments_.empty()) throw std::invalid_argument("Raycaster: empty track");

    Vec2 lo = segments_[0].a, hi = segments_[0].a;
    for (const Segment& s : segments_) {
        for (const Vec2& p : {s.a, s.b}) {
            lo.x = std::min(lo.x, p.x);
            lo.y = std::min(lo.y, p.y);
            hi.x = std::max(hi.x, p.x);
            hi.y = std::max(hi.y, p.y);
        }
    }
    grid_origin_ = {lo.x - cell_, lo.y - cell_};
    nx_ = static_cast<int>(std::ceil((hi.x - grid_origin_.x) / cell_)) + 2;
    ny_ = static_cast<int>(std::ceil((hi.y - grid_origin_.y) / cell_)) + 2;
    cells_.assign(static_cast<size_t>(nx_ * ny_), {});

    for (int si = 0; si < static_cast<int>(segments_.size()); ++si) {
        const Segment& s = segments_[static_cast<size_t>(si)];
        const int x0 = static_cast<int>((std::min(s.a.x, s.b.x) - grid_origin_.x) / cell_);
        const int x1 = static_cast<int>((std::max(s.a.x, s.b.x) - grid_origin_.x) / cell_);
        const int y0 = static_cast<int>((std::min(s.a.y, s.b.y) - grid_origin_.y) / cell_);
        const int y1 = static_cast<int>((std::max(s.a.y, s.b.y) - grid_origin_.y) / cell_);
        for (int gx = std::max(0, x0); gx <= std::min(nx_ - 1, x1); ++gx)
            for (int gy = std::max(0, y0); gy <= std::min(ny_ - 1, y1); ++gy)
                cells_[static_cast<size_t>(gy * nx_ + gx)].push_back(si);
    }
}

double Raycaster::cast_brute_force(const Vec2& origin, const Vec2& dir, double max_range) const {
    double best = std::numeric_limits<double>::infinity();
    for (const Segment& s : segments_) best = std::min(best, ray_segment(origin, dir, s.a, s.b));
    return best <= max_range ? best : std::numeric_limits<double>::infinity();
}

double Raycaster::cast(const Vec2& origin, const Vec2& dir, double max_range) const {
    // Amanatides-Woo grid traversal; candidate segments are tested as their
    // cells are entered, stopping once the entry distance passes the best hit.
    int gx = static_cast<int>((origin.x - grid_origin_.x) / cell_);
    int gy = static_cast<int>((origin.y - grid_origin_.y) / cell_);
    if (gx < 0 || gx >= nx_ || gy < 0 || gy >= ny_) return cast_brute_force(origin, dir, max_range);

    const int step_x = dir.x > 0 ? 1 : (dir.x < 0 ? -1 : 0);
    const int step_y = dir.y > 0 ? 1 : (dir.y < 0 ? -1 : 0);
    const double inv_dx = dir.x != 0.0 ? 1.0 / dir.x : 0.0;
    const double inv_dy = dir.y != 0.0 ? 1.0 / dir.y : 0.0;

    auto boundary_t = [&](int g, double o, double go, int stp, double inv) {
        if (stp == 0) return std::numeric_limits<double>::infinity();
        const double edge = go + (g + (stp > 0 ? 1 : 0)) * cell_;
        return (edge - o) * inv;
    };
    double tmax_x = boundary_t(gx, origin.x, grid_origin_.x, step_x, inv_dx);
    double tmax_y = boundary_t(gy, origin.y, grid_origin_.y, step_y, inv_dy);
    const double tdelta_x = step_x != 0 ? cell_ * std::abs(inv_dx) : 0.0;
    const double tdelta_y = step_y != 0 ? cell_ * std::abs(inv_dy) : 0.0;

    double best = std::numeric_limits<double>::infinity();
    double t_entry = 0.0;
    while (t_entry <= std::min(best, max_range)) {
        for (int si : cells_[static_cast<size_t>(gy * nx_ + gx)]) {
            const Segment& s = segments_[static_cast<size_t>(si)];
            best = std::min(best, ray_segment(origin, dir, s.a, s.b));
        }
        if (tmax_x < tmax_y) {
            t_entry = tmax_x;
            tmax_x += tdelta_x;
            gx += step_x;
        } else {
            t_entry = tmax_y;
            tmax_y += tdelta_y;
            gy += step_y;
        }
        if (gx < 0 || gx >= nx_ || gy < 0 || gy >= ny_) break;
    }
    return best <= max_range ? best : std::numeric_limits<double>::infinity();
}

Scan2D raycast_scan(const Raycaster& rc, const Pose& pose, const SensorConfig& sensor,
                    std::mt19937_64& rng) {
    Scan2D scan;
    scan.range_max = sensor.range_max;
    scan.angle_increment = sensor.fov / (sensor.beams - 1);
    scan.angle_min = -sensor.fov / 2.0;
    scan.ranges.resize(static_cast<size_t>(sensor.beams));
    std::normal_distribution<double> noise(0.0, sensor.noise_sigma);
    const Vec2 origin = pose.position();
    for (int i = 0; i < sensor.beams; ++i) {
        const double angle = pose.heading + scan.angle(static_cast<size_t>(i));
        double r = rc.cast(origin, unit_from_angle(angle), sensor.range_max);
        if (std::isfinite(r) && sensor.noise_sigma > 0.0) r += noise(rng);
        scan.ranges[static_cast<size_t>(i)] =
            (std::isfinite(r) && r > 0.0 && r <= sensor.range_max) ? r : Scan2D::kNoReturn;
    }
    return scan;
}

PointCloud3D lift_scan(const Scan2D& scan, double z_low, double z_high, int layers) {
    PointCloud3D cloud;
    for (size_t i = 0; i < scan.size(); ++i) {
        if (!scan.has_return(i)) continue;
        const Vec2 p = unit_from_angle(scan.angle(i)) * scan.ranges[i];
        for (int l = 0; l < layers; ++l) {
            const double z = z_low + (z_high - z_low) * (l + 0.5) / layers;
            cloud.points.push_back({p.x, p.y, z});
        }
    }
    return cloud;
}

SimState step(const SimState& state, const ControlCommand& cmd, const SimConfig& cfg) {
    const double dt = cfg.dt;
    const double delta = cmd.steering;

    auto deriv = [&](double theta, double v, double* dtheta, double* dv) {
        *dtheta = v * std::tan(delta) / cfg.wheelbase;
        if (cfg.actuation_mode == LongitudinalMode::DirectVelocity) {
            *dv = (cmd.target_speed - v) / std::max(cfg.velocity_lag_tau, 1e-6);
        } else {
            *dv = cfg.accel_throttle * cmd.throttle - cfg.accel_brake * cmd.brake -
                  cfg.drag * std::max(v, 0.0);
            if (v <= 0.0 && *dv < 0.0) *dv = 0.0;
        }
    };

    // RK4 on (x, y, theta, v)
    struct S { double x, y, th, v; };
    auto f = [&](const S& s, S* ds) {
        ds->x = s.v * std::cos(s.th);
        ds->y = s.v * std::sin(s.th);
        deriv(s.th, s.v, &ds->th, &ds->v);
    };
    const S s0{state.pose.x, state.pose.y, state.pose.heading, state.speed};
    S k1, k2, k3, k4;
    f(s0, &k1);
    f({s0.x + 0.5 * dt * k1.x, s0.y + 0.5 * dt * k1.y, s0.th + 0.5 * dt * k1.th,
       s0.v + 0.5 * dt * k1.v}, &k2);
    f({s0.x + 0.5 * dt * k2.x, s0.y + 0.5 * dt * k2.y, s0.th + 0.5 * dt * k2.th,
       s0.v + 0.5 * dt * k2.v}, &k3);
    f({s0.x + dt * k3.x, s0.y + dt * k3.y, s0.th + dt * k3.th, s0.v + dt * k3.v}, &k4);

    SimState out = state;
    out.pose.x = s0.x + dt / 6.0 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x);
    out.pose.y = s0.y + dt / 6.0 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y);
    out.pose.heading = s0.th + dt / 6.0 * (k1.th + 2 * k2.th + 2 * k3.th + k4.th);
    out.speed = std::max(0.0, s0.v + dt / 6.0 * (k1.v + 2 * k2.v + 2 * k3.v + k4.v));
    out.tick_index = state.tick_index + 1;
    out.time = out.tick_index * dt;
    return out;
}

bool check_collision(const TrackMap& track, const Pose& pose, double footprint_radius) {
    const Vec2 p = pose.position();
    if (!point_in_polygon(p, track.outer) || point_in_polygon(p, track.inner)) return true;
    if (point_polyline_distance(p, track.inner) < footprint_radius) return true;
    if (point_polyline_distance(p, track.outer) < footprint_radius) return true;
    return false;
}

EpisodeLog run_episode(const TrackMap& track, ReactiveController& controller,
                       const SimConfig& cfg, int target_laps, uint64_t rng_seed,
                       const TraceHook& trace) {
    Raycaster rc(track);
    std::mt19937_64 rng(rng_seed);

    EpisodeLog log;
    log.lap_crossings.push_back(0.0);

    SimState state;
    state.pose = track.start_pose;

    const Vec2 line_center = track.start_pose.position();
    const Vec2 line_fwd = track.start_pose.forward();
    const Vec2 line_lat = rotate(line_fwd, M_PI / 2.0);

    ProjectionBand band;
    band.z_low = cfg.sensor.band_z_low;
    band.z_high = cfg.sensor.band_z_high;

    int consecutive_fallbacks = 0;
    double total_micros = 0.0;

    for (int tick = 0; tick < cfg.max_ticks; ++tick) {
        Scan2D scan = raycast_scan(rc, state.pose, cfg.sensor, rng);
        if (cfg.sensor.lifted_3d) {
            const PointCloud3D cloud = lift_scan(scan, band.z_low, band.z_high);
            band.azimuth_min = scan.angle_min;
            band.num_bins = static_cast<int>(scan.size());
            band.azimuth_max = scan.angle_min + scan.angle_increment * band.num_bins;
            Scan2D projected = project_cloud(cloud, band);
            projected.range_max = scan.range_max;
            projected.timestamp = scan.timestamp;
            scan = std::move(projected);
        }

        const auto t0 = std::chrono::steady_clock::now();
        const ControlCommand cmd = controller.tick(scan, state.speed, cfg.dt);
        const auto t1 = std::chrono::steady_clock::now();
        const double micros = std::chrono::duration<double, std::micro>(t1 - t0).count();
        total_micros += micros;
        log.max_tick_micros = std::max(log.max_tick_micros, micros);

        if (trace) trace(tick, controller, log.trace);

        TickRecord rec;
        rec.tick = tick;
        rec.time = state.time;
        rec.x = state.pose.x;
        rec.y = state.pose.y;
        rec.heading = state.pose.heading;
        rec.speed = state.speed;
        rec.steer = cmd.steering;
        rec.v_target = cmd.target_speed;
        rec.throttle = cmd.throttle;
        rec.brake = cmd.brake;
        rec.status = controller.last_was_fallback() ? "fallback" : "ok";

        consecutive_fallbacks = controller.last_was_fallback() ? consecutive_fallbacks + 1 : 0;

        const Vec2 prev = state.pose.position();
        state = step(state, cmd, cfg);
        const Vec2 next = state.pose.position();

        // forward crossing of the start line with debounce
        const double s_prev = dot(prev - line_center, line_fwd);
        const double s_next = dot(next - line_center, line_fwd);
        const double lat = std::abs(dot(next - line_center, line_lat));
        if (s_prev < 0.0 && s_next >= 0.0 && lat <= track.half_width + 0.5 &&
            state.time - log.lap_crossings.back() >= cfg.lap_debounce) {
            log.lap_crossings.push_back(rec.time);
            state.lap_count = static_cast<int>(log.lap_crossings.size()) - 1;
            rec.status = "lap";
        }

        bool done = false;
        if (check_collision(track, state.pose, cfg.footprint_radius)) {
            state.collided = true;
            log.collided = true;
            log.status = EpisodeStatus::Collision;
            rec.status = "collision";
            done = true;
        } else if (consecutive_fallbacks >= cfg.fallback_storm_limit) {
            log.status = EpisodeStatus::FallbackStorm;
            rec.status = "fallback_storm";
            done = true;
        } else if (state.lap_count >= target_laps) {
            log.status = EpisodeStatus::Completed;
            done = true;
        } else if (tick + 1 >= cfg.max_ticks) {
            log.status = EpisodeStatus::Timeout;
            rec.status = "timeout";
            done = true;
        }

        log.ticks.push_back(std::move(rec));
        if (done) break;
    }

    if (!log.ticks.empty()) log.mean_tick_micros = total_micros / log.ticks.size();
    return log;
}

namespace {

/// Closed course from a polar radius profile r(t) = R + a cos(k t).
TrackMap make_parametric_track(const std::string& name, double radius, double amp, int lobes,
                               double half_width, int samples) {
    TrackMap track;
    track.name = name;
    track.half_width = half_width;
    track.inner.resize(static_cast<size_t>(samples));
    track.outer.resize(static_cast<size_t>(samples));
    track.truth_centerline.resize(static_cast<size_t>(samples));
    track.truth_curvature.resize(static_cast<size_t>(samples));

    for (int i = 0; i < samples; ++i) {
        const double t = 2.0 * M_PI * i / samples;
        const double r = radius + amp * std::cos(lobes * t);
        const double rp = -amp * lobes * std::sin(lobes * t);
        const double rpp = -amp * lobes * lobes * std::cos(lobes * t);

        const Vec2 c{r * std::cos(t), r * std::sin(t)};
        const Vec2 cp{rp * std::cos(t) - r * std::sin(t), rp * std::sin(t) + r * std::cos(t)};
        const double speed = cp.norm();
        const Vec2 tangent = cp / speed;
        const Vec2 outward{tangent.y, -tangent.x};  // right of a CCW tangent

        track.truth_centerline[static_cast<size_t>(i)] = c;
        track.truth_curvature[static_cast<size_t>(i)] =
            (r * r + 2.0 * rp * rp - r * rpp) / std::pow(r * r + rp * rp, 1.5);
        track.inner[static_cast<size_t>(i)] = c - outward * half_width;
        track.outer[static_cast<size_t>(i)] = c + outward * half_width;
    }

    const Vec2 start = track.truth_centerline[0];
    const Vec2 next = track.truth_centerline[1];
    track.start_pose = {start.x, start.y, std::atan2(next.y - start.y, next.x - start.x)};
    return track;
}

}  // namespace

std::map<std::string, TrackMap> builtin_tracks() {
    std::map<std::string, TrackMap> tracks;
    tracks["O"] = make_parametric_track("O", 3.4, 0.0, 0, 1.1, 512);
    tracks["F"] = make_parametric_track("F", 3.4, 0.35, 2, 1.1, 512);
    tracks["M"] = make_parametric_track("M", 3.4, 0.30, 3, 1.1, 512);
    tracks["W"] = make_parametric_track("W", 3.4, 0.25, 4, 1.1, 512);
    return tracks;
}

void write_track(std::ostream& out, const TrackMap& track) {
    out << std::setprecision(17);
    out << "TRACK " << track.name << '\n';
    out << "INNER " << track.inner.size() << '\n';
    for (const Vec2& p : track.inner) out << p.x << ' ' << p.y << '\n';
    out << "OUTER " << track.outer.size() << '\n';
    for (const Vec2& p : track.outer) out << p.x << ' ' << p.y << '\n';
    out << "CENTER " << track.truth_centerline.size() << '\n';
    for (size_t i = 0; i < track.truth_centerline.size(); ++i)
        out << track.truth_centerline[i].x << ' ' << track.truth_centerline[i].y << ' '
            << track.truth_curvature[i] << '\n';
    out << "START " << track.start_pose.x << ' ' << track.start_pose.y << ' '
        << track.start_pose.heading << '\n';
}

TrackMap read_track(std::istream& in) {
    TrackMap track;
    std::string tag;
    if (!(in >> tag) || tag != "TRACK") throw std::runtime_error("track file: expected TRACK");
    in >> track.name;
    size_t n = 0;

    auto read_poly = [&](const char* expect, Polyline& poly) {
        if (!(in >> tag >> n) || tag != expect)
            throw std::runtime_error(std::string("track file: expected ") + expect);
        poly.resize(n);
        for (size_t i = 0; i < n; ++i)
            if (!(in >> poly[i].x >> poly[i].y))
                throw std::runtime_error("track file: truncated polyline");
    };
    read_poly("INNER", track.inner);
    read_poly("OUTER", track.outer);

    if (!(in >> tag >> n) || tag != "CENTER") throw std::runtime_error("track file: expected CENTER");
    track.truth_centerline.resize(n);
    track.truth_curvature.resize(n);
    for (size_t i = 0; i < n; ++i)
        if (!(in >> track.truth_centerline[i].x >> track.truth_centerline[i].y >>
              track.truth_curvature[i]))
            throw std::runtime_error("track file: truncated centerline");

    if (!(in >> tag) || tag != "START") throw std::runtime_error("track file: expected START");
    if (!(in >> track.start_pose.x >> track.start_pose.y >> track.start_pose.heading))
        throw std::runtime_error("track file: truncated start pose");

    if (!track.truth_centerline.empty())
        track.half_width = point_polyline_distance(track.truth_centerline[0], track.inner);
    return track;
}

void save_track_file(const std::string& path, const TrackMap& track) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write track file: " + path);
    write_track(out, track);
}

TrackMap load_track_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open track file: " + path);
    return read_track(in);
}

void write_episode_csv(std::ostream& out, const EpisodeLog& log) {
    out << "tick,time,x,y,heading,speed,steer,v_target,throttle,brake,status\n";
    out << std::setprecision(12);
    for (const TickRecord& r : log.ticks) {
        out << r.tick << ',' << r.time << ',' << r.x << ',' << r.y << ',' << r.heading << ','
            << r.speed << ',' << r.steer << ',' << r.v_target << ',' << r.throttle << ','
            << r.brake << ',' << r.status << '\n';
    }
}

EpisodeLog read_episode_csv(std::istream& in) {
    EpisodeLog log;
    log.lap_crossings.push_back(0.0);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty episode CSV");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        TickRecord r;
        char comma;
        ls >> r.tick >> comma >> r.time >> comma >> r.x >> comma >> r.y >> comma >> r.heading >>
            comma >> r.speed >> comma >> r.steer >> comma >> r.v_target >> comma >> r.throttle >>
            comma >> r.brake >> comma;
        std::getline(ls, r.status);
        if (!r.status.empty() && r.status.back() == '\r') r.status.pop_back();
        if (r.status == "lap") {
            // crossing lands at the end of this tick's step
            log.lap_crossings.push_back(r.time);
        } else if (r.status == "collision") {
            log.collided = true;
            log.status = EpisodeStatus::Collision;
        } else if (r.status == "fallback_storm") {
            log.status = EpisodeStatus::FallbackStorm;
        } else if (r.status == "timeout") {
            log.status = EpisodeStatus::Timeout;
        }
        log.ticks.push_back(std::move(r));
    }
    if (!log.collided && log.status == EpisodeStatus::Timeout && log.lap_crossings.size() > 1 &&
        !log.ticks.empty() && log.ticks.back().status == "lap")
        log.status = EpisodeStatus::Completed;
    return log;
}

}  // namespace mctr
