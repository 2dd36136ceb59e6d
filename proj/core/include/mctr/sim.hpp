#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "mctr/control.hpp"
#include "mctr/geometry.hpp"
#include "mctr/scan.hpp"

namespace mctr {

/// Closed-course track: boundary polylines plus a ground-truth centerline
/// that only the metrics layer may look at.
struct TrackMap {
    std::string name;
    Polyline inner;   // closed
    Polyline outer;   // closed
    Polyline truth_centerline;  // closed
    std::vector<double> truth_curvature;  // per centerline point
    Pose start_pose;
    double half_width = 1.1;
};

struct SimState {
    Pose pose;
    double speed = 0.0;
    double time = 0.0;
    int tick_index = 0;
    int lap_count = 0;
    bool collided = false;
};

struct SensorConfig {
    int beams = 1081;
    double fov = 270.0 * M_PI / 180.0;
    double range_max = 10.0;
    double noise_sigma = 0.03;
    bool lifted_3d = false;  // route the scan through a 3D lift + reprojection
    double band_z_low = 0.05;
    double band_z_high = 0.30;
};

struct SimConfig {
    double dt = 0.02;
    SensorConfig sensor;
    LongitudinalMode actuation_mode = LongitudinalMode::DirectVelocity;
    double velocity_lag_tau = 0.15;  // mode A
    double accel_throttle = 4.0;     // mode B gains
    double accel_brake = 8.0;
    double drag = 0.15;
    double wheelbase = 0.33;
    double footprint_radius = 0.15;
    int max_ticks = 6000;
    int fallback_storm_limit = 100;  // consecutive fallbacks that abort the run
    double lap_debounce = 2.0;       // seconds
};

enum class EpisodeStatus { Completed, Collision, Timeout, FallbackStorm };

const char* to_string(EpisodeStatus s);

struct TickRecord {
    int tick = 0;
    double time = 0.0;
    double x = 0.0, y = 0.0, heading = 0.0;
    double speed = 0.0;
    double steer = 0.0, v_target = 0.0, throttle = 0.0, brake = 0.0;
    std::string status;  // ok | fallback | lap | collision | timeout | fallback_storm
};

struct EpisodeLog {
    std::vector<TickRecord> ticks;
    std::vector<double> lap_crossings;  // includes the t=0 start crossing
    EpisodeStatus status = EpisodeStatus::Timeout;
    bool collided = false;
    double mean_tick_micros = 0.0;
    double max_tick_micros = 0.0;
    std::vector<std::string> trace;  // per-frame debug dumps when tracing
};

/// Precomputed segment grid for fast raycasts against a fixed track.
class Raycaster {
public:
    explicit Raycaster(const TrackMap& track, double cell_size = 0.5);

    /// Nearest boundary hit along a ray, +inf when nothing within max_range.
    double cast(const Vec2& origin, const Vec2& dir, double max_range) const;

    /// Reference implementation testing every segment; used by tests.
    double cast_brute_force(const Vec2& origin, const Vec2& dir, double max_range) const;

private:
    struct Segment {
        Vec2 a, b;
    };
    std::vector<Segment> segments_;
    Vec2 grid_origin_;
    double cell_ = 0.5;
    int nx_ = 0, ny_ = 0;
    std::vector<std::vector<int>> cells_;
};

Scan2D raycast_scan(const Raycaster& rc, const Pose& pose, const SensorConfig& sensor,
                    std::mt19937_64& rng);

/// Lifts a 2D scan into a synthetic 3D cloud inside the vertical band.
PointCloud3D lift_scan(const Scan2D& scan, double z_low, double z_high, int layers = 3);

SimState step(const SimState& state, const ControlCommand& cmd, const SimConfig& cfg);

bool check_collision(const TrackMap& track, const Pose& pose, double footprint_radius);

/// Optional per-tick trace hook: receives the tick index and the controller
/// after it produced the command for that tick.
using TraceHook = std::function<void(int, const ReactiveController&, std::vector<std::string>&)>;

EpisodeLog run_episode(const TrackMap& track, ReactiveController& controller,
                       const SimConfig& cfg, int target_laps, uint64_t rng_seed,
                       const TraceHook& trace = nullptr);

std::map<std::string, TrackMap> builtin_tracks();

void write_track(std::ostream& out, const TrackMap& track);
TrackMap read_track(std::istream& in);
void save_track_file(const std::string& path, const TrackMap& track);
TrackMap load_track_file(const std::string& path);

void write_episode_csv(std::ostream& out, const EpisodeLog& log);
EpisodeLog read_episode_csv(std::istream& in);

}  // namespace mctr
