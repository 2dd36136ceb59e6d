#pragma once

#include <string>
#include <vector>

#include "mctr/sim.hpp"

namespace mctr {

struct EpisodeMetrics {
    std::string controller;
    std::string track;
    uint64_t seed = 0;
    int laps = 0;
    double t_lap_mean = 0.0;
    double t_lap_std = 0.0;
    double eps_k = 0.0;   // mean |kappa_driven - kappa_truth|, 1/m
    double j_lat = 0.0;   // mean |d^3 e_lat / dt^3|, m/s^3
    bool pass = false;    // all requested laps completed without collision
    double mean_tick_us = 0.0;
    double max_tick_us = 0.0;
};

struct Summary {
    double t_lap_mean = 0.0, t_lap_std = 0.0;
    double eps_k_mean = 0.0, eps_k_std = 0.0;
    double j_lat_mean = 0.0, j_lat_std = 0.0;
    double pass_percent = 0.0;
    double mean_tick_us = 0.0;
    double max_tick_us = 0.0;
};

std::vector<double> lap_times(const EpisodeLog& log);

/// Resamples the driven trajectory at uniform arc steps and compares its
/// Menger curvature against the nearest ground-truth centerline point.
double curvature_error(const EpisodeLog& log, const TrackMap& track, double resample_step = 0.05);

/// Mean absolute third central difference of the lateral error to the truth
/// centerline, after a 5-sample moving-average prefilter.
double lateral_jerk(const EpisodeLog& log, const TrackMap& track, double dt);

/// Signed lateral distance from a point to the truth centerline (left of the
/// driving direction positive). Exposed for tests.
double signed_lateral_error(const Vec2& p, const TrackMap& track);

/// Resample a polyline at uniform arc-length steps. Exposed for tests and
/// the report renderer.
Polyline resample_uniform(const Polyline& pts, double step);

EpisodeMetrics compute_metrics(const EpisodeLog& log, const TrackMap& track, double dt,
                               int requested_laps);

Summary aggregate(const std::vector<EpisodeMetrics>& runs);

/// mean and sample standard deviation (n-1)
std::pair<double, double> mean_std(const std::vector<double>& xs);

void write_metrics_csv_header(std::ostream& out);
void write_metrics_csv_row(std::ostream& out, const EpisodeMetrics& m);
std::vector<EpisodeMetrics> read_metrics_csv(std::istream& in);

}  // namespace mctr
