#pragma once

#include <string>
#include <vector>

#include "mctr/config.hpp"
#include "mctr/metrics.hpp"

namespace mctr {

struct EpisodeResult {
    std::string controller;
    std::string track;
    uint64_t seed = 0;
    EpisodeLog log;
    EpisodeMetrics metrics;
};

struct ExperimentResult {
    std::vector<EpisodeResult> episodes;  // in (controller, track, seed) config order
};

/// Deterministic per-episode RNG stream derived from (seed, episode index).
uint64_t episode_rng_stream(uint64_t seed, uint64_t episode_id);

/// Runs every (controller, track, seed) episode, in parallel up to cfg.jobs
/// workers, and writes episode CSVs, metrics.csv, and summary.csv under
/// cfg.output_dir. Crashed or collided episodes are data points, not errors.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Trajectory overlay and curvature profile SVGs for a completed experiment
/// directory. Returns the generated file paths.
std::vector<std::string> render_report(const std::string& output_dir);

TrackMap resolve_track(const std::string& name_or_path);

}  // namespace mctr
