#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mctr/baselines.hpp"
#include "mctr/sim.hpp"

namespace mctr {

struct ExperimentConfig {
    std::vector<ControllerKind> controllers = {ControllerKind::Mctr};
    std::vector<std::string> tracks = {"O"};  // builtin names or file paths
    std::vector<uint64_t> seeds = {1};
    int laps_per_episode = 3;
    SimConfig sim;
    ControllerConfig controller;  // shared by all variants
    FtgParams ftg;
    std::string output_dir = "out";
    bool trace = false;
    int jobs = 0;  // 0 = hardware concurrency
};

struct ConfigResult {
    ExperimentConfig config;
    std::vector<std::string> errors;
    bool ok() const { return errors.empty(); }
};

/// Parses the flat `[section]` key-value format. Collects every error
/// (unknown key, bad value, out-of-range) instead of stopping at the first.
ConfigResult parse_experiment_config(std::istream& in);
ConfigResult load_experiment_config(const std::string& path);

void write_default_config(std::ostream& out);

}  // namespace mctr
