#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "mctr/experiment.hpp"

namespace {

int cmd_validate(const std::string& path) {
    const mctr::ConfigResult result = mctr::load_experiment_config(path);
    if (!result.ok()) {
        for (const std::string& e : result.errors) std::cerr << "error: " << e << '\n';
        return 1;
    }
    std::cout << "config ok: " << result.config.controllers.size() << " controller(s), "
              << result.config.tracks.size() << " track(s), " << result.config.seeds.size()
              << " seed(s)\n";
    return 0;
}

void apply_overrides(mctr::ExperimentConfig& cfg, const std::vector<std::string>& controllers,
                     const std::vector<std::string>& tracks,
                     const std::vector<uint64_t>& seeds, bool trace, int jobs) {
    if (!controllers.empty()) {
        cfg.controllers.clear();
        for (const std::string& c : controllers)
            cfg.controllers.push_back(mctr::parse_controller_kind(c));
    }
    if (!tracks.empty()) cfg.tracks = tracks;
    if (!seeds.empty()) cfg.seeds = seeds;
    if (trace) cfg.trace = true;
    if (jobs > 0) cfg.jobs = jobs;
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& controllers,
            const std::vector<std::string>& tracks, const std::vector<uint64_t>& seeds,
            bool trace, int jobs) {
    mctr::ConfigResult result = mctr::load_experiment_config(config_path);
    if (!result.ok()) {
        for (const std::string& e : result.errors) std::cerr << "error: " << e << '\n';
        return 1;
    }
    mctr::ExperimentConfig cfg = result.config;
    try {
        apply_overrides(cfg, controllers, tracks, seeds, trace, jobs);
        for (const std::string& t : cfg.tracks) (void)mctr::resolve_track(t);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    try {
        const mctr::ExperimentResult res = mctr::run_experiment(cfg);
        int completed = 0;
        for (const auto& ep : res.episodes) {
            std::cout << ep.controller << " on " << ep.track << " seed " << ep.seed << ": "
                      << mctr::to_string(ep.log.status) << ", laps " << ep.metrics.laps;
            if (ep.metrics.laps > 0)
                std::cout << ", t_lap " << ep.metrics.t_lap_mean << " s";
            std::cout << '\n';
            if (ep.log.status == mctr::EpisodeStatus::Completed) ++completed;
        }
        std::cout << completed << '/' << res.episodes.size() << " episodes completed; results in "
                  << cfg.output_dir << '\n';
        return 0;  // failed episodes are data points, not tool failures
    } catch (const std::exception& e) {
        std::cerr << "infrastructure failure: " << e.what() << '\n';
        return 2;
    }
}

int cmd_report(const std::string& output_dir) {
    try {
        const std::vector<std::string> files = mctr::render_report(output_dir);
        if (files.empty()) {
            std::cerr << "warning: no episode logs found in " << output_dir << ", nothing to render\n";
            return 0;
        }
        for (const std::string& f : files) std::cout << "wrote " << f << '\n';
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

int cmd_tracks_list() {
    for (const auto& [name, track] : mctr::builtin_tracks()) {
        std::cout << name << ": " << track.truth_centerline.size() << " centerline points, length "
                  << mctr::polyline_length(track.truth_centerline, true) << " m\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MCTR reactive racing controller benchmark harness"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;
    std::vector<std::string> controllers;
    std::vector<std::string> tracks;
    std::vector<uint64_t> seeds;
    bool trace = false;
    int jobs = 0;

    auto* run = app.add_subcommand("run", "Run an experiment from a config file");
    run->add_option("config", config_path, "experiment config file")->required();
    run->add_option("--controller", controllers, "override controller list");
    run->add_option("--track", tracks, "override track list");
    run->add_option("--seed", seeds, "override seed list");
    run->add_flag("--trace", trace, "dump per-frame triangulation traces for the first lap");
    run->add_option("--jobs", jobs, "worker pool size (default: cores)");

    auto* report = app.add_subcommand("report", "Render SVG plots for a finished experiment");
    report->add_option("output_dir", output_dir, "experiment output directory")->required();

    auto* tracks_cmd = app.add_subcommand("tracks", "Track utilities");
    auto* tracks_list = tracks_cmd->add_subcommand("list", "List builtin tracks");

    auto* validate = app.add_subcommand("validate", "Validate a config file");
    validate->add_option("config", config_path, "experiment config file")->required();

    CLI11_PARSE(app, argc, argv);

    if (app.got_subcommand(run)) return cmd_run(config_path, controllers, tracks, seeds, trace, jobs);
    if (app.got_subcommand(report)) return cmd_report(output_dir);
    if (app.got_subcommand(tracks_cmd)) {
        if (tracks_cmd->got_subcommand(tracks_list)) return cmd_tracks_list();
        std::cerr << "usage: mctr tracks list\n";
        return 1;
    }
    if (app.got_subcommand(validate)) return cmd_validate(config_path);
    return 1;
}
