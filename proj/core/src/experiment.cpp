#include "mctr/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;

namespace mctr {

uint64_t episode_rng_stream(uint64_t seed, uint64_t episode_id) {
    // splitmix64 over the combined identifier
    uint64_t z = seed * 0x9E3779B97F4A7C15ULL + episode_id + 1;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

TrackMap resolve_track(const std::string& name_or_path) {
    auto tracks = builtin_tracks();
    const auto it = tracks.find(name_or_path);
    if (it != tracks.end()) return it->second;
    if (fs::exists(name_or_path)) return load_track_file(name_or_path);
    throw std::invalid_argument("unknown track: " + name_or_path);
}

namespace {

void dump_trace_frame(int tick, const ReactiveController& rc, std::vector<std::string>& out) {
    const Controller* c = rc.pipeline();
    if (!c) return;
    std::ostringstream os;
    os << std::setprecision(9);
    os << "FRAME " << tick << '\n';
    if (c->last_triangulation()) {
        const Triangulation& tri = *c->last_triangulation();
        os << "VERTICES " << tri.vertices.size() << '\n';
        for (const Vec2& v : tri.vertices) os << v.x << ' ' << v.y << '\n';
        os << "TRIANGLES " << tri.triangles.size() << '\n';
        for (const auto& t : tri.triangles) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
        os << "OPPOSING_EDGES " << c->last_centerpoints().source_edges.size() << '\n';
        for (const auto& e : c->last_centerpoints().source_edges) os << e[0] << ' ' << e[1] << '\n';
        os << "MIDPOINTS " << c->last_centerpoints().points.size() << '\n';
        for (const Vec2& p : c->last_centerpoints().points) os << p.x << ' ' << p.y << '\n';
    } else {
        os << "VERTICES 0\nTRIANGLES 0\nOPPOSING_EDGES 0\nMIDPOINTS 0\n";
    }
    out.push_back(os.str());
}

std::string episode_stem(const EpisodeResult& ep) {
    return ep.controller + "_" + ep.track + "_" + std::to_string(ep.seed);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    struct Job {
        ControllerKind kind;
        std::string track_name;
        uint64_t seed;
        size_t index;
    };
    std::vector<Job> jobs;
    for (ControllerKind kind : cfg.controllers)
        for (const std::string& track : cfg.tracks)
            for (uint64_t seed : cfg.seeds) jobs.push_back({kind, track, seed, jobs.size()});

    // resolve tracks up front so config errors surface before any run
    std::map<std::string, TrackMap> track_cache;
    for (const std::string& t : cfg.tracks) track_cache.emplace(t, resolve_track(t));

    ExperimentResult result;
    result.episodes.resize(jobs.size());

    const unsigned workers = cfg.jobs > 0
                                 ? static_cast<unsigned>(cfg.jobs)
                                 : std::max(1u, std::thread::hardware_concurrency());
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const size_t j = next.fetch_add(1);
            if (j >= jobs.size()) return;
            const Job& job = jobs[j];
            const TrackMap& track = track_cache.at(job.track_name);

            ControllerVariant variant;
            variant.kind = job.kind;
            variant.config = cfg.controller;
            variant.ftg = cfg.ftg;
            auto controller = make_controller(variant);

            TraceHook hook;
            double first_lap_end = -1.0;
            if (cfg.trace) hook = dump_trace_frame;

            EpisodeResult ep;
            ep.controller = to_string(job.kind);
            ep.track = track.name;
            ep.seed = job.seed;
            ep.log = run_episode(track, *controller, cfg.sim, cfg.laps_per_episode,
                                 episode_rng_stream(job.seed, job.index), hook);
            if (cfg.trace && ep.log.lap_crossings.size() > 1) {
                // keep only the first lap's frames
                first_lap_end = ep.log.lap_crossings[1];
                const size_t keep =
                    static_cast<size_t>(first_lap_end / cfg.sim.dt) + 1;
                if (ep.log.trace.size() > keep) ep.log.trace.resize(keep);
            }
            ep.metrics = compute_metrics(ep.log, track, cfg.sim.dt, cfg.laps_per_episode);
            ep.metrics.controller = ep.controller;
            ep.metrics.track = ep.track;
            ep.metrics.seed = ep.seed;
            result.episodes[j] = std::move(ep);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 0; w + 1 < workers && w + 1 < jobs.size(); ++w) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();

    // single-threaded collector keeps output deterministic
    const fs::path out_dir(cfg.output_dir);
    fs::create_directories(out_dir / "episodes");
    fs::create_directories(out_dir / "tracks");
    if (cfg.trace) fs::create_directories(out_dir / "trace");

    for (const auto& [name, track] : track_cache)
        save_track_file((out_dir / "tracks" / (track.name + ".track")).string(), track);

    std::ofstream metrics_csv(out_dir / "metrics.csv");
    write_metrics_csv_header(metrics_csv);
    for (const EpisodeResult& ep : result.episodes) {
        std::ofstream ecsv(out_dir / "episodes" / (episode_stem(ep) + ".csv"));
        write_episode_csv(ecsv, ep.log);
        write_metrics_csv_row(metrics_csv, ep.metrics);
        if (cfg.trace && !ep.log.trace.empty()) {
            std::ofstream tf(out_dir / "trace" / (episode_stem(ep) + ".txt"));
            for (const std::string& frame : ep.log.trace) tf << frame;
        }
    }

    std::ofstream summary(out_dir / "summary.csv");
    summary << "controller,track,episodes,t_lap_mean,t_lap_std,eps_k_mean,eps_k_std,"
               "j_lat_mean,j_lat_std,pass_percent,mean_tick_us,max_tick_us\n";
    summary << std::setprecision(12);
    for (ControllerKind kind : cfg.controllers) {
        for (const std::string& track_name : cfg.tracks) {
            std::vector<EpisodeMetrics> group;
            std::string track_id;
            for (const EpisodeResult& ep : result.episodes) {
                if (ep.controller == to_string(kind) &&
                    ep.track == track_cache.at(track_name).name) {
                    group.push_back(ep.metrics);
                    track_id = ep.track;
                }
            }
            if (group.empty()) continue;
            const Summary s = aggregate(group);
            summary << to_string(kind) << ',' << track_id << ',' << group.size() << ','
                    << s.t_lap_mean << ',' << s.t_lap_std << ',' << s.eps_k_mean << ','
                    << s.eps_k_std << ',' << s.j_lat_mean << ',' << s.j_lat_std << ','
                    << s.pass_percent << ',' << s.mean_tick_us << ',' << s.max_tick_us << '\n';
        }
    }
    return result;
}

}  // namespace mctr
