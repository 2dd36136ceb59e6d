// End-to-end acceptance gate. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "mctr/experiment.hpp"

using namespace mctr;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int number, const char* name, bool ok, const std::string& detail = "") {
    std::printf("criterion %d (%s): %s%s%s\n", number, name, ok ? "PASS" : "FAIL",
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!ok) ++failures;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<Vec2> ccma_dense(const std::vector<Vec2>& path, const SmoothingWeights& w) {
    const int n = static_cast<int>(path.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
    const double d2[3] = {1.0, -2.0, 1.0};
    const double d4[5] = {1.0, -4.0, 6.0, -4.0, 1.0};
    for (int r = 1; r + 1 < n; ++r)
        for (int u = 0; u < 3; ++u)
            for (int v = 0; v < 3; ++v) a(r - 1 + u, r - 1 + v) += w.lambda_vel * d2[u] * d2[v];
    for (int r = 2; r + 2 < n; ++r)
        for (int u = 0; u < 5; ++u)
            for (int v = 0; v < 5; ++v) a(r - 2 + u, r - 2 + v) += w.mu_curv * d4[u] * d4[v];
    Eigen::VectorXd bx(n), by(n);
    for (int i = 0; i < n; ++i) {
        bx(i) = path[static_cast<size_t>(i)].x;
        by(i) = path[static_cast<size_t>(i)].y;
    }
    const Eigen::VectorXd qx = a.ldlt().solve(bx);
    const Eigen::VectorXd qy = a.ldlt().solve(by);
    std::vector<Vec2> out(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = {qx(i), qy(i)};
    return out;
}

void criterion_1_ccma_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(101);
    std::uniform_int_distribution<int> size(5, 200);
    std::uniform_real_distribution<double> weight(0.0, 10.0), jitter(-0.5, 0.5);

    double worst = 0.0;
    bool energy_ok = true;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = size(rng);
        std::vector<Vec2> path;
        for (int i = 0; i < n; ++i)
            path.push_back({0.1 * i + jitter(rng), std::sin(0.15 * i) + jitter(rng)});
        SmoothingWeights w;
        w.lambda_vel = weight(rng);
        w.mu_curv = weight(rng);

        const std::vector<Vec2> banded = ccma_smooth(path, w);
        const std::vector<Vec2> dense = ccma_dense(path, w);
        for (size_t i = 0; i < banded.size(); ++i)
            worst = std::max(worst, distance(banded[i], dense[i]));
        if (ccma_energy(banded, path, w) > ccma_energy(path, path, w) + 1e-12) energy_ok = false;
    }
    const double elapsed = seconds_since(t0);
    std::ostringstream detail;
    detail << "max deviation " << worst << ", " << elapsed << " s";
    report(1, "CCMA oracle equivalence", worst < 1e-9 && energy_ok && elapsed < 5.0,
           detail.str());
}

void criterion_2_delaunay_property() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(202);
    std::uniform_int_distribution<int> size(3, 200);
    std::uniform_real_distribution<double> coord(0.0, 10.0);

    bool ok = true;
    int checked = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        BoundaryPoints pts;
        const int n = size(rng);
        for (int i = 0; i < n; ++i) pts.points.push_back({coord(rng), coord(rng)});
        pts.source_beam.assign(pts.points.size(), -1);
        try {
            const Triangulation tri = delaunay(pts);
            if (!satisfies_empty_circumcircle(tri, 1e-9)) ok = false;
            ++checked;
        } catch (const NotEnoughGeometry&) {
            // degenerate draws are legal inputs to reject
        }
    }
    const double elapsed = seconds_since(t0);
    std::ostringstream detail;
    detail << checked << " sets checked, " << elapsed << " s";
    report(2, "Delaunay empty-circumcircle suite", ok && checked > 900 && elapsed < 30.0,
           detail.str());
}

std::map<std::string, std::vector<EpisodeMetrics>> run_matrix(
    const std::vector<ControllerKind>& kinds, const std::vector<std::string>& tracks,
    int seeds, int laps, const fs::path& out_dir) {
    ExperimentConfig cfg;
    cfg.controllers = kinds;
    cfg.tracks = tracks;
    cfg.seeds.clear();
    for (int s = 1; s <= seeds; ++s) cfg.seeds.push_back(static_cast<uint64_t>(s));
    cfg.laps_per_episode = laps;
    cfg.output_dir = out_dir.string();
    const ExperimentResult result = run_experiment(cfg);

    std::map<std::string, std::vector<EpisodeMetrics>> by_key;
    for (const EpisodeResult& ep : result.episodes)
        by_key[ep.controller + "/" + ep.track].push_back(ep.metrics);
    return by_key;
}

double mean_lap(const std::vector<EpisodeMetrics>& runs) {
    std::vector<double> laps;
    for (const EpisodeMetrics& m : runs)
        if (m.laps > 0) laps.push_back(m.t_lap_mean);
    return mean_std(laps).first;
}

double mean_of(const std::vector<EpisodeMetrics>& runs, double EpisodeMetrics::*field) {
    std::vector<double> xs;
    for (const EpisodeMetrics& m : runs)
        if (m.laps > 0) xs.push_back(m.*field);
    return mean_std(xs).first;
}

double pass_rate(const std::vector<EpisodeMetrics>& runs) {
    int passed = 0;
    for (const EpisodeMetrics& m : runs)
        if (m.pass) ++passed;
    return 100.0 * passed / runs.size();
}

void criteria_3_4_f_track(const fs::path& work) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto by_key = run_matrix(
        {ControllerKind::Mctr, ControllerKind::MctrNoCcma, ControllerKind::Dtr}, {"F"}, 5, 3,
        work / "f_track");
    const double elapsed = seconds_since(t0);

    const auto& mctr = by_key.at("MCTR/F");
    const auto& no_ccma = by_key.at("MCTR_NO_CCMA/F");
    const auto& dtr = by_key.at("DTR/F");

    const double t_mctr = mean_lap(mctr);
    const double t_dtr = mean_lap(dtr);
    {
        std::ostringstream detail;
        detail << "t_lap MCTR " << t_mctr << " s vs DTR " << t_dtr << " s, " << elapsed << " s";
        report(3, "F-track lap-time ordering",
               t_mctr > 0.0 && t_dtr > 0.0 && t_mctr < 0.95 * t_dtr && elapsed < 120.0,
               detail.str());
    }
    {
        const double j_mctr = mean_of(mctr, &EpisodeMetrics::j_lat);
        const double j_dtr = mean_of(dtr, &EpisodeMetrics::j_lat);
        const double j_ablate = mean_of(no_ccma, &EpisodeMetrics::j_lat);
        const double e_mctr = mean_of(mctr, &EpisodeMetrics::eps_k);
        const double e_ablate = mean_of(no_ccma, &EpisodeMetrics::eps_k);
        std::ostringstream detail;
        detail << "J_lat " << j_mctr << " vs DTR " << j_dtr << " vs no-CCMA " << j_ablate
               << "; eps_k " << e_mctr << " vs no-CCMA " << e_ablate;
        report(4, "smoothness ordering",
               j_mctr < j_dtr && j_mctr < j_ablate && e_mctr < e_ablate, detail.str());
    }
}

void criterion_5_pass_rates(const fs::path& work) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto by_key =
        run_matrix({ControllerKind::Mctr, ControllerKind::Dtr, ControllerKind::Ftg},
                   {"O", "F", "M", "W"}, 5, 3, work / "pass_rates");
    const double elapsed = seconds_since(t0);

    auto overall = [&](const char* kind) {
        std::vector<EpisodeMetrics> all;
        for (const char* track : {"O", "F", "M", "W"}) {
            const auto& group = by_key.at(std::string(kind) + "/" + track);
            all.insert(all.end(), group.begin(), group.end());
        }
        return pass_rate(all);
    };
    const double p_mctr = overall("MCTR");
    const double p_dtr = overall("DTR");
    const double p_ftg = overall("FTG");
    std::ostringstream detail;
    detail << "PASS% MCTR " << p_mctr << ", DTR " << p_dtr << ", FTG " << p_ftg << ", "
           << elapsed << " s";
    report(5, "pass-rate ordering",
           p_mctr >= p_dtr && p_dtr >= p_ftg && p_mctr >= 90.0 && elapsed < 300.0,
           detail.str());
}

void criterion_6_sensor_parity() {
    const TrackMap track = builtin_tracks().at("O");
    SimConfig cfg;
    cfg.sensor.noise_sigma = 0.0;

    auto lap_time = [&](bool lifted) {
        SimConfig c = cfg;
        c.sensor.lifted_3d = lifted;
        const auto ctl = make_controller(ControllerVariant{});
        const EpisodeLog log = run_episode(track, *ctl, c, 1, 606);
        const std::vector<double> laps = lap_times(log);
        return laps.empty() ? -1.0 : laps[0];
    };
    const double t2d = lap_time(false);
    const double t3d = lap_time(true);
    std::ostringstream detail;
    detail << "2D " << t2d << " s vs lifted-3D " << t3d << " s";
    report(6, "2D vs lifted-3D lap parity",
           t2d > 0.0 && t3d > 0.0 && std::abs(t2d - t3d) <= 0.05 * t2d, detail.str());
}

void criterion_7_tick_budget() {
    const TrackMap track = builtin_tracks().at("F");
    SimConfig cfg;  // 1081 beams by default
    const auto ctl = make_controller(ControllerVariant{});
    const EpisodeLog log = run_episode(track, *ctl, cfg, 1, 707);
    const double mean_ms = log.mean_tick_micros / 1000.0;
    const double max_ms = log.max_tick_micros / 1000.0;
    std::ostringstream detail;
    detail << "mean " << mean_ms << " ms, max " << max_ms << " ms over " << log.ticks.size()
           << " ticks";
    report(7, "real-time tick budget", mean_ms < 10.0 && max_ms < 25.0, detail.str());
}

void criterion_8_control_formulas() {
    bool ok = true;

    // steering: delta = atan(2 L sin(alpha) / L_d)
    VehicleParams vp;
    std::mt19937_64 rng(808);
    std::uniform_real_distribution<double> ang(-1.3, 1.3), dist(0.6, 3.5);
    for (int i = 0; i < 1000; ++i) {
        const double alpha = ang(rng);
        const double l_d = dist(rng);
        const Vec2 target = unit_from_angle(alpha) * l_d;
        const double expect = std::clamp(std::atan(2.0 * vp.wheelbase * std::sin(alpha) / l_d),
                                         -vp.max_steer, vp.max_steer);
        if (std::abs(steering(target, vp, l_d) - expect) > 1e-12) ok = false;
    }

    // lookahead: L_d = k_v v + L_min
    PursuitParams pp;
    for (double v : {0.0, 1.0, 2.5, 4.0})
        if (std::abs(lookahead_distance(v, pp) - (pp.k_v * v + pp.l_min)) > 1e-12) ok = false;

    // velocity: v = sqrt(mu a_max / |kappa|), clamped
    std::uniform_real_distribution<double> kap(-2.0, 2.0);
    for (int i = 0; i < 1000; ++i) {
        const double kappa = kap(rng);
        const double k = std::max(std::abs(kappa), 1e-3);
        const double expect =
            std::clamp(std::sqrt(vp.friction_mu * vp.a_max_lat / k), vp.v_min, vp.v_max);
        if (std::abs(target_speed(kappa, vp) - expect) > 1e-12) ok = false;
    }

    // PID accumulation matches the scalar recurrence exactly
    PidGains gains;
    gains.kd_throttle = 0.05;
    gains.ki_brake = 0.03;
    PidState state;
    double integral = 0.0, prev = 0.0;
    bool has_prev = false;
    std::uniform_real_distribution<double> sp(0.0, 4.0);
    const double dt = 0.02;
    for (int i = 0; i < 1000; ++i) {
        const double vt = sp(rng), va = sp(rng);
        const PidOutput out = pid_longitudinal(vt, va, dt, gains, state);
        const double e = vt - va;
        integral = std::clamp(integral + e * dt, -gains.integral_limit, gains.integral_limit);
        const double de = has_prev ? (e - prev) / dt : 0.0;
        prev = e;
        has_prev = true;
        double throttle = 0.0, brake = 0.0;
        if (e >= 0.0)
            throttle = std::clamp(
                gains.kp_throttle * e + gains.ki_throttle * integral + gains.kd_throttle * de,
                0.0, 1.0);
        else
            brake = std::clamp(
                gains.kp_brake * -e + gains.ki_brake * -integral + gains.kd_brake * -de, 0.0,
                1.0);
        if (out.throttle != throttle || out.brake != brake) ok = false;
    }

    report(8, "control-law unit formulas", ok);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string drop_timing_columns(const std::string& csv) {
    std::stringstream in(csv), out;
    std::string line;
    while (std::getline(in, line)) {
        size_t cut = line.size();
        for (int k = 0; k < 2; ++k) {
            const size_t comma = line.rfind(',', cut - 1);
            if (comma == std::string::npos) break;
            cut = comma;
        }
        out << line.substr(0, cut) << '\n';
    }
    return out.str();
}

void criterion_9_determinism(const fs::path& work) {
    ExperimentConfig cfg;
    cfg.controllers = {ControllerKind::Mctr, ControllerKind::Ftg};
    cfg.tracks = {"O"};
    cfg.seeds = {11, 12};
    cfg.laps_per_episode = 1;

    cfg.output_dir = (work / "det_a").string();
    run_experiment(cfg);
    cfg.output_dir = (work / "det_b").string();
    run_experiment(cfg);

    bool ok = true;
    for (const char* stem : {"MCTR_O_11", "MCTR_O_12", "FTG_O_11", "FTG_O_12"}) {
        const std::string rel = std::string("episodes/") + stem + ".csv";
        if (slurp(work / "det_a" / rel) != slurp(work / "det_b" / rel)) ok = false;
    }
    // metrics and summary carry two wall-clock timing columns at the end;
    // every data column must match byte for byte
    for (const char* f : {"metrics.csv", "summary.csv"})
        if (drop_timing_columns(slurp(work / "det_a" / f)) !=
            drop_timing_columns(slurp(work / "det_b" / f)))
            ok = false;
    report(9, "seeded experiment determinism", ok);
}

}  // namespace

int main() {
    const fs::path work = fs::temp_directory_path() / "mctr_acceptance";
    fs::remove_all(work);
    fs::create_directories(work);

    criterion_1_ccma_oracle();
    criterion_2_delaunay_property();
    criteria_3_4_f_track(work);
    criterion_5_pass_rates(work);
    criterion_6_sensor_parity();
    criterion_7_tick_budget();
    criterion_8_control_formulas();
    criterion_9_determinism(work);

    fs::remove_all(work);
    std::printf("%s\n", failures == 0 ? "all acceptance criteria passed"
                                      : "acceptance failures present");
    return failures == 0 ? 0 : 1;
}
