#include "mctr/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace mctr {

namespace {

std::string trim(const std::string& s) {
    const size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

struct Parser {
    ExperimentConfig& cfg;
    std::vector<std::string>& errors;

    void error(const std::string& key, const std::string& msg) {
        errors.push_back(key + ": " + msg);
    }

    bool to_double(const std::string& key, const std::string& v, double& out) {
        try {
            size_t pos = 0;
            out = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return true;
        } catch (...) {
            error(key, "not a number: '" + v + "'");
            return false;
        }
    }
    bool to_int(const std::string& key, const std::string& v, int& out) {
        try {
            size_t pos = 0;
            out = std::stoi(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return true;
        } catch (...) {
            error(key, "not an integer: '" + v + "'");
            return false;
        }
    }
    bool to_bool(const std::string& key, const std::string& v, bool& out) {
        if (v == "true" || v == "1") { out = true; return true; }
        if (v == "false" || v == "0") { out = false; return true; }
        error(key, "not a boolean: '" + v + "'");
        return false;
    }

    void set_double(const std::string& key, const std::string& v, double& target, double lo,
                    double hi) {
        double x;
        if (!to_double(key, v, x)) return;
        if (x < lo || x > hi) {
            std::ostringstream msg;
            msg << "value " << x << " out of range [" << lo << ", " << hi << "]";
            error(key, msg.str());
            return;
        }
        target = x;
    }
    void set_int(const std::string& key, const std::string& v, int& target, int lo, int hi) {
        int x;
        if (!to_int(key, v, x)) return;
        if (x < lo || x > hi) {
            std::ostringstream msg;
            msg << "value " << x << " out of range [" << lo << ", " << hi << "]";
            error(key, msg.str());
            return;
        }
        target = x;
    }

    void handle(const std::string& section, const std::string& key, const std::string& value) {
        const std::string full = section.empty() ? key : section + "." + key;
        const double inf = std::numeric_limits<double>::infinity();

        if (section == "experiment") {
            if (key == "controllers") {
                std::vector<ControllerKind> kinds;
                for (const std::string& name : split_list(value)) {
                    try {
                        kinds.push_back(parse_controller_kind(name));
                    } catch (const std::exception& e) {
                        error(full, e.what());
                    }
                }
                if (kinds.empty()) error(full, "empty controller list");
                else cfg.controllers = kinds;
            } else if (key == "tracks") {
                const auto names = split_list(value);
                if (names.empty()) error(full, "empty track list");
                else cfg.tracks = names;
            } else if (key == "seeds") {
                std::vector<uint64_t> seeds;
                for (const std::string& s : split_list(value)) {
                    try {
                        seeds.push_back(std::stoull(s));
                    } catch (...) {
                        error(full, "not a seed: '" + s + "'");
                    }
                }
                if (seeds.empty()) error(full, "empty seed list");
                else cfg.seeds = seeds;
            } else if (key == "laps_per_episode") {
                set_int(full, value, cfg.laps_per_episode, 1, 1000);
            } else if (key == "output_dir") {
                if (value.empty()) error(full, "empty output_dir");
                else cfg.output_dir = value;
            } else if (key == "trace") {
                to_bool(full, value, cfg.trace);
            } else if (key == "jobs") {
                set_int(full, value, cfg.jobs, 0, 1024);
            } else {
                error(full, "unknown key");
            }
        } else if (section == "sim") {
            if (key == "dt") set_double(full, value, cfg.sim.dt, 1e-6, 0.1);
            else if (key == "beams") set_int(full, value, cfg.sim.sensor.beams, 16, 100000);
            else if (key == "fov_deg") {
                double deg = 0.0;
                if (to_double(full, value, deg)) {
                    if (deg <= 0.0 || deg > 360.0) error(full, "fov_deg must be in (0, 360]");
                    else cfg.sim.sensor.fov = deg * M_PI / 180.0;
                }
            } else if (key == "range_max") set_double(full, value, cfg.sim.sensor.range_max, 0.1, 1e6);
            else if (key == "noise_sigma") set_double(full, value, cfg.sim.sensor.noise_sigma, 0.0, 1.0);
            else if (key == "lifted_3d") to_bool(full, value, cfg.sim.sensor.lifted_3d);
            else if (key == "band_z_low") set_double(full, value, cfg.sim.sensor.band_z_low, -10.0, 10.0);
            else if (key == "band_z_high") set_double(full, value, cfg.sim.sensor.band_z_high, -10.0, 10.0);
            else if (key == "actuation_mode") {
                if (value == "direct_velocity") cfg.sim.actuation_mode = LongitudinalMode::DirectVelocity;
                else if (value == "throttle_brake") cfg.sim.actuation_mode = LongitudinalMode::ThrottleBrake;
                else error(full, "expected direct_velocity or throttle_brake");
            } else if (key == "velocity_lag_tau") set_double(full, value, cfg.sim.velocity_lag_tau, 1e-3, 10.0);
            else if (key == "accel_throttle") set_double(full, value, cfg.sim.accel_throttle, 0.0, 100.0);
            else if (key == "accel_brake") set_double(full, value, cfg.sim.accel_brake, 0.0, 100.0);
            else if (key == "drag") set_double(full, value, cfg.sim.drag, 0.0, 10.0);
            else if (key == "footprint_radius") set_double(full, value, cfg.sim.footprint_radius, 0.0, 1.0);
            else if (key == "max_ticks") set_int(full, value, cfg.sim.max_ticks, 1, 10000000);
            else if (key == "fallback_storm_limit") set_int(full, value, cfg.sim.fallback_storm_limit, 1, 100000);
            else if (key == "lap_debounce") set_double(full, value, cfg.sim.lap_debounce, 0.0, 60.0);
            else error(full, "unknown key");
        } else if (section == "vehicle") {
            auto& vp = cfg.controller.vehicle;
            if (key == "wheelbase") {
                set_double(full, value, vp.wheelbase, 1e-3, 10.0);
                cfg.sim.wheelbase = vp.wheelbase;  // plant mirrors the model
            } else if (key == "friction_mu") set_double(full, value, vp.friction_mu, 1e-3, 10.0);
            else if (key == "a_max_lat") set_double(full, value, vp.a_max_lat, 1e-3, 100.0);
            else if (key == "v_max") set_double(full, value, vp.v_max, 1e-3, 100.0);
            else if (key == "v_min") set_double(full, value, vp.v_min, 1e-3, 100.0);
            else if (key == "max_steer") set_double(full, value, vp.max_steer, 1e-3, M_PI / 2);
            else error(full, "unknown key");
        } else if (section == "pursuit") {
            if (key == "k_v") set_double(full, value, cfg.controller.pursuit.k_v, 0.0, 100.0);
            else if (key == "l_min") set_double(full, value, cfg.controller.pursuit.l_min, 1e-3, 100.0);
            else error(full, "unknown key");
        } else if (section == "extraction") {
            auto& ep = cfg.controller.extraction;
            if (key == "box_size") set_double(full, value, ep.box_size, 1e-4, 10.0);
            else if (key == "faraway_threshold") set_double(full, value, ep.faraway_threshold, 1e-4, 100.0);
            else if (key == "side_epsilon") set_double(full, value, ep.side_epsilon, 0.0, 1.0);
            else if (key == "pseudo_margin") set_double(full, value, ep.pseudo_margin, 0.0, 100.0);
            else if (key == "max_forward") set_double(full, value, ep.max_forward, 1e-3, inf);
            else error(full, "unknown key");
        } else if (section == "smoothing") {
            auto& sw = cfg.controller.smoothing;
            if (key == "lambda") set_double(full, value, sw.lambda_vel, 0.0, 1e6);
            else if (key == "mu") set_double(full, value, sw.mu_curv, 0.0, 1e6);
            else if (key == "sg_window") {
                set_int(full, value, sw.sg_window, 5, 999);
                if (sw.sg_window % 2 == 0) error(full, "sg_window must be odd");
            } else if (key == "sg_order") set_int(full, value, sw.sg_order, 1, 20);
            else error(full, "unknown key");
        } else if (section == "ftg") {
            if (key == "bubble_radius") set_double(full, value, cfg.ftg.bubble_radius, 0.0, 10.0);
            else if (key == "min_gap_width") set_int(full, value, cfg.ftg.min_gap_width, 1, 100000);
            else if (key == "clearance") set_double(full, value, cfg.ftg.clearance, 0.0, 100.0);
            else if (key == "max_lookahead") set_double(full, value, cfg.ftg.max_lookahead, 0.1, 100.0);
            else error(full, "unknown key");
        } else if (section == "pid") {
            auto& g = cfg.controller.pid;
            if (key == "kp_throttle") set_double(full, value, g.kp_throttle, 0.0, 100.0);
            else if (key == "ki_throttle") set_double(full, value, g.ki_throttle, 0.0, 100.0);
            else if (key == "kd_throttle") set_double(full, value, g.kd_throttle, 0.0, 100.0);
            else if (key == "kp_brake") set_double(full, value, g.kp_brake, 0.0, 100.0);
            else if (key == "ki_brake") set_double(full, value, g.ki_brake, 0.0, 100.0);
            else if (key == "kd_brake") set_double(full, value, g.kd_brake, 0.0, 100.0);
            else if (key == "integral_limit") set_double(full, value, g.integral_limit, 0.0, 1e6);
            else error(full, "unknown key");
        } else if (section == "fallback") {
            if (key == "mode") {
                if (value == "brake_straight") cfg.controller.fallback.mode = FallbackMode::BrakeStraight;
                else if (value == "hold_last") cfg.controller.fallback.mode = FallbackMode::HoldLast;
                else error(full, "expected brake_straight or hold_last");
            } else if (key == "hold_ticks") set_int(full, value, cfg.controller.fallback.hold_ticks, 0, 100000);
            else error(full, "unknown key");
        } else if (section == "control") {
            if (key == "kappa_floor") set_double(full, value, cfg.controller.kappa_floor, 1e-9, 10.0);
            else error(full, "unknown key");
        } else {
            error(full, "unknown section");
        }
    }
};

}  // namespace

ConfigResult parse_experiment_config(std::istream& in) {
    ConfigResult result;
    Parser parser{result.config, result.errors};

    std::string line;
    std::string section;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                result.errors.push_back("line " + std::to_string(lineno) + ": malformed section");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos) {
            result.errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        parser.handle(section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }

    auto& cfg = result.config;
    if (cfg.controller.vehicle.v_min >= cfg.controller.vehicle.v_max)
        result.errors.push_back("vehicle.v_min: must be below vehicle.v_max");
    if (cfg.sim.sensor.band_z_low >= cfg.sim.sensor.band_z_high)
        result.errors.push_back("sim.band_z_low: must be below sim.band_z_high");
    if (cfg.controller.smoothing.sg_order >= cfg.controller.smoothing.sg_window)
        result.errors.push_back("smoothing.sg_order: must be below smoothing.sg_window");
    return result;
}

ConfigResult load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        ConfigResult r;
        r.errors.push_back("cannot open config file: " + path);
        return r;
    }
    return parse_experiment_config(in);
}

void write_default_config(std::ostream& out) {
    const ExperimentConfig cfg;
    out << "[experiment]\n"
        << "controllers = MCTR,MCTR_NO_CCMA,DTR,FTG\n"
        << "tracks = O,F,M,W\n"
        << "seeds = 1,2,3,4,5\n"
        << "laps_per_episode = " << cfg.laps_per_episode << "\n"
        << "output_dir = out\n"
        << "trace = false\n"
        << "jobs = 0\n\n"
        << "[sim]\n"
        << "dt = " << cfg.sim.dt << "\n"
        << "beams = " << cfg.sim.sensor.beams << "\n"
        << "fov_deg = 270\n"
        << "range_max = " << cfg.sim.sensor.range_max << "\n"
        << "noise_sigma = " << cfg.sim.sensor.noise_sigma << "\n"
        << "actuation_mode = direct_velocity\n"
        << "max_ticks = " << cfg.sim.max_ticks << "\n\n"
        << "[vehicle]\n"
        << "wheelbase = " << cfg.controller.vehicle.wheelbase << "\n"
        << "friction_mu = " << cfg.controller.vehicle.friction_mu << "\n"
        << "a_max_lat = " << cfg.controller.vehicle.a_max_lat << "\n"
        << "v_max = " << cfg.controller.vehicle.v_max << "\n"
        << "v_min = " << cfg.controller.vehicle.v_min << "\n\n"
        << "[pursuit]\n"
        << "k_v = " << cfg.controller.pursuit.k_v << "\n"
        << "l_min = " << cfg.controller.pursuit.l_min << "\n\n"
        << "[smoothing]\n"
        << "lambda = " << cfg.controller.smoothing.lambda_vel << "\n"
        << "mu = " << cfg.controller.smoothing.mu_curv << "\n"
        << "sg_window = " << cfg.controller.smoothing.sg_window << "\n"
        << "sg_order = " << cfg.controller.smoothing.sg_order << "\n";
}

}  // namespace mctr
