#include "mctr/metrics.hpp"

#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace mctr {

std::vector<double> lap_times(const EpisodeLog& log) {
    std::vector<double> laps;
    for (size_t i = 1; i < log.lap_crossings.size(); ++i)
        laps.push_back(log.lap_crossings[i] - log.lap_crossings[i - 1]);
    return laps;
}

Polyline resample_uniform(const Polyline& pts, double step) {
    Polyline out;
    if (pts.size() < 2 || step <= 0.0) return pts;
    out.push_back(pts[0]);
    double carried = 0.0;
    for (size_t i = 1; i < pts.size(); ++i) {
        Vec2 a = pts[i - 1];
        const Vec2 b = pts[i];
        double seg = distance(a, b);
        while (carried + seg >= step) {
            const double need = step - carried;
            const Vec2 dir = (b - a) / seg;
            a = a + dir * need;
            out.push_back(a);
            seg -= need;
            carried = 0.0;
        }
        carried += seg;
    }
    return out;
}

namespace {

size_t nearest_truth_index(const Vec2& p, const TrackMap& track) {
    size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < track.truth_centerline.size(); ++i) {
        const double d = (p - track.truth_centerline[i]).squared_norm();
        if (d < bd) {
            bd = d;
            best = i;
        }
    }
    return best;
}

Polyline driven_path(const EpisodeLog& log) {
    Polyline path;
    for (const TickRecord& r : log.ticks) {
        const Vec2 p{r.x, r.y};
        if (path.empty() || distance(path.back(), p) > 1e-9) path.push_back(p);
    }
    return path;
}

}  // namespace

double curvature_error(const EpisodeLog& log, const TrackMap& track, double resample_step) {
    const Polyline path = driven_path(log);
    if (path.size() < 3) throw std::invalid_argument("curvature_error: degenerate log");
    const Polyline samples = resample_uniform(path, resample_step);
    if (samples.size() < 3) throw std::invalid_argument("curvature_error: degenerate log");

    // spread the Menger triple over several resample steps so the estimate
    // spans multiple raw log points; adjacent triples degenerate whenever the
    // resample step is finer than the tick spacing of the log
    const size_t spread = std::min<size_t>(5, (samples.size() - 1) / 2);

    double total = 0.0;
    size_t count = 0;
    for (size_t i = spread; i + spread < samples.size(); ++i) {
        const double k_driven =
            menger_curvature(samples[i - spread], samples[i], samples[i + spread]);
        const double k_truth = track.truth_curvature[nearest_truth_index(samples[i], track)];
        total += std::abs(k_driven - k_truth);
        ++count;
    }
    return total / count;
}

double signed_lateral_error(const Vec2& p, const TrackMap& track) {
    const size_t n = track.truth_centerline.size();
    const size_t i = nearest_truth_index(p, track);
    const Vec2& c = track.truth_centerline[i];
    const Vec2& cn = track.truth_centerline[(i + 1) % n];
    Vec2 tangent = cn - c;
    const double len = tangent.norm();
    if (len == 0.0) return distance(p, c);
    tangent = tangent / len;
    return cross(tangent, p - c);  // left of travel positive
}

double lateral_jerk(const EpisodeLog& log, const TrackMap& track, double dt) {
    if (log.ticks.size() < 10) throw std::invalid_argument("lateral_jerk: degenerate log");
    std::vector<double> e;
    e.reserve(log.ticks.size());
    for (const TickRecord& r : log.ticks) e.push_back(signed_lateral_error({r.x, r.y}, track));

    // 5-sample moving-average prefilter; only full windows are kept
    std::vector<double> f;
    f.reserve(e.size());
    for (size_t i = 2; i + 2 < e.size(); ++i)
        f.push_back((e[i - 2] + e[i - 1] + e[i] + e[i + 1] + e[i + 2]) / 5.0);

    double total = 0.0;
    size_t count = 0;
    for (size_t i = 2; i + 1 < f.size(); ++i) {
        // third central difference: e_{i+1} - 3 e_i + 3 e_{i-1} - e_{i-2}
        const double d3 = f[i + 1] - 3.0 * f[i] + 3.0 * f[i - 1] - f[i - 2];
        total += std::abs(d3) / (dt * dt * dt);
        ++count;
    }
    return total / count;
}

std::pair<double, double> mean_std(const std::vector<double>& xs) {
    if (xs.empty()) return {0.0, 0.0};
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    if (xs.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (xs.size() - 1))};
}

EpisodeMetrics compute_metrics(const EpisodeLog& log, const TrackMap& track, double dt,
                               int requested_laps) {
    EpisodeMetrics m;
    const std::vector<double> laps = lap_times(log);
    m.laps = static_cast<int>(laps.size());
    std::tie(m.t_lap_mean, m.t_lap_std) = mean_std(laps);
    m.pass = !log.collided && m.laps >= requested_laps &&
             log.status == EpisodeStatus::Completed;
    if (!laps.empty()) {
        m.eps_k = curvature_error(log, track);
        m.j_lat = lateral_jerk(log, track, dt);
    }
    m.mean_tick_us = log.mean_tick_micros;
    m.max_tick_us = log.max_tick_micros;
    return m;
}

Summary aggregate(const std::vector<EpisodeMetrics>& runs) {
    if (runs.empty()) throw std::invalid_argument("aggregate: no runs");
    Summary s;
    std::vector<double> laps, eps, jlat;
    int passed = 0;
    for (const EpisodeMetrics& m : runs) {
        if (m.laps > 0) {
            laps.push_back(m.t_lap_mean);
            eps.push_back(m.eps_k);
            jlat.push_back(m.j_lat);
        }
        if (m.pass) ++passed;
        s.mean_tick_us += m.mean_tick_us / runs.size();
        s.max_tick_us = std::max(s.max_tick_us, m.max_tick_us);
    }
    std::tie(s.t_lap_mean, s.t_lap_std) = mean_std(laps);
    std::tie(s.eps_k_mean, s.eps_k_std) = mean_std(eps);
    std::tie(s.j_lat_mean, s.j_lat_std) = mean_std(jlat);
    s.pass_percent = 100.0 * passed / runs.size();
    return s;
}

void write_metrics_csv_header(std::ostream& out) {
    out << "controller,track,seed,laps,t_lap_mean,t_lap_std,eps_k,j_lat,pass,mean_tick_us,"
           "max_tick_us\n";
}

void write_metrics_csv_row(std::ostream& out, const EpisodeMetrics& m) {
    out << std::setprecision(12) << m.controller << ',' << m.track << ',' << m.seed << ','
        << m.laps << ',' << m.t_lap_mean << ',' << m.t_lap_std << ',' << m.eps_k << ','
        << m.j_lat << ',' << (m.pass ? 1 : 0) << ',' << m.mean_tick_us << ',' << m.max_tick_us
        << '\n';
}

std::vector<EpisodeMetrics> read_metrics_csv(std::istream& in) {
    std::vector<EpisodeMetrics> out;
    std::string line;
    if (!std::getline(in, line)) return out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        EpisodeMetrics m;
        std::string field;
        std::getline(ls, m.controller, ',');
        std::getline(ls, m.track, ',');
        std::getline(ls, field, ',');
        m.seed = std::stoull(field);
        std::getline(ls, field, ',');
        m.laps = std::stoi(field);
        std::getline(ls, field, ',');
        m.t_lap_mean = std::stod(field);
        std::getline(ls, field, ',');
        m.t_lap_std = std::stod(field);
        std::getline(ls, field, ',');
        m.eps_k = std::stod(field);
        std::getline(ls, field, ',');
        m.j_lat = std::stod(field);
        std::getline(ls, field, ',');
        m.pass = field == "1";
        std::getline(ls, field, ',');
        m.mean_tick_us = std::stod(field);
        std::getline(ls, field, ',');
        m.max_tick_us = std::stod(field);
        out.push_back(std::move(m));
    }
    return out;
}

}  // namespace mctr
