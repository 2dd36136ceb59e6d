#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "mctr/experiment.hpp"

namespace fs = std::filesystem;

namespace mctr {

namespace {

struct Viewport {
    double min_x, min_y, max_x, max_y;
    double width = 800.0, height = 800.0, margin = 20.0;

    double sx(double x) const {
        return margin + (x - min_x) / (max_x - min_x) * (width - 2 * margin);
    }
    double sy(double y) const {
        return height - margin - (y - min_y) / (max_y - min_y) * (height - 2 * margin);
    }
};

std::string curvature_color(double kappa, double k_max) {
    const double t = std::clamp(std::abs(kappa) / k_max, 0.0, 1.0);
    const int r = static_cast<int>(255 * t);
    const int b = static_cast<int>(255 * (1.0 - t));
    std::ostringstream os;
    os << "rgb(" << r << ",64," << b << ")";
    return os.str();
}

void svg_polyline(std::ostream& out, const Viewport& vp, const Polyline& pts,
                  const std::string& stroke, bool closed, double width = 1.5) {
    out << "<path d=\"";
    for (size_t i = 0; i < pts.size(); ++i)
        out << (i == 0 ? 'M' : 'L') << std::setprecision(7) << vp.sx(pts[i].x) << ' '
            << vp.sy(pts[i].y);
    if (closed) out << 'Z';
    out << "\" fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << width << "\"/>\n";
}

struct EpisodeFile {
    std::string controller;
    std::string track;
    std::string seed;
    fs::path path;
};

std::vector<EpisodeFile> list_episodes(const fs::path& dir) {
    std::vector<EpisodeFile> out;
    if (!fs::exists(dir)) return out;
    std::vector<fs::path> paths;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".csv") paths.push_back(entry.path());
    std::sort(paths.begin(), paths.end());
    for (const fs::path& p : paths) {
        const std::string stem = p.stem().string();
        const size_t last = stem.rfind('_');
        if (last == std::string::npos) continue;
        const size_t prev = stem.rfind('_', last - 1);
        if (prev == std::string::npos) continue;
        out.push_back({stem.substr(0, prev), stem.substr(prev + 1, last - prev - 1),
                       stem.substr(last + 1), p});
    }
    return out;
}

}  // namespace

std::vector<std::string> render_report(const std::string& output_dir) {
    const fs::path root(output_dir);
    std::vector<std::string> written;

    const std::vector<EpisodeFile> episodes = list_episodes(root / "episodes");
    if (episodes.empty()) return written;

    std::map<std::string, std::vector<EpisodeFile>> by_track;
    for (const EpisodeFile& e : episodes) by_track[e.track].push_back(e);

    fs::create_directories(root / "report");
    const double resample_step = 0.05;

    for (const auto& [track_name, files] : by_track) {
        TrackMap track;
        const fs::path track_file = root / "tracks" / (track_name + ".track");
        if (fs::exists(track_file))
            track = load_track_file(track_file.string());
        else
            track = resolve_track(track_name);

        Viewport vp{1e300, 1e300, -1e300, -1e300};
        for (const Vec2& p : track.outer) {
            vp.min_x = std::min(vp.min_x, p.x);
            vp.min_y = std::min(vp.min_y, p.y);
            vp.max_x = std::max(vp.max_x, p.x);
            vp.max_y = std::max(vp.max_y, p.y);
        }
        const double pad = 0.5;
        vp.min_x -= pad; vp.min_y -= pad; vp.max_x += pad; vp.max_y += pad;

        // -- trajectory overlay, colored by local curvature --
        const fs::path traj_path = root / "report" / (track_name + "_trajectories.svg");
        std::ofstream traj(traj_path);
        traj << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << vp.width
             << "\" height=\"" << vp.height << "\">\n";
        svg_polyline(traj, vp, track.inner, "#888888", true);
        svg_polyline(traj, vp, track.outer, "#888888", true);

        double k_max = 0.0;
        for (double k : track.truth_curvature) k_max = std::max(k_max, std::abs(k));
        k_max = std::max(k_max * 2.0, 0.1);

        for (const EpisodeFile& file : files) {
            std::ifstream in(file.path);
            const EpisodeLog log = read_episode_csv(in);
            Polyline path;
            for (const TickRecord& r : log.ticks) {
                const Vec2 p{r.x, r.y};
                if (path.empty() || distance(path.back(), p) > 1e-9) path.push_back(p);
            }
            const Polyline samples = resample_uniform(path, resample_step);
            for (size_t i = 1; i + 1 < samples.size(); ++i) {
                const double k = menger_curvature(samples[i - 1], samples[i], samples[i + 1]);
                traj << "<line x1=\"" << vp.sx(samples[i - 1].x) << "\" y1=\""
                     << vp.sy(samples[i - 1].y) << "\" x2=\"" << vp.sx(samples[i].x)
                     << "\" y2=\"" << vp.sy(samples[i].y) << "\" stroke=\""
                     << curvature_color(k, k_max) << "\" stroke-width=\"1.2\"/>\n";
            }
            traj << "<!-- " << file.controller << " seed " << file.seed << " -->\n";
        }
        traj << "</svg>\n";
        traj.close();
        written.push_back(traj_path.string());

        // -- curvature vs arc length --
        const fs::path curv_path = root / "report" / (track_name + "_curvature.svg");
        std::ofstream curv(curv_path);
        const double cw = 900.0, ch = 300.0, cm = 30.0;
        curv << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << cw << "\" height=\""
             << ch << "\">\n";
        const char* palette[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#8c564b"};
        size_t color_idx = 0;
        for (const EpisodeFile& file : files) {
            std::ifstream in(file.path);
            const EpisodeLog log = read_episode_csv(in);
            Polyline path;
            for (const TickRecord& r : log.ticks) {
                const Vec2 p{r.x, r.y};
                if (path.empty() || distance(path.back(), p) > 1e-9) path.push_back(p);
            }
            const Polyline samples = resample_uniform(path, resample_step);
            if (samples.size() < 3) continue;
            curv << "<path d=\"";
            for (size_t i = 1; i + 1 < samples.size(); ++i) {
                const double k = menger_curvature(samples[i - 1], samples[i], samples[i + 1]);
                const double x = cm + (cw - 2 * cm) * (i - 1.0) / (samples.size() - 3.0);
                const double y = ch / 2.0 - std::clamp(k / k_max, -1.0, 1.0) * (ch / 2.0 - cm);
                curv << (i == 1 ? 'M' : 'L') << std::setprecision(7) << x << ' ' << y;
            }
            curv << "\" fill=\"none\" stroke=\"" << palette[color_idx % 5]
                 << "\" stroke-width=\"1\"/>\n";
            ++color_idx;
        }
        curv << "<line x1=\"" << cm << "\" y1=\"" << ch / 2.0 << "\" x2=\"" << cw - cm
             << "\" y2=\"" << ch / 2.0 << "\" stroke=\"#aaaaaa\" stroke-width=\"0.5\"/>\n";
        curv << "</svg>\n";
        curv.close();
        written.push_back(curv_path.string());
    }
    return written;
}

}  // namespace mctr
