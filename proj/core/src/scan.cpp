#include "mctr/scan.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace mctr {

BoundaryPoints subsample_scan(const Scan2D& scan, double box_size) {
    if (box_size <= 0.0) throw std::invalid_argument("subsample_scan: box_size must be > 0");
    BoundaryPoints out;

    std::vector<Vec2> cluster;
    std::vector<int> cluster_beams;
    Vec2 prev{};
    bool in_cluster = false;

    auto flush = [&]() {
        if (cluster.empty()) return;
        Vec2 centroid{};
        for (const Vec2& p : cluster) centroid += p;
        centroid = centroid / static_cast<double>(cluster.size());
        // exact duplicates collapse to one point
        if (out.points.empty() || distance(out.points.back(), centroid) > 0.0) {
            out.points.push_back(centroid);
            out.source_beam.push_back(cluster_beams[cluster_beams.size() / 2]);
        }
        cluster.clear();
        cluster_beams.clear();
    };

    for (size_t i = 0; i < scan.size(); ++i) {
        if (!scan.has_return(i)) {
            flush();
            in_cluster = false;
            continue;
        }
        const Vec2 p = unit_from_angle(scan.angle(i)) * scan.ranges[i];
        // a cluster closes on a jump between neighbors or when its own extent
        // reaches box_size; the extent cap keeps every centroid within
        // box_size of a member point even along a continuous wall
        if (in_cluster &&
            (distance(p, prev) >= box_size || distance(p, cluster.front()) >= box_size))
            flush();
        cluster.push_back(p);
        cluster_beams.push_back(static_cast<int>(i));
        prev = p;
        in_cluster = true;
    }
    flush();
    return out;
}

Scan2D project_cloud(const PointCloud3D& cloud, const ProjectionBand& band,
                     ProjectionStats* stats) {
    if (!band.valid()) throw std::invalid_argument("project_cloud: invalid projection band");

    Scan2D scan;
    scan.angle_min = band.azimuth_min;
    scan.angle_increment = (band.azimuth_max - band.azimuth_min) / band.num_bins;
    scan.ranges.assign(static_cast<size_t>(band.num_bins), Scan2D::kNoReturn);
    scan.range_max = 0.0;

    ProjectionStats local;
    for (const auto& p : cloud.points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
            ++local.dropped_nonfinite;
            continue;
        }
        if (p.z < band.z_low || p.z > band.z_high) {
            ++local.dropped_outside;
            continue;
        }
        const double azimuth = std::atan2(p.y, p.x);
        if (azimuth < band.azimuth_min || azimuth > band.azimuth_max) {
            ++local.dropped_outside;
            continue;
        }
        const double range = std::hypot(p.x, p.y);
        // nudge guards against azimuths sitting exactly on a bin boundary
        double u = (azimuth - band.azimuth_min) / scan.angle_increment;
        int bin = static_cast<int>(std::floor(u + 1e-9));
        bin = std::clamp(bin, 0, band.num_bins - 1);
        auto& slot = scan.ranges[static_cast<size_t>(bin)];
        if (range < slot) slot = range;  // nearest return wins
        scan.range_max = std::max(scan.range_max, range);
    }
    if (scan.range_max == 0.0) scan.range_max = 1.0;
    if (stats) *stats = local;
    return scan;
}

PointCloud3D parse_cloud(std::istream& in, const std::string& origin) {
    PointCloud3D cloud;
    std::string line;
    size_t lineno = 0;
    bool any_data = false;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        PointCloud3D::Point p{};
        std::string extra;
        if (!(ls >> p.x >> p.y >> p.z) || (ls >> extra)) {
            throw std::runtime_error(origin + ": malformed XYZ line " + std::to_string(lineno));
        }
        cloud.points.push_back(p);
        any_data = true;
    }
    if (!any_data) throw std::runtime_error(origin + ": no points in XYZ file");
    return cloud;
}

PointCloud3D load_cloud_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open cloud file: " + path);
    return parse_cloud(in, path);
}

void write_scan(std::ostream& out, const Scan2D& scan) {
    out << std::setprecision(17) << scan.angle_min << ' ' << scan.angle_increment << ' '
        << scan.range_max << ' ' << scan.size() << '\n';
    for (size_t i = 0; i < scan.size(); ++i) {
        if (scan.has_return(i))
            out << scan.ranges[i] << '\n';
        else
            out << "inf\n";
    }
}

Scan2D read_scan(std::istream& in) {
    Scan2D scan;
    size_t n = 0;
    if (!(in >> scan.angle_min >> scan.angle_increment >> scan.range_max >> n))
        throw std::runtime_error("malformed scan header");
    scan.ranges.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        std::string tok;
        if (!(in >> tok)) throw std::runtime_error("truncated scan body");
        if (tok == "inf")
            scan.ranges.push_back(Scan2D::kNoReturn);
        else
            scan.ranges.push_back(std::stod(tok));
    }
    return scan;
}

}  // namespace mctr
