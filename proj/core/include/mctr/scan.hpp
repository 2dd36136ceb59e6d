#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mctr/geometry.hpp"

namespace mctr {

/// Polar range scan in the vehicle frame. Beam i points along
/// angle_min + i * angle_increment; beams without a return hold +inf.
struct Scan2D {
    double angle_min = 0.0;
    double angle_increment = 0.0;  // > 0
    std::vector<double> ranges;
    double range_max = 0.0;
    double timestamp = 0.0;

    static constexpr double kNoReturn = std::numeric_limits<double>::infinity();

    double angle(size_t i) const { return angle_min + static_cast<double>(i) * angle_increment; }
    bool has_return(size_t i) const {
        return std::isfinite(ranges[i]) && ranges[i] > 0.0 && ranges[i] <= range_max;
    }
    size_t size() const { return ranges.size(); }
};

struct PointCloud3D {
    struct Point {
        double x, y, z;
    };
    std::vector<Point> points;
};

/// Sparse boundary points in the vehicle frame, ordered by scan angle.
struct BoundaryPoints {
    std::vector<Vec2> points;
    std::vector<int> source_beam;  // originating beam index, -1 for projected points
};

/// Vertical band and azimuth window used to flatten a 3D cloud into a scan.
struct ProjectionBand {
    double z_low = 0.05;
    double z_high = 0.30;
    double azimuth_min = -3.0 * M_PI / 4.0;
    double azimuth_max = 3.0 * M_PI / 4.0;
    int num_bins = 1081;

    bool valid() const { return z_low < z_high && num_bins >= 8 && azimuth_min < azimuth_max; }
};

/// Groups consecutive beam returns whose Cartesian gap is below box_size and
/// emits one centroid per cluster. No-return beams break clusters.
BoundaryPoints subsample_scan(const Scan2D& scan, double box_size);

struct ProjectionStats {
    size_t dropped_nonfinite = 0;
    size_t dropped_outside = 0;
};

/// Flattens a 3D cloud into a pseudo-2D scan: band/azimuth filter, then
/// nearest-return binning over uniform azimuth bins.
Scan2D project_cloud(const PointCloud3D& cloud, const ProjectionBand& band,
                     ProjectionStats* stats = nullptr);

/// Parses the XYZ text format: one "x y z" line per point, '#' comments.
PointCloud3D load_cloud_file(const std::string& path);
PointCloud3D parse_cloud(std::istream& in, const std::string& origin);

void write_scan(std::ostream& out, const Scan2D& scan);
Scan2D read_scan(std::istream& in);

}  // namespace mctr
