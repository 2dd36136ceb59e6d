#pragma once

#include <memory>
#include <string>

#include "mctr/control.hpp"

namespace mctr {

enum class ControllerKind { Mctr, MctrNoCcma, Dtr, Ftg };

ControllerKind parse_controller_kind(const std::string& name);
const char* to_string(ControllerKind kind);

struct FtgParams {
    double bubble_radius = 0.3;
    int min_gap_width = 10;  // beams
    double clearance = 1.5;      // meters a beam must exceed to count as free
    double max_lookahead = 5.0;  // cap on the pursuit chord toward the gap target
};

struct ControllerVariant {
    ControllerKind kind = ControllerKind::Mctr;
    ControllerConfig config;
    FtgParams ftg;
};

struct GapSelection {
    int start = -1;  // beam indices, inclusive
    int end = -1;
    bool found() const { return start >= 0; }
};

/// Widest contiguous run of beams whose (bubble-masked) range exceeds the
/// clearance threshold.
GapSelection widest_gap(const std::vector<double>& masked, double clearance);

/// Masks ranges within bubble_radius of the nearest return to zero.
std::vector<double> apply_bubble(const Scan2D& scan, double bubble_radius);

/// Follow-the-Gap baseline on the shared steering/velocity back-end.
class FtgController : public ReactiveController {
public:
    explicit FtgController(const ControllerVariant& variant) : variant_(variant) {}

    ControlCommand tick(const Scan2D& scan, double v_actual, double dt) override;
    bool last_was_fallback() const override { return fallback_; }

private:
    ControllerVariant variant_;
    PidState pid_state_;
    bool fallback_ = false;
};

/// Builds the controller for a variant; all four kinds share VehicleParams
/// and PursuitParams from the variant's config.
std::unique_ptr<ReactiveController> make_controller(const ControllerVariant& variant);

}  // namespace mctr
