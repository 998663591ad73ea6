#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "srf/kv.hpp"
#include "srf/occupancy.hpp"
#include "srf/rrt.hpp"

namespace srf {

enum class NavMode { Srf, Fastrack };

std::string mode_name(NavMode mode);
NavMode parse_mode(const std::string& name);

enum class DisturbanceType { None, Position, PositionVelocity };

/// Unexpected-disturbance schedule: one event, fired once when the trigger
/// time passes or the tracker projection enters the trigger region. Position
/// magnitudes are sampled per seed as a multiple of the error-bound
/// half-width, then shortened so the tracker lands outside every obstacle.
struct DisturbanceSpec {
    DisturbanceType type = DisturbanceType::None;
    double trigger_time = -1.0;  ///< seconds; < 0 means region-triggered
    Box trigger_region{};
    bool has_region = false;
    bool adversarial = true;
    double scale_lo = 0.5;  ///< position offset, x pTEB half-width
    double scale_hi = 1.5;
    double vel_lo = 0.5;  ///< velocity offset magnitude range, m/s
    double vel_hi = 1.0;
    std::array<double, 3> direction{1.0, 0.0, 0.0};  ///< fallback direction
};

/// Full description of one navigation experiment.
struct Scenario {
    std::string system = "quad10_planner3";
    NavMode mode = NavMode::Srf;
    std::uint64_t seed = 1;
    Box workspace;
    std::vector<Box> obstacles;
    std::array<double, 3> start{};  ///< tracker start position; rest of the state is zero
    PVec goal;
    double goal_radius = 0.25;
    double sensing_radius = 3.0;
    double decision_dt = 0.1;
    int physics_substeps = 10;
    double timeout = 300.0;
    double raster_resolution = 0.05;
    RrtParams rrt;
    std::array<double, 3> modeled_disturbance{0.0, 0.0, 0.0};
    DisturbanceSpec disturbance;

    int planner_dim() const { return system == "quad8_planner2" ? 2 : 3; }
    std::string disturbance_label() const;

    /// Throws Error on structural problems (start inside an obstacle, goal
    /// outside the workspace, non-positive steps).
    void validate() const;
};

Scenario parse_scenario(const KvDocument& doc);
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace srf
