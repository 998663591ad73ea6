#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "srf/occupancy.hpp"

namespace srf {

struct RrtParams {
    double step = 0.25;
    double goal_bias = 0.1;
    int max_nodes = 5000;
};

/// Raw planner path: polyline with consecutive waypoints at most one RRT
/// step apart, all in free cells at creation time. The origin is kept
/// separately and may itself sit in a blocked cell after a disturbance.
struct PlanPath {
    std::vector<PVec> waypoints;
    PVec origin;
    double created_time = 0.0;

    bool empty() const { return waypoints.empty(); }
};

/// Deterministic RRT over the non-augmented cells: a given seed always
/// produces the same tree and path. Returns nullopt when the start is
/// blocked or no path is found within the node budget.
std::optional<PlanPath> rrt_plan(const OccupancyMap& map, const PVec& start, const PVec& goal,
                                 std::uint64_t seed, const RrtParams& params = {},
                                 double created_time = 0.0);

}  // namespace srf
