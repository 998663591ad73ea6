#pragma once

#include "srf/rng.hpp"
#include "srf/rrt.hpp"
#include "srf/tracking.hpp"

namespace srf {

/// Jump and replan flags of the online loop. The jump flag never survives a
/// planning-block invocation; replan persists until a plan succeeds.
struct NavFlags {
    bool jump = false;
    bool replan = true;
};

/// Jump when the tracker left the error bound (value > 0), or when nothing is
/// sensed nearby and an artificial jump accelerates progress.
inline bool jump_decision(double value, bool obstacle_near) {
    return value > 0.0 || !obstacle_near;
}

/// Advances along the raw path by at most vmax*dt (Euclidean), consuming
/// waypoints as they are reached. Empty path holds position.
PVec next_plan(PlanPath& path, const PVec& current, double vmax, double dt);

struct SafeReturnInput {
    const TrackingPolicy* policy = nullptr;
    OccupancyMap* map = nullptr;
    const TrackerState* tracker = nullptr;
    PVec planner;
    PVec goal;
    double steb_alpha = 0.0;       ///< composed safe-resetting level
    PlannerExtents psteb;          ///< planner-space projection at steb_alpha
    double planner_vmax = 0.5;
    double decision_dt = 0.1;
    double candidate_spacing = 0.05;
    RrtParams rrt;
    double time_now = 0.0;
    Rng* plan_rng = nullptr;
};

struct SafeReturnOutcome {
    PVec p_next;
    bool jumped = false;
    bool replanned = false;
    bool plan_failed = false;
    /// Jump tiers below the nominal one: no candidate met the level
    /// constraint (degraded: best-value free cell chosen), or every candidate
    /// cell was blocked (reset_to_self: planner pinned to the tracker).
    bool degraded = false;
    bool reset_to_self = false;
};

/// The planning-block step: on a jump, resets the planner to the candidate
/// closest to the goal whose induced relative state stays inside the
/// safe-resetting level and whose cell is unblocked; otherwise replans when
/// requested and steps along the path. Always clears the jump flag.
SafeReturnOutcome safe_return(const SafeReturnInput& in, NavFlags& flags, PlanPath& path);

/// The jump candidate set, in tie-break order: current planner state, tracker
/// projection, goal-ray samples, then the psteb box boundary around the
/// tracker projection, all at candidate_spacing resolution. Exposed so tests
/// can scan it exhaustively.
std::vector<PVec> jump_candidates(const PVec& tracker_proj, const PVec& planner, const PVec& goal,
                                  const PlannerExtents& psteb, double spacing);

}  // namespace srf
