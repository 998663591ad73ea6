#pragma once

#include <filesystem>
#include <string>

#include "srf/scenario.hpp"
#include "srf/tracking.hpp"
#include "srf/value_store.hpp"

namespace srf_test {

/// Build-tree cache shared across test binaries; reduced-grid solves land
/// here once and are reused on later runs.
std::filesystem::path cache_dir();

/// Fresh empty scratch directory under the build tree.
std::filesystem::path scratch_dir(const std::string& name);

/// quad10_planner3 on reduced grids: coarse enough to solve in seconds,
/// fine enough for closed-loop behaviour.
srf::SolveJob small_quad10_job();

/// Solved (or cache-loaded) policy for small_quad10_job. Process-wide.
const srf::TrackingPolicy& small_quad10_policy();

/// Obstacle-free 18 m corridor scenario.
srf::Scenario openfield_scenario(srf::NavMode mode = srf::NavMode::Srf, std::uint64_t seed = 1);

}  // namespace srf_test
