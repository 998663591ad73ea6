#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "srf/scenario.hpp"
#include "srf/tracking.hpp"

namespace srf {

enum class Outcome { Reached, Collided, Infeasible, Unrecoverable, Timeout };

std::string outcome_name(Outcome o);

/// Process exit code convention: 0 reached, 1 collided, 5 for the remaining
/// terminal outcomes (2-4 are reserved for config/artifact errors).
int outcome_exit_code(Outcome o);

/// Concrete disturbance applied to the tracker at one tick.
struct DisturbanceEvent {
    DisturbanceType type = DisturbanceType::Position;
    std::array<double, 3> pos_offset{};
    std::array<double, 3> vel_offset{};
    bool adversarial = false;  ///< rotate offsets toward the nearest sensed obstacle
};

/// Adds the offsets to the tracker state. With `adversarial` set, both
/// offsets are rotated (magnitudes preserved) toward the nearest sensed
/// obstacle boundary point; without sensed obstacles the offsets apply as
/// given. *landed_inside reports whether the new position sits inside a true
/// obstacle (the run is then excluded from safety accounting).
TrackerState inject_disturbance(const TrackerState& s, const DisturbanceEvent& event,
                                const OccupancyMap& map, bool* landed_inside = nullptr);

struct SimEvent {
    int tick = 0;
    std::string tag;
};

struct TraceRow {
    int tick = 0;
    double time = 0.0;
    std::array<double, 10> tracker{};
    PVec planner;
    double value = 0.0;
    int jf = 0;
    int rf = 0;
    double steb_alpha = 0.0;
    double dst = 0.0;
};

struct RunResult {
    Outcome outcome = Outcome::Timeout;
    double nav_time = -1.0;  ///< defined only for Reached
    int ticks = 0;
    int collision_tick = -1;
    bool excluded = false;  ///< disturbance landed the tracker inside an obstacle
    std::uint64_t seed = 0;
    NavMode mode = NavMode::Srf;
    std::string disturbance_label = "none";
    std::vector<SimEvent> events;
    std::vector<TraceRow> trace;
};

/// Executes the full online loop for one scenario against solved tracking
/// solutions. Deterministic: a scenario plus seed fixes the entire trace.
RunResult run(const Scenario& scenario, const TrackingPolicy& policy);

void write_trace_csv(const std::filesystem::path& path, const RunResult& result);
void write_result_kv(const std::filesystem::path& path, const RunResult& result);
std::string event_summary(const RunResult& result);

struct BatchSummary {
    std::string mode;
    std::string setting;
    int runs = 0;
    int excluded = 0;
    int reached = 0;
    int collided = 0;
    double reach_pct = 0.0;      ///< over non-excluded runs
    double collision_pct = 0.0;  ///< over non-excluded runs
    double mean_nav_time = 0.0;  ///< over non-excluded reached runs
};

/// Runs `n` seeds (scenario.seed + i) with a fixed seed-to-run assignment;
/// aggregation is a fold over run index, so the summary is independent of the
/// parallelism degree.
BatchSummary run_batch(const Scenario& scenario, const TrackingPolicy& policy, int n,
                       int parallelism = 0, std::vector<RunResult>* results = nullptr);

void write_runs_csv(const std::filesystem::path& path, const std::vector<RunResult>& results);
void write_aggregate_csv(const std::filesystem::path& path,
                         const std::vector<BatchSummary>& summaries);

}  // namespace srf
