#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "srf/kv.hpp"
#include "srf/solver.hpp"
#include "srf/tracking.hpp"

namespace srf {

/// Artifact set does not match what the caller asked for (missing files,
/// foreign system, edited payload). Distinct from FormatError so the CLI can
/// report refusals (exit 3) separately from corruption (exit 4).
class MismatchError : public Error {
public:
    using Error::Error;
};

/// Everything one offline solve needs: the system blocks plus iteration
/// settings.
struct SolveJob {
    SystemSetup system;
    SolveConfig config;  ///< gamma here is the stage-2 decay rate
};

/// Reads a solve config document: system/gamma/tolerance/..., optional
/// per-block grid overrides (lateral.lower/upper/counts, vertical.*) and
/// bound overrides (ux/uy/uz intervals, planner_vmax, disturbance_bound).
SolveJob parse_solve_job(const KvDocument& doc);
SolveJob load_solve_job(const std::filesystem::path& path);

struct SolvedBlock {
    std::string tag;
    SolveResult stage1;  ///< gamma = 0, cost ||r||
    SolveResult rclvf;   ///< requested gamma, cost ||r|| - c
    bool converged = false;
};

struct SolvedSystem {
    SolveJob job;
    std::vector<SolvedBlock> blocks;
    bool all_converged = false;
};

/// Runs the two-stage solve for every block. Identical blocks (X and Y share
/// dynamics, bounds and grid) are solved once and copied. Non-convergence is
/// captured per block instead of thrown so partial artifacts can be written.
SolvedSystem solve_system(const SolveJob& job);

/// Writes <tag>_gamma0.vf / <tag>_rclvf.vf plus .meta sidecars, convergence
/// CSVs and manifest.txt into `dir` (created if needed).
void write_value_dir(const std::filesystem::path& dir, const SolvedSystem& solved);

/// Stable fingerprint of a job (system, params, bounds, grids, solve
/// settings); stored in the manifest and compared on load.
std::string job_fingerprint(const SolveJob& job);

/// Loads the stage-2 fields of a value directory into a tracking policy,
/// validating the manifest (system declaration, per-file grid/gamma/shift
/// against the recorded fingerprint). Throws MismatchError on refusals and
/// FormatError on corrupt payloads.
TrackingPolicy load_policy(const std::filesystem::path& dir);

/// System name recorded in a value directory's manifest.
std::string value_dir_system(const std::filesystem::path& dir);

/// Loads the policy if `dir` already holds artifacts for exactly this job,
/// otherwise solves and writes them first. Convenience for tests and batch
/// drivers; not used by the CLI.
TrackingPolicy ensure_value_dir(const std::filesystem::path& dir, const SolveJob& job);

}  // namespace srf
