// Command-line front end: offline value-function solves, single navigation
// runs, seeded batches and artifact inspection.
//
// Exit codes: 0 success (run: goal reached), 1 collision, 2 configuration
// error, 3 artifact mismatch, 4 corrupt artifact, 5 infeasible / timeout /
// unrecoverable (also non-converged solves).

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "srf/error.hpp"
#include "srf/field_io.hpp"
#include "srf/scenario.hpp"
#include "srf/sim.hpp"
#include "srf/solver.hpp"
#include "srf/value_store.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitMismatch = 3;
constexpr int kExitCorrupt = 4;
constexpr int kExitFailedRun = 5;

int cmd_solve(const std::string& config_path, const std::string& out_dir) {
    srf::SolveJob job = srf::load_solve_job(config_path);
    std::cout << "solving " << job.system.name << " (gamma " << job.config.gamma << ", "
              << job.system.blocks.size() << " blocks)\n";
    srf::SolvedSystem solved = srf::solve_system(job);
    srf::write_value_dir(out_dir, solved);
    for (const auto& blk : solved.blocks) {
        std::printf("  block %s: c=%.6g iterations=%zu residual=%.3g%s\n", blk.tag.c_str(),
                    blk.stage1.minval, blk.rclvf.history.size(),
                    blk.rclvf.history.empty() ? -1.0 : blk.rclvf.history.back().residual,
                    blk.converged ? "" : "  [NOT CONVERGED]");
    }
    if (!solved.all_converged) {
        std::cerr << "solve did not converge; partial artifacts flagged in " << out_dir << "\n";
        return kExitFailedRun;
    }
    std::cout << "artifacts written to " << out_dir << "\n";
    return kExitOk;
}

srf::Scenario load_with_overrides(const std::string& scenario_path, long long seed_override,
                                  const std::string& mode_override) {
    srf::Scenario scn = srf::load_scenario(scenario_path);
    if (seed_override >= 0) scn.seed = static_cast<std::uint64_t>(seed_override);
    if (!mode_override.empty()) scn.mode = srf::parse_mode(mode_override);
    return scn;
}

srf::TrackingPolicy load_matching_policy(const std::string& value_dir, const srf::Scenario& scn) {
    const std::string stored = srf::value_dir_system(value_dir);
    if (stored != scn.system) {
        throw srf::MismatchError("value directory holds '" + stored + "' but the scenario needs '" +
                                 scn.system + "'");
    }
    return srf::load_policy(value_dir);
}

int cmd_run(const std::string& scenario_path, const std::string& value_dir,
            const std::string& out_dir, long long seed_override, const std::string& mode_override) {
    srf::Scenario scn = load_with_overrides(scenario_path, seed_override, mode_override);
    srf::TrackingPolicy policy = load_matching_policy(value_dir, scn);
    srf::RunResult result = srf::run(scn, policy);

    fs::create_directories(out_dir);
    srf::write_trace_csv(fs::path(out_dir) / "trace.csv", result);
    srf::write_result_kv(fs::path(out_dir) / "result.txt", result);
    std::cout << srf::outcome_name(result.outcome) << " seed=" << result.seed << " mode="
              << srf::mode_name(result.mode) << " ticks=" << result.ticks;
    if (result.outcome == srf::Outcome::Reached) std::cout << " nav_time=" << result.nav_time << "s";
    std::cout << "\n";
    return srf::outcome_exit_code(result.outcome);
}

int cmd_batch(const std::string& scenario_path, const std::string& value_dir,
              const std::string& out_dir, int runs, int parallel, long long seed_override,
              const std::string& mode_override) {
    srf::Scenario scn = load_with_overrides(scenario_path, seed_override, mode_override);
    srf::TrackingPolicy policy = load_matching_policy(value_dir, scn);

    std::vector<srf::RunResult> results;
    srf::BatchSummary summary = srf::run_batch(scn, policy, runs, parallel, &results);

    fs::create_directories(out_dir);
    srf::write_runs_csv(fs::path(out_dir) / "runs.csv", results);
    srf::write_aggregate_csv(fs::path(out_dir) / "aggregate.csv", {summary});
    std::printf("%s/%s: %d runs (%d excluded) reach %.1f%% collision %.1f%% mean_nav %.2fs\n",
                summary.mode.c_str(), summary.setting.c_str(), summary.runs, summary.excluded,
                summary.reach_pct, summary.collision_pct, summary.mean_nav_time);
    return kExitOk;
}

int cmd_inspect(const std::string& file) {
    srf::LoadedField lf = srf::read_field(file);
    const srf::Grid& g = lf.field.grid();
    std::printf("file: %s\n", file.c_str());
    std::printf("dims: %d\n", g.dims());
    for (int a = 0; a < g.dims(); ++a) {
        std::printf("axis %d: [%.6g, %.6g] x %zu (spacing %.6g)\n", a, g.lower(a), g.upper(a),
                    g.count(a), g.spacing(a));
    }
    std::printf("gamma: %.6g\n", lf.meta.gamma);
    std::printf("c: %.6g\n", lf.meta.minval);
    std::printf("converged: %s\n", lf.meta.converged ? "yes" : "no");
    std::printf("min/max value: %.6g / %.6g\n", lf.field.min_value(), lf.field.max_value());

    // Zero level of the decay solve equals the c level of the gamma=0 solve.
    const double level = lf.meta.gamma > 0.0 ? 0.0 : lf.meta.minval;
    std::printf("error-bound level: %.6g\n", level);
    for (int a = 0; a < g.dims(); ++a) {
        try {
            auto [lo, hi] = srf::level_set_extent(lf.field, level, a);
            std::printf("  axis %d extent: [%.6g, %.6g]\n", a, lo, hi);
        } catch (const srf::Error&) {
            std::printf("  axis %d extent: empty\n", a);
        }
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Safe-returning tracking navigation: offline solves and online simulation"};
    app.require_subcommand(1);

    std::string config_path, scenario_path, value_dir, out_dir = "out", inspect_file;
    long long seed_override = -1;
    std::string mode_override;
    int runs = 40;
    int parallel = 0;

    auto* solve = app.add_subcommand("solve", "Solve value functions for a system config");
    solve->add_option("-c,--config", config_path, "solver config file")->required();
    solve->add_option("-o,--out", out_dir, "output directory");

    auto* runcmd = app.add_subcommand("run", "Run one navigation simulation");
    runcmd->add_option("-s,--scenario", scenario_path, "scenario file")->required();
    runcmd->add_option("-v,--values", value_dir, "value-function directory")->required();
    runcmd->add_option("-o,--out", out_dir, "output directory");
    runcmd->add_option("--seed", seed_override, "seed override");
    runcmd->add_option("--mode", mode_override, "mode override (srf|fastrack)");

    auto* batch = app.add_subcommand("batch", "Run a seeded batch and aggregate");
    batch->add_option("-s,--scenario", scenario_path, "scenario file")->required();
    batch->add_option("-v,--values", value_dir, "value-function directory")->required();
    batch->add_option("-n,--runs", runs, "number of seeded runs");
    batch->add_option("-o,--out", out_dir, "output directory");
    batch->add_option("-j,--parallel", parallel, "parallel runs (0 = all cores)");
    batch->add_option("--seed", seed_override, "base seed override");
    batch->add_option("--mode", mode_override, "mode override (srf|fastrack)");

    auto* inspect = app.add_subcommand("inspect", "Summarize a value-function file");
    inspect->add_option("file", inspect_file, "value-function file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (solve->parsed()) return cmd_solve(config_path, out_dir);
        if (runcmd->parsed()) return cmd_run(scenario_path, value_dir, out_dir, seed_override, mode_override);
        if (batch->parsed())
            return cmd_batch(scenario_path, value_dir, out_dir, runs, parallel, seed_override,
                             mode_override);
        if (inspect->parsed()) return cmd_inspect(inspect_file);
    } catch (const srf::FormatError& e) {
        std::cerr << "corrupt artifact: " << e.what() << "\n";
        return kExitCorrupt;
    } catch (const srf::MismatchError& e) {
        std::cerr << "artifact mismatch: " << e.what() << "\n";
        return kExitMismatch;
    } catch (const srf::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
