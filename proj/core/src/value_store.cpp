#include "srf/value_store.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "srf/field_io.hpp"

namespace srf {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Grid grid_override(const KvDocument& doc, const std::string& prefix, Grid fallback) {
    const bool any = doc.has(prefix + ".lower") || doc.has(prefix + ".upper") ||
                     doc.has(prefix + ".counts");
    if (!any) return fallback;
    std::vector<double> lower = doc.get_doubles(prefix + ".lower");
    std::vector<double> upper = doc.get_doubles(prefix + ".upper");
    std::vector<double> counts_raw = doc.get_doubles(prefix + ".counts");
    std::vector<std::size_t> counts;
    counts.reserve(counts_raw.size());
    for (double c : counts_raw) {
        if (c < 3 || c != std::floor(c)) doc.fail(prefix + ".counts", "counts must be integers >= 3");
        counts.push_back(static_cast<std::size_t>(c));
    }
    return Grid(std::move(lower), std::move(upper), std::move(counts));
}

Interval interval_override(const KvDocument& doc, const std::string& key, Interval fallback) {
    if (!doc.has(key)) return fallback;
    auto v = doc.get_doubles(key);
    if (v.size() != 2 || v[0] > v[1]) doc.fail(key, "expected 'lo hi'");
    return {v[0], v[1]};
}

bool same_channel(const InputChannel& a, const InputChannel& b, int dim) {
    if (a.bound.lo != b.bound.lo || a.bound.hi != b.bound.hi) return false;
    for (int i = 0; i < dim; ++i)
        if (a.gain[i] != b.gain[i]) return false;
    return true;
}

bool same_block(const SubsystemSetup& a, const SubsystemSetup& b) {
    return a.model.name == b.model.name && a.model.dim == b.model.dim && a.grid == b.grid &&
           same_channel(a.model.control, b.model.control, a.model.dim) &&
           same_channel(a.model.planner, b.model.planner, a.model.dim) &&
           same_channel(a.model.disturbance, b.model.disturbance, a.model.dim);
}

void fnv_mix(std::uint64_t& h, const std::string& s) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
}

std::string manifest_path_system(const KvDocument& doc) { return doc.get_string("system"); }

SolveJob job_from_manifest(const KvDocument& doc, const std::vector<LoadedField>& gamma0,
                           const std::vector<LoadedField>& rclvf) {
    SolveJob job;
    ModelParams params;
    params.d0 = doc.get_double("d0");
    params.d1 = doc.get_double("d1");
    params.n0 = doc.get_double("n0");
    params.kT = doc.get_double("kT");
    params.g = doc.get_double("g");
    ControlBounds bounds;
    bounds.ux = interval_override(doc, "ux", bounds.ux);
    bounds.uy = interval_override(doc, "uy", bounds.uy);
    bounds.uz = interval_override(doc, "uz", bounds.uz);
    bounds.planner_vmax = doc.get_double("planner_vmax");
    auto dist = doc.get_doubles("disturbance_bound");
    for (std::size_t a = 0; a < dist.size() && a < 3; ++a) bounds.disturbance[a] = dist[a];

    job.system = make_system(manifest_path_system(doc), params, bounds);
    for (std::size_t b = 0; b < job.system.blocks.size() && b < rclvf.size(); ++b) {
        job.system.blocks[b].grid = rclvf[b].field.grid();
    }
    (void)gamma0;
    job.config.gamma = doc.get_double("gamma");
    job.config.tolerance = doc.get_double("tolerance");
    job.config.max_iterations = static_cast<int>(doc.get_int("max_iterations"));
    job.config.cfl = doc.get_double("cfl");
    job.config.divergence_cap = doc.get_double("divergence_cap");
    return job;
}

}  // namespace

SolveJob parse_solve_job(const KvDocument& doc) {
    SolveJob job;
    const std::string system = doc.get_string("system", "quad10_planner3");

    ModelParams params;  // paper values; not overridable from configs
    ControlBounds bounds;
    bounds.uz = {0.0, 1.5 * params.g};
    bounds.ux = interval_override(doc, "ux", bounds.ux);
    bounds.uy = interval_override(doc, "uy", bounds.uy);
    bounds.uz = interval_override(doc, "uz", bounds.uz);
    bounds.planner_vmax = doc.get_double("planner_vmax", bounds.planner_vmax);
    auto dist = doc.get_doubles("disturbance_bound", {0.0, 0.0, 0.0});
    for (std::size_t a = 0; a < dist.size() && a < 3; ++a) bounds.disturbance[a] = dist[a];

    job.system = make_system(system, params, bounds);
    for (auto& blk : job.system.blocks) {
        const std::string prefix = blk.model.dim == 4 ? "lateral" : "vertical";
        blk.grid = grid_override(doc, prefix, blk.grid);
        if (blk.grid.dims() != blk.model.dim) {
            doc.fail(prefix + ".counts", "grid dimension must match the subsystem");
        }
    }

    job.config.gamma = doc.get_double("gamma", 0.5);
    if (job.config.gamma < 0.0) doc.fail("gamma", "decay rate must be >= 0");
    job.config.tolerance = doc.get_double("tolerance", job.config.tolerance);
    job.config.max_iterations = static_cast<int>(doc.get_int("max_iterations", job.config.max_iterations));
    job.config.cfl = doc.get_double("cfl", job.config.cfl);
    job.config.dt = doc.get_double("dt", 0.0);
    job.config.divergence_cap = doc.get_double("divergence_cap", job.config.divergence_cap);
    return job;
}

SolveJob load_solve_job(const std::filesystem::path& path) {
    return parse_solve_job(KvDocument::parse_file(path));
}

SolvedSystem solve_system(const SolveJob& job) {
    SolvedSystem out;
    out.job = job;
    out.all_converged = true;

    for (std::size_t b = 0; b < job.system.blocks.size(); ++b) {
        const SubsystemSetup& setup = job.system.blocks[b];

        // Reuse an already-solved identical block (X and Y usually match).
        int twin = -1;
        for (std::size_t prev = 0; prev < b; ++prev) {
            if (same_block(job.system.blocks[prev], setup)) {
                twin = static_cast<int>(prev);
                break;
            }
        }
        if (twin >= 0) {
            SolvedBlock copy = out.blocks[twin];
            copy.tag = setup.tag;
            out.blocks.push_back(std::move(copy));
            continue;
        }

        SolvedBlock solved;
        solved.tag = setup.tag;
        solved.converged = true;
        try {
            solved.stage1 = solve_converged_value(setup.model, setup.grid, job.config);
        } catch (const ConvergenceError& e) {
            solved.stage1 = e.partial();
            solved.converged = false;
        }
        SolveConfig stage2 = job.config;
        try {
            solved.rclvf = solve_rclvf(setup.model, setup.grid, stage2, solved.stage1.minval);
        } catch (const ConvergenceError& e) {
            solved.rclvf = e.partial();
            solved.rclvf.minval = solved.stage1.minval;
            solved.converged = false;
        }
        out.all_converged &= solved.converged;
        out.blocks.push_back(std::move(solved));
    }
    return out;
}

std::string job_fingerprint(const SolveJob& job) {
    std::string canon = job.system.name;
    const ModelParams& p = job.system.params;
    canon += "|" + fmt(p.d0) + "," + fmt(p.d1) + "," + fmt(p.n0) + "," + fmt(p.kT) + "," + fmt(p.g);
    const ControlBounds& bd = job.system.bounds;
    canon += "|" + fmt(bd.ux.lo) + "," + fmt(bd.ux.hi) + "," + fmt(bd.uy.lo) + "," + fmt(bd.uy.hi) +
             "," + fmt(bd.uz.lo) + "," + fmt(bd.uz.hi) + "," + fmt(bd.planner_vmax);
    for (double d : bd.disturbance) canon += "," + fmt(d);
    for (const auto& blk : job.system.blocks) {
        canon += "|" + blk.tag;
        for (int a = 0; a < blk.grid.dims(); ++a) {
            canon += "," + fmt(blk.grid.lower(a)) + "," + fmt(blk.grid.upper(a)) + "," +
                     std::to_string(blk.grid.count(a));
        }
    }
    canon += "|" + fmt(job.config.gamma) + "," + fmt(job.config.tolerance) + "," +
             std::to_string(job.config.max_iterations) + "," + fmt(job.config.cfl) + "," +
             fmt(job.config.divergence_cap);

    std::uint64_t h = 0xCBF29CE484222325ull;
    fnv_mix(h, canon);
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_value_dir(const std::filesystem::path& dir, const SolvedSystem& solved) {
    std::filesystem::create_directories(dir);

    auto write_stage = [&](const std::string& tag, const std::string& stage, const SolveResult& res) {
        const std::string base = tag + "_" + stage;
        FieldMeta meta{res.gamma, res.minval, res.converged};
        write_field(dir / (base + ".vf"), res.field, meta);
        write_history_csv(dir / (base + "_history.csv"), res.history);
        std::ofstream m(dir / (base + ".meta"), std::ios::trunc);
        if (!m) throw Error("cannot write meta sidecar in " + dir.string());
        m << "subsystem = " << tag << "\n";
        m << "stage = " << stage << "\n";
        m << "gamma = " << fmt(res.gamma) << "\n";
        m << "c = " << fmt(res.minval) << "\n";
        m << "converged = " << (res.converged ? 1 : 0) << "\n";
        m << "iterations = " << res.history.size() << "\n";
        m << "final_residual = " << fmt(res.history.empty() ? -1.0 : res.history.back().residual)
          << "\n";
        m << "time_step = " << fmt(res.time_step) << "\n";
        m << "diverged_nodes = " << res.diverged_nodes << "\n";
    };

    for (const auto& blk : solved.blocks) {
        write_stage(blk.tag, "gamma0", blk.stage1);
        write_stage(blk.tag, "rclvf", blk.rclvf);
    }

    const SolveJob& job = solved.job;
    std::ofstream m(dir / "manifest.txt", std::ios::trunc);
    if (!m) throw Error("cannot write manifest in " + dir.string());
    m << "system = " << job.system.name << "\n";
    m << "fingerprint = " << job_fingerprint(job) << "\n";
    const ModelParams& p = job.system.params;
    m << "d0 = " << fmt(p.d0) << "\nd1 = " << fmt(p.d1) << "\nn0 = " << fmt(p.n0) << "\nkT = "
      << fmt(p.kT) << "\ng = " << fmt(p.g) << "\n";
    const ControlBounds& bd = job.system.bounds;
    m << "ux = " << fmt(bd.ux.lo) << " " << fmt(bd.ux.hi) << "\n";
    m << "uy = " << fmt(bd.uy.lo) << " " << fmt(bd.uy.hi) << "\n";
    m << "uz = " << fmt(bd.uz.lo) << " " << fmt(bd.uz.hi) << "\n";
    m << "planner_vmax = " << fmt(bd.planner_vmax) << "\n";
    m << "disturbance_bound = " << fmt(bd.disturbance[0]) << " " << fmt(bd.disturbance[1]) << " "
      << fmt(bd.disturbance[2]) << "\n";
    m << "gamma = " << fmt(job.config.gamma) << "\n";
    m << "tolerance = " << fmt(job.config.tolerance) << "\n";
    m << "max_iterations = " << job.config.max_iterations << "\n";
    m << "cfl = " << fmt(job.config.cfl) << "\n";
    m << "divergence_cap = " << fmt(job.config.divergence_cap) << "\n";
    m << "converged = " << (solved.all_converged ? 1 : 0) << "\n";
    for (const auto& blk : solved.blocks) {
        m << "block = " << blk.tag << " " << blk.tag << "_gamma0.vf " << blk.tag << "_rclvf.vf\n";
    }
}

std::string value_dir_system(const std::filesystem::path& dir) {
    const auto manifest = dir / "manifest.txt";
    if (!std::filesystem::exists(manifest)) {
        throw MismatchError(dir.string() + ": not a value directory (missing manifest.txt)");
    }
    return manifest_path_system(KvDocument::parse_file(manifest));
}

TrackingPolicy load_policy(const std::filesystem::path& dir) {
    const auto manifest_file = dir / "manifest.txt";
    if (!std::filesystem::exists(manifest_file)) {
        throw MismatchError(dir.string() + ": not a value directory (missing manifest.txt)");
    }
    KvDocument doc = KvDocument::parse_file(manifest_file);

    auto rows = doc.get_rows("block");
    if (rows.empty()) throw MismatchError(dir.string() + ": manifest lists no blocks");

    std::vector<LoadedField> gamma0, rclvf;
    std::vector<std::string> tags;
    for (const auto& row : rows) {
        if (row.size() != 3) throw MismatchError(dir.string() + ": malformed block row in manifest");
        tags.push_back(row[0]);
        for (int stage = 1; stage <= 2; ++stage) {
            const auto file = dir / row[stage];
            if (!std::filesystem::exists(file)) {
                throw MismatchError(dir.string() + ": missing value file " + row[stage]);
            }
            (stage == 1 ? gamma0 : rclvf).push_back(read_field(file));
        }
    }

    SolveJob job = job_from_manifest(doc, gamma0, rclvf);
    if (job_fingerprint(job) != doc.get_string("fingerprint")) {
        throw MismatchError(dir.string() + ": manifest fingerprint mismatch");
    }
    if (job.system.blocks.size() != rows.size()) {
        throw MismatchError(dir.string() + ": block count does not match the declared system");
    }

    std::vector<PolicyBlock> blocks;
    for (std::size_t b = 0; b < rows.size(); ++b) {
        const SubsystemSetup& setup = job.system.blocks[b];
        if (tags[b] != setup.tag) {
            throw MismatchError(dir.string() + ": unexpected block order in manifest");
        }
        const LoadedField& lf = rclvf[b];
        if (lf.field.grid().dims() != setup.model.dim) {
            throw MismatchError(dir.string() + ": block " + setup.tag + " has wrong grid dimension");
        }
        if (lf.field.grid() != setup.grid) {
            throw MismatchError(dir.string() + ": block " + setup.tag + " grid differs from manifest");
        }
        if (lf.meta.gamma != job.config.gamma) {
            throw MismatchError(dir.string() + ": block " + setup.tag + " gamma differs from manifest");
        }
        blocks.push_back({setup.tag, setup.model, lf.field, lf.meta.gamma, lf.meta.minval});
    }
    TrackingPolicy policy(std::move(blocks), job.system.params, job.system.planner_dim);
    policy.set_level_margin(job.config.tolerance);
    return policy;
}

TrackingPolicy ensure_value_dir(const std::filesystem::path& dir, const SolveJob& job) {
    const auto manifest_file = dir / "manifest.txt";
    if (std::filesystem::exists(manifest_file)) {
        try {
            KvDocument doc = KvDocument::parse_file(manifest_file);
            if (doc.get_string("fingerprint", "") == job_fingerprint(job) &&
                doc.get_int("converged", 0) == 1) {
                return load_policy(dir);
            }
        } catch (const Error&) {
            // fall through to a fresh solve
        }
    }
    SolvedSystem solved = solve_system(job);
    write_value_dir(dir, solved);
    return load_policy(dir);
}

}  // namespace srf
