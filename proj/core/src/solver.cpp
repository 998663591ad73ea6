#include "srf/solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "srf/error.hpp"
#include "srf/parallel.hpp"

namespace srf {

namespace {

double dot(std::span<const double> a, const std::array<double, kMaxDims>& b, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double min_over(const Interval& iv, double coeff) {
    return coeff >= 0.0 ? coeff * iv.lo : coeff * iv.hi;
}

double max_over(const Interval& iv, double coeff) {
    return coeff >= 0.0 ? coeff * iv.hi : coeff * iv.lo;
}

struct Workspace {
    const SubsystemModel* model = nullptr;
    const Grid* grid = nullptr;
    int dims = 0;
    std::vector<double> drift;                 // dims entries per node
    std::array<double, kMaxDims> alpha{};      // per-axis dissipation bound
    std::array<double, kMaxDims> spacing{};
    std::array<std::size_t, kMaxDims> counts{};
    std::array<std::size_t, kMaxDims> strides{};
};

Workspace prepare(const SubsystemModel& model, const Grid& grid) {
    if (model.dim != grid.dims()) throw Error("solver: model/grid dimension mismatch");
    Workspace w;
    w.model = &model;
    w.grid = &grid;
    w.dims = grid.dims();
    for (int a = 0; a < w.dims; ++a) {
        w.spacing[a] = grid.spacing(a);
        w.counts[a] = grid.count(a);
        w.strides[a] = grid.stride(a);
    }

    // |dH/dq_a| <= max over grid nodes and admissible inputs of |f_a|. The
    // input contribution is affine, so per node it suffices to check the two
    // extreme offsets; drift and control often anti-align (vertical thrust vs
    // gravity) and the blunt |drift|+|gains| bound would over-dissipate.
    std::array<double, kMaxDims> off_lo{};
    std::array<double, kMaxDims> off_hi{};
    for (int a = 0; a < w.dims; ++a) {
        for (const InputChannel* ch : {&model.control, &model.planner, &model.disturbance}) {
            const double e1 = ch->gain[a] * ch->bound.lo;
            const double e2 = ch->gain[a] * ch->bound.hi;
            off_lo[a] += std::min(e1, e2);
            off_hi[a] += std::max(e1, e2);
        }
    }

    const std::size_t n = grid.total_nodes();
    w.drift.resize(n * w.dims);
    std::array<double, kMaxDims> point{};
    std::array<double, kMaxDims> rate{};
    for (std::size_t i = 0; i < n; ++i) {
        grid.node_point(i, std::span<double>(point.data(), w.dims));
        model.drift(std::span<const double>(point.data(), w.dims),
                    std::span<double>(rate.data(), w.dims));
        for (int a = 0; a < w.dims; ++a) {
            w.drift[i * w.dims + a] = rate[a];
            w.alpha[a] = std::max(w.alpha[a], std::max(std::abs(rate[a] + off_lo[a]),
                                                       std::abs(rate[a] + off_hi[a])));
        }
    }
    return w;
}

double stability_limit(const Workspace& w, double gamma) {
    double rate = gamma;
    for (int a = 0; a < w.dims; ++a) rate += w.alpha[a] / w.spacing[a];
    return rate > 0.0 ? 1.0 / rate : std::numeric_limits<double>::infinity();
}

double numerical_hamiltonian(const Workspace& w, const SolveConfig& cfg, const double* drift,
                             const std::array<double, kMaxDims>& qbar) {
    const SubsystemModel& m = *w.model;
    double base = 0.0;
    for (int a = 0; a < w.dims; ++a) base += qbar[a] * drift[a];
    const double cu = dot(std::span<const double>(qbar.data(), w.dims), m.control.gain, w.dims);
    const double cb = dot(std::span<const double>(qbar.data(), w.dims), m.planner.gain, w.dims);
    const double cd = dot(std::span<const double>(qbar.data(), w.dims), m.disturbance.gain, w.dims);
    if (cfg.policy == HamiltonianPolicy::Analytic) {
        return base + min_over(m.control.bound, cu) + max_over(m.planner.bound, cb) +
               max_over(m.disturbance.bound, cd);
    }
    // Lattice min-max; the channels are decoupled in q.f so the inner max is
    // elementwise.
    const int ns = std::max(2, cfg.samples_per_input);
    auto lattice = [ns](const Interval& iv, int k) {
        return iv.lo + (iv.hi - iv.lo) * static_cast<double>(k) / static_cast<double>(ns - 1);
    };
    double best_u = std::numeric_limits<double>::infinity();
    for (int k = 0; k < ns; ++k) best_u = std::min(best_u, cu * lattice(m.control.bound, k));
    double best_b = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < ns; ++k) best_b = std::max(best_b, cb * lattice(m.planner.bound, k));
    double best_d = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < ns; ++k) best_d = std::max(best_d, cd * lattice(m.disturbance.bound, k));
    return base + best_u + best_b + best_d;
}

SolveResult run_value_iteration(const SubsystemModel& model, const Grid& grid,
                                const SolveConfig& cfg, const std::vector<double>& stage_cost) {
    Workspace w = prepare(model, grid);
    const std::size_t n = grid.total_nodes();
    const int dims = w.dims;

    const double limit = stability_limit(w, cfg.gamma);
    const double dt = cfg.dt > 0.0 ? cfg.dt : cfg.cfl * limit;
    if (!(dt > 0.0) || dt > limit * (1.0 + 1e-12)) {
        throw Error("solver: time step violates the CFL stability bound");
    }
    if (!(cfg.tolerance > 0.0)) throw Error("solver: tolerance must be positive");

    std::vector<double> value(n);
    std::vector<double> next(n);
    std::vector<char> diverged(n, 0);
    std::vector<double> chunk_residual(static_cast<std::size_t>(worker_count()), 0.0);

    SolveResult result{ScalarField(grid), cfg.gamma, 0.0, false, 0, dt, {}};
    result.history.reserve(256);
    const auto t0 = std::chrono::steady_clock::now();
    int iter = 0;

    auto sweep = [&]() {
        std::fill(chunk_residual.begin(), chunk_residual.end(), 0.0);
        std::atomic<int> chunk_id{0};

        parallel_for(n, [&](std::size_t begin, std::size_t end) {
            const int my_chunk = chunk_id.fetch_add(1, std::memory_order_relaxed);
            double local_res = 0.0;
            std::array<std::size_t, kMaxDims> mi{};
            grid.unflatten(begin, std::span<std::size_t>(mi.data(), dims));

            std::array<double, kMaxDims> dminus{};
            std::array<double, kMaxDims> dplus{};
            std::array<double, kMaxDims> qbar{};
            for (std::size_t i = begin; i < end; ++i) {
                if (diverged[i]) {
                    next[i] = value[i];
                } else {
                    const double v = value[i];
                    double dissip = 0.0;
                    for (int a = 0; a < dims; ++a) {
                        const std::size_t stride = w.strides[a];
                        const double h = w.spacing[a];
                        // Diverged neighbours act like grid edges (linear
                        // ghost extension) so capped values cannot leak
                        // dissipation into the solvable domain.
                        const bool lok = mi[a] > 0 && !diverged[i - stride];
                        const bool rok = mi[a] + 1 < w.counts[a] && !diverged[i + stride];
                        double left = lok ? value[i - stride] : 0.0;
                        double right = rok ? value[i + stride] : 0.0;
                        if (!lok) left = rok ? 2.0 * v - right : v;
                        if (!rok) right = lok ? 2.0 * v - left : v;
                        dminus[a] = (v - left) / h;
                        dplus[a] = (right - v) / h;
                        qbar[a] = 0.5 * (dminus[a] + dplus[a]);
                        dissip += 0.5 * w.alpha[a] * (dplus[a] - dminus[a]);
                    }
                    const double ham = numerical_hamiltonian(w, cfg, &w.drift[i * dims], qbar);
                    const double backed = v + dt * (ham + dissip + cfg.gamma * v);
                    double vn = std::max(stage_cost[i], backed);
                    if (vn >= cfg.divergence_cap) {
                        vn = cfg.divergence_cap;
                        diverged[i] = 1;
                    } else {
                        local_res = std::max(local_res, std::abs(vn - v));
                    }
                    next[i] = vn;
                }
                for (int a = dims - 1; a >= 0; --a) {
                    if (++mi[a] < w.counts[a]) break;
                    mi[a] = 0;
                }
            }
            chunk_residual[static_cast<std::size_t>(my_chunk) % chunk_residual.size()] = local_res;
        });

        value.swap(next);
        double residual = 0.0;
        for (double r : chunk_residual) residual = std::max(residual, r);
        return residual;
    };

    // Divergence restarts: growth past the cap contaminates neighbours before
    // the sentinel freezes, and the max-cost update can never pull those
    // values back down. Whenever a pass ends with newly diverged nodes, the
    // iteration restarts from the stage cost with the mask held as an
    // outflow frontier; the mask stabilizes in a few passes.
    const int max_passes = 6;
    std::size_t masked_before = 0;
    for (int pass = 0; pass < max_passes; ++pass) {
        for (std::size_t i = 0; i < n; ++i) {
            value[i] = diverged[i] ? cfg.divergence_cap : stage_cost[i];
        }
        result.converged = false;
        while (iter < cfg.max_iterations) {
            ++iter;
            const double residual = sweep();
            const double wall_ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();
            result.history.push_back({iter, residual, wall_ms});
            if (residual <= cfg.tolerance) {
                result.converged = true;
                break;
            }
        }
        const auto masked_now =
            static_cast<std::size_t>(std::count(diverged.begin(), diverged.end(), char(1)));
        if (masked_now == masked_before) break;
        masked_before = masked_now;
    }

    double minval = std::numeric_limits<double>::infinity();
    std::size_t ndiv = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (diverged[i]) {
            value[i] = std::numeric_limits<double>::infinity();
            ++ndiv;
        } else {
            minval = std::min(minval, value[i]);
        }
    }
    result.field = ScalarField(grid, std::move(value));
    result.minval = minval;
    result.diverged_nodes = ndiv;
    if (!result.converged) {
        std::string msg = "solver: no convergence after " + std::to_string(cfg.max_iterations) +
                          " iterations (last residual " +
                          std::to_string(result.history.empty() ? -1.0 : result.history.back().residual) +
                          ")";
        throw ConvergenceError(msg, std::move(result));
    }
    return result;
}

std::vector<double> norm_cost(const Grid& grid, double shift) {
    const int dims = grid.dims();
    std::vector<double> cost(grid.total_nodes());
    std::array<double, kMaxDims> point{};
    for (std::size_t i = 0; i < grid.total_nodes(); ++i) {
        grid.node_point(i, std::span<double>(point.data(), dims));
        double s = 0.0;
        for (int a = 0; a < dims; ++a) s += point[a] * point[a];
        cost[i] = std::sqrt(s) - shift;
    }
    return cost;
}

}  // namespace

double hamiltonian(const SubsystemModel& model, std::span<const double> r,
                   std::span<const double> q) {
    if (static_cast<int>(q.size()) != model.dim) throw Error("hamiltonian: gradient dimension mismatch");
    std::array<double, kMaxDims> rate{};
    model.drift(r, std::span<double>(rate.data(), model.dim));
    double h = 0.0;
    for (int a = 0; a < model.dim; ++a) h += q[a] * rate[a];
    h += min_over(model.control.bound, dot(q, model.control.gain, model.dim));
    h += max_over(model.planner.bound, dot(q, model.planner.gain, model.dim));
    h += max_over(model.disturbance.bound, dot(q, model.disturbance.gain, model.dim));
    return h;
}

double hamiltonian_sampled(const SubsystemModel& model, std::span<const double> r,
                           std::span<const double> q, int n) {
    if (n < 2) throw Error("hamiltonian_sampled: need at least 2 samples per input");
    std::array<double, kMaxDims> rate{};
    model.drift(r, std::span<double>(rate.data(), model.dim));
    auto lattice = [n](const Interval& iv, int k) {
        return iv.lo + (iv.hi - iv.lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    };
    std::array<double, kMaxDims> f{};
    double best_u = std::numeric_limits<double>::infinity();
    for (int ku = 0; ku < n; ++ku) {
        double worst = -std::numeric_limits<double>::infinity();
        for (int kb = 0; kb < n; ++kb) {
            for (int kd = 0; kd < n; ++kd) {
                model.flow(r, lattice(model.control.bound, ku), lattice(model.planner.bound, kb),
                           lattice(model.disturbance.bound, kd), std::span<double>(f.data(), model.dim));
                double s = 0.0;
                for (int a = 0; a < model.dim; ++a) s += q[a] * f[a];
                worst = std::max(worst, s);
            }
        }
        best_u = std::min(best_u, worst);
    }
    return best_u;
}

SolveResult solve_converged_value(const SubsystemModel& model, const Grid& grid, SolveConfig cfg) {
    cfg.gamma = 0.0;
    return run_value_iteration(model, grid, cfg, norm_cost(grid, 0.0));
}

SolveResult solve_rclvf(const SubsystemModel& model, const Grid& grid, const SolveConfig& cfg,
                        double c) {
    SolveResult res = run_value_iteration(model, grid, cfg, norm_cost(grid, c));
    res.minval = c;  // carry the stage-1 shift, not the shifted field minimum
    return res;
}

void write_history_csv(const std::filesystem::path& path,
                       const std::vector<IterationRecord>& history) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << "iteration,residual,wall_ms\n";
    char line[96];
    for (const auto& rec : history) {
        std::snprintf(line, sizeof(line), "%d,%.17g,%.3f\n", rec.iteration, rec.residual, rec.wall_ms);
        out << line;
    }
}

std::pair<double, double> pteb_interval(const ScalarField& field, double level) {
    return level_set_extent(field, level, 0);
}

double steb_level(const ScalarField& field, double dst, double margin) {
    if (!(dst > 0.0)) throw Error("steb_level: dst must be positive");
    const Grid& g = field.grid();
    const int dims = g.dims();
    const double r2 = 0.25 * dst * dst;
    std::array<std::size_t, kMaxDims> mi{};
    double outside_min = std::numeric_limits<double>::infinity();
    double shell_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.total_nodes(); ++i) {
        const double v = field[i];
        if (!std::isfinite(v)) continue;
        g.unflatten(i, std::span<std::size_t>(mi.data(), dims));
        double n2 = 0.0;
        bool boundary = false;
        for (int a = 0; a < dims; ++a) {
            const double c = g.coord(a, mi[a]);
            n2 += c * c;
            boundary |= mi[a] == 0 || mi[a] + 1 == g.count(a);
        }
        if (n2 >= r2) outside_min = std::min(outside_min, v);
        if (boundary) shell_min = std::min(shell_min, v);
    }
    const double raw = std::isfinite(outside_min) ? outside_min : shell_min;
    if (!std::isfinite(raw)) return 0.0;  // fully diverged shell
    return std::max(0.0, raw - margin);
}

}  // namespace srf
