#include "srf/navigation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "srf/error.hpp"

namespace srf {

PVec next_plan(PlanPath& path, const PVec& current, double vmax, double dt) {
    PVec pos = current;
    double budget = vmax * dt;
    while (budget > 1e-12 && !path.waypoints.empty()) {
        const PVec wp = path.waypoints.front();
        const double d = pos.distance(wp);
        if (d <= budget + 1e-12) {
            pos = wp;
            budget -= d;
            path.waypoints.erase(path.waypoints.begin());
        } else {
            const double t = budget / d;
            for (int a = 0; a < pos.dim; ++a) pos.c[a] += t * (wp.c[a] - pos.c[a]);
            budget = 0.0;
        }
    }
    return pos;
}

std::vector<PVec> jump_candidates(const PVec& tracker_proj, const PVec& planner, const PVec& goal,
                                  const PlannerExtents& psteb, double spacing) {
    const int dim = tracker_proj.dim;
    std::vector<PVec> cands;
    cands.push_back(planner);
    cands.push_back(tracker_proj);

    // Samples on the ray from the tracker projection toward the goal, capped
    // at both the projection reach and the goal itself.
    double reach2 = 0.0;
    for (int a = 0; a < dim; ++a) {
        const double w = std::max(std::abs(psteb.lo[a]), std::abs(psteb.hi[a]));
        reach2 += w * w;
    }
    const double reach = std::sqrt(reach2) + spacing;
    const double to_goal = tracker_proj.distance(goal);
    if (to_goal > 1e-12) {
        PVec dir = goal;
        for (int a = 0; a < dim; ++a) dir.c[a] = (goal.c[a] - tracker_proj.c[a]) / to_goal;
        const double tmax = std::min(reach, to_goal);
        const int steps = static_cast<int>(std::floor(tmax / spacing));
        for (int k = 1; k <= steps; ++k) {
            PVec p = tracker_proj;
            for (int a = 0; a < dim; ++a) p.c[a] += static_cast<double>(k) * spacing * dir.c[a];
            cands.push_back(p);
        }
        if (to_goal <= reach) cands.push_back(goal);
    }

    // Boundary of the projected safe-resetting box around the tracker
    // projection (candidate p = proj - e for error-space boundary points e).
    auto axis_samples = [&](int a) {
        std::vector<double> s;
        const double lo = psteb.lo[a], hi = psteb.hi[a];
        const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / spacing)));
        for (int k = 0; k <= n; ++k) {
            s.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n));
        }
        return s;
    };
    for (int face_axis = 0; face_axis < dim; ++face_axis) {
        for (double face_e : {psteb.lo[face_axis], psteb.hi[face_axis]}) {
            std::array<std::vector<double>, 3> sweep;
            for (int a = 0; a < dim; ++a) {
                sweep[a] = (a == face_axis) ? std::vector<double>{face_e} : axis_samples(a);
            }
            std::array<std::size_t, 3> idx{0, 0, 0};
            while (true) {
                PVec p = tracker_proj;
                for (int a = 0; a < dim; ++a) p.c[a] -= sweep[a][idx[a]];
                cands.push_back(p);
                int a = dim - 1;
                for (; a >= 0; --a) {
                    if (++idx[a] < sweep[a].size()) break;
                    idx[a] = 0;
                }
                if (a < 0) break;
            }
        }
    }
    return cands;
}

namespace {

PVec tracker_projection(const TrackerState& s, int dim) {
    PVec o;
    o.dim = dim;
    for (int a = 0; a < dim; ++a) o.c[a] = s.v[a];
    return o;
}

}  // namespace

SafeReturnOutcome safe_return(const SafeReturnInput& in, NavFlags& flags, PlanPath& path) {
    if (!in.policy || !in.map || !in.tracker || !in.plan_rng) {
        throw Error("safe_return: incomplete input bundle");
    }
    SafeReturnOutcome out;
    out.p_next = in.planner;

    if (flags.jump) {
        out.jumped = true;
        const PVec proj = tracker_projection(*in.tracker, in.policy->planner_dim());
        const auto cands =
            jump_candidates(proj, in.planner, in.goal, in.psteb, in.candidate_spacing);

        std::vector<int> order(cands.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return cands[a].distance(in.goal) < cands[b].distance(in.goal);
        });

        auto relative_at = [&](const PVec& cand) {
            PlannerState p;
            p.dim = in.policy->planner_dim();
            for (int a = 0; a < p.dim; ++a) p.p[a] = cand.c[a];
            return relative_state(*in.tracker, p);
        };

        // Clamped queries would certify states outside the solved grids, so a
        // candidate counts as feasible only when its blocks stay on-grid.
        int chosen = -1;
        for (int i : order) {
            if (in.map->blocked(cands[i])) continue;
            const ValueQuery q = in.policy->value_of(relative_at(cands[i]));
            if (!q.outside_domain && !q.clamped && q.value <= in.steb_alpha) {
                chosen = i;
                break;
            }
        }
        if (chosen < 0) {
            // No candidate satisfies the level constraint (e.g. a velocity
            // kick). Fall back to the free candidate with the least value
            // excess so the planner stays out of the augmented set and the
            // tracker can still converge toward it.
            // Best effort: clamped queries are allowed here (a velocity kick
            // can push blocks off-grid); diverged stencils are still out.
            double best_excess = std::numeric_limits<double>::infinity();
            for (int i : order) {
                if (in.map->blocked(cands[i])) continue;
                const ValueQuery q = in.policy->value_of(relative_at(cands[i]));
                if (q.outside_domain) continue;
                if (q.value < best_excess - 1e-12) {
                    best_excess = q.value;
                    chosen = i;
                }
            }
            if (chosen >= 0) out.degraded = true;
        }
        if (chosen < 0) {
            out.p_next = proj;
            out.reset_to_self = true;
        } else {
            out.p_next = cands[chosen];
        }
        path.waypoints.clear();
        path.origin = out.p_next;
        flags.replan = true;
    } else {
        if (flags.replan) {
            auto plan = rrt_plan(*in.map, in.planner, in.goal, in.plan_rng->next_u64(), in.rrt,
                                 in.time_now);
            if (!plan) {
                out.plan_failed = true;
                flags.jump = false;
                return out;
            }
            path = std::move(*plan);
            out.replanned = true;
            flags.replan = false;
        }
        out.p_next = next_plan(path, in.planner, in.planner_vmax, in.decision_dt);
    }
    flags.jump = false;
    return out;
}

}  // namespace srf
