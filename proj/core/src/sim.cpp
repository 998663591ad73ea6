#include "srf/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "srf/error.hpp"
#include "srf/navigation.hpp"
#include "srf/parallel.hpp"
#include "srf/rng.hpp"

namespace srf {

std::string outcome_name(Outcome o) {
    switch (o) {
        case Outcome::Reached: return "REACHED";
        case Outcome::Collided: return "COLLIDED";
        case Outcome::Infeasible: return "INFEASIBLE";
        case Outcome::Unrecoverable: return "UNRECOVERABLE";
        case Outcome::Timeout: return "TIMEOUT";
    }
    return "UNKNOWN";
}

int outcome_exit_code(Outcome o) {
    switch (o) {
        case Outcome::Reached: return 0;
        case Outcome::Collided: return 1;
        default: return 5;
    }
}

TrackerState inject_disturbance(const TrackerState& s, const DisturbanceEvent& event,
                                const OccupancyMap& map, bool* landed_inside) {
    std::array<double, 3> pos = event.pos_offset;
    std::array<double, 3> vel = event.vel_offset;
    if (event.adversarial) {
        PVec proj;
        proj.dim = map.dim();
        for (int a = 0; a < proj.dim; ++a) proj.c[a] = s.v[a];
        if (auto target = map.nearest_sensed_boundary(proj)) {
            std::array<double, 3> dir{};
            double norm = 0.0;
            for (int a = 0; a < proj.dim; ++a) {
                dir[a] = target->c[a] - proj.c[a];
                norm += dir[a] * dir[a];
            }
            norm = std::sqrt(norm);
            if (norm > 1e-12) {
                auto mag = [](const std::array<double, 3>& v) {
                    return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
                };
                const double pm = mag(pos), vm = mag(vel);
                for (int a = 0; a < 3; ++a) {
                    const double u = a < proj.dim ? dir[a] / norm : 0.0;
                    pos[a] = pm * u;
                    vel[a] = vm * u;
                }
            }
        }
    }
    TrackerState out = s;
    for (int a = 0; a < 3; ++a) out.v[a] += pos[a];
    if (event.type == DisturbanceType::PositionVelocity) {
        for (int a = 0; a < 3; ++a) out.v[a + 3] += vel[a];
    }
    if (landed_inside) {
        PVec proj;
        proj.dim = map.dim();
        for (int a = 0; a < proj.dim; ++a) proj.c[a] = out.v[a];
        *landed_inside = map.inside_true_obstacle(proj);
    }
    return out;
}

namespace {

PVec project(const TrackerState& s, int dim) {
    PVec p;
    p.dim = dim;
    for (int a = 0; a < dim; ++a) p.c[a] = s.v[a];
    return p;
}

struct ResolvedDisturbance {
    DisturbanceEvent event;
    double magnitude = 0.0;
};

/// Samples the event magnitudes for this run and shortens the positional
/// offset so the landing point stays clear of every true obstacle. The walk
/// uses the true geometry: a disturbance is a physical displacement, not a
/// teleport through walls.
ResolvedDisturbance resolve_disturbance(const Scenario& scn, const OccupancyMap& map,
                                        const TrackerState& s, double pteb_halfwidth, Rng& rng) {
    const DisturbanceSpec& spec = scn.disturbance;
    const int dim = scn.planner_dim();

    std::array<double, 3> dir{};
    if (spec.adversarial) {
        if (auto target = map.nearest_sensed_boundary(project(s, dim))) {
            double norm = 0.0;
            for (int a = 0; a < dim; ++a) {
                dir[a] = target->c[a] - s.v[a];
                norm += dir[a] * dir[a];
            }
            norm = std::sqrt(norm);
            if (norm > 1e-12) {
                for (int a = 0; a < dim; ++a) dir[a] /= norm;
            } else {
                dir = spec.direction;
            }
        } else {
            dir = spec.direction;
        }
    } else {
        dir = spec.direction;
    }

    const double want = rng.uniform(spec.scale_lo, spec.scale_hi) * pteb_halfwidth;
    const double vmag = rng.uniform(spec.vel_lo, spec.vel_hi);

    // March along the push direction; stop one margin short of any obstacle.
    const double margin = 0.02;
    const double probe = 0.01;
    double reach = want;
    for (double t = probe; t <= want + 1e-9; t += probe) {
        PVec p;
        p.dim = dim;
        for (int a = 0; a < dim; ++a) p.c[a] = s.v[a] + t * dir[a];
        bool bad = map.inside_true_obstacle(p);
        if (!bad) {
            for (const auto& ob : map.obstacles()) {
                if (ob.box.distance(p) < margin) {
                    bad = true;
                    break;
                }
            }
        }
        if (bad) {
            reach = t - probe;
            break;
        }
    }
    reach = std::max(0.0, std::min(reach, want));

    ResolvedDisturbance out;
    out.magnitude = reach;
    out.event.type = spec.type;
    out.event.adversarial = false;  // direction already resolved here
    for (int a = 0; a < 3; ++a) {
        out.event.pos_offset[a] = a < dim ? reach * dir[a] : 0.0;
        out.event.vel_offset[a] = a < dim ? vmag * dir[a] : 0.0;
    }
    return out;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

RunResult run(const Scenario& scenario, const TrackingPolicy& policy) {
    scenario.validate();
    if (policy.planner_dim() != scenario.planner_dim()) {
        throw Error("run: policy planner dimension does not match the scenario system");
    }

    const int dim = scenario.planner_dim();
    RunResult result;
    result.seed = scenario.seed;
    result.mode = scenario.mode;
    result.disturbance_label = scenario.disturbance_label();

    OccupancyMap map(scenario.workspace, scenario.raster_resolution, scenario.sensing_radius,
                     scenario.obstacles);

    TrackerState s;
    for (int a = 0; a < 3; ++a) s.v[a] = scenario.start[a];
    PlannerState p;
    p.dim = dim;
    for (int a = 0; a < dim; ++a) p.p[a] = scenario.start[a];

    NavFlags flags;
    flags.jump = false;
    flags.replan = true;
    PlanPath path;
    path.origin = project(s, dim);

    Rng rng_plan(derive_seed(scenario.seed, 1));
    Rng rng_dist(derive_seed(scenario.seed, 2));
    Rng rng_model(derive_seed(scenario.seed, 3));

    const double pteb_halfwidth = policy.planner_projection(0.0).max_half_width();
    const double planner_vmax = policy.block(0).model.planner.bound.hi;
    bool disturbance_pending = scenario.disturbance.type != DisturbanceType::None;
    bool warned_alpha_zero = false;
    bool modeled_active = false;
    for (int a = 0; a < dim; ++a) modeled_active |= scenario.modeled_disturbance[a] > 0.0;

    const double dt = scenario.decision_dt;
    const double sub_dt = dt / scenario.physics_substeps;
    const int max_ticks = static_cast<int>(std::ceil(scenario.timeout / dt));

    result.trace.reserve(static_cast<std::size_t>(max_ticks));
    auto log_event = [&](int tick, std::string tag) {
        result.events.push_back({tick, std::move(tag)});
    };

    for (int tick = 0; tick < max_ticks; ++tick) {
        const double t = tick * dt;

        // Sensing block: unexpected disturbance first, then environment.
        if (disturbance_pending) {
            const bool fire = scenario.disturbance.has_region
                                  ? scenario.disturbance.trigger_region.contains(project(s, dim))
                                  : t >= scenario.disturbance.trigger_time;
            if (fire) {
                disturbance_pending = false;
                ResolvedDisturbance rd =
                    resolve_disturbance(scenario, map, s, pteb_halfwidth, rng_dist);
                bool landed_inside = false;
                s = inject_disturbance(s, rd.event, map, &landed_inside);
                log_event(tick, "DISTURBANCE m=" + format_double(rd.magnitude));
                if (landed_inside) {
                    result.excluded = true;
                    log_event(tick, "PUSHED_INEVITABLE");
                }
            }
        }

        const PVec proj = project(s, dim);
        if (map.sense(proj)) {
            flags.replan = true;
            log_event(tick, "NEW_OBSTACLE");
        }
        bool inside_obstacle = false;
        const double dst = map.distance_to_obstacle(proj, &inside_obstacle);

        double alpha = 0.0;
        if (scenario.mode == NavMode::Srf) {
            alpha = policy.steb_level(dst);
            if (alpha == 0.0 && map.obstacle_within(proj, scenario.sensing_radius)) {
                if (!warned_alpha_zero) {
                    log_event(tick, "TEB_EXCEEDS_BALL");
                    warned_alpha_zero = true;
                }
            } else if (alpha > 0.0) {
                warned_alpha_zero = false;
            }
        }
        const PlannerExtents psteb = policy.planner_projection(alpha);
        map.augment(psteb);

        // Planning block.
        RelativeState r = relative_state(s, p);
        ValueQuery vq = policy.value_of(r);
        if (vq.outside_domain) {
            result.outcome = Outcome::Unrecoverable;
            log_event(tick, "UNRECOVERABLE");
            result.ticks = tick + 1;
            break;
        }
        const bool jf = scenario.mode == NavMode::Srf &&
                        jump_decision(vq.value, map.obstacle_within(proj, scenario.sensing_radius));
        flags.jump = jf;

        SafeReturnInput sr_in;
        sr_in.policy = &policy;
        sr_in.map = &map;
        sr_in.tracker = &s;
        sr_in.planner = {dim, p.p};
        sr_in.goal = scenario.goal;
        sr_in.steb_alpha = alpha;
        sr_in.psteb = psteb;
        sr_in.planner_vmax = planner_vmax;
        sr_in.decision_dt = dt;
        sr_in.candidate_spacing = scenario.raster_resolution;
        sr_in.rrt = scenario.rrt;
        sr_in.time_now = t;
        sr_in.plan_rng = &rng_plan;

        SafeReturnOutcome sr = safe_return(sr_in, flags, path);
        if (sr.plan_failed) {
            result.outcome = Outcome::Infeasible;
            log_event(tick, "PLAN_FAIL");
            result.ticks = tick + 1;
            break;
        }
        if (sr.replanned) log_event(tick, "REPLAN");
        for (int a = 0; a < dim; ++a) p.p[a] = sr.p_next.c[a];
        r = relative_state(s, p);
        if (sr.jumped) {
            const ValueQuery post = policy.value_of(r);
            std::string tag = sr.reset_to_self ? "RESET_SELF"
                              : sr.degraded    ? "RESET_DEGRADED"
                                               : "JUMP";
            log_event(tick, tag + " v=" + format_double(post.value) +
                                " alpha=" + format_double(alpha));
        }

        // Tracking block: controller runs at the physics rate against the
        // tick-fixed planner state.
        bool terminal = false;
        for (int sub = 0; sub < scenario.physics_substeps; ++sub) {
            ControlQuery cq = policy.optimal_control(r);
            if (cq.outside_domain) {
                result.outcome = Outcome::Unrecoverable;
                log_event(tick, "UNRECOVERABLE");
                terminal = true;
                break;
            }
            std::array<double, 3> d{};
            if (modeled_active) {
                for (int a = 0; a < dim; ++a) {
                    const double b = scenario.modeled_disturbance[a];
                    d[a] = b > 0.0 ? rng_model.uniform(-b, b) : 0.0;
                }
            }
            s = step_tracker(s, cq.u, d, sub_dt, policy.params());
            r = relative_state(s, p);
            if (map.inside_true_obstacle(project(s, dim))) {
                result.outcome = Outcome::Collided;
                result.collision_tick = tick;
                log_event(tick, "COLLISION");
                terminal = true;
                break;
            }
        }

        TraceRow row;
        row.tick = tick;
        row.time = t + dt;
        row.tracker = s.v;
        row.planner = {dim, p.p};
        row.value = policy.value_of(r).value;
        row.jf = jf ? 1 : 0;
        row.rf = flags.replan ? 1 : 0;
        row.steb_alpha = alpha;
        row.dst = dst;
        result.trace.push_back(row);
        result.ticks = tick + 1;

        if (terminal) break;
        if (project(s, dim).distance(scenario.goal) <= scenario.goal_radius) {
            result.outcome = Outcome::Reached;
            result.nav_time = (tick + 1) * dt;
            log_event(tick, "REACHED");
            break;
        }
    }
    return result;
}

void write_trace_csv(const std::filesystem::path& path, const RunResult& result) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << "tick,time,x,y,z,vx,vy,vz,thx,thy,wx,wy,px,py,pz,V_gamma,JF,RF,sTEB_level,dst\n";
    char buf[64];
    for (const auto& row : result.trace) {
        out << row.tick;
        auto put = [&](double v) {
            std::snprintf(buf, sizeof(buf), ",%.17g", v);
            out << buf;
        };
        put(row.time);
        for (double v : row.tracker) put(v);
        for (int a = 0; a < 3; ++a) put(a < row.planner.dim ? row.planner.c[a] : 0.0);
        put(row.value);
        out << ',' << row.jf << ',' << row.rf;
        put(row.steb_alpha);
        put(row.dst);
        out << '\n';
    }
}

std::string event_summary(const RunResult& result) {
    std::string s;
    for (const auto& e : result.events) {
        if (!s.empty()) s += ';';
        s += std::to_string(e.tick) + ":" + e.tag;
    }
    // Space-free so the summary stays a single CSV token.
    std::replace(s.begin(), s.end(), ' ', '_');
    return s;
}

void write_result_kv(const std::filesystem::path& path, const RunResult& result) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << "outcome = " << outcome_name(result.outcome) << "\n";
    out << "seed = " << result.seed << "\n";
    out << "mode = " << mode_name(result.mode) << "\n";
    out << "disturbance_setting = " << result.disturbance_label << "\n";
    out << "nav_time_s = " << format_double(result.nav_time) << "\n";
    out << "ticks = " << result.ticks << "\n";
    out << "collision_tick = " << result.collision_tick << "\n";
    out << "excluded = " << (result.excluded ? 1 : 0) << "\n";
    out << "events = " << event_summary(result) << "\n";
}

BatchSummary run_batch(const Scenario& scenario, const TrackingPolicy& policy, int n,
                       int parallelism, std::vector<RunResult>* results) {
    if (n < 1) throw Error("batch: need at least one run");
    std::vector<RunResult> all(static_cast<std::size_t>(n));
    parallel_for(
        static_cast<std::size_t>(n),
        [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                Scenario one = scenario;
                one.seed = scenario.seed + i;
                all[i] = run(one, policy);
            }
        },
        parallelism);

    BatchSummary sum;
    sum.mode = mode_name(scenario.mode);
    sum.setting = scenario.disturbance_label();
    sum.runs = n;
    double nav_total = 0.0;
    int nav_count = 0;
    for (const auto& rr : all) {
        if (rr.excluded) {
            ++sum.excluded;
            continue;
        }
        if (rr.outcome == Outcome::Reached) {
            ++sum.reached;
            nav_total += rr.nav_time;
            ++nav_count;
        }
        if (rr.outcome == Outcome::Collided) ++sum.collided;
    }
    const int counted = sum.runs - sum.excluded;
    sum.reach_pct = counted > 0 ? 100.0 * sum.reached / counted : 0.0;
    sum.collision_pct = counted > 0 ? 100.0 * sum.collided / counted : 0.0;
    sum.mean_nav_time = nav_count > 0 ? nav_total / nav_count : -1.0;
    if (results) *results = std::move(all);
    return sum;
}

void write_runs_csv(const std::filesystem::path& path, const std::vector<RunResult>& results) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << "seed,mode,disturbance_setting,outcome,nav_time_s,ticks,collision_tick,events\n";
    for (const auto& rr : results) {
        out << rr.seed << ',' << mode_name(rr.mode) << ',' << rr.disturbance_label << ','
            << outcome_name(rr.outcome) << ',' << format_double(rr.nav_time) << ',' << rr.ticks
            << ',' << rr.collision_tick << ',' << event_summary(rr) << '\n';
    }
}

void write_aggregate_csv(const std::filesystem::path& path,
                         const std::vector<BatchSummary>& summaries) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << "mode,disturbance_setting,runs,excluded,reach_pct,collision_pct,mean_nav_time_s\n";
    for (const auto& s : summaries) {
        out << s.mode << ',' << s.setting << ',' << s.runs << ',' << s.excluded << ','
            << format_double(s.reach_pct) << ',' << format_double(s.collision_pct) << ','
            << format_double(s.mean_nav_time) << '\n';
    }
}

}  // namespace srf
