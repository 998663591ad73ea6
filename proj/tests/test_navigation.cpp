#include <doctest.h>

#include <cmath>
#include <sstream>

#include "srf/navigation.hpp"
#include "srf/rng.hpp"
#include "test_fixtures.hpp"

using namespace srf;

namespace {

OccupancyMap two_d_map(std::vector<Box> boxes, double radius = 3.0, double res = 0.05) {
    Box ws{2, {-1.0, -5.0, 0.0}, {11.0, 5.0, 0.0}};
    for (auto& b : boxes) b.dim = 2;
    return OccupancyMap(ws, res, radius, std::move(boxes));
}

PVec pv2(double x, double y) { return PVec{2, {x, y, 0.0}}; }

}  // namespace

TEST_CASE("navigation: sensing radius is a closed ball and idempotent") {
    Box far{2, {8.0, 0.0, 0.0}, {9.0, 1.0, 0.0}};
    auto map = two_d_map({far});
    CHECK_FALSE(map.sense(pv2(0.0, 0.0)));  // distance 8 > 3
    CHECK(map.distance_to_obstacle(pv2(0.0, 0.0)) == doctest::Approx(3.0));  // nothing sensed

    // Obstacle face exactly at the sensing radius.
    Box at_radius{2, {3.0, -0.5, 0.0}, {4.0, 0.5, 0.0}};
    auto map2 = two_d_map({at_radius});
    CHECK(map2.sense(pv2(0.0, 0.0)));
    CHECK_FALSE(map2.sense(pv2(0.0, 0.0)));  // second sense: no new transition
}

TEST_CASE("navigation: distance to sensed boxes") {
    Box b{2, {2.0, -1.0, 0.0}, {3.0, 1.0, 0.0}};
    auto map = two_d_map({b});
    REQUIRE(map.sense(pv2(0.0, 0.0)));
    CHECK(map.distance_to_obstacle(pv2(0.0, 0.0)) == doctest::Approx(2.0));

    bool inside = false;
    CHECK(map.distance_to_obstacle(pv2(2.0, 0.5), &inside) == doctest::Approx(0.0));
    CHECK(inside);  // boundary is closed

    auto nb = map.nearest_sensed_boundary(pv2(0.0, 0.0));
    REQUIRE(nb.has_value());
    CHECK(nb->c[0] == doctest::Approx(2.0));
    CHECK(nb->c[1] == doctest::Approx(0.0));
}

TEST_CASE("navigation: augmentation is a conservative reflected Minkowski sum") {
    Box b{2, {2.0, -1.0, 0.0}, {3.0, 1.0, 0.0}};
    auto map = two_d_map({b});
    REQUIRE(map.sense(pv2(0.5, 0.0)));

    PlannerExtents psteb;
    psteb.dim = 2;
    psteb.lo = {-0.3, -0.3, 0.0};
    psteb.hi = {0.3, 0.3, 0.0};
    map.augment(psteb);

    // Everything inside the grown box is blocked...
    for (double x : {1.75, 2.5, 3.25}) {
        for (double y : {-1.25, 0.0, 1.25}) {
            CHECK(map.blocked(pv2(x, y)));
        }
    }
    // ...and points one cell beyond it are free.
    CHECK_FALSE(map.blocked(pv2(1.55, 0.0)));
    CHECK_FALSE(map.blocked(pv2(3.45, 0.0)));
    CHECK_FALSE(map.blocked(pv2(2.5, 1.45)));

    // Monotone: a larger projection blocks a superset.
    PlannerExtents bigger = psteb;
    bigger.lo = {-0.6, -0.6, 0.0};
    bigger.hi = {0.6, 0.6, 0.0};
    auto map2 = two_d_map({b});
    REQUIRE(map2.sense(pv2(0.5, 0.0)));
    map2.augment(bigger);
    for (double x = 1.0; x <= 4.0; x += 0.1) {
        for (double y = -2.0; y <= 2.0; y += 0.1) {
            if (map.blocked(pv2(x, y))) CHECK(map2.blocked(pv2(x, y)));
        }
    }

    // Empty sensed set: nothing augmented.
    auto map3 = two_d_map({Box{2, {8.0, 3.0, 0.0}, {9.0, 4.0, 0.0}}});
    map3.augment(psteb);
    CHECK_FALSE(map3.blocked(pv2(8.5, 3.5)));

    std::ostringstream dump;
    map.dump_ascii(dump);
    CHECK(dump.str().find('#') != std::string::npos);
    CHECK(dump.str().find('+') != std::string::npos);
}

TEST_CASE("navigation: rrt finds feasible deterministic paths") {
    auto map = two_d_map({});
    const PVec start = pv2(0.0, 0.0);
    const PVec goal = pv2(10.0, 0.0);
    RrtParams params;

    auto path = rrt_plan(map, start, goal, 42, params);
    REQUIRE(path.has_value());
    REQUIRE(path->waypoints.size() >= 2);
    CHECK(path->waypoints.front() == start);
    CHECK(path->waypoints.back() == goal);

    double length = 0.0;
    for (std::size_t i = 1; i < path->waypoints.size(); ++i) {
        const double seg = path->waypoints[i - 1].distance(path->waypoints[i]);
        CHECK(seg <= params.step + 1e-9);
        length += seg;
        CHECK_FALSE(map.blocked(path->waypoints[i]));
    }
    CHECK(length >= start.distance(goal) - 1e-9);

    auto path2 = rrt_plan(map, start, goal, 42, params);
    REQUIRE(path2.has_value());
    REQUIRE(path2->waypoints.size() == path->waypoints.size());
    for (std::size_t i = 0; i < path->waypoints.size(); ++i) {
        CHECK(path->waypoints[i] == path2->waypoints[i]);  // bitwise determinism
    }
}

TEST_CASE("navigation: sealed goals are reported infeasible") {
    // Wall across the whole corridor with the goal behind it.
    Box wall{2, {5.0, -5.0, 0.0}, {6.0, 5.0, 0.0}};
    auto map = two_d_map({wall});
    REQUIRE(map.sense(pv2(3.0, 0.0)));
    PlannerExtents none;
    none.dim = 2;
    map.augment(none);

    RrtParams params;
    params.max_nodes = 800;
    auto path = rrt_plan(map, pv2(0.0, 0.0), pv2(10.0, 0.0), 7, params);
    CHECK_FALSE(path.has_value());
}

TEST_CASE("navigation: next_plan advances under the velocity bound") {
    PlanPath path;
    path.origin = pv2(0.0, 0.0);
    path.waypoints = {pv2(1.0, 0.0), pv2(1.0, 1.0)};

    PVec p = next_plan(path, pv2(0.0, 0.0), 0.5, 0.1);
    CHECK(p.c[0] == doctest::Approx(0.05));
    CHECK(p.c[1] == doctest::Approx(0.0));
    CHECK(path.waypoints.size() == 2);

    // A waypoint within reach is consumed exactly.
    PlanPath short_path;
    short_path.waypoints = {pv2(0.03, 0.0), pv2(0.5, 0.0)};
    p = next_plan(short_path, pv2(0.0, 0.0), 0.5, 0.1);
    CHECK(short_path.waypoints.size() == 1);
    CHECK(p.c[0] == doctest::Approx(0.05));

    // Empty path holds position.
    PlanPath empty;
    PVec held = next_plan(empty, pv2(0.7, -0.2), 0.5, 0.1);
    CHECK(held == pv2(0.7, -0.2));

    // Per-step displacement never exceeds vmax*dt.
    Rng rng(13);
    PlanPath rnd;
    for (int i = 0; i < 20; ++i) rnd.waypoints.push_back(pv2(rng.uniform(0, 2), rng.uniform(-1, 1)));
    PVec cur = pv2(0.0, 0.0);
    for (int step = 0; step < 200 && !rnd.waypoints.empty(); ++step) {
        PVec nxt = next_plan(rnd, cur, 0.5, 0.1);
        CHECK(cur.distance(nxt) <= 0.5 * 0.1 + 1e-9);
        cur = nxt;
    }
}

TEST_CASE("navigation: jump decision truth table") {
    CHECK(jump_decision(0.3, true));    // outside the bound: must jump
    CHECK(jump_decision(-0.1, false));  // free space: artificial jump
    CHECK_FALSE(jump_decision(-0.1, true));
}

TEST_CASE("navigation: safe return jumps toward the goal in free space") {
    const TrackingPolicy& policy = srf_test::small_quad10_policy();
    Box ws{3, {-1.0, -3.0, 0.0}, {19.0, 3.0, 2.0}};
    // Sensing range beyond the error-bound diameter, so the free-space ball
    // contains the bound and the resetting level is positive.
    OccupancyMap map(ws, 0.05, 8.0, {});

    TrackerState s;
    s.x() = 2.0;
    s.z() = 1.0;
    PlanPath path;
    NavFlags flags;
    flags.jump = true;
    flags.replan = false;

    const double dst = map.distance_to_obstacle(PVec{3, {2.0, 0.0, 1.0}});
    const double alpha = policy.steb_level(dst);
    REQUIRE(alpha > 0.0);

    SafeReturnInput in;
    in.policy = &policy;
    in.map = &map;
    in.tracker = &s;
    in.planner = PVec{3, {2.0, 0.0, 1.0}};
    in.goal = PVec{3, {18.0, 0.0, 1.0}};
    in.steb_alpha = alpha;
    in.psteb = policy.planner_projection(alpha);
    in.candidate_spacing = 0.05;
    Rng rng(5);
    in.plan_rng = &rng;

    auto out = safe_return(in, flags, path);
    CHECK(out.jumped);
    CHECK_FALSE(out.degraded);
    CHECK_FALSE(flags.jump);   // always cleared
    CHECK(flags.replan);       // jump demands a future replan
    CHECK(out.p_next.c[0] > 2.0);
    CHECK(std::abs(out.p_next.c[1]) < 1e-9);  // on the goal ray
    CHECK(std::abs(out.p_next.c[2] - 1.0) < 1e-9);

    // Post-reset containment: induced relative state inside the level.
    PlannerState pn{3, {out.p_next.c[0], out.p_next.c[1], out.p_next.c[2]}};
    CHECK(policy.value_of(relative_state(s, pn)).value <= alpha + 1e-9);

    // The very next ray sample must be infeasible (level exceeded or off the
    // solved grids), i.e. the pick is the furthest feasible point.
    PlannerState beyond = pn;
    beyond.p[0] += in.candidate_spacing;
    const ValueQuery vb = policy.value_of(relative_state(s, beyond));
    CHECK((vb.clamped || vb.value > alpha - 1e-6));
}

TEST_CASE("navigation: blocked-ray jumps match an exhaustive candidate scan") {
    const TrackingPolicy& policy = srf_test::small_quad10_policy();
    Box ws{3, {-1.0, -3.0, 0.0}, {19.0, 3.0, 2.0}};
    // Wall just ahead of the tracker blocks part of the jump ray.
    Box wall{3, {2.6, -0.7, 0.0}, {3.2, 3.0, 2.0}};
    OccupancyMap map(ws, 0.05, 3.0, {wall});
    REQUIRE(map.sense(PVec{3, {2.0, 0.0, 1.0}}));

    TrackerState s;
    s.x() = 2.0;
    s.z() = 1.0;

    const double dst = map.distance_to_obstacle(PVec{3, {2.0, 0.0, 1.0}});
    const double alpha = policy.steb_level(dst);
    const PlannerExtents psteb = policy.planner_projection(alpha);
    map.augment(psteb);

    SafeReturnInput in;
    in.policy = &policy;
    in.map = &map;
    in.tracker = &s;
    in.planner = PVec{3, {2.0, 0.0, 1.0}};
    in.goal = PVec{3, {18.0, 0.0, 1.0}};
    in.steb_alpha = alpha;
    in.psteb = psteb;
    in.candidate_spacing = 0.05;
    Rng rng(5);
    in.plan_rng = &rng;

    NavFlags flags;
    flags.jump = true;
    PlanPath path;
    auto out = safe_return(in, flags, path);
    CHECK(out.jumped);

    // Independent scan over the published candidate set.
    auto cands = jump_candidates(PVec{3, {2.0, 0.0, 1.0}}, in.planner, in.goal, psteb, 0.05);
    double best_d = std::numeric_limits<double>::infinity();
    PVec best{};
    bool found = false;
    for (const auto& cand : cands) {
        if (map.blocked(cand)) continue;
        PlannerState pc{3, {cand.c[0], cand.c[1], cand.c[2]}};
        auto q = policy.value_of(relative_state(s, pc));
        if (q.outside_domain || q.clamped || q.value > alpha) continue;
        const double d = cand.distance(in.goal);
        if (d < best_d - 1e-15) {
            best_d = d;
            best = cand;
            found = true;
        }
    }
    REQUIRE(found);
    CHECK(out.p_next.c[0] == doctest::Approx(best.c[0]));
    CHECK(out.p_next.c[1] == doctest::Approx(best.c[1]));
    CHECK(out.p_next.c[2] == doctest::Approx(best.c[2]));
    CHECK_FALSE(map.in_augmented_region(out.p_next));
}

TEST_CASE("navigation: pass-through step when no jump and no replan") {
    const TrackingPolicy& policy = srf_test::small_quad10_policy();
    Box ws{3, {-1.0, -3.0, 0.0}, {19.0, 3.0, 2.0}};
    OccupancyMap map(ws, 0.05, 3.0, {});

    TrackerState s;
    s.z() = 1.0;
    PlanPath path;
    path.waypoints = {PVec{3, {1.0, 0.0, 1.0}}};
    NavFlags flags;
    flags.jump = false;
    flags.replan = false;

    SafeReturnInput in;
    in.policy = &policy;
    in.map = &map;
    in.tracker = &s;
    in.planner = PVec{3, {0.0, 0.0, 1.0}};
    in.goal = PVec{3, {18.0, 0.0, 1.0}};
    in.psteb = policy.planner_projection(0.0);
    Rng rng(5);
    in.plan_rng = &rng;

    auto out = safe_return(in, flags, path);
    CHECK_FALSE(out.jumped);
    CHECK_FALSE(out.replanned);
    CHECK(out.p_next.c[0] == doctest::Approx(0.05));
    CHECK_FALSE(flags.jump);
    CHECK_FALSE(flags.replan);
}

TEST_CASE("navigation: fully blocked neighborhoods degrade gracefully") {
    const TrackingPolicy& policy = srf_test::small_quad10_policy();
    Box ws{3, {-1.0, -3.0, 0.0}, {19.0, 3.0, 2.0}};
    // Obstacle swallowing the whole candidate neighborhood.
    Box blob{3, {-1.0, -3.0, 0.0}, {9.0, 3.0, 2.0}};
    OccupancyMap map(ws, 0.05, 3.0, {blob});
    REQUIRE(map.sense(PVec{3, {2.0, 0.0, 1.0}}));
    PlannerExtents psteb = policy.planner_projection(0.0);
    map.augment(psteb);

    TrackerState s;
    s.x() = 2.0;
    s.z() = 1.0;
    NavFlags flags;
    flags.jump = true;
    PlanPath path;

    SafeReturnInput in;
    in.policy = &policy;
    in.map = &map;
    in.tracker = &s;
    in.planner = PVec{3, {2.0, 0.0, 1.0}};
    in.goal = PVec{3, {18.0, 0.0, 1.0}};
    in.steb_alpha = 0.0;
    in.psteb = psteb;
    Rng rng(5);
    in.plan_rng = &rng;

    auto out = safe_return(in, flags, path);
    CHECK(out.jumped);
    CHECK(out.reset_to_self);
    CHECK(out.p_next.c[0] == doctest::Approx(2.0));
    CHECK(out.p_next.c[2] == doctest::Approx(1.0));
}
