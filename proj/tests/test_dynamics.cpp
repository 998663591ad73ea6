#include <doctest.h>

#include <cmath>

#include "srf/dynamics.hpp"
#include "srf/error.hpp"
#include "srf/rng.hpp"

using namespace srf;

namespace {
const ModelParams kParams{};
}

TEST_CASE("dynamics: relative flow matches hand-computed values") {
    ControlBounds bounds;
    auto zblock = vertical_subsystem(kParams, bounds.uz, bounds.planner_vmax, 0.0);
    auto xblock = lateral_subsystem(kParams, bounds.ux, bounds.planner_vmax, 0.0);

    // Hover equilibrium of the vertical block.
    double rz[2] = {0.0, 0.0};
    double out[4];
    zblock.flow(std::span<const double>(rz, 2), kParams.g / kParams.kT, 0.0, 0.0,
                std::span<double>(out, 2));
    CHECK(out[0] == doctest::Approx(0.0));
    CHECK(out[1] == doctest::Approx(0.0));

    // Full pitch command from the origin.
    double rx[4] = {0.0, 0.0, 0.0, 0.0};
    xblock.flow(std::span<const double>(rx, 4), kPi / 9.0, 0.0, 0.0, std::span<double>(out, 4));
    CHECK(out[0] == doctest::Approx(0.0));
    CHECK(out[1] == doctest::Approx(0.0));
    CHECK(out[2] == doctest::Approx(0.0));
    CHECK(out[3] == doctest::Approx(3.4907).epsilon(1e-4));

    // Vertical block with a fleeing planner and no thrust.
    double rz2[2] = {1.0, 0.2};
    zblock.flow(std::span<const double>(rz2, 2), 0.0, 0.5, 0.0, std::span<double>(out, 2));
    CHECK(out[0] == doctest::Approx(-0.3));
    CHECK(out[1] == doctest::Approx(-9.81));
}

TEST_CASE("dynamics: tan singularity guard") {
    ControlBounds bounds;
    auto xblock = lateral_subsystem(kParams, bounds.ux, bounds.planner_vmax, 0.0);
    double r[4] = {0.0, 0.0, kPi / 2.0, 0.0};
    double out[4];
    CHECK_THROWS_AS(xblock.flow(std::span<const double>(r, 4), 0.0, 0.0, 0.0,
                                std::span<double>(out, 4)),
                    srf::Error);
}

TEST_CASE("dynamics: decompose and compose invert each other") {
    std::array<double, 10> full{};
    for (int i = 0; i < 10; ++i) full[i] = 1.0 + i;

    RelativeState r = decompose(full, 3);
    CHECK(r.blocks == 3);
    CHECK(r.block[0] == std::array<double, 4>{1, 4, 7, 9});
    CHECK(r.block[1] == std::array<double, 4>{2, 5, 8, 10});
    CHECK(r.block[2][0] == 3);
    CHECK(r.block[2][1] == 6);
    CHECK(compose(r) == full);

    RelativeState r8 = decompose(full, 2);
    CHECK(r8.blocks == 2);

    std::array<double, 10> zeros{};
    RelativeState rz = decompose(zeros, 3);
    for (int b = 0; b < 3; ++b) {
        for (double v : rz.block[b]) CHECK(v == 0.0);
    }
}

TEST_CASE("dynamics: hover is an RK4 fixed point") {
    TrackerState s;
    s.z() = 1.0;
    TrackerControl hover{0.0, 0.0, kParams.g / kParams.kT};
    TrackerState next = step_tracker(s, hover, {0, 0, 0}, 0.01, kParams);
    for (int i = 0; i < 10; ++i) CHECK(std::abs(next.v[i] - s.v[i]) < 1e-12);
}

TEST_CASE("dynamics: constant-thrust velocity gain matches closed form") {
    TrackerState s;
    TrackerControl u{0.0, 0.0, 1.5 * kParams.g};
    TrackerState next = step_tracker(s, u, {0, 0, 0}, 0.1, kParams);
    const double expected = (kParams.kT * 1.5 * kParams.g - kParams.g) * 0.1;
    CHECK(next.vz() == doctest::Approx(expected).epsilon(1e-10));
    CHECK(expected == doctest::Approx(0.3582).epsilon(1e-3));
}

TEST_CASE("dynamics: RK4 halving shows fifth-order local error") {
    TrackerState s;
    s.vx() = 0.7;
    s.thx() = 0.2;
    s.wx() = -0.4;
    s.thy() = -0.15;
    TrackerControl u{0.1, -0.2, 12.0};

    auto richardson = [&](double dt) {
        TrackerState full = step_tracker(s, u, {0, 0, 0}, dt, kParams);
        TrackerState half = step_tracker(step_tracker(s, u, {0, 0, 0}, dt / 2, kParams), u,
                                         {0, 0, 0}, dt / 2, kParams);
        double err = 0.0;
        for (int i = 0; i < 10; ++i) err = std::max(err, std::abs(full.v[i] - half.v[i]));
        return err;
    };
    const double e1 = richardson(0.1);
    const double e2 = richardson(0.05);
    CHECK(e2 > 0.0);
    CHECK(e1 / e2 > 8.0);  // fifth-order local truncation gives ~16x
}

TEST_CASE("dynamics: planner steps exactly and validates bounds") {
    PlannerState p{2, {0.0, 0.0, 0.0}};
    const double b1[] = {0.5, 0.0};
    PlannerState q = step_planner(p, std::span<const double>(b1, 2), 0.5, 0.1);
    CHECK(q.p[0] == doctest::Approx(0.05));
    CHECK(q.p[1] == doctest::Approx(0.0));

    const double b0[] = {0.0, 0.0};
    CHECK(step_planner(p, std::span<const double>(b0, 2), 0.5, 1.0) == p);

    PlannerState p3{3, {1.0, 2.0, 3.0}};
    const double b3[] = {-0.5, 0.5, 0.5};
    PlannerState q3 = step_planner(p3, std::span<const double>(b3, 3), 0.5, 1.0);
    CHECK(q3.p[0] == doctest::Approx(0.5));
    CHECK(q3.p[1] == doctest::Approx(2.5));
    CHECK(q3.p[2] == doctest::Approx(3.5));

    const double bad[] = {0.6, 0.0, 0.0};
    CHECK_THROWS_AS(step_planner(p3, std::span<const double>(bad, 3), 0.5, 1.0), srf::Error);
}

TEST_CASE("dynamics: relative state is tracker minus injected planner") {
    TrackerState s;
    s.x() = 1.0;
    s.y() = 2.0;
    s.z() = 3.0;
    PlannerState p{3, {1.0, 2.0, 3.0}};
    RelativeState r = relative_state(s, p);
    for (int b = 0; b < 3; ++b) {
        for (double v : r.block[b]) CHECK(v == 0.0);
    }

    PlannerState origin{3, {0.0, 0.0, 0.0}};
    RelativeState rs = relative_state(s, origin);
    CHECK(compose(rs) == s.v);

    TrackerState s2;
    s2.x() = 1.0;
    PlannerState p2{3, {0.4, 0.0, 0.0}};
    CHECK(relative_state(s2, p2).block[0][0] == doctest::Approx(0.6));

    // Reconstruction identity.
    srf::Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        TrackerState t;
        for (int i = 0; i < 10; ++i) t.v[i] = rng.uniform(-2.0, 2.0);
        PlannerState pp{3, {rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)}};
        TrackerState back = reconstruct_tracker(relative_state(t, pp), pp);
        for (int i = 0; i < 10; ++i) CHECK(back.v[i] == doctest::Approx(t.v[i]).epsilon(1e-12));
    }
}

TEST_CASE("dynamics: subsystem blocks evolve independently") {
    srf::Rng rng(9);
    TrackerState s;
    for (int i = 0; i < 10; ++i) s.v[i] = rng.uniform(-0.3, 0.3);
    TrackerControl u{0.1, -0.1, 10.0};

    TrackerState perturbed = s;
    perturbed.y() += 0.5;
    perturbed.vy() -= 0.3;
    perturbed.thy() += 0.1;
    perturbed.wy() += 0.2;
    perturbed.z() += 1.0;

    TrackerState a = step_tracker(s, u, {0, 0, 0}, 0.02, kParams);
    TrackerState b = step_tracker(perturbed, u, {0, 0, 0}, 0.02, kParams);
    // X-block rows unaffected by Y/Z perturbations.
    CHECK(a.x() == b.x());
    CHECK(a.vx() == b.vx());
    CHECK(a.thx() == b.thx());
    CHECK(a.wx() == b.wx());
}

TEST_CASE("dynamics: attitude submatrix is Hurwitz for the paper gains") {
    // Eigenvalues of [[-d1, 1], [-d0, 0]]: roots of s^2 + d1 s + d0.
    const double disc = kParams.d1 * kParams.d1 - 4.0 * kParams.d0;
    REQUIRE(disc > 0.0);
    const double l1 = 0.5 * (-kParams.d1 + std::sqrt(disc));
    const double l2 = 0.5 * (-kParams.d1 - std::sqrt(disc));
    CHECK(l1 < 0.0);
    CHECK(l2 < 0.0);
}
