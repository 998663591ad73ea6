#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>

#include "srf/error.hpp"
#include "srf/grid.hpp"
#include "srf/rng.hpp"

using srf::Grid;
using srf::ScalarField;

namespace {

ScalarField sampled_field(Grid grid, double (*f)(const double*)) {
    ScalarField field(grid);
    std::array<double, srf::kMaxDims> pt{};
    for (std::size_t i = 0; i < grid.total_nodes(); ++i) {
        field.grid().node_point(i, std::span<double>(pt.data(), grid.dims()));
        field[i] = f(pt.data());
    }
    return field;
}

}  // namespace

TEST_CASE("grid: construction invariants") {
    Grid g({0.0, -1.0}, {1.0, 1.0}, {11, 21});
    CHECK(g.dims() == 2);
    CHECK(g.total_nodes() == 231);
    CHECK(g.spacing(0) == doctest::Approx(0.1));
    CHECK(g.spacing(1) == doctest::Approx(0.1));
    CHECK(g.stride(0) == 21);
    CHECK(g.stride(1) == 1);

    std::array<std::size_t, 2> mi{3, 7};
    const std::size_t flat = g.flatten(mi);
    std::array<std::size_t, 2> back{};
    g.unflatten(flat, back);
    CHECK(back == mi);

    CHECK_THROWS_AS(Grid({0.0}, {0.0}, {5}), srf::Error);     // empty extent
    CHECK_THROWS_AS(Grid({0.0}, {1.0}, {2}), srf::Error);     // too few nodes
    CHECK_THROWS_AS(Grid({0.0, 0.0}, {1.0}, {5}), srf::Error);  // ragged spec
}

TEST_CASE("grid: interpolation reproduces constants and linear fields") {
    Grid g1({0.0}, {1.0}, {11});
    ScalarField constant(g1, 4.25);
    const double pt1[] = {0.37};
    CHECK(constant.interpolate(std::span<const double>(pt1, 1)) == doctest::Approx(4.25));

    ScalarField linear = sampled_field(g1, [](const double* x) { return 3.0 * x[0]; });
    const double quarter[] = {0.25};
    CHECK(linear.interpolate(std::span<const double>(quarter, 1)) == doctest::Approx(0.75));
}

TEST_CASE("grid: bilinear interpolation error bound on x*y") {
    Grid g({0.0, 0.0}, {1.0, 1.0}, {11, 11});
    ScalarField f = sampled_field(g, [](const double* x) { return x[0] * x[1]; });
    const double pt[] = {0.35, 0.7};
    const double got = f.interpolate(std::span<const double>(pt, 2));
    CHECK(std::abs(got - 0.35 * 0.7) < 1e-2);  // direct-evaluation oracle, O(h^2) bound
}

TEST_CASE("grid: node-aligned queries are bitwise exact") {
    Grid g({-1.0, 0.0, -2.0}, {1.0, 3.0, 2.0}, {5, 7, 9});
    srf::Rng rng(42);
    ScalarField f(g);
    for (std::size_t i = 0; i < g.total_nodes(); ++i) f[i] = rng.uniform(-10.0, 10.0);

    std::array<std::size_t, 3> mi{};
    std::array<double, 3> pt{};
    for (std::size_t i = 0; i < g.total_nodes(); i += 7) {
        g.unflatten(i, mi);
        for (int a = 0; a < 3; ++a) pt[a] = g.coord(a, mi[a]);
        const double v = f.interpolate(std::span<const double>(pt.data(), 3));
        CHECK(std::memcmp(&v, &f[i], sizeof(double)) == 0);
    }
}

TEST_CASE("grid: interpolation stays inside the corner envelope") {
    Grid g({0.0, 0.0}, {1.0, 1.0}, {6, 6});
    srf::Rng rng(7);
    ScalarField f(g);
    for (std::size_t i = 0; i < g.total_nodes(); ++i) f[i] = rng.uniform(-5.0, 5.0);

    for (int trial = 0; trial < 2000; ++trial) {
        const double pt[] = {rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)};
        const double v = f.interpolate(std::span<const double>(pt, 2));
        // Envelope of the whole field bounds every cell envelope.
        CHECK(v >= f.min_value() - 1e-12);
        CHECK(v <= f.max_value() + 1e-12);
    }
}

TEST_CASE("grid: out-of-bounds queries clamp and are counted") {
    Grid g({0.0}, {1.0}, {11});
    ScalarField f = sampled_field(g, [](const double* x) { return x[0]; });
    CHECK(f.clamp_events() == 0);
    const double outside[] = {1.75};
    auto s = f.sample(std::span<const double>(outside, 1));
    CHECK(s.clamped);
    CHECK(s.value == doctest::Approx(1.0));
    CHECK(f.clamp_events() == 1);

    const double wrong_dim[] = {0.5, 0.5};
    CHECK_THROWS_AS(f.interpolate(std::span<const double>(wrong_dim, 2)), srf::Error);
}

TEST_CASE("grid: non-finite stencil corners flag outside_domain") {
    Grid g({0.0}, {1.0}, {11});
    ScalarField f = sampled_field(g, [](const double* x) { return x[0]; });
    f[5] = std::numeric_limits<double>::infinity();

    const double near[] = {0.47};
    auto s = f.sample(std::span<const double>(near, 1));
    CHECK(s.outside_domain);
    CHECK(std::isinf(s.value));

    // Node-aligned query on a finite node next to the sentinel is untouched.
    const double at4[] = {0.4};
    auto ok = f.sample(std::span<const double>(at4, 1));
    CHECK_FALSE(ok.outside_domain);
    CHECK(ok.value == doctest::Approx(0.4));
}

TEST_CASE("grid: gradients of linear, constant and quadratic fields") {
    Grid g1({0.0}, {1.0}, {11});
    ScalarField linear = sampled_field(g1, [](const double* x) { return 3.0 * x[0]; });
    const double mid[] = {0.5};
    CHECK(linear.gradient(std::span<const double>(mid, 1)).g[0] == doctest::Approx(3.0));

    ScalarField constant(g1, 2.0);
    CHECK(constant.gradient(std::span<const double>(mid, 1)).g[0] == doctest::Approx(0.0));

    Grid g2({-1.0, -1.0}, {1.0, 1.0}, {201, 201});
    ScalarField quad = sampled_field(g2, [](const double* x) { return x[0] * x[0] + x[1] * x[1]; });
    const double pt[] = {0.5, -0.25};
    auto grad = quad.gradient(std::span<const double>(pt, 2));
    CHECK(std::abs(grad.g[0] - 1.0) < 1e-2);
    CHECK(std::abs(grad.g[1] - (-0.5)) < 1e-2);
}

TEST_CASE("grid: gradient is consistent with finite differences of interpolate") {
    Grid g({-1.0, -1.0}, {1.0, 1.0}, {41, 41});
    ScalarField f = sampled_field(g, [](const double* x) { return std::sin(2 * x[0]) + x[1] * x[1]; });
    srf::Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const double pt[] = {rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8)};
        auto grad = f.gradient(std::span<const double>(pt, 2));
        for (int a = 0; a < 2; ++a) {
            const double h = g.spacing(a);
            double lo[] = {pt[0], pt[1]};
            double hi[] = {pt[0], pt[1]};
            lo[a] -= h;
            hi[a] += h;
            const double fd = (f.interpolate(std::span<const double>(hi, 2)) -
                               f.interpolate(std::span<const double>(lo, 2))) /
                              (2.0 * h);
            CHECK(grad.g[a] == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("grid: upwind differences and boundary ghosts") {
    Grid g({0.0}, {2.0}, {3});  // spacing 1
    ScalarField f(g, std::vector<double>{0.0, 1.0, 2.0});
    double dm[1], dp[1];
    f.upwind(1, dm, dp);
    CHECK(dm[0] == doctest::Approx(1.0));
    CHECK(dp[0] == doctest::Approx(1.0));

    ScalarField f2(g, std::vector<double>{0.0, 1.0, 4.0});
    f2.upwind(1, dm, dp);
    CHECK(dm[0] == doctest::Approx(1.0));
    CHECK(dp[0] == doctest::Approx(3.0));

    // Right boundary: ghost = 2*4 - 1 = 7, so D+ = 3 there.
    f2.upwind(2, dm, dp);
    CHECK(dm[0] == doctest::Approx(3.0));
    CHECK(dp[0] == doctest::Approx(3.0));

    // Left boundary: ghost = 2*0 - 1 = -1.
    f2.upwind(0, dm, dp);
    CHECK(dm[0] == doctest::Approx(1.0));
    CHECK(dp[0] == doctest::Approx(1.0));
}

TEST_CASE("grid: sublevel radius on a norm field") {
    Grid g({-1.0, -1.0}, {1.0, 1.0}, {41, 41});
    ScalarField f = sampled_field(g, [](const double* x) {
        return std::sqrt(x[0] * x[0] + x[1] * x[1]);
    });
    const double r = f.sublevel_radius(0.5);
    CHECK(std::abs(r - 0.5) <= g.max_spacing());

    CHECK_THROWS_WITH_AS(f.sublevel_radius(-0.1), doctest::Contains("level below minimum"),
                         srf::Error);

    // Monotone nondecreasing in the level.
    double prev = 0.0;
    for (double level : {0.1, 0.3, 0.5, 0.8, 1.2}) {
        const double radius = f.sublevel_radius(level);
        CHECK(radius >= prev - 1e-12);
        prev = radius;
    }
}

TEST_CASE("grid: level-set extents per axis") {
    Grid g({-1.0, -1.0}, {1.0, 1.0}, {21, 21});
    ScalarField f = sampled_field(g, [](const double* x) {
        return std::max(std::abs(x[0]) - 0.5, std::abs(x[1]) - 0.3);
    });
    auto [xlo, xhi] = srf::level_set_extent(f, 0.0, 0);
    auto [ylo, yhi] = srf::level_set_extent(f, 0.0, 1);
    CHECK(xlo == doctest::Approx(-0.5).epsilon(0.11));
    CHECK(xhi == doctest::Approx(0.5).epsilon(0.11));
    CHECK(ylo == doctest::Approx(-0.3).epsilon(0.11));
    CHECK(yhi == doctest::Approx(0.3).epsilon(0.11));
    CHECK_THROWS_AS(srf::level_set_extent(f, -2.0, 0), srf::Error);
}
