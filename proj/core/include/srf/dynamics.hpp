#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "srf/grid.hpp"

namespace srf {

inline constexpr double kPi = 3.14159265358979323846;

/// Near-hover quadrotor parameters.
struct ModelParams {
    double d0 = 10.0;
    double d1 = 8.0;
    double n0 = 10.0;
    double kT = 0.91;
    double g = 9.81;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double mid() const { return 0.5 * (lo + hi); }
    double abs_max() const { return std::max(lo < 0 ? -lo : lo, hi < 0 ? -hi : hi); }
    bool contains(double v) const { return v >= lo && v <= hi; }
};

/// Tracker control limits, planner speed limit and modeled disturbance bound.
struct ControlBounds {
    Interval ux{-kPi / 9.0, kPi / 9.0};
    Interval uy{-kPi / 9.0, kPi / 9.0};
    Interval uz{0.0, 1.5 * 9.81};
    double planner_vmax = 0.5;                    ///< per planner axis, m/s
    std::array<double, 3> disturbance{0.0, 0.0, 0.0};  ///< per-axis |d| bound, m/s
};

/// One scalar input channel of a control-affine flow: contributes gain*input,
/// with the input confined to `bound`.
struct InputChannel {
    std::array<double, kMaxDims> gain{};
    Interval bound{0.0, 0.0};
};

/// Dynamics descriptor for one decomposed relative subsystem:
/// rdot = drift(r) + control.gain*u + planner.gain*b + disturbance.gain*d.
struct SubsystemModel {
    std::string name;
    int dim = 0;
    std::function<void(std::span<const double>, std::span<double>)> drift;
    InputChannel control;
    InputChannel planner;
    InputChannel disturbance;

    void flow(std::span<const double> r, double u, double b, double d,
              std::span<double> out) const;
};

/// X/Y relative block (e, v, theta, omega). Throws on |theta| >= pi/2.
SubsystemModel lateral_subsystem(const ModelParams& params, Interval u_bound,
                                 double planner_vmax, double dist_bound);
/// Z relative block (e, v).
SubsystemModel vertical_subsystem(const ModelParams& params, Interval u_bound,
                                  double planner_vmax, double dist_bound);

// ---------------------------------------------------------------------------
// Full-order tracker and planner states.

/// 10-state near-hover quadrotor: x y z vx vy vz thx thy wx wy. The 8-state
/// variant is this state with the vertical pair pinned at hover.
struct TrackerState {
    std::array<double, 10> v{};

    double& x() { return v[0]; }
    double& y() { return v[1]; }
    double& z() { return v[2]; }
    double& vx() { return v[3]; }
    double& vy() { return v[4]; }
    double& vz() { return v[5]; }
    double& thx() { return v[6]; }
    double& thy() { return v[7]; }
    double& wx() { return v[8]; }
    double& wy() { return v[9]; }
    double x() const { return v[0]; }
    double y() const { return v[1]; }
    double z() const { return v[2]; }
    double vx() const { return v[3]; }
    double vy() const { return v[4]; }
    double vz() const { return v[5]; }
    double thx() const { return v[6]; }
    double thy() const { return v[7]; }
    double wx() const { return v[8]; }
    double wy() const { return v[9]; }

    bool operator==(const TrackerState&) const = default;
};

struct TrackerControl {
    double ux = 0.0;
    double uy = 0.0;
    double uz = 0.0;
};

/// Planner position, dimension 2 or 3.
struct PlannerState {
    int dim = 3;
    std::array<double, 3> p{};

    bool operator==(const PlannerState&) const = default;
};

/// One fixed-step RK4 step of the tracker ODE. `d` is the modeled
/// disturbance, entering the position rates.
TrackerState step_tracker(const TrackerState& s, const TrackerControl& u,
                          const std::array<double, 3>& d, double dt,
                          const ModelParams& params);

/// Exact step of the velocity-integrator planner. Throws when |b| exceeds
/// vmax on any axis.
PlannerState step_planner(const PlannerState& p, std::span<const double> b, double vmax, double dt);

// ---------------------------------------------------------------------------
// Relative state and subsystem decomposition.

/// Relative state split into subsystem blocks: X=(x_r,vx,thx,wx),
/// Y=(y_r,vy,thy,wy), Z=(z_r,vz). Z is absent when the planner is 2-D.
struct RelativeState {
    int blocks = 3;  // 3 for 10D-3D, 2 for 8D-2D
    std::array<std::array<double, 4>, 3> block{};

    std::span<const double> block_span(int b) const {
        return std::span<const double>(block[b].data(), b == 2 ? 2 : 4);
    }
};

/// r = s - Q p with Q injecting planner positions into tracker position
/// slots; the remaining states pass through unchanged.
RelativeState relative_state(const TrackerState& s, const PlannerState& p);

/// Splits a full relative vector (tracker ordering) into subsystem blocks.
RelativeState decompose(std::span<const double> full, int planner_dim);

/// Inverse of decompose up to the fixed permutation; absent blocks map to 0.
std::array<double, 10> compose(const RelativeState& r);

/// s = r + Q p, the reconstruction identity.
TrackerState reconstruct_tracker(const RelativeState& r, const PlannerState& p);

// ---------------------------------------------------------------------------
// System presets.

struct SubsystemSetup {
    std::string tag;  // "X", "Y", "Z"
    SubsystemModel model;
    Grid grid;
};

/// A named tracker/planner pairing with its decomposed subsystem blocks.
struct SystemSetup {
    std::string name;
    int planner_dim = 3;
    ModelParams params;
    ControlBounds bounds;
    std::vector<SubsystemSetup> blocks;
};

Grid default_lateral_grid();
Grid default_vertical_grid();

/// `name` is "quad10_planner3" or "quad8_planner2". Grids start at the
/// defaults; callers may swap them before solving.
SystemSetup make_system(const std::string& name, const ModelParams& params = {},
                        const ControlBounds& bounds = {});

}  // namespace srf
