#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "srf/dynamics.hpp"
#include "srf/grid.hpp"

namespace srf {

/// One solved subsystem bound to its dynamics. `field` is the converged
/// decay-rate value function; `c` is the stage-1 shift it was solved with.
struct PolicyBlock {
    std::string tag;
    SubsystemModel model;
    ScalarField field;
    double gamma = 0.0;
    double c = 0.0;
};

/// Planner-space axis-aligned extents (error-space intervals per axis).
struct PlannerExtents {
    int dim = 3;
    std::array<double, 3> lo{};
    std::array<double, 3> hi{};

    double half_width(int axis) const { return 0.5 * (hi[axis] - lo[axis]); }
    double max_half_width() const;
};

struct ValueQuery {
    double value = 0.0;
    bool clamped = false;
    bool outside_domain = false;
};

struct ControlQuery {
    TrackerControl u;
    bool clamped = false;
    bool outside_domain = false;
};

/// Read-only bundle of per-subsystem solutions composing the online tracking
/// controller. Value composition across blocks is by max: a relative state is
/// inside a sublevel set iff every block is.
class TrackingPolicy {
public:
    TrackingPolicy(std::vector<PolicyBlock> blocks, ModelParams params, int planner_dim);

    int planner_dim() const { return planner_dim_; }
    int block_count() const { return static_cast<int>(blocks_.size()); }
    const PolicyBlock& block(int i) const { return blocks_[i]; }
    const ModelParams& params() const { return params_; }

    ValueQuery block_value(int b, std::span<const double> r) const;

    /// max over block values; +inf with outside_domain when any block stencil
    /// touches a diverged node (unrecoverable relative state).
    ValueQuery value_of(const RelativeState& r) const;

    /// Bang-bang control per block from the gradient sign; near-zero
    /// projections (|.| < 1e-9) resolve to the interval midpoint. For 2-D
    /// planners the vertical channel holds hover thrust.
    ControlQuery optimal_control(const RelativeState& r) const;

    /// min over blocks of the per-solution safe-resetting level for obstacle
    /// distance dst.
    double steb_level(double dst) const;

    /// Planner-space projection box of {V <= level} (per-axis error
    /// intervals: X block -> x, Y -> y, Z -> z).
    PlannerExtents planner_projection(double level) const;

    /// Residual margin subtracted inside steb_level.
    void set_level_margin(double m) { level_margin_ = m; }
    double level_margin() const { return level_margin_; }

    std::uint64_t clamp_events() const;

private:
    std::vector<PolicyBlock> blocks_;
    ModelParams params_;
    int planner_dim_;
    double level_margin_ = 1e-3;
};

}  // namespace srf
