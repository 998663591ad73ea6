#include "srf/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "srf/error.hpp"
#include "srf/solver.hpp"

namespace srf {

namespace {
constexpr double kTieThreshold = 1e-9;
}

double PlannerExtents::max_half_width() const {
    double w = 0.0;
    for (int a = 0; a < dim; ++a) w = std::max(w, half_width(a));
    return w;
}

TrackingPolicy::TrackingPolicy(std::vector<PolicyBlock> blocks, ModelParams params, int planner_dim)
    : blocks_(std::move(blocks)), params_(params), planner_dim_(planner_dim) {
    const std::size_t expected = planner_dim == 3 ? 3 : 2;
    if (blocks_.size() != expected) {
        throw Error("tracking policy: expected one solution per tracker control channel");
    }
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
        const int want = b == 2 ? 2 : 4;
        if (blocks_[b].model.dim != want || blocks_[b].field.grid().dims() != want) {
            throw Error("tracking policy: block " + blocks_[b].tag + " has wrong dimension");
        }
    }
}

ValueQuery TrackingPolicy::block_value(int b, std::span<const double> r) const {
    SampleResult s = blocks_[b].field.sample(r);
    return {s.value, s.clamped, s.outside_domain};
}

ValueQuery TrackingPolicy::value_of(const RelativeState& r) const {
    if (r.blocks != block_count()) throw Error("value_of: relative state block count mismatch");
    ValueQuery out;
    out.value = -std::numeric_limits<double>::infinity();
    for (int b = 0; b < block_count(); ++b) {
        ValueQuery q = block_value(b, r.block_span(b));
        out.clamped |= q.clamped;
        if (q.outside_domain) {
            out.outside_domain = true;
            out.value = std::numeric_limits<double>::infinity();
            return out;
        }
        out.value = std::max(out.value, q.value);
    }
    return out;
}

ControlQuery TrackingPolicy::optimal_control(const RelativeState& r) const {
    if (r.blocks != block_count()) throw Error("optimal_control: relative state block count mismatch");
    ControlQuery out;
    double* slots[3] = {&out.u.ux, &out.u.uy, &out.u.uz};
    for (int b = 0; b < block_count(); ++b) {
        const PolicyBlock& blk = blocks_[b];
        GradientResult g = blk.field.gradient(r.block_span(b));
        out.clamped |= g.clamped;
        if (g.outside_domain) {
            out.outside_domain = true;
            break;
        }
        // Only the control-affine term depends on u; its sign picks the endpoint.
        double coeff = 0.0;
        for (int a = 0; a < blk.model.dim; ++a) coeff += g.g[a] * blk.model.control.gain[a];
        const Interval& u = blk.model.control.bound;
        double star;
        if (std::abs(coeff) < kTieThreshold) {
            star = u.mid();
        } else {
            star = coeff > 0.0 ? u.lo : u.hi;
        }
        *slots[b] = star;
    }
    if (planner_dim_ == 2) out.u.uz = params_.g / params_.kT;  // hover
    return out;
}

double TrackingPolicy::steb_level(double dst) const {
    double alpha = std::numeric_limits<double>::infinity();
    for (const auto& blk : blocks_) {
        alpha = std::min(alpha, srf::steb_level(blk.field, dst, level_margin_));
    }
    return alpha;
}

PlannerExtents TrackingPolicy::planner_projection(double level) const {
    PlannerExtents box;
    box.dim = planner_dim_;
    for (int b = 0; b < block_count(); ++b) {
        auto [lo, hi] = pteb_interval(blocks_[b].field, level);
        box.lo[b] = lo;
        box.hi[b] = hi;
    }
    return box;
}

std::uint64_t TrackingPolicy::clamp_events() const {
    std::uint64_t n = 0;
    for (const auto& blk : blocks_) n += blk.field.clamp_events();
    return n;
}

}  // namespace srf
