#pragma once

#include <array>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace srf {

/// Hard cap on grid dimensionality. The decomposed quadrotor subsystems are
/// at most 4-D, and fixed-size index arrays keep the interpolation and sweep
/// kernels allocation-free.
inline constexpr int kMaxDims = 4;

/// Rectilinear N-D grid: per-axis bounds and node counts, row-major flat
/// indexing (last axis fastest) with precomputed strides.
class Grid {
public:
    /// Empty placeholder; any constructed grid has dims() >= 1.
    Grid() : dims_(0), total_(0) {}
    Grid(std::vector<double> lower, std::vector<double> upper, std::vector<std::size_t> counts);

    int dims() const { return dims_; }
    double lower(int axis) const { return lower_[axis]; }
    double upper(int axis) const { return upper_[axis]; }
    std::size_t count(int axis) const { return counts_[axis]; }
    double spacing(int axis) const { return spacing_[axis]; }
    std::size_t stride(int axis) const { return strides_[axis]; }
    std::size_t total_nodes() const { return total_; }

    double coord(int axis, std::size_t i) const { return lower_[axis] + spacing_[axis] * static_cast<double>(i); }

    std::size_t flatten(std::span<const std::size_t> multi) const;
    void unflatten(std::size_t flat, std::span<std::size_t> multi) const;
    void node_point(std::size_t flat, std::span<double> point) const;

    /// Largest per-axis spacing; "one grid cell" in set-distance tolerances.
    double max_spacing() const;
    /// Euclidean diagonal of one cell.
    double cell_diagonal() const;

    bool operator==(const Grid& other) const;
    bool operator!=(const Grid& other) const { return !(*this == other); }

private:
    int dims_;
    std::size_t total_;
    std::array<double, kMaxDims> lower_{};
    std::array<double, kMaxDims> upper_{};
    std::array<double, kMaxDims> spacing_{};
    std::array<std::size_t, kMaxDims> counts_{};
    std::array<std::size_t, kMaxDims> strides_{};
};

/// Outcome of one off-grid query.
struct SampleResult {
    double value = 0.0;
    bool clamped = false;         ///< point was outside bounds and clamped
    bool outside_domain = false;  ///< stencil touched a non-finite (diverged) node
};

struct GradientResult {
    std::array<double, kMaxDims> g{};
    bool clamped = false;
    bool outside_domain = false;
};

/// Scalar field over a Grid. Values are stored row-major. All read queries
/// are safe to call concurrently; the out-of-bounds counter is atomic.
class ScalarField {
public:
    ScalarField() = default;  ///< empty placeholder
    explicit ScalarField(Grid grid, double fill = 0.0);
    ScalarField(Grid grid, std::vector<double> values);

    ScalarField(const ScalarField& other);
    ScalarField& operator=(const ScalarField& other);
    ScalarField(ScalarField&& other) noexcept;
    ScalarField& operator=(ScalarField&& other) noexcept;

    const Grid& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }

    /// Multilinear interpolation. Exact (bitwise) at node-aligned points.
    /// Out-of-bounds points are clamped to the boundary and counted.
    SampleResult sample(std::span<const double> point) const;
    double interpolate(std::span<const double> point) const { return sample(point).value; }

    /// Central differences of the interpolated field, one-sided within one
    /// spacing of the boundary.
    GradientResult gradient(std::span<const double> point) const;

    /// First-order one-sided differences D-, D+ per axis at a node. Boundary
    /// nodes use a linear ghost extension (ghost = 2*edge - inner).
    void upwind(std::size_t node, std::span<double> dminus, std::span<double> dplus) const;

    /// Max Euclidean node norm over {V <= level}; throws Error("level below
    /// minimum") when the sublevel set is empty, returns 0 when it does not
    /// extend past one cell from the origin.
    double sublevel_radius(double level) const;

    std::uint64_t clamp_events() const { return clamp_events_.load(std::memory_order_relaxed); }
    void reset_clamp_events() { clamp_events_.store(0, std::memory_order_relaxed); }

    double min_value() const;
    double max_value() const;

private:
    Grid grid_;
    std::vector<double> values_;
    mutable std::atomic<std::uint64_t> clamp_events_{0};
};

/// [min, max] node coordinate along `axis` over {V <= level}; throws
/// Error("level below minimum") when empty. Non-finite nodes never qualify.
std::pair<double, double> level_set_extent(const ScalarField& field, double level, int axis);

}  // namespace srf
