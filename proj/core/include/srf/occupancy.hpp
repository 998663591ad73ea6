#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "srf/tracking.hpp"

namespace srf {

/// Planner-space point, dimension 2 or 3.
struct PVec {
    int dim = 3;
    std::array<double, 3> c{};

    double& operator[](int a) { return c[a]; }
    double operator[](int a) const { return c[a]; }

    double distance(const PVec& o) const;
    bool operator==(const PVec&) const = default;
};

/// Axis-aligned box in planner space.
struct Box {
    int dim = 3;
    std::array<double, 3> lo{};
    std::array<double, 3> hi{};

    bool valid() const;
    bool contains(const PVec& p) const;  // closed
    PVec nearest_point(const PVec& p) const;
    double distance(const PVec& p) const;  // 0 inside
};

struct Obstacle {
    Box box;
    bool sensed = false;
};

enum class Cell : std::uint8_t { Free = 0, Augmented = 1, SensedObstacle = 2 };

/// Planner-space obstacle raster: sensed boxes plus their inflation by the
/// reflected safe-resetting projection, rasterized conservatively (any
/// overlap marks the cell). Queries outside the workspace read as blocked.
class OccupancyMap {
public:
    OccupancyMap(Box workspace, double resolution, double sensing_radius,
                 std::vector<Box> obstacle_boxes);

    int dim() const { return workspace_.dim; }
    double resolution() const { return resolution_; }
    double sensing_radius() const { return sensing_radius_; }
    const Box& workspace() const { return workspace_; }
    const std::vector<Obstacle>& obstacles() const { return obstacles_; }

    /// Marks obstacles intersecting the closed ball B(pos, sensing_radius) as
    /// sensed; returns whether anything newly transitioned.
    bool sense(const PVec& pos);

    /// Euclidean distance to the nearest sensed obstacle boundary;
    /// sensing_radius when nothing is sensed; 0 (with *inside set) inside.
    double distance_to_obstacle(const PVec& pos, bool* inside = nullptr) const;

    /// Any sensed obstacle within `radius` of pos (closed).
    bool obstacle_within(const PVec& pos, double radius) const;

    std::optional<PVec> nearest_sensed_boundary(const PVec& pos) const;

    /// Rebuilds the augmented layer: sensed boxes inflated per axis by
    /// [pad_lo, pad_hi] (already-reflected error extents). Pads are snapped up
    /// to whole cells so repeated calls with near-identical extents are
    /// cached.
    void augment(const PlannerExtents& error_box);

    bool blocked(const PVec& p) const;        ///< sensed or augmented cell, or outside workspace
    bool in_augmented_region(const PVec& p) const;
    bool segment_free(const PVec& a, const PVec& b) const;

    /// True-geometry collision test against every obstacle, sensed or not.
    bool inside_true_obstacle(const PVec& p) const;

    Cell cell_state(const PVec& p) const;
    std::size_t cell_count() const { return cells_.size(); }

    /// Debug dump; one character per cell ('.' free, '+' augmented,
    /// '#' sensed). For 3-D maps dumps the given z slice (default: middle).
    void dump_ascii(std::ostream& out, int slice = -1) const;

private:
    std::size_t cell_index(const std::array<int, 3>& idx) const;
    bool point_cell(const PVec& p, std::array<int, 3>& idx) const;
    void mark_box(const Box& b, Cell state);

    Box workspace_;
    double resolution_;
    double sensing_radius_;
    std::vector<Obstacle> obstacles_;
    std::array<int, 3> counts_{1, 1, 1};
    std::vector<std::uint8_t> cells_;
    std::uint64_t sensed_version_ = 0;
    std::uint64_t augmented_version_ = ~std::uint64_t{0};
    std::array<double, 3> aug_pad_lo_{};
    std::array<double, 3> aug_pad_hi_{};
};

}  // namespace srf
