#include "srf/occupancy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "srf/error.hpp"

namespace srf {

double PVec::distance(const PVec& o) const {
    double s = 0.0;
    for (int a = 0; a < dim; ++a) {
        const double d = c[a] - o.c[a];
        s += d * d;
    }
    return std::sqrt(s);
}

bool Box::valid() const {
    if (dim < 2 || dim > 3) return false;
    for (int a = 0; a < dim; ++a)
        if (!(hi[a] > lo[a])) return false;
    return true;
}

bool Box::contains(const PVec& p) const {
    for (int a = 0; a < dim; ++a)
        if (p.c[a] < lo[a] || p.c[a] > hi[a]) return false;
    return true;
}

PVec Box::nearest_point(const PVec& p) const {
    PVec q = p;
    for (int a = 0; a < dim; ++a) q.c[a] = std::clamp(p.c[a], lo[a], hi[a]);
    return q;
}

double Box::distance(const PVec& p) const { return p.distance(nearest_point(p)); }

OccupancyMap::OccupancyMap(Box workspace, double resolution, double sensing_radius,
                           std::vector<Box> obstacle_boxes)
    : workspace_(workspace), resolution_(resolution), sensing_radius_(sensing_radius) {
    if (!workspace.valid()) throw Error("occupancy map: invalid workspace box");
    if (!(resolution > 0.0)) throw Error("occupancy map: resolution must be positive");
    std::size_t total = 1;
    for (int a = 0; a < workspace_.dim; ++a) {
        counts_[a] = std::max(1, static_cast<int>(
                                     std::ceil((workspace_.hi[a] - workspace_.lo[a]) / resolution_ -
                                               1e-12)));
        total *= static_cast<std::size_t>(counts_[a]);
    }
    cells_.assign(total, static_cast<std::uint8_t>(Cell::Free));
    obstacles_.reserve(obstacle_boxes.size());
    for (auto& b : obstacle_boxes) {
        if (!b.valid()) throw Error("occupancy map: obstacle with empty extents");
        if (b.dim != workspace_.dim) throw Error("occupancy map: obstacle dimension mismatch");
        obstacles_.push_back({b, false});
    }
}

std::size_t OccupancyMap::cell_index(const std::array<int, 3>& idx) const {
    std::size_t flat = 0;
    for (int a = 0; a < workspace_.dim; ++a) {
        flat = flat * static_cast<std::size_t>(counts_[a]) + static_cast<std::size_t>(idx[a]);
    }
    return flat;
}

bool OccupancyMap::point_cell(const PVec& p, std::array<int, 3>& idx) const {
    for (int a = 0; a < workspace_.dim; ++a) {
        if (p.c[a] < workspace_.lo[a] || p.c[a] > workspace_.hi[a]) return false;
        int i = static_cast<int>((p.c[a] - workspace_.lo[a]) / resolution_);
        idx[a] = std::clamp(i, 0, counts_[a] - 1);
    }
    return true;
}

void OccupancyMap::mark_box(const Box& b, Cell state) {
    std::array<int, 3> lo{}, hi{};
    for (int a = 0; a < workspace_.dim; ++a) {
        const double rel_lo = (b.lo[a] - workspace_.lo[a]) / resolution_;
        const double rel_hi = (b.hi[a] - workspace_.lo[a]) / resolution_;
        lo[a] = std::max(0, static_cast<int>(std::floor(rel_lo)));
        hi[a] = std::min(counts_[a] - 1, static_cast<int>(std::floor(rel_hi)));
        if (rel_hi < 0.0 || lo[a] > hi[a]) return;  // box outside the raster
    }
    std::array<int, 3> idx = lo;
    while (true) {
        std::uint8_t& cell = cells_[cell_index(idx)];
        cell = std::max(cell, static_cast<std::uint8_t>(state));
        int a = workspace_.dim - 1;
        for (; a >= 0; --a) {
            if (++idx[a] <= hi[a]) break;
            idx[a] = lo[a];
        }
        if (a < 0) break;
    }
}

bool OccupancyMap::sense(const PVec& pos) {
    bool any_new = false;
    for (auto& ob : obstacles_) {
        if (!ob.sensed && ob.box.distance(pos) <= sensing_radius_) {
            ob.sensed = true;
            any_new = true;
            mark_box(ob.box, Cell::SensedObstacle);
        }
    }
    if (any_new) ++sensed_version_;
    return any_new;
}

double OccupancyMap::distance_to_obstacle(const PVec& pos, bool* inside) const {
    if (inside) *inside = false;
    double best = std::numeric_limits<double>::infinity();
    bool any = false;
    for (const auto& ob : obstacles_) {
        if (!ob.sensed) continue;
        any = true;
        const double d = ob.box.distance(pos);
        best = std::min(best, d);
        if (inside && ob.box.contains(pos)) *inside = true;
    }
    return any ? best : sensing_radius_;
}

bool OccupancyMap::obstacle_within(const PVec& pos, double radius) const {
    for (const auto& ob : obstacles_) {
        if (ob.sensed && ob.box.distance(pos) <= radius) return true;
    }
    return false;
}

std::optional<PVec> OccupancyMap::nearest_sensed_boundary(const PVec& pos) const {
    double best = std::numeric_limits<double>::infinity();
    std::optional<PVec> out;
    for (const auto& ob : obstacles_) {
        if (!ob.sensed) continue;
        const double d = ob.box.distance(pos);
        if (d < best) {
            best = d;
            out = ob.box.nearest_point(pos);
        }
    }
    return out;
}

void OccupancyMap::augment(const PlannerExtents& error_box) {
    if (error_box.dim != workspace_.dim) throw Error("augment: extents dimension mismatch");
    // Reflected Minkowski sum: a planner point p is unsafe when p + e hits an
    // obstacle for some error e in the box, so obstacles grow by [-hi, -lo].
    std::array<double, 3> pad_lo{}, pad_hi{};
    for (int a = 0; a < workspace_.dim; ++a) {
        pad_lo[a] = std::ceil(std::max(0.0, error_box.hi[a]) / resolution_) * resolution_;
        pad_hi[a] = std::ceil(std::max(0.0, -error_box.lo[a]) / resolution_) * resolution_;
    }
    if (augmented_version_ == sensed_version_ && pad_lo == aug_pad_lo_ && pad_hi == aug_pad_hi_) {
        return;  // layer already current
    }
    aug_pad_lo_ = pad_lo;
    aug_pad_hi_ = pad_hi;
    augmented_version_ = sensed_version_;

    for (auto& c : cells_) {
        if (c == static_cast<std::uint8_t>(Cell::Augmented)) {
            c = static_cast<std::uint8_t>(Cell::Free);
        }
    }
    for (const auto& ob : obstacles_) {
        if (!ob.sensed) continue;
        Box grown = ob.box;
        for (int a = 0; a < workspace_.dim; ++a) {
            grown.lo[a] -= pad_lo[a];
            grown.hi[a] += pad_hi[a];
        }
        mark_box(grown, Cell::Augmented);
    }
}

bool OccupancyMap::blocked(const PVec& p) const {
    std::array<int, 3> idx{};
    if (!point_cell(p, idx)) return true;
    return cells_[cell_index(idx)] != static_cast<std::uint8_t>(Cell::Free);
}

bool OccupancyMap::in_augmented_region(const PVec& p) const {
    std::array<int, 3> idx{};
    if (!point_cell(p, idx)) return false;
    return cells_[cell_index(idx)] != static_cast<std::uint8_t>(Cell::Free);
}

bool OccupancyMap::segment_free(const PVec& a, const PVec& b) const {
    const double len = a.distance(b);
    const int steps = std::max(1, static_cast<int>(std::ceil(len / (0.5 * resolution_))));
    for (int k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(steps);
        PVec p = a;
        for (int d = 0; d < a.dim; ++d) p.c[d] = a.c[d] + t * (b.c[d] - a.c[d]);
        if (blocked(p)) return false;
    }
    return true;
}

bool OccupancyMap::inside_true_obstacle(const PVec& p) const {
    for (const auto& ob : obstacles_)
        if (ob.box.contains(p)) return true;
    return false;
}

Cell OccupancyMap::cell_state(const PVec& p) const {
    std::array<int, 3> idx{};
    if (!point_cell(p, idx)) return Cell::SensedObstacle;
    return static_cast<Cell>(cells_[cell_index(idx)]);
}

void OccupancyMap::dump_ascii(std::ostream& out, int slice) const {
    const bool three_d = workspace_.dim == 3;
    const int zi = three_d ? (slice >= 0 ? std::min(slice, counts_[2] - 1) : counts_[2] / 2) : 0;
    for (int y = counts_[1] - 1; y >= 0; --y) {
        for (int x = 0; x < counts_[0]; ++x) {
            std::array<int, 3> idx{x, y, zi};
            const auto c = static_cast<Cell>(cells_[cell_index(idx)]);
            out << (c == Cell::Free ? '.' : c == Cell::Augmented ? '+' : '#');
        }
        out << '\n';
    }
}

}  // namespace srf
