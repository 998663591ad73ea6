#include "srf/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "srf/error.hpp"

namespace srf {

Grid::Grid(std::vector<double> lower, std::vector<double> upper, std::vector<std::size_t> counts) {
    if (lower.empty() || lower.size() != upper.size() || lower.size() != counts.size()) {
        throw Error("grid: lower/upper/counts must be non-empty and equally sized");
    }
    if (lower.size() > static_cast<std::size_t>(kMaxDims)) {
        throw Error("grid: too many dimensions");
    }
    dims_ = static_cast<int>(lower.size());
    total_ = 1;
    for (int a = 0; a < dims_; ++a) {
        if (counts[a] < 3) throw Error("grid: counts must be >= 3 per axis");
        if (!(upper[a] > lower[a])) throw Error("grid: upper must exceed lower per axis");
        lower_[a] = lower[a];
        upper_[a] = upper[a];
        counts_[a] = counts[a];
        spacing_[a] = (upper[a] - lower[a]) / static_cast<double>(counts[a] - 1);
        total_ *= counts[a];
    }
    std::size_t stride = 1;
    for (int a = dims_ - 1; a >= 0; --a) {
        strides_[a] = stride;
        stride *= counts_[a];
    }
}

std::size_t Grid::flatten(std::span<const std::size_t> multi) const {
    std::size_t flat = 0;
    for (int a = 0; a < dims_; ++a) flat += multi[a] * strides_[a];
    return flat;
}

void Grid::unflatten(std::size_t flat, std::span<std::size_t> multi) const {
    for (int a = 0; a < dims_; ++a) {
        multi[a] = flat / strides_[a];
        flat %= strides_[a];
    }
}

void Grid::node_point(std::size_t flat, std::span<double> point) const {
    std::array<std::size_t, kMaxDims> multi{};
    unflatten(flat, std::span<std::size_t>(multi.data(), dims_));
    for (int a = 0; a < dims_; ++a) point[a] = coord(a, multi[a]);
}

double Grid::max_spacing() const {
    double h = 0.0;
    for (int a = 0; a < dims_; ++a) h = std::max(h, spacing_[a]);
    return h;
}

double Grid::cell_diagonal() const {
    double s = 0.0;
    for (int a = 0; a < dims_; ++a) s += spacing_[a] * spacing_[a];
    return std::sqrt(s);
}

bool Grid::operator==(const Grid& other) const {
    if (dims_ != other.dims_) return false;
    for (int a = 0; a < dims_; ++a) {
        if (lower_[a] != other.lower_[a] || upper_[a] != other.upper_[a] ||
            counts_[a] != other.counts_[a]) {
            return false;
        }
    }
    return true;
}

ScalarField::ScalarField(Grid grid, double fill)
    : grid_(std::move(grid)), values_(grid_.total_nodes(), fill) {}

ScalarField::ScalarField(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.total_nodes()) {
        throw Error("scalar field: values length must equal grid node count");
    }
}

ScalarField::ScalarField(const ScalarField& other)
    : grid_(other.grid_), values_(other.values_), clamp_events_(other.clamp_events()) {}

ScalarField& ScalarField::operator=(const ScalarField& other) {
    if (this != &other) {
        grid_ = other.grid_;
        values_ = other.values_;
        clamp_events_.store(other.clamp_events(), std::memory_order_relaxed);
    }
    return *this;
}

ScalarField::ScalarField(ScalarField&& other) noexcept
    : grid_(std::move(other.grid_)), values_(std::move(other.values_)),
      clamp_events_(other.clamp_events()) {}

ScalarField& ScalarField::operator=(ScalarField&& other) noexcept {
    grid_ = std::move(other.grid_);
    values_ = std::move(other.values_);
    clamp_events_.store(other.clamp_events(), std::memory_order_relaxed);
    return *this;
}

SampleResult ScalarField::sample(std::span<const double> point) const {
    const int dims = grid_.dims();
    if (static_cast<int>(point.size()) != dims) {
        throw Error("interpolate: point dimension does not match grid");
    }

    SampleResult out;
    std::array<std::size_t, kMaxDims> base{};
    std::array<double, kMaxDims> frac{};
    for (int a = 0; a < dims; ++a) {
        double x = point[a];
        if (x < grid_.lower(a)) {
            x = grid_.lower(a);
            out.clamped = true;
        } else if (x > grid_.upper(a)) {
            x = grid_.upper(a);
            out.clamped = true;
        }
        double t = (x - grid_.lower(a)) / grid_.spacing(a);
        auto i = static_cast<std::size_t>(t);
        if (i >= grid_.count(a) - 1) i = grid_.count(a) - 2;
        base[a] = i;
        frac[a] = t - static_cast<double>(i);
    }
    if (out.clamped) clamp_events_.fetch_add(1, std::memory_order_relaxed);

    // Accumulate over the 2^dims cell corners, skipping zero-weight corners so
    // node-aligned queries return the stored value bitwise and so that
    // zero-weight non-finite corners cannot poison the result.
    double acc = 0.0;
    double cmin = std::numeric_limits<double>::infinity();
    double cmax = -std::numeric_limits<double>::infinity();
    const std::size_t corners = std::size_t{1} << dims;
    for (std::size_t mask = 0; mask < corners; ++mask) {
        double w = 1.0;
        std::size_t idx = 0;
        for (int a = 0; a < dims; ++a) {
            const bool hi = (mask >> a) & 1u;
            w *= hi ? frac[a] : 1.0 - frac[a];
            idx += (base[a] + (hi ? 1 : 0)) * grid_.stride(a);
        }
        if (w == 0.0) continue;
        const double v = values_[idx];
        if (!std::isfinite(v)) {
            out.outside_domain = true;
            out.value = std::numeric_limits<double>::infinity();
            return out;
        }
        acc += w * v;
        cmin = std::min(cmin, v);
        cmax = std::max(cmax, v);
    }
    // Convex combination; clip rounding spill so the result stays inside the
    // corner envelope.
    out.value = std::clamp(acc, cmin, cmax);
    return out;
}

GradientResult ScalarField::gradient(std::span<const double> point) const {
    const int dims = grid_.dims();
    if (static_cast<int>(point.size()) != dims) {
        throw Error("gradient: point dimension does not match grid");
    }
    GradientResult out;
    std::array<double, kMaxDims> probe{};
    for (int a = 0; a < dims; ++a) probe[a] = point[a];

    for (int a = 0; a < dims; ++a) {
        const double h = grid_.spacing(a);
        double xlo = point[a] - h;
        double xhi = point[a] + h;
        // One-sided near the boundary: keep both probes inside.
        if (xlo < grid_.lower(a)) xlo = std::max(grid_.lower(a), point[a]);
        if (xhi > grid_.upper(a)) xhi = std::min(grid_.upper(a), point[a]);

        probe[a] = xlo;
        SampleResult lo = sample(std::span<const double>(probe.data(), dims));
        probe[a] = xhi;
        SampleResult hi = sample(std::span<const double>(probe.data(), dims));
        probe[a] = point[a];

        out.clamped |= lo.clamped || hi.clamped;
        if (lo.outside_domain || hi.outside_domain) {
            out.outside_domain = true;
            return out;
        }
        out.g[a] = (xhi > xlo) ? (hi.value - lo.value) / (xhi - xlo) : 0.0;
    }
    return out;
}

void ScalarField::upwind(std::size_t node, std::span<double> dminus, std::span<double> dplus) const {
    const int dims = grid_.dims();
    if (node >= grid_.total_nodes()) throw Error("upwind: node index out of range");
    std::array<std::size_t, kMaxDims> multi{};
    grid_.unflatten(node, std::span<std::size_t>(multi.data(), dims));

    const double v = values_[node];
    for (int a = 0; a < dims; ++a) {
        const double h = grid_.spacing(a);
        const std::size_t stride = grid_.stride(a);
        double left, right;
        if (multi[a] > 0) {
            left = values_[node - stride];
        } else {
            left = 2.0 * v - values_[node + stride];  // ghost
        }
        if (multi[a] + 1 < grid_.count(a)) {
            right = values_[node + stride];
        } else {
            right = 2.0 * v - values_[node - stride];  // ghost
        }
        dminus[a] = (v - left) / h;
        dplus[a] = (right - v) / h;
    }
}

double ScalarField::sublevel_radius(double level) const {
    const int dims = grid_.dims();
    std::array<std::size_t, kMaxDims> multi{};
    double best = -1.0;
    for (std::size_t i = 0; i < grid_.total_nodes(); ++i) {
        const double v = values_[i];
        if (!(v <= level)) continue;
        grid_.unflatten(i, std::span<std::size_t>(multi.data(), dims));
        double n2 = 0.0;
        for (int a = 0; a < dims; ++a) {
            const double c = grid_.coord(a, multi[a]);
            n2 += c * c;
        }
        best = std::max(best, n2);
    }
    if (best < 0.0) throw Error("sublevel_radius: level below minimum");
    const double r = std::sqrt(best);
    return r <= grid_.cell_diagonal() ? 0.0 : r;
}

double ScalarField::min_value() const {
    double m = std::numeric_limits<double>::infinity();
    for (double v : values_)
        if (std::isfinite(v)) m = std::min(m, v);
    return m;
}

double ScalarField::max_value() const {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : values_)
        if (std::isfinite(v)) m = std::max(m, v);
    return m;
}

std::pair<double, double> level_set_extent(const ScalarField& field, double level, int axis) {
    const Grid& g = field.grid();
    if (axis < 0 || axis >= g.dims()) throw Error("level_set_extent: axis out of range");
    std::array<std::size_t, kMaxDims> multi{};
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.total_nodes(); ++i) {
        if (!(field[i] <= level)) continue;
        g.unflatten(i, std::span<std::size_t>(multi.data(), g.dims()));
        const double c = g.coord(axis, multi[axis]);
        lo = std::min(lo, c);
        hi = std::max(hi, c);
    }
    if (lo > hi) throw Error("level_set_extent: level below minimum");
    return {lo, hi};
}

}  // namespace srf
