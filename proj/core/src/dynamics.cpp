#include "srf/dynamics.hpp"

#include <cmath>

#include "srf/error.hpp"

namespace srf {

void SubsystemModel::flow(std::span<const double> r, double u, double b, double d,
                          std::span<double> out) const {
    drift(r, out);
    for (int i = 0; i < dim; ++i) {
        out[i] += control.gain[i] * u + planner.gain[i] * b + disturbance.gain[i] * d;
    }
}

SubsystemModel lateral_subsystem(const ModelParams& params, Interval u_bound,
                                 double planner_vmax, double dist_bound) {
    SubsystemModel m;
    m.name = "lateral";
    m.dim = 4;
    const double g = params.g, d0 = params.d0, d1 = params.d1;
    m.drift = [g, d0, d1](std::span<const double> r, std::span<double> out) {
        const double theta = r[2];
        if (std::abs(theta) >= kPi / 2.0) {
            throw Error("lateral drift: |theta| at or beyond pi/2 singularity");
        }
        out[0] = r[1];
        out[1] = g * std::tan(theta);
        out[2] = -d1 * theta + r[3];
        out[3] = -d0 * theta;
    };
    m.control.gain = {0.0, 0.0, 0.0, params.n0};
    m.control.bound = u_bound;
    m.planner.gain = {-1.0, 0.0, 0.0, 0.0};
    m.planner.bound = {-planner_vmax, planner_vmax};
    m.disturbance.gain = {1.0, 0.0, 0.0, 0.0};
    m.disturbance.bound = {-dist_bound, dist_bound};
    return m;
}

SubsystemModel vertical_subsystem(const ModelParams& params, Interval u_bound,
                                  double planner_vmax, double dist_bound) {
    SubsystemModel m;
    m.name = "vertical";
    m.dim = 2;
    const double g = params.g;
    m.drift = [g](std::span<const double> r, std::span<double> out) {
        out[0] = r[1];
        out[1] = -g;
    };
    m.control.gain = {0.0, params.kT, 0.0, 0.0};
    m.control.bound = u_bound;
    m.planner.gain = {-1.0, 0.0, 0.0, 0.0};
    m.planner.bound = {-planner_vmax, planner_vmax};
    m.disturbance.gain = {1.0, 0.0, 0.0, 0.0};
    m.disturbance.bound = {-dist_bound, dist_bound};
    return m;
}

namespace {

std::array<double, 10> tracker_rate(const std::array<double, 10>& s, const TrackerControl& u,
                                    const std::array<double, 3>& d, const ModelParams& p) {
    if (std::abs(s[6]) >= kPi / 2.0 || std::abs(s[7]) >= kPi / 2.0) {
        throw Error("tracker dynamics: pitch/roll at or beyond pi/2 singularity");
    }
    std::array<double, 10> f{};
    f[0] = s[3] + d[0];
    f[1] = s[4] + d[1];
    f[2] = s[5] + d[2];
    f[3] = p.g * std::tan(s[6]);
    f[4] = p.g * std::tan(s[7]);
    f[5] = p.kT * u.uz - p.g;
    f[6] = -p.d1 * s[6] + s[8];
    f[7] = -p.d1 * s[7] + s[9];
    f[8] = -p.d0 * s[6] + p.n0 * u.ux;
    f[9] = -p.d0 * s[7] + p.n0 * u.uy;
    return f;
}

}  // namespace

TrackerState step_tracker(const TrackerState& s, const TrackerControl& u,
                          const std::array<double, 3>& d, double dt, const ModelParams& params) {
    if (!(dt > 0.0)) throw Error("step_tracker: dt must be positive");
    const auto& x = s.v;
    auto k1 = tracker_rate(x, u, d, params);
    std::array<double, 10> tmp{};
    for (int i = 0; i < 10; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
    auto k2 = tracker_rate(tmp, u, d, params);
    for (int i = 0; i < 10; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
    auto k3 = tracker_rate(tmp, u, d, params);
    for (int i = 0; i < 10; ++i) tmp[i] = x[i] + dt * k3[i];
    auto k4 = tracker_rate(tmp, u, d, params);

    TrackerState out;
    for (int i = 0; i < 10; ++i) {
        out.v[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return out;
}

PlannerState step_planner(const PlannerState& p, std::span<const double> b, double vmax, double dt) {
    if (static_cast<int>(b.size()) != p.dim) throw Error("step_planner: control dimension mismatch");
    const double tol = 1e-12;
    PlannerState out = p;
    for (int a = 0; a < p.dim; ++a) {
        if (std::abs(b[a]) > vmax + tol) throw Error("step_planner: planner control exceeds bound");
        out.p[a] += b[a] * dt;
    }
    return out;
}

RelativeState relative_state(const TrackerState& s, const PlannerState& p) {
    RelativeState r;
    r.blocks = p.dim == 3 ? 3 : 2;
    r.block[0] = {s.x() - p.p[0], s.vx(), s.thx(), s.wx()};
    r.block[1] = {s.y() - p.p[1], s.vy(), s.thy(), s.wy()};
    if (r.blocks == 3) r.block[2] = {s.z() - p.p[2], s.vz(), 0.0, 0.0};
    return r;
}

RelativeState decompose(std::span<const double> full, int planner_dim) {
    if (full.size() != 10) throw Error("decompose: expected a 10-entry relative vector");
    RelativeState r;
    r.blocks = planner_dim == 3 ? 3 : 2;
    r.block[0] = {full[0], full[3], full[6], full[8]};
    r.block[1] = {full[1], full[4], full[7], full[9]};
    if (r.blocks == 3) r.block[2] = {full[2], full[5], 0.0, 0.0};
    return r;
}

std::array<double, 10> compose(const RelativeState& r) {
    std::array<double, 10> full{};
    full[0] = r.block[0][0];
    full[3] = r.block[0][1];
    full[6] = r.block[0][2];
    full[8] = r.block[0][3];
    full[1] = r.block[1][0];
    full[4] = r.block[1][1];
    full[7] = r.block[1][2];
    full[9] = r.block[1][3];
    if (r.blocks == 3) {
        full[2] = r.block[2][0];
        full[5] = r.block[2][1];
    }
    return full;
}

TrackerState reconstruct_tracker(const RelativeState& r, const PlannerState& p) {
    TrackerState s;
    s.v = compose(r);
    for (int a = 0; a < p.dim; ++a) s.v[a] += p.p[a];
    return s;
}

Grid default_lateral_grid() {
    return Grid({-2.0, -2.0, -kPi / 6.0, -kPi}, {2.0, 2.0, kPi / 6.0, kPi}, {41, 41, 25, 25});
}

Grid default_vertical_grid() {
    return Grid({-2.0, -2.0}, {2.0, 2.0}, {81, 81});
}

SystemSetup make_system(const std::string& name, const ModelParams& params,
                        const ControlBounds& bounds) {
    SystemSetup sys;
    sys.name = name;
    sys.params = params;
    sys.bounds = bounds;
    if (name == "quad10_planner3") {
        sys.planner_dim = 3;
    } else if (name == "quad8_planner2") {
        sys.planner_dim = 2;
    } else {
        throw Error("unknown system '" + name + "' (expected quad10_planner3 or quad8_planner2)");
    }
    sys.blocks.push_back({"X",
                          lateral_subsystem(params, bounds.ux, bounds.planner_vmax,
                                            bounds.disturbance[0]),
                          default_lateral_grid()});
    sys.blocks.push_back({"Y",
                          lateral_subsystem(params, bounds.uy, bounds.planner_vmax,
                                            bounds.disturbance[1]),
                          default_lateral_grid()});
    if (sys.planner_dim == 3) {
        sys.blocks.push_back({"Z",
                              vertical_subsystem(params, bounds.uz, bounds.planner_vmax,
                                                 bounds.disturbance[2]),
                              default_vertical_grid()});
    }
    return sys;
}

}  // namespace srf
