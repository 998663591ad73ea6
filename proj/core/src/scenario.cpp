#include "srf/scenario.hpp"

#include <cmath>

#include "srf/error.hpp"

namespace srf {

std::string mode_name(NavMode mode) { return mode == NavMode::Srf ? "srf" : "fastrack"; }

NavMode parse_mode(const std::string& name) {
    if (name == "srf") return NavMode::Srf;
    if (name == "fastrack") return NavMode::Fastrack;
    throw Error("unknown mode '" + name + "' (expected srf or fastrack)");
}

std::string Scenario::disturbance_label() const {
    switch (disturbance.type) {
        case DisturbanceType::None: return "none";
        case DisturbanceType::Position: return "pos";
        case DisturbanceType::PositionVelocity: return "posvel";
    }
    return "none";
}

void Scenario::validate() const {
    if (!workspace.valid()) throw Error("scenario: invalid workspace box");
    if (workspace.dim != planner_dim()) throw Error("scenario: workspace dimension must match the planner");
    PVec s;
    s.dim = planner_dim();
    for (int a = 0; a < s.dim; ++a) s.c[a] = start[a];
    for (const auto& b : obstacles) {
        if (!b.valid()) throw Error("scenario: obstacle with empty extents");
        if (b.contains(s)) throw Error("scenario: start lies inside an obstacle");
    }
    if (!workspace.contains(goal)) throw Error("scenario: goal outside the workspace");
    if (!workspace.contains(s)) throw Error("scenario: start outside the workspace");
    if (!(decision_dt > 0.0)) throw Error("scenario: decision_dt must be positive");
    if (physics_substeps < 1) throw Error("scenario: physics_substeps must be >= 1");
    if (!(goal_radius > 0.0)) throw Error("scenario: goal_radius must be positive");
    if (!(sensing_radius > 0.0)) throw Error("scenario: sensing_radius must be positive");
    if (!(raster_resolution > 0.0)) throw Error("scenario: raster_resolution must be positive");
    if (!(timeout > 0.0)) throw Error("scenario: timeout must be positive");
}

namespace {

Box parse_box(const KvDocument& doc, const std::string& key, const std::vector<double>& nums,
              int dim) {
    if (static_cast<int>(nums.size()) != 2 * dim) {
        doc.fail(key, "expected " + std::to_string(2 * dim) + " numbers (lower..., upper...)");
    }
    Box b;
    b.dim = dim;
    for (int a = 0; a < dim; ++a) {
        b.lo[a] = nums[a];
        b.hi[a] = nums[dim + a];
    }
    if (!b.valid()) doc.fail(key, "box upper bounds must exceed lower bounds");
    return b;
}

}  // namespace

Scenario parse_scenario(const KvDocument& doc) {
    Scenario scn;
    scn.system = doc.get_string("system", scn.system);
    if (scn.system != "quad10_planner3" && scn.system != "quad8_planner2") {
        doc.fail("system", "unknown system '" + scn.system + "'");
    }
    const int dim = scn.planner_dim();
    scn.mode = parse_mode(doc.get_string("mode", "srf"));
    scn.seed = static_cast<std::uint64_t>(doc.get_int("seed", 1));
    scn.workspace = parse_box(doc, "workspace", doc.get_doubles("workspace"), dim);

    auto start = doc.get_doubles("start");
    if (static_cast<int>(start.size()) != dim) doc.fail("start", "expected planner-dimension coordinates");
    for (int a = 0; a < dim; ++a) scn.start[a] = start[a];

    auto goal = doc.get_doubles("goal");
    if (static_cast<int>(goal.size()) != dim) doc.fail("goal", "expected planner-dimension coordinates");
    scn.goal.dim = dim;
    for (int a = 0; a < dim; ++a) scn.goal.c[a] = goal[a];

    scn.goal_radius = doc.get_double("goal_radius", scn.goal_radius);
    scn.sensing_radius = doc.get_double("sensing_radius", scn.sensing_radius);
    scn.decision_dt = doc.get_double("decision_dt", scn.decision_dt);
    scn.physics_substeps = static_cast<int>(doc.get_int("physics_substeps", scn.physics_substeps));
    scn.timeout = doc.get_double("timeout", scn.timeout);
    scn.raster_resolution = doc.get_double("raster_resolution", scn.raster_resolution);
    scn.rrt.step = doc.get_double("rrt.step", scn.rrt.step);
    scn.rrt.goal_bias = doc.get_double("rrt.goal_bias", scn.rrt.goal_bias);
    scn.rrt.max_nodes = static_cast<int>(doc.get_int("rrt.max_nodes", scn.rrt.max_nodes));

    for (const auto& row : doc.get_double_rows("obstacle")) {
        scn.obstacles.push_back(parse_box(doc, "obstacle", row, dim));
    }

    auto modeled = doc.get_doubles("modeled_disturbance", {0.0, 0.0, 0.0});
    for (std::size_t a = 0; a < modeled.size() && a < 3; ++a) {
        scn.modeled_disturbance[a] = modeled[a];
    }

    const std::string dtype = doc.get_string("disturbance.type", "none");
    if (dtype == "none") {
        scn.disturbance.type = DisturbanceType::None;
    } else if (dtype == "position") {
        scn.disturbance.type = DisturbanceType::Position;
    } else if (dtype == "position_velocity") {
        scn.disturbance.type = DisturbanceType::PositionVelocity;
    } else {
        doc.fail("disturbance.type", "expected none|position|position_velocity");
    }
    if (scn.disturbance.type != DisturbanceType::None) {
        if (doc.has("disturbance.trigger_region")) {
            scn.disturbance.trigger_region =
                parse_box(doc, "disturbance.trigger_region", doc.get_doubles("disturbance.trigger_region"), dim);
            scn.disturbance.has_region = true;
            scn.disturbance.trigger_time = -1.0;
        } else {
            scn.disturbance.trigger_time = doc.get_double("disturbance.trigger_time");
        }
        scn.disturbance.adversarial = doc.get_bool("disturbance.adversarial", true);
        auto scale = doc.get_doubles("disturbance.scale", {scn.disturbance.scale_lo, scn.disturbance.scale_hi});
        if (scale.size() != 2 || scale[0] > scale[1]) doc.fail("disturbance.scale", "expected 'lo hi'");
        scn.disturbance.scale_lo = scale[0];
        scn.disturbance.scale_hi = scale[1];
        auto vel = doc.get_doubles("disturbance.velocity", {scn.disturbance.vel_lo, scn.disturbance.vel_hi});
        if (vel.size() != 2 || vel[0] > vel[1]) doc.fail("disturbance.velocity", "expected 'lo hi'");
        scn.disturbance.vel_lo = vel[0];
        scn.disturbance.vel_hi = vel[1];
        auto dir = doc.get_doubles("disturbance.direction", {1.0, 0.0, 0.0});
        double norm = 0.0;
        for (std::size_t a = 0; a < dir.size() && a < 3; ++a) norm += dir[a] * dir[a];
        if (!(norm > 0.0)) doc.fail("disturbance.direction", "direction must be nonzero");
        norm = std::sqrt(norm);
        for (std::size_t a = 0; a < 3; ++a) {
            scn.disturbance.direction[a] = a < dir.size() ? dir[a] / norm : 0.0;
        }
    }

    scn.validate();
    return scn;
}

Scenario load_scenario(const std::filesystem::path& path) {
    return parse_scenario(KvDocument::parse_file(path));
}

}  // namespace srf
