#include "srf/rrt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "srf/rng.hpp"

namespace srf {

namespace {

PVec steer(const PVec& from, const PVec& to, double max_step) {
    const double d = from.distance(to);
    if (d <= max_step || d == 0.0) return to;
    PVec out = from;
    const double t = max_step / d;
    for (int a = 0; a < from.dim; ++a) out.c[a] = from.c[a] + t * (to.c[a] - from.c[a]);
    return out;
}

}  // namespace

std::optional<PlanPath> rrt_plan(const OccupancyMap& map, const PVec& start, const PVec& goal,
                                 std::uint64_t seed, const RrtParams& params, double created_time) {
    if (map.blocked(start)) return std::nullopt;

    struct Node {
        PVec p;
        int parent;
    };
    std::vector<Node> nodes;
    nodes.reserve(256);
    nodes.push_back({start, -1});

    Rng rng(seed);
    const Box& ws = map.workspace();
    const int dim = map.dim();

    auto nearest = [&](const PVec& q) {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const double d = nodes[i].p.distance(q);
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(i);
            }
        }
        return best;
    };

    auto finish = [&](int leaf) {
        PlanPath path;
        path.origin = start;
        path.created_time = created_time;
        std::vector<PVec> rev;
        for (int i = leaf; i >= 0; i = nodes[i].parent) rev.push_back(nodes[i].p);
        path.waypoints.assign(rev.rbegin(), rev.rend());
        return path;
    };

    // Root might already be in reach of the goal.
    if (start.distance(goal) <= params.step && map.segment_free(start, goal)) {
        nodes.push_back({goal, 0});
        return finish(1);
    }

    while (static_cast<int>(nodes.size()) < params.max_nodes) {
        PVec target;
        target.dim = dim;
        if (rng.next_double() < params.goal_bias) {
            target = goal;
        } else {
            for (int a = 0; a < dim; ++a) target.c[a] = rng.uniform(ws.lo[a], ws.hi[a]);
        }
        const int near = nearest(target);
        PVec fresh = steer(nodes[near].p, target, params.step);
        if (map.blocked(fresh) || !map.segment_free(nodes[near].p, fresh)) continue;
        nodes.push_back({fresh, near});
        const int id = static_cast<int>(nodes.size()) - 1;
        if (fresh.distance(goal) <= params.step && map.segment_free(fresh, goal)) {
            nodes.push_back({goal, id});
            return finish(id + 1);
        }
    }
    return std::nullopt;
}

}  // namespace srf
