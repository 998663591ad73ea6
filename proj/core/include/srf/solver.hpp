#pragma once

#include <filesystem>
#include <utility>
#include <vector>

#include "srf/dynamics.hpp"
#include "srf/error.hpp"
#include "srf/grid.hpp"

namespace srf {

enum class HamiltonianPolicy { Analytic, Sampled };

/// Value-iteration settings. The effective time step always satisfies the
/// Lax-Friedrichs stability bound dt <= cfl / (sum_i alpha_i/h_i + gamma);
/// an explicit `dt` that violates it is rejected.
struct SolveConfig {
    double gamma = 0.0;          ///< desired exponential decay rate, 1/s
    double tolerance = 1e-5;     ///< sup-norm residual per sweep, value units
    int max_iterations = 50000;
    double cfl = 0.8;
    double dt = 0.0;             ///< 0 = derive from the CFL bound
    double divergence_cap = 1e4; ///< nodes reaching this leave the domain
    HamiltonianPolicy policy = HamiltonianPolicy::Analytic;
    int samples_per_input = 21;  ///< lattice size for the Sampled policy
};

struct IterationRecord {
    int iteration = 0;
    double residual = 0.0;
    double wall_ms = 0.0;
};

/// Converged value function plus solve metadata.
struct SolveResult {
    ScalarField field;
    double gamma = 0.0;
    double minval = 0.0;  ///< c: minimum of the stage-1 value over the grid
    bool converged = false;
    std::size_t diverged_nodes = 0;
    double time_step = 0.0;
    std::vector<IterationRecord> history;
};

/// Thrown when the sweep fails to reach the residual tolerance; carries the
/// partial result so callers can persist flagged artifacts.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& msg, SolveResult partial)
        : Error(msg), partial_(std::move(partial)) {}
    const SolveResult& partial() const { return partial_; }

private:
    SolveResult partial_;
};

/// min over u of max over (b, d) of q . f(r, u, b, d). Affine structure puts
/// each extremum at an interval endpoint picked by the sign of the projected
/// gradient.
double hamiltonian(const SubsystemModel& model, std::span<const double> r,
                   std::span<const double> q);

/// Brute-force min-max over an n-point lattice per input (endpoints
/// included). Reference implementation for the Sampled policy.
double hamiltonian_sampled(const SubsystemModel& model, std::span<const double> r,
                           std::span<const double> q, int n);

/// Stage 1: infinite-horizon maximum-cost value with stage cost ||r||, gamma
/// forced to 0. minval of the result is c.
SolveResult solve_converged_value(const SubsystemModel& model, const Grid& grid, SolveConfig cfg);

/// Stage 2: solves the decay-rate variational inequality with stage cost
/// ||r|| - c. Nodes whose value grows past divergence_cap are published as
/// +inf (outside the solvable domain) instead of failing the solve.
SolveResult solve_rclvf(const SubsystemModel& model, const Grid& grid, const SolveConfig& cfg,
                        double c);

void write_history_csv(const std::filesystem::path& path,
                       const std::vector<IterationRecord>& history);

/// Position-error interval of the sublevel set: {e : exists eta with
/// V(e, eta) <= level}, axis 0 being the position error. Throws
/// Error("level below minimum") when empty.
std::pair<double, double> pteb_interval(const ScalarField& field, double level);

/// Largest sublevel of V contained in the ball of radius dst/2, computed as
/// max(0, min{V(r) : ||r|| >= dst/2} - margin). Falls back to the outermost
/// node shell when the ball swallows the whole grid; returns 0 whenever the
/// zero sublevel set pokes out of the ball.
double steb_level(const ScalarField& field, double dst, double margin);

}  // namespace srf
