#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "srd/elliptic_operator.hpp"
#include "srd/grid.hpp"
#include "srd/noise.hpp"
#include "srd/reaction.hpp"
#include "srd/wiener_path.hpp"

namespace srd {

/// du_l = (A_l u_l + f_l(u)) dt + g_l(u_l) sum_k lambda_k e_k dbeta_{l,k}.
struct Problem {
    DomainGrid grid;
    std::vector<EllipticOperator> operators;
    ReactionSystem reaction;
    NoiseModel noise;

    /// Checks that operators, reaction and noise agree on r and on the grid.
    static Problem make(std::vector<EllipticOperator> operators, ReactionSystem reaction, NoiseModel noise);

    std::size_t components() const noexcept { return operators.size(); }
    /// Hash of everything that determines the dynamics.
    std::uint64_t digest() const;
};

enum class Scheme { semi_implicit, tamed };

struct SolverConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    Scheme scheme = Scheme::semi_implicit;
    /// Halt once some component sup norm exceeds this value.
    double sup_cap = std::numeric_limits<double>::infinity();
    /// Halt once sum_l |u_l|_inf exceeds this value (truncation ladder).
    std::optional<double> ladder_level;
    /// Store every stride-th state; the last state is always stored.
    std::size_t stride = 1;
    SolveOptions solve;
};

struct StoppingRecord {
    bool triggered = false;
    double level = 0.0;
    std::size_t step = 0;
    double time = 0.0;
};

struct Provenance {
    std::uint64_t seed = 0;
    std::string config_digest;
    std::string problem_digest;
};

struct Trajectory {
    double dt = 0.0;
    std::vector<std::size_t> steps;
    std::vector<double> times;
    std::vector<State> states;
    StoppingRecord stopping;
    Provenance provenance;

    bool operator==(const Trajectory& other) const;
};

/// Time stepper with the implicit propagators factored once.
class Stepper {
public:
    Stepper(const Problem& problem, const SolverConfig& config);

    /// u_l+ = (I - dt A_l)^{-1}[u_l + dt F_l(u) + g(u_l) sum_k lambda_k e_k dbeta_{l,k}].
    /// `increments(l)` must hold at least K_l values for component l.
    State advance(const State& u, const IncrementTable& table, std::size_t step) const;
    State advance(const State& u, std::span<const std::vector<double>> increments) const;

    const Problem& problem() const noexcept { return *problem_; }
    const SolverConfig& config() const noexcept { return config_; }

private:
    State advance_impl(const State& u, const std::vector<std::span<const double>>& incr) const;

    const Problem* problem_;
    SolverConfig config_;
    std::vector<ImplicitPropagator> propagators_;
};

/// One step; builds the propagators on each call.
State step(const Problem& problem, const SolverConfig& config, const State& u,
           std::span<const std::vector<double>> increments);

/// Number of steps of size config.dt covering [0, t_end].
std::size_t step_count(const SolverConfig& config);

/// Iterates `step` on the path viewed at config.dt. Throws SolverError
/// ("non-finite") with the step index when the state stops being finite.
Trajectory simulate(const Problem& problem, const SolverConfig& config, const WienerPath& path,
                    const State& initial);

/// h frozen beyond |s| = n, k beyond the l1 ball of radius n, g beyond |s| = n.
Problem truncate_problem(const Problem& problem, double n);

struct LadderReport {
    std::vector<double> levels;
    /// rho_n as a step index (the full step count when level n is never left).
    std::vector<std::size_t> exit_steps;
    std::vector<bool> exited;
    bool monotone = true;
};

struct LadderResult {
    Trajectory glued;
    LadderReport report;
};

/// Simulates the truncated problem at every level on one path, checks that
/// consecutive levels agree bitwise up to min(rho_n, rho_{n+1}) and glues
/// u = u_n on [0, rho_n]. Throws SolverError("ladder") on disagreement.
LadderResult glue_ladder(const Problem& problem, const SolverConfig& config, const WienerPath& path,
                         const State& initial, std::span<const double> levels);

/// Distance between each stored state u(t) and the discrete mild formula
/// R^q u(0) + sum_j R^{q-j} (F(u(s_j)) dt_ref + G(u(s_j)) dbeta_j), where R is
/// the backward-Euler propagator at dt_ref = 2^ref_level dt_fine and u(s_j) is
/// the stored state at the start of the coarse step containing fine step j.
/// With dt_ref = dt the formula is the scheme itself. Needs stride 1.
std::vector<double> mild_residual(const Problem& problem, const Trajectory& traj, const WienerPath& path,
                                  std::span<const double> probe_times, unsigned ref_level = 0,
                                  SolveOptions solve = {});

}  // namespace srd
