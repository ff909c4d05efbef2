#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "srd/solver.hpp"

namespace srd {

using Json = nlohmann::json;

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// Outcome of a verification run: parameters, statistics, one boolean per
/// verdict, and CSV-ready tables. `pass` is the conjunction of the verdicts.
struct ExperimentReport {
    std::string name;
    Json parameters = Json::object();
    Json statistics = Json::object();
    Json verdicts = Json::object();
    Json provenance = Json::object();
    std::vector<Table> tables;
    bool pass = true;

    void verdict(const std::string& key, bool ok)
    {
        verdicts[key] = ok;
        pass = pass && ok;
    }
    Json to_json() const;
    /// report.json plus one <table>.csv per table.
    void write(const std::filesystem::path& dir) const;
};

void write_csv(const std::filesystem::path& path, const Table& table);

/// Runs job(i) for i in [0, n) on `workers` threads. Results land at their
/// index, so the output does not depend on the worker count. The first
/// exception (lowest index) is rethrown.
template <class R, class F>
std::vector<R> run_indexed(std::size_t n, unsigned workers, F job)
{
    std::vector<R> out(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                out[i] = job(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned w = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (w == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < w; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return out;
}

struct EnsembleOptions {
    std::uint64_t master_seed = 42;
    std::size_t paths = 16;
    unsigned workers = 1;
    /// Finest Wiener resolution; every dt used must be a power-of-two multiple.
    double dt_fine = 1.25e-4;
};

/// Path number `index` of an ensemble: seed derive_seed(master, index), wide
/// enough for the problem and long enough for t_end.
WienerPath ensemble_path(const Problem& problem, const SolverConfig& config, const EnsembleOptions& ens,
                         std::size_t index);

/// Cell-sum surrogate of int_O sum_l |u_l - w_l| dx.
double l1_distance(const DomainGrid& grid, const State& u, const State& w);

struct UniquenessOptions {
    EnsembleOptions ensemble;
    State initial;
    std::vector<double> eps_list{1e-1, 1e-2, 1e-3};
    std::size_t twin_paths = 8;
    /// Relative slack on the Gronwall envelope.
    double slack = 0.1;
    double max_exit_fraction = 0.25;
    /// Refinements of the common-path Cauchy check (dt, dt/2, ..., dt/2^refinements); 0 skips it.
    unsigned refinements = 3;
    double cauchy_fraction = 0.9;
};

/// Perturbation decay, Gronwall envelope, twin determinism, and the
/// common-path dt-refinement Cauchy check.
ExperimentReport uniqueness_experiment(const Problem& problem, const SolverConfig& config,
                                       const UniquenessOptions& options);

struct PositivityOptions {
    EnsembleOptions ensemble;
    State initial;
    /// tol = c_tol * dt; defaults to 10 max_l max(a_l, b_l)^2 from the noise growth constants.
    std::optional<double> c_tol;
    bool dt_pair = true;
    bool negative_control = true;
    /// Initial value of component 1 in the control run.
    double control_v0 = 1.0;
    std::size_t qp_samples = 10000;
    double qp_radius = 10.0;
};

/// Throws AuditError("quasi-positivity"), AuditError("g(0)≠0") or
/// ConfigError("initial") when a precondition of positivity preservation fails.
void check_positivity_preconditions(const Problem& problem, const State& initial, std::size_t samples = 10000,
                                    double radius = 10.0);

/// f = (-s_1, 0, ..., 0): not quasi positive, used as the negative control.
ReactionSystem negative_control_reaction(std::size_t components);

ExperimentReport positivity_experiment(const Problem& problem, const SolverConfig& config,
                                       const PositivityOptions& options);

struct MomentOptions {
    EnsembleOptions ensemble;
    State initial;
    double p = 4.0;
    std::vector<double> levels{4.0, 8.0, 16.0, 32.0};
    double tolerance = 0.05;
};

/// m_n = (E sup_t |u^(n)(t)|_E^p)^{1/p} per truncation level on common paths.
ExperimentReport moment_experiment(const Problem& problem, const SolverConfig& config, const MomentOptions& options);

struct Est2Result {
    double sup_u = 0.0;
    double sup_v = 0.0;
    double bound = 0.0;
    double margin = 0.0;
};

/// Solves u_{i+1} = (I - dt A)^{-1}(u_i + dt h(u_i + v_i)), u_0 = 0, and compares
/// max_i |u_i| with (4a/b)^{1/(2N+1)} (1 + max_i |v_i|), a = max(a2, -a1),
/// b = min(b1, b2). Throws SolverError("fixed point") on divergence.
Est2Result est2_bound_check(const ReactionSystem& reaction, std::size_t l, const EllipticOperator& op,
                            const std::vector<Field>& forcing, double dt, SolveOptions solve = {});

struct ResidualOptions {
    EnsembleOptions ensemble;
    State initial;
    double probe_time = 0.25;
    /// Coarsest dt as a multiple 2^j of dt_fine, then halved `refinements` times.
    unsigned coarse_level = 4;
    unsigned refinements = 1;
    double target_ratio = 0.5;
    double ratio_tolerance = 0.15;
};

/// Mild-formulation residual at probe_time against the dt_fine reference
/// propagator, and its ratio under dt halving.
ExperimentReport residual_experiment(const Problem& problem, const SolverConfig& config,
                                     const ResidualOptions& options);

struct LadderOptions {
    EnsembleOptions ensemble;
    State initial;
    std::vector<double> levels{1.0, 2.0, 4.0, 8.0};
};

/// Truncation ladder on every path: bitwise agreement of neighbouring levels
/// up to the earlier exit, and rho_n nondecreasing in n.
ExperimentReport ladder_experiment(const Problem& problem, const SolverConfig& config, const LadderOptions& options);

struct Est2Options {
    std::size_t forcings = 20;
    std::size_t steps = 400;
    double dt = 1e-3;
    double max_amplitude = 5.0;
    std::uint64_t seed = 42;
};

/// est2_bound_check on random bounded forcings, for every component with (F2) constants.
ExperimentReport est2_experiment(const Problem& problem, const Est2Options& options);

struct ConvergenceOptions {
    EnsembleOptions ensemble;
    State initial;
    /// dt, dt/2, ..., dt/2^refinements.
    unsigned refinements = 3;
    double target_order = 1.0;
    double order_tolerance = 0.3;
    /// Heat decay check: uniform a on [0, L] with `heat_cells` cells.
    double heat_a = 1.0;
    double heat_length = 1.0;
    std::size_t heat_cells = 64;
    double heat_dt = 1e-4;
    double heat_time = 0.5;
    double heat_tolerance = 0.02;
};

/// Self-convergence of the final state under dyadic dt refinement on one
/// path, plus the decay rate of the first cosine mode under pure diffusion
/// against a pi^2 / L^2.
ExperimentReport convergence_experiment(const Problem& problem, const SolverConfig& config,
                                        const ConvergenceOptions& options);

/// Osgood verdicts for s, s^2, s(1 + ln(1/s)), 1 and sqrt(s), and I(1e-6) for rho = s.
ExperimentReport osgood_suite();

/// Operator invariants: symmetry, kernel, spectrum sign, contraction, positivity,
/// and boundedness of t^{d/2} sup|S(t) f| for a unit-mass spike f.
ExperimentReport operator_suite(const std::vector<EllipticOperator>& operators, std::uint64_t seed,
                                std::size_t trials = 1000);

/// Reaction certificates, dissipativity margins and quasi positivity.
ExperimentReport reaction_suite(const ReactionSystem& reaction, std::uint64_t seed, std::size_t samples = 1000);

/// Basis orthonormality, Hölder audits and Osgood verdicts per component.
ExperimentReport noise_suite(const DomainGrid& grid, const NoiseModel& noise, double radius);

/// a_n for rho(s) = C s against exp(-C n(n+1)/2) and the phi sandwich.
ExperimentReport mollifier_suite(double C, std::size_t n_max, std::size_t probes = 10000);

}  // namespace srd
