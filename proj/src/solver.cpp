#include "srd/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "srd/digest.hpp"
#include "srd/error.hpp"

namespace srd {

Problem Problem::make(std::vector<EllipticOperator> operators, ReactionSystem reaction, NoiseModel noise)
{
    if (operators.empty()) {
        throw ConfigError("components", "a problem needs at least one component");
    }
    const DomainGrid grid = operators.front().grid();
    for (const auto& op : operators) {
        if (!(op.grid() == grid)) {
            throw ConfigError("grid", "all components must share one grid");
        }
    }
    const std::size_t r = operators.size();
    if (reaction.components() != r) {
        throw ConfigError("components", "reaction has " + std::to_string(reaction.components()) +
                                            " components, operators " + std::to_string(r));
    }
    if (noise.components() != r) {
        throw ConfigError("components", "noise has " + std::to_string(noise.components()) +
                                            " components, operators " + std::to_string(r));
    }
    for (std::size_t l = 0; l < r; ++l) {
        const auto& c = noise.component(l);
        for (std::size_t k = 0; k < c.modes(); ++k) {
            if (static_cast<std::size_t>(c.basis().mode(k).size()) != grid.size()) {
                throw ConfigError("shape", "noise basis of component " + std::to_string(l) +
                                               " does not match the grid");
            }
        }
    }
    return Problem{grid, std::move(operators), std::move(reaction), std::move(noise)};
}

std::uint64_t Problem::digest() const
{
    Fnv1a h;
    h.u64(static_cast<std::uint64_t>(grid.dim()));
    for (int a = 0; a < grid.dim(); ++a) {
        h.f64(grid.extent(a)).u64(static_cast<std::uint64_t>(grid.cells(a)));
    }
    for (const auto& op : operators) {
        const auto& m = op.matrix();
        for (int k = 0; k < m.outerSize(); ++k) {
            for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
                h.u64(static_cast<std::uint64_t>(it.row())).u64(static_cast<std::uint64_t>(it.col())).f64(it.value());
            }
        }
    }
    for (std::size_t l = 0; l < components(); ++l) {
        const auto& d = reaction.drift(l);
        for (std::size_t row = 0; row < d.rows(); ++row) {
            for (double w : d.coefficients(row)) {
                h.f64(w);
            }
        }
        h.text(reaction.coupling(l).name);
    }
    h.f64(reaction.truncation_level().value_or(-1.0));
    for (std::size_t l = 0; l < noise.components(); ++l) {
        const auto& c = noise.component(l);
        h.text(c.g().name);
        for (std::size_t k = 0; k < c.modes(); ++k) {
            h.f64(c.lambdas()[k]);
            for (double e : c.basis().mode(k)) {
                h.f64(e);
            }
        }
        h.f64(c.truncation_level().value_or(-1.0));
    }
    return h.value();
}

bool Trajectory::operator==(const Trajectory& other) const
{
    if (dt != other.dt || steps != other.steps || times != other.times || states.size() != other.states.size()) {
        return false;
    }
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i].size() != other.states[i].size()) {
            return false;
        }
        for (std::size_t l = 0; l < states[i].size(); ++l) {
            const auto& a = states[i][l];
            const auto& b = other.states[i][l];
            if (a.size() != b.size() || std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) != 0) {
                return false;
            }
        }
    }
    return stopping.triggered == other.stopping.triggered && stopping.level == other.stopping.level &&
           stopping.step == other.stopping.step && stopping.time == other.stopping.time &&
           provenance.seed == other.provenance.seed && provenance.config_digest == other.provenance.config_digest &&
           provenance.problem_digest == other.provenance.problem_digest;
}

Stepper::Stepper(const Problem& problem, const SolverConfig& config) : problem_(&problem), config_(config)
{
    if (!(config.dt > 0.0) || !std::isfinite(config.dt)) {
        throw ConfigError("dt", "time step must be positive");
    }
    for (const auto& op : problem.operators) {
        propagators_.emplace_back(op, config.dt, config.solve);
    }
}

State Stepper::advance(const State& u, const IncrementTable& table, std::size_t step) const
{
    std::vector<std::span<const double>> incr;
    for (std::size_t l = 0; l < problem_->components(); ++l) {
        incr.push_back(table.at(step, l));
    }
    return advance_impl(u, incr);
}

State Stepper::advance(const State& u, std::span<const std::vector<double>> increments) const
{
    if (increments.size() != problem_->components()) {
        throw ConfigError("components", "one increment vector per component required");
    }
    std::vector<std::span<const double>> incr(increments.begin(), increments.end());
    return advance_impl(u, incr);
}

State Stepper::advance_impl(const State& u, const std::vector<std::span<const double>>& incr) const
{
    const auto& p = *problem_;
    const double dt = config_.dt;
    State F = evaluate_reaction(p.reaction, u);
    if (config_.scheme == Scheme::tamed) {
        for (auto& f : F) {
            f /= 1.0 + dt * sup_norm(f);
        }
    }
    State next(u.size());
    for (std::size_t l = 0; l < u.size(); ++l) {
        const auto& noise = p.noise.component(l);
        if (incr[l].size() < noise.modes()) {
            throw ConfigError("noise", "component " + std::to_string(l) + " needs " + std::to_string(noise.modes()) +
                                           " increments");
        }
        const Field dW = apply_noise(p.noise, l, u[l], incr[l].first(noise.modes()));
        const Field rhs = u[l] + dt * F[l] + dW;
        next[l] = propagators_[l].apply(rhs);
    }
    return next;
}

State step(const Problem& problem, const SolverConfig& config, const State& u,
           std::span<const std::vector<double>> increments)
{
    return Stepper(problem, config).advance(u, increments);
}

std::size_t step_count(const SolverConfig& config)
{
    if (!(config.dt > 0.0) || !(config.t_end >= 0.0)) {
        throw ConfigError("dt", "need dt > 0 and t_end >= 0");
    }
    return static_cast<std::size_t>(std::ceil(config.t_end / config.dt - 1e-9));
}

namespace {

void check_state(const Problem& problem, const State& u)
{
    if (u.size() != problem.components()) {
        throw ConfigError("components", "initial state has " + std::to_string(u.size()) + " components, expected " +
                                            std::to_string(problem.components()));
    }
    for (const auto& f : u) {
        if (static_cast<std::size_t>(f.size()) != problem.grid.size()) {
            throw ConfigError("shape", "initial field does not match the grid");
        }
    }
}

bool finite(const State& u)
{
    return std::all_of(u.begin(), u.end(), [](const Field& f) { return f.allFinite(); });
}

IncrementTable path_view(const Problem& problem, const WienerPath& path, double dt, std::size_t steps)
{
    if (path.components() < problem.components()) {
        throw ConfigError("path", "path has " + std::to_string(path.components()) + " components, problem " +
                                      std::to_string(problem.components()));
    }
    if (path.modes() < problem.noise.modes()) {
        throw ConfigError("path", "path has " + std::to_string(path.modes()) + " modes, noise needs " +
                                      std::to_string(problem.noise.modes()));
    }
    return path.coarse(path.level_for(dt), steps);
}

bool same_state(const State& a, const State& b)
{
    for (std::size_t l = 0; l < a.size(); ++l) {
        if (std::memcmp(a[l].data(), b[l].data(), sizeof(double) * static_cast<std::size_t>(a[l].size())) != 0) {
            return false;
        }
    }
    return true;
}

}  // namespace

Trajectory simulate(const Problem& problem, const SolverConfig& config, const WienerPath& path,
                    const State& initial)
{
    check_state(problem, initial);
    if (config.stride < 1) {
        throw ConfigError("stride", "stride must be at least 1");
    }
    const std::size_t n = step_count(config);
    const IncrementTable table = path_view(problem, path, config.dt, n);
    const Stepper stepper(problem, config);

    Trajectory traj;
    traj.dt = config.dt;
    traj.provenance.seed = path.seed();
    traj.provenance.problem_digest = Fnv1a::to_hex(problem.digest());

    auto exceeded = [&](const State& u) -> std::optional<double> {
        if (max_component_sup(u) > config.sup_cap) {
            return config.sup_cap;
        }
        if (config.ladder_level && state_norm(u) > *config.ladder_level) {
            return *config.ladder_level;
        }
        return std::nullopt;
    };
    auto store = [&](std::size_t i, const State& u) {
        traj.steps.push_back(i);
        traj.times.push_back(static_cast<double>(i) * config.dt);
        traj.states.push_back(u);
    };

    if (!finite(initial)) {
        throw SolverError("non-finite", "initial state is not finite");
    }
    State u = initial;
    store(0, u);
    std::size_t i = 0;
    std::optional<double> hit = exceeded(u);
    while (!hit && i < n) {
        u = stepper.advance(u, table, i);
        ++i;
        if (!finite(u)) {
            throw SolverError("non-finite", "non-finite state at step " + std::to_string(i) + " (t=" +
                                                std::to_string(static_cast<double>(i) * config.dt) + ")");
        }
        hit = exceeded(u);
        if (hit || i == n || i % config.stride == 0) {
            store(i, u);
        }
    }
    traj.stopping.triggered = hit.has_value();
    traj.stopping.level = hit.value_or(0.0);
    traj.stopping.step = i;
    traj.stopping.time = hit ? static_cast<double>(i) * config.dt : config.t_end;
    return traj;
}

Problem truncate_problem(const Problem& problem, double n)
{
    if (!(n >= 1.0)) {
        throw ConfigError("truncation", "truncation level must be at least 1");
    }
    Problem p = problem;
    p.reaction = problem.reaction.truncated(n);
    p.noise = problem.noise.truncated(n);
    return p;
}

LadderResult glue_ladder(const Problem& problem, const SolverConfig& config, const WienerPath& path,
                         const State& initial, std::span<const double> levels)
{
    if (levels.empty()) {
        throw ConfigError("levels", "ladder needs at least one level");
    }
    for (std::size_t j = 1; j < levels.size(); ++j) {
        if (!(levels[j] > levels[j - 1])) {
            throw ConfigError("levels", "ladder levels must increase");
        }
    }
    const std::size_t n = step_count(config);
    SolverConfig cfg = config;
    cfg.stride = 1;

    LadderResult res;
    std::vector<Trajectory> runs;
    for (double level : levels) {
        cfg.ladder_level = level;
        runs.push_back(simulate(truncate_problem(problem, level), cfg, path, initial));
        const auto& st = runs.back().stopping;
        res.report.levels.push_back(level);
        res.report.exited.push_back(st.triggered);
        res.report.exit_steps.push_back(st.triggered ? st.step : n);
    }
    for (std::size_t j = 1; j < runs.size(); ++j) {
        const std::size_t upto = std::min(res.report.exit_steps[j - 1], res.report.exit_steps[j]);
        for (std::size_t i = 0; i <= upto && i < runs[j - 1].states.size() && i < runs[j].states.size(); ++i) {
            if (!same_state(runs[j - 1].states[i], runs[j].states[i])) {
                throw SolverError("ladder", "levels " + std::to_string(levels[j - 1]) + " and " +
                                                std::to_string(levels[j]) + " disagree at step " + std::to_string(i));
            }
        }
        if (res.report.exit_steps[j] < res.report.exit_steps[j - 1]) {
            res.report.monotone = false;
        }
    }

    const std::size_t last = *std::max_element(res.report.exit_steps.begin(), res.report.exit_steps.end());
    Trajectory& g = res.glued;
    g.dt = config.dt;
    g.provenance.seed = path.seed();
    g.provenance.problem_digest = Fnv1a::to_hex(problem.digest());
    const std::size_t stride = std::max<std::size_t>(config.stride, 1);
    for (std::size_t i = 0; i <= last; ++i) {
        if (i % stride != 0 && i != last) {
            continue;
        }
        for (std::size_t j = 0; j < runs.size(); ++j) {
            if (res.report.exit_steps[j] >= i && i < runs[j].states.size()) {
                g.steps.push_back(i);
                g.times.push_back(static_cast<double>(i) * config.dt);
                g.states.push_back(runs[j].states[i]);
                break;
            }
        }
    }
    const bool all_exited =
        std::all_of(res.report.exited.begin(), res.report.exited.end(), [](bool e) { return e; });
    g.stopping.triggered = all_exited;
    g.stopping.level = all_exited ? levels.back() : 0.0;
    g.stopping.step = last;
    g.stopping.time = all_exited ? static_cast<double>(last) * config.dt : config.t_end;
    return res;
}

std::vector<double> mild_residual(const Problem& problem, const Trajectory& traj, const WienerPath& path,
                                  std::span<const double> probe_times, unsigned ref_level, SolveOptions solve)
{
    for (std::size_t i = 0; i < traj.steps.size(); ++i) {
        if (traj.steps[i] != i) {
            throw ConfigError("stride", "mild residual needs every step stored");
        }
    }
    if (traj.states.empty()) {
        throw ConfigError("probe", "empty trajectory");
    }
    const unsigned level = path.level_for(traj.dt);
    if (ref_level > level) {
        throw ConfigError("dt", "reference step is coarser than the trajectory step");
    }
    const std::size_t q = std::size_t{1} << (level - ref_level);
    const double dt_ref = std::ldexp(path.dt_fine(), static_cast<int>(ref_level));
    const std::size_t last_stored = traj.steps.back();

    std::vector<std::size_t> probes;
    for (double t : probe_times) {
        const double x = t / traj.dt;
        const auto p = static_cast<std::size_t>(std::llround(x));
        if (!(t >= 0.0) || std::abs(x - static_cast<double>(p)) > 1e-9 * std::max(1.0, x)) {
            throw ConfigError("probe", "probe time " + std::to_string(t) + " is not on the step grid");
        }
        if (p > last_stored) {
            throw ConfigError("probe", "probe time " + std::to_string(t) + " lies beyond the stopping time");
        }
        probes.push_back(p);
    }
    if (probes.empty()) {
        return {};
    }
    const std::size_t max_p = *std::max_element(probes.begin(), probes.end());
    const IncrementTable table = path_view(problem, path, dt_ref, max_p * q);

    std::vector<ImplicitPropagator> R;
    for (const auto& op : problem.operators) {
        R.emplace_back(op, dt_ref, solve);
    }
    const std::size_t r = problem.components();
    std::vector<double> at_step(max_p + 1, 0.0);
    State acc = traj.states[0];
    for (std::size_t i = 0; i < max_p; ++i) {
        const State& u = traj.states[i];
        const State F = evaluate_reaction(problem.reaction, u);
        for (std::size_t j = 0; j < q; ++j) {
            for (std::size_t l = 0; l < r; ++l) {
                const auto& noise = problem.noise.component(l);
                const Field dW = apply_noise(problem.noise, l, u[l], table.at(i * q + j, l).first(noise.modes()));
                const Field rhs = acc[l] + dt_ref * F[l] + dW;
                acc[l] = R[l].apply(rhs);
            }
        }
        double d = 0.0;
        for (std::size_t l = 0; l < r; ++l) {
            d = std::max(d, sup_norm(acc[l] - traj.states[i + 1][l]));
        }
        at_step[i + 1] = d;
    }
    std::vector<double> out;
    for (std::size_t p : probes) {
        out.push_back(at_step[p]);
    }
    return out;
}

}  // namespace srd
