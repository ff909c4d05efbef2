#include "srd/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "srd/digest.hpp"
#include "srd/error.hpp"
#include "srd/mollifier.hpp"
#include "srd/quadrature.hpp"
#include "srd/random.hpp"

namespace srd {

namespace {

struct MeanStat {
    double mean = 0.0;
    double se = 0.0;
    std::size_t n = 0;
    double upper95() const { return mean + 1.96 * se; }
};

MeanStat mean_stat(const std::vector<double>& xs)
{
    MeanStat s;
    s.n = xs.size();
    if (xs.empty()) {
        s.mean = std::numeric_limits<double>::quiet_NaN();
        return s;
    }
    double sum = 0.0;
    for (double x : xs) {
        sum += x;
    }
    s.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) {
            ss += (x - s.mean) * (x - s.mean);
        }
        s.se = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
    }
    return s;
}

State shifted(const State& u, double eps)
{
    State out = u;
    for (auto& f : out) {
        f.array() += eps;
    }
    return out;
}

bool same_fields(const State& a, const State& b)
{
    for (std::size_t l = 0; l < a.size(); ++l) {
        if (a[l].size() != b[l].size() ||
            std::memcmp(a[l].data(), b[l].data(), sizeof(double) * static_cast<std::size_t>(a[l].size())) != 0) {
            return false;
        }
    }
    return true;
}

double min_over(const Trajectory& traj)
{
    double m = std::numeric_limits<double>::infinity();
    for (const auto& st : traj.states) {
        for (const auto& f : st) {
            m = std::min(m, f.minCoeff());
        }
    }
    return m;
}

double sup_over(const Trajectory& traj)
{
    double m = 0.0;
    for (const auto& st : traj.states) {
        m = std::max(m, state_norm(st));
    }
    return m;
}

void check_initial(const Problem& problem, const State& initial)
{
    if (initial.size() != problem.components()) {
        throw ConfigError("initial", "initial state needs " + std::to_string(problem.components()) + " components");
    }
}

Json provenance_of(const Problem& problem, const EnsembleOptions& ens)
{
    Json p;
    p["problem_digest"] = Fnv1a::to_hex(problem.digest());
    p["master_seed"] = ens.master_seed;
    p["paths"] = ens.paths;
    return p;
}

}  // namespace

Json ExperimentReport::to_json() const
{
    Json j;
    j["name"] = name;
    j["pass"] = pass;
    j["parameters"] = parameters;
    j["statistics"] = statistics;
    j["verdicts"] = verdicts;
    j["provenance"] = provenance;
    Json names = Json::array();
    for (const auto& t : tables) {
        names.push_back(t.name + ".csv");
    }
    j["tables"] = names;
    return j;
}

void write_csv(const std::filesystem::path& path, const Table& table)
{
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("output", "cannot write " + path.string());
    }
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        out << (c ? "," : "") << table.columns[c];
    }
    out << '\n' << std::setprecision(17);
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            out << (c ? "," : "") << row[c];
        }
        out << '\n';
    }
}

void ExperimentReport::write(const std::filesystem::path& dir) const
{
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / "report.json");
    if (!out) {
        throw ConfigError("output", "cannot write " + (dir / "report.json").string());
    }
    out << to_json().dump(2) << '\n';
    for (const auto& t : tables) {
        write_csv(dir / (t.name + ".csv"), t);
    }
}

WienerPath ensemble_path(const Problem& problem, const SolverConfig& config, const EnsembleOptions& ens,
                         std::size_t index)
{
    if (!(ens.dt_fine > 0.0)) {
        throw ConfigError("dt", "dt_fine must be positive");
    }
    const double ratio = config.dt / ens.dt_fine;
    const double level = std::round(std::log2(ratio));
    if (level < 0.0 || std::abs(std::ldexp(ens.dt_fine, static_cast<int>(level)) - config.dt) > 1e-12 * config.dt) {
        throw ConfigError("dt", "dt " + std::to_string(config.dt) + " is not a power-of-two multiple of dt_fine " +
                                    std::to_string(ens.dt_fine));
    }
    const std::size_t n_fine = step_count(config) << static_cast<int>(level);
    return WienerPath(derive_seed(ens.master_seed, index), problem.components(), problem.noise.modes(),
                      std::max<std::size_t>(n_fine, 1), ens.dt_fine);
}

double l1_distance(const DomainGrid& grid, const State& u, const State& w)
{
    double d = 0.0;
    for (std::size_t l = 0; l < u.size(); ++l) {
        d += (u[l] - w[l]).cwiseAbs().sum();
    }
    return d * grid.cell_volume();
}

ExperimentReport uniqueness_experiment(const Problem& problem, const SolverConfig& config,
                                       const UniquenessOptions& options)
{
    check_initial(problem, options.initial);
    for (std::size_t j = 1; j < options.eps_list.size(); ++j) {
        if (!(options.eps_list[j] < options.eps_list[j - 1])) {
            throw ConfigError("eps", "eps_list must decrease");
        }
    }
    const auto& ens = options.ensemble;
    const std::size_t E = options.eps_list.size();
    const std::size_t R = options.refinements;
    if (config.dt / std::ldexp(1.0, static_cast<int>(R)) < ens.dt_fine * (1.0 - 1e-12)) {
        throw ConfigError("dt", "dt / 2^refinements is finer than dt_fine");
    }

    struct PathResult {
        bool exited = false;
        bool twin_identical = true;
        double max_sup = 0.0;
        std::vector<std::vector<double>> D;  // per eps, per stored time
        std::vector<double> gaps;
        bool cauchy_exited = false;
    };
    std::vector<double> times;
    {
        // Stored times are identical across paths unless a path exits.
        const std::size_t n = step_count(config);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i % std::max<std::size_t>(config.stride, 1) == 0 || i == n) {
                times.push_back(static_cast<double>(i) * config.dt);
            }
        }
    }

    auto job = [&](std::size_t p) {
        PathResult res;
        const WienerPath path = ensemble_path(problem, config, ens, p);
        const Trajectory base = simulate(problem, config, path, options.initial);
        res.exited = base.stopping.triggered;
        res.max_sup = sup_over(base);
        if (p < options.twin_paths) {
            const Trajectory twin = simulate(problem, config, path, shifted(options.initial, 0.0));
            res.twin_identical = twin == base;
        }
        for (double eps : options.eps_list) {
            const Trajectory pert = simulate(problem, config, path, shifted(options.initial, eps));
            res.exited = res.exited || pert.stopping.triggered;
            res.max_sup = std::max(res.max_sup, sup_over(pert));
            std::vector<double> d;
            const std::size_t len = std::min(base.states.size(), pert.states.size());
            for (std::size_t i = 0; i < len; ++i) {
                d.push_back(l1_distance(problem.grid, base.states[i], pert.states[i]));
            }
            res.D.push_back(std::move(d));
        }
        std::vector<State> finals;
        for (std::size_t j = 0; R > 0 && j <= R; ++j) {
            SolverConfig c = config;
            c.dt = config.dt / std::ldexp(1.0, static_cast<int>(j));
            c.stride = std::numeric_limits<std::size_t>::max();
            const Trajectory t = simulate(problem, c, path, options.initial);
            res.cauchy_exited = res.cauchy_exited || t.stopping.triggered;
            finals.push_back(t.states.back());
        }
        for (std::size_t j = 0; j < R; ++j) {
            double g = 0.0;
            for (std::size_t l = 0; l < finals[j].size(); ++l) {
                g = std::max(g, sup_norm(finals[j][l] - finals[j + 1][l]));
            }
            res.gaps.push_back(g);
        }
        return res;
    };
    const auto results = run_indexed<PathResult>(ens.paths, ens.workers, job);

    ExperimentReport rep;
    rep.name = "uniqueness";
    rep.provenance = provenance_of(problem, ens);
    rep.parameters = {{"eps_list", options.eps_list}, {"dt", config.dt},           {"t_end", config.t_end},
                      {"sup_cap", std::isfinite(config.sup_cap) ? Json(config.sup_cap) : Json("inf")},
                      {"slack", options.slack},       {"refinements", R},          {"twin_paths", options.twin_paths},
                      {"dt_fine", ens.dt_fine}};

    std::size_t exits = 0;
    bool twins = true;
    double max_sup = 0.0;
    for (const auto& r : results) {
        exits += r.exited ? 1 : 0;
        twins = twins && r.twin_identical;
        max_sup = std::max(max_sup, r.max_sup);
    }
    const double exit_fraction = results.empty() ? 0.0 : static_cast<double>(exits) / static_cast<double>(results.size());
    rep.statistics["exit_fraction"] = exit_fraction;
    if (exit_fraction > options.max_exit_fraction) {
        throw SolverError("cap exits", "sup cap left on " + std::to_string(exits) + " of " +
                                           std::to_string(results.size()) + " paths");
    }
    const double m = std::isfinite(config.sup_cap) ? config.sup_cap : max_sup;
    const double r = static_cast<double>(problem.components());
    const double L = problem.reaction.coupling_lipschitz(m);
    rep.statistics["L_m"] = L;
    rep.statistics["rate"] = r * L;
    rep.verdict("twins_identical", twins);

    Table dtab{"distance", {"time"}, {}};
    for (double eps : options.eps_list) {
        std::ostringstream tag;
        tag << eps;
        for (const char* col : {"mean_", "upper95_", "envelope_"}) {
            dtab.columns.push_back(col + tag.str());
        }
    }
    std::vector<std::vector<MeanStat>> stats(E);
    for (std::size_t e = 0; e < E; ++e) {
        for (std::size_t i = 0; i < times.size(); ++i) {
            std::vector<double> xs;
            for (const auto& res : results) {
                if (!res.exited && i < res.D[e].size()) {
                    xs.push_back(res.D[e][i]);
                }
            }
            stats[e].push_back(mean_stat(xs));
        }
    }
    bool envelope_ok = true;
    double worst_ratio = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        std::vector<double> row{times[i]};
        for (std::size_t e = 0; e < E; ++e) {
            const double D0 = stats[e][0].mean;
            const double env = D0 * std::exp(r * L * times[i]) * (1.0 + options.slack);
            const auto& s = stats[e][i];
            row.insert(row.end(), {s.mean, s.upper95(), env});
            if (s.n > 0) {
                envelope_ok = envelope_ok && s.upper95() <= env;
                worst_ratio = std::max(worst_ratio, s.upper95() / env);
            }
        }
        dtab.rows.push_back(std::move(row));
    }
    rep.statistics["worst_upper95_over_envelope"] = worst_ratio;
    rep.verdict("gronwall_envelope", envelope_ok);

    Table etab{"eps_summary", {"eps", "mean_D0", "mean_DT", "upper95_DT", "ratio_to_previous"}, {}};
    bool monotone = true;
    std::vector<double> ratios;
    for (std::size_t e = 0; e < E; ++e) {
        const auto& sT = stats[e].back();
        double ratio = std::numeric_limits<double>::quiet_NaN();
        if (e > 0) {
            ratio = sT.mean / stats[e - 1].back().mean;
            ratios.push_back(ratio);
            monotone = monotone && sT.mean < stats[e - 1].back().mean;
        }
        etab.rows.push_back({options.eps_list[e], stats[e][0].mean, sT.mean, sT.upper95(), ratio});
    }
    rep.statistics["decade_ratios"] = ratios;
    rep.verdict("decreasing_in_eps", monotone);

    Table ctab{"cauchy_gaps", {"path"}, {}};
    for (std::size_t j = 0; j < R; ++j) {
        ctab.columns.push_back("gap_" + std::to_string(j));
    }
    ctab.columns.push_back("monotone");
    std::size_t cauchy_n = 0, cauchy_ok = 0;
    for (std::size_t p = 0; p < results.size(); ++p) {
        const auto& res = results[p];
        bool mono = true;
        for (std::size_t j = 1; j < res.gaps.size(); ++j) {
            mono = mono && res.gaps[j] < res.gaps[j - 1];
        }
        std::vector<double> row{static_cast<double>(p)};
        row.insert(row.end(), res.gaps.begin(), res.gaps.end());
        row.push_back(mono ? 1.0 : 0.0);
        ctab.rows.push_back(std::move(row));
        if (!res.cauchy_exited) {
            ++cauchy_n;
            cauchy_ok += mono ? 1 : 0;
        }
    }
    rep.tables = {std::move(dtab), std::move(etab)};
    if (R == 0) {
        return rep;
    }
    const double cauchy_fraction = cauchy_n ? static_cast<double>(cauchy_ok) / static_cast<double>(cauchy_n) : 0.0;
    rep.statistics["cauchy_monotone_fraction"] = cauchy_fraction;
    rep.verdict("cauchy_refinement", cauchy_fraction >= options.cauchy_fraction);
    rep.tables.push_back(std::move(ctab));
    return rep;
}

void check_positivity_preconditions(const Problem& problem, const State& initial, std::size_t samples, double radius)
{
    const auto qp = check_quasi_positive(problem.reaction, samples, radius);
    if (!qp.pass) {
        std::ostringstream msg;
        msg << "reaction is not quasi positive";
        if (qp.witness) {
            msg << ": component " << qp.witness->component << " takes " << qp.witness->value << " at (";
            for (std::size_t j = 0; j < qp.witness->point.size(); ++j) {
                msg << (j ? ", " : "") << qp.witness->point[j];
            }
            msg << ")";
        }
        throw AuditError("quasi-positivity", msg.str());
    }
    if (!problem.noise.vanishes_at_zero()) {
        throw AuditError("g(0)≠0", "positivity needs noise coefficients with g(0) = 0");
    }
    for (const auto& f : initial) {
        if (f.size() > 0 && f.minCoeff() < 0.0) {
            throw ConfigError("initial", "positivity needs nonnegative initial data");
        }
    }
}

ReactionSystem negative_control_reaction(std::size_t components)
{
    if (components < 2) {
        throw ConfigError("components", "the negative control needs at least two components");
    }
    std::vector<PolynomialDrift> drifts(components, PolynomialDrift::zero());
    std::vector<CouplingTerm> couplings(components, CouplingTerm::none());
    std::vector<double> w(components, 0.0);
    w[1] = -1.0;
    couplings[0] = CouplingTerm::linear(w);
    return ReactionSystem::certify(std::move(drifts), std::move(couplings));
}

ExperimentReport positivity_experiment(const Problem& problem, const SolverConfig& config,
                                       const PositivityOptions& options)
{
    check_initial(problem, options.initial);
    check_positivity_preconditions(problem, options.initial, options.qp_samples, options.qp_radius);
    const auto& ens = options.ensemble;

    double c_tol = 0.0;
    if (options.c_tol) {
        c_tol = *options.c_tol;
    } else {
        for (std::size_t l = 0; l < problem.noise.components(); ++l) {
            const auto& g = problem.noise.component(l).g();
            c_tol = std::max(c_tol, 10.0 * std::pow(std::max(g.growth_a, g.growth_b), 2));
        }
    }
    const double tol = c_tol * config.dt;

    SolverConfig full = config;
    full.stride = 1;
    SolverConfig half = full;
    half.dt = config.dt / 2.0;
    const bool run_half = options.dt_pair && half.dt >= ens.dt_fine * (1.0 - 1e-12);

    struct PathResult {
        double min_full = 0.0;
        double min_half = 0.0;
        bool exited = false;
    };
    auto job = [&](std::size_t p) {
        PathResult res;
        const WienerPath path = ensemble_path(problem, full, ens, p);
        const Trajectory t = simulate(problem, full, path, options.initial);
        res.min_full = min_over(t);
        res.exited = t.stopping.triggered;
        if (run_half) {
            res.min_half = min_over(simulate(problem, half, path, options.initial));
        }
        return res;
    };
    const auto results = run_indexed<PathResult>(ens.paths, ens.workers, job);

    ExperimentReport rep;
    rep.name = "positivity";
    rep.provenance = provenance_of(problem, ens);
    rep.parameters = {{"dt", config.dt}, {"t_end", config.t_end}, {"c_tol", c_tol}, {"tol", tol},
                      {"dt_fine", ens.dt_fine}};

    double gmin = std::numeric_limits<double>::infinity();
    double gmin_half = std::numeric_limits<double>::infinity();
    std::vector<double> over_full, over_half;
    Table tab{"paths", {"path", "min_dt", "min_half_dt"}, {}};
    std::size_t exits = 0;
    for (std::size_t p = 0; p < results.size(); ++p) {
        const auto& r = results[p];
        gmin = std::min(gmin, r.min_full);
        over_full.push_back(std::max(0.0, -r.min_full));
        if (run_half) {
            gmin_half = std::min(gmin_half, r.min_half);
            over_half.push_back(std::max(0.0, -r.min_half));
        }
        exits += r.exited ? 1 : 0;
        tab.rows.push_back({static_cast<double>(p), r.min_full, run_half ? r.min_half : std::nan("")});
    }
    rep.statistics["global_min"] = gmin;
    rep.statistics["exits"] = exits;
    rep.verdict("minimum_above_tolerance", gmin >= -tol);
    if (run_half) {
        const auto a = mean_stat(over_full);
        const auto b = mean_stat(over_half);
        rep.statistics["global_min_half_dt"] = gmin_half;
        rep.statistics["mean_overshoot"] = a.mean;
        rep.statistics["mean_overshoot_half_dt"] = b.mean;
        rep.verdict("overshoot_not_worse_at_half_dt",
                    b.mean <= a.mean + 1.96 * std::hypot(a.se, b.se) + std::numeric_limits<double>::min());
    }
    if (options.negative_control) {
        Problem control = problem;
        control.reaction = negative_control_reaction(problem.components());
        State init = options.initial;
        init[1].setConstant(options.control_v0);
        const std::size_t n_control = std::min<std::size_t>(ens.paths, 8);
        const auto mins = run_indexed<double>(n_control, ens.workers, [&](std::size_t p) {
            return min_over(simulate(control, full, ensemble_path(control, full, ens, p), init));
        });
        const double cmin = *std::min_element(mins.begin(), mins.end());
        rep.statistics["control_min"] = cmin;
        rep.verdict("negative_control_trips", cmin < -tol);
    }
    rep.tables.push_back(std::move(tab));
    return rep;
}

ExperimentReport moment_experiment(const Problem& problem, const SolverConfig& config, const MomentOptions& options)
{
    check_initial(problem, options.initial);
    if (!(options.p > 2.0)) {
        throw ConfigError("moments", "moment exponent must exceed 2");
    }
    if (options.levels.empty()) {
        throw ConfigError("levels", "need at least one truncation level");
    }
    for (std::size_t j = 1; j < options.levels.size(); ++j) {
        if (!(options.levels[j] > options.levels[j - 1])) {
            throw ConfigError("levels", "truncation levels must increase");
        }
    }
    const auto& ens = options.ensemble;
    const std::size_t L = options.levels.size();
    std::vector<Problem> truncated;
    for (double n : options.levels) {
        truncated.push_back(truncate_problem(problem, n));
    }
    SolverConfig cfg = config;
    cfg.stride = 1;

    struct PathResult {
        std::vector<double> sup;
        std::vector<bool> capped;
        bool below_first = false;
        bool bitwise = true;
    };
    auto job = [&](std::size_t p) {
        PathResult res;
        const WienerPath path = ensemble_path(problem, cfg, ens, p);
        std::vector<Trajectory> runs;
        for (std::size_t j = 0; j < L; ++j) {
            runs.push_back(simulate(truncated[j], cfg, path, options.initial));
            res.sup.push_back(sup_over(runs.back()));
            res.capped.push_back(runs.back().stopping.triggered);
        }
        res.below_first = res.sup[0] <= options.levels[0];
        if (res.below_first) {
            for (std::size_t j = 1; j < L; ++j) {
                const auto& a = runs[0];
                const auto& b = runs[j];
                bool same = a.states.size() == b.states.size() && res.sup[j] == res.sup[0];
                for (std::size_t i = 0; same && i < a.states.size(); ++i) {
                    same = same_fields(a.states[i], b.states[i]);
                }
                res.bitwise = res.bitwise && same;
            }
        }
        return res;
    };
    const auto results = run_indexed<PathResult>(ens.paths, ens.workers, job);

    ExperimentReport rep;
    rep.name = "moments";
    rep.provenance = provenance_of(problem, ens);
    rep.parameters = {{"p", options.p}, {"levels", options.levels}, {"dt", config.dt}, {"t_end", config.t_end},
                      {"tolerance", options.tolerance}, {"dt_fine", ens.dt_fine}};

    std::vector<bool> included(results.size(), true);
    std::size_t excluded = 0;
    for (std::size_t p = 0; p < results.size(); ++p) {
        for (bool c : results[p].capped) {
            included[p] = included[p] && !c;
        }
        excluded += included[p] ? 0 : 1;
    }
    Table tab{"moments", {"level", "m_n", "exit_fraction", "m_n_never_exiting_first"}, {}};
    std::vector<double> m(L), m_sub(L);
    std::size_t sub_count = 0;
    for (std::size_t j = 0; j < L; ++j) {
        double acc = 0.0, acc_sub = 0.0;
        std::size_t cnt = 0, exits = 0;
        sub_count = 0;
        for (std::size_t p = 0; p < results.size(); ++p) {
            const auto& r = results[p];
            exits += r.sup[j] > options.levels[j] ? 1 : 0;
            if (!included[p]) {
                continue;
            }
            acc += std::pow(r.sup[j], options.p);
            ++cnt;
            if (r.below_first) {
                acc_sub += std::pow(r.sup[j], options.p);
                ++sub_count;
            }
        }
        m[j] = cnt ? std::pow(acc / static_cast<double>(cnt), 1.0 / options.p) : std::nan("");
        m_sub[j] = sub_count ? std::pow(acc_sub / static_cast<double>(sub_count), 1.0 / options.p) : std::nan("");
        const double frac = results.empty() ? 0.0 : static_cast<double>(exits) / static_cast<double>(results.size());
        tab.rows.push_back({options.levels[j], m[j], frac, m_sub[j]});
    }
    rep.statistics["m_n"] = m;
    rep.statistics["excluded_paths"] = excluded;
    rep.statistics["never_exiting_first_level"] = sub_count;
    rep.statistics["exit_fraction_per_level"] = [&] {
        std::vector<double> f;
        for (const auto& row : tab.rows) {
            f.push_back(row[2]);
        }
        return f;
    }();

    double worst = 0.0;
    const double last = m[L - 1];
    for (std::size_t j = L / 2; j < L; ++j) {
        const double d = std::abs(m[j] - last);
        worst = std::max(worst, last > 0.0 ? d / last : d);
    }
    rep.statistics["top_half_relative_spread"] = worst;
    rep.verdict("stabilizes", worst <= options.tolerance);

    bool bitwise = true;
    for (const auto& r : results) {
        bitwise = bitwise && r.bitwise;
    }
    for (std::size_t j = 1; j < L && sub_count > 0; ++j) {
        bitwise = bitwise && std::memcmp(&m_sub[j], &m_sub[0], sizeof(double)) == 0;
    }
    rep.verdict("bitwise_on_never_exiting", bitwise);
    rep.tables.push_back(std::move(tab));
    return rep;
}

Est2Result est2_bound_check(const ReactionSystem& reaction, std::size_t l, const EllipticOperator& op,
                            const std::vector<Field>& forcing, double dt, SolveOptions solve)
{
    const auto& cert = reaction.certificate(l);
    if (!cert.f2) {
        throw ConfigError("est2", "component " + std::to_string(l) + " has no (F2) constants");
    }
    const double a = std::max(cert.f2->a2, -cert.f2->a1);
    const double b = std::min(cert.f2->b1, cert.f2->b2);
    const ImplicitPropagator R(op, dt, solve);
    const std::size_t cells = op.grid().size();

    Est2Result res;
    Field u = Field::Zero(static_cast<Eigen::Index>(cells));
    Field h(u.size());
    for (std::size_t i = 0; i < forcing.size(); ++i) {
        const Field& v = forcing[i];
        if (static_cast<std::size_t>(v.size()) != cells) {
            throw ConfigError("shape", "forcing field does not match the grid");
        }
        res.sup_v = std::max(res.sup_v, sup_norm(v));
        if (i + 1 == forcing.size()) {
            break;
        }
        for (std::size_t c = 0; c < cells; ++c) {
            const auto ci = static_cast<Eigen::Index>(c);
            h[ci] = reaction.drift_value(l, c, u[ci] + v[ci]);
        }
        const Field rhs = u + dt * h;
        u = R.apply(rhs);
        if (!u.allFinite()) {
            throw SolverError("fixed point", "iteration diverged at step " + std::to_string(i + 1));
        }
        res.sup_u = std::max(res.sup_u, sup_norm(u));
    }
    const double k = 1.0 / (2.0 * cert.N + 1.0);
    res.bound = (b > 0.0 ? std::pow(4.0 * a / b, k) : std::numeric_limits<double>::infinity()) * (1.0 + res.sup_v);
    res.margin = res.bound - res.sup_u;
    return res;
}

ExperimentReport residual_experiment(const Problem& problem, const SolverConfig& config,
                                     const ResidualOptions& options)
{
    check_initial(problem, options.initial);
    const auto& ens = options.ensemble;
    const std::size_t levels = options.refinements + 1;
    if (options.coarse_level < options.refinements + 1) {
        throw ConfigError("dt", "the finest residual dt must stay above dt_fine");
    }
    SolverConfig base = config;
    base.t_end = options.probe_time;
    base.stride = 1;
    const std::size_t paths = problem.noise.components() > 0 && problem.noise.modes() > 0 ? ens.paths : 1;

    auto job = [&](std::size_t p) {
        std::vector<double> res;
        SolverConfig c0 = base;
        c0.dt = std::ldexp(ens.dt_fine, static_cast<int>(options.coarse_level));
        const WienerPath path = ensemble_path(problem, c0, ens, p);
        const double probe[] = {options.probe_time};
        for (std::size_t j = 0; j < levels; ++j) {
            SolverConfig c = base;
            c.dt = std::ldexp(ens.dt_fine, static_cast<int>(options.coarse_level - j));
            const Trajectory t = simulate(problem, c, path, options.initial);
            res.push_back(mild_residual(problem, t, path, probe, 0, config.solve).front());
        }
        return res;
    };
    const auto results = run_indexed<std::vector<double>>(paths, ens.workers, job);

    ExperimentReport rep;
    rep.name = "residual";
    rep.provenance = provenance_of(problem, ens);
    rep.parameters = {{"probe_time", options.probe_time}, {"coarse_level", options.coarse_level},
                      {"refinements", options.refinements}, {"target_ratio", options.target_ratio},
                      {"ratio_tolerance", options.ratio_tolerance}, {"dt_fine", ens.dt_fine}, {"paths", paths}};
    Table tab{"residuals", {"dt", "mean_residual"}, {}};
    std::vector<double> means(levels, 0.0);
    for (std::size_t j = 0; j < levels; ++j) {
        for (const auto& r : results) {
            means[j] += r[j];
        }
        means[j] /= static_cast<double>(results.size());
        tab.rows.push_back({std::ldexp(ens.dt_fine, static_cast<int>(options.coarse_level - j)), means[j]});
    }
    std::vector<double> ratios;
    bool ok = true;
    for (std::size_t j = 1; j < levels; ++j) {
        ratios.push_back(means[j] / means[j - 1]);
        ok = ok && std::abs(ratios.back() - options.target_ratio) <= options.ratio_tolerance;
    }
    rep.statistics["mean_residuals"] = means;
    rep.statistics["ratios"] = ratios;
    rep.verdict("refinement_ratio", ok);
    rep.tables.push_back(std::move(tab));
    return rep;
}

ExperimentReport operator_suite(const std::vector<EllipticOperator>& operators, std::uint64_t seed,
                                std::size_t trials)
{
    ExperimentReport rep;
    rep.name = "operator";
    rep.parameters = {{"trials", trials}, {"seed", seed}};
    AuditRng rng(seed);
    for (std::size_t l = 0; l < operators.size(); ++l) {
        const auto& op = operators[l];
        const auto& grid = op.grid();
        const std::string tag = "component_" + std::to_string(l) + "_";
        double h = grid.spacing(0);
        for (int a = 1; a < grid.dim(); ++a) {
            h = std::min(h, grid.spacing(a));
        }
        const double inv_h2 = 1.0 / (h * h);
        const SparseMatrix& M = op.matrix();
        const SparseMatrix T = M.transpose();
        const double scale = Eigen::MatrixXd(M).cwiseAbs().maxCoeff();
        const double asym = Eigen::MatrixXd(M - T).cwiseAbs().maxCoeff();
        rep.statistics[tag + "asymmetry"] = asym / scale;
        rep.verdict(tag + "symmetric", asym <= 1e-12 * scale);

        const auto& cf = op.coefficients();
        const bool c_zero = std::all_of(cf.c.begin(), cf.c.end(), [](double c) { return c == 0.0; });
        if (c_zero) {
            const double k = sup_norm(op.apply(grid.constant(1.0)));
            rep.statistics[tag + "kernel_residual"] = k;
            rep.verdict(tag + "constant_kernel", k <= 1e-12 * inv_h2);
        }
        if (!cf.nonnegative_c()) {
            continue;
        }
        if (grid.size() <= 512) {
            const Eigen::VectorXd spec = operator_spectrum(op);
            rep.statistics[tag + "max_eigenvalue"] = spec.maxCoeff();
            rep.verdict(tag + "dissipative", spec.maxCoeff() <= 1e-10 * inv_h2);
            if (l == 0) {
                Table t{"spectrum", {"index", "eigenvalue"}, {}};
                for (Eigen::Index i = 0; i < spec.size(); ++i) {
                    t.rows.push_back({static_cast<double>(i), spec[i]});
                }
                rep.tables.push_back(std::move(t));
            }
        }
        bool contraction = true, positive = true;
        double worst_growth = 0.0, worst_min = 0.0;
        for (std::size_t t = 0; t < trials; ++t) {
            const double dt = rng.uniform();
            const ImplicitPropagator P(op, dt);
            Field u(static_cast<Eigen::Index>(grid.size()));
            for (auto& x : u) {
                x = rng.uniform(-1.0, 1.0);
            }
            const Field w = P.apply(u);
            worst_growth = std::max(worst_growth, sup_norm(w) - sup_norm(u));
            contraction = contraction && sup_norm(w) <= sup_norm(u) * (1.0 + 1e-12);
            const Field wp = P.apply(u.cwiseAbs());
            worst_min = std::min(worst_min, wp.minCoeff());
            positive = positive && wp.minCoeff() >= 0.0;
        }
        rep.statistics[tag + "worst_sup_growth"] = worst_growth;
        rep.statistics[tag + "worst_min_of_positive_input"] = worst_min;
        rep.verdict(tag + "sup_contraction", contraction);
        rep.verdict(tag + "positivity", positive);

        // Smoothing: unit-mass spike, t^{d/2} sup|S(t) f| over dyadic t in (h^2, L^2 / 8].
        double L = grid.extent(0);
        for (int a = 1; a < grid.dim(); ++a) {
            L = std::min(L, grid.extent(a));
        }
        const int mid_j = grid.dim() > 1 ? grid.cells(1) / 2 : 0;
        Field spike = Field::Zero(static_cast<Eigen::Index>(grid.size()));
        spike[static_cast<Eigen::Index>(grid.index(grid.cells(0) / 2, mid_j))] = 1.0 / grid.cell_volume();
        std::vector<double> scaled;
        for (double t = 2.0 * h * h; t <= L * L / 8.0; t *= 2.0) {
            const int sub = 32;
            const ImplicitPropagator P(op, t / sub);
            Field w = spike;
            for (int i = 0; i < sub; ++i) {
                w = P.apply(w);
            }
            scaled.push_back(sup_norm(w) * std::pow(t, 0.5 * grid.dim()));
        }
        if (!scaled.empty()) {
            const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
            rep.statistics[tag + "smoothing_scaled_sup"] = scaled;
            rep.statistics[tag + "smoothing_spread"] = *hi / *lo;
            rep.verdict(tag + "smoothing_bounded", *hi / *lo <= 4.0);
        }
    }
    return rep;
}

ExperimentReport reaction_suite(const ReactionSystem& reaction, std::uint64_t seed, std::size_t samples)
{
    ExperimentReport rep;
    rep.name = "reaction";
    rep.parameters = {{"samples", samples}, {"seed", seed}};
    const std::size_t r = reaction.components();
    AuditRng rng(seed);
    for (std::size_t l = 0; l < r; ++l) {
        const std::string tag = "component_" + std::to_string(l) + "_";
        const auto& cert = reaction.certificate(l);
        Json c{{"N", cert.N}, {"a", cert.a}, {"a_one_sided", cert.a_one_sided}};
        if (cert.f2) {
            c["a1"] = cert.f2->a1;
            c["a2"] = cert.f2->a2;
            c["b1"] = cert.f2->b1;
            c["b2"] = cert.f2->b2;
        }
        const auto& dc = reaction.dissipativity(l);
        c["a_prime"] = dc.a_prime;
        c["a_dprime"] = dc.a_dprime;
        c["b_dprime"] = dc.b_dprime;
        rep.statistics[tag + "certificate"] = c;
        if (reaction.drift(l).is_zero()) {
            continue;
        }
        double worst_growth = std::numeric_limits<double>::infinity();
        double worst_diff = std::numeric_limits<double>::infinity();
        for (double m : {1.0, 10.0, 100.0}) {
            for (std::size_t i = 0; i < samples; ++i) {
                Field u(8), v(8);
                for (Eigen::Index k = 0; k < 8; ++k) {
                    u[k] = rng.uniform(-m, m);
                    v[k] = rng.uniform(-m, m);
                }
                worst_growth = std::min(worst_growth, dissipativity_gap(reaction, l, u, v, DissipativityMode::growth));
                if (cert.f2) {
                    worst_diff =
                        std::min(worst_diff, dissipativity_gap(reaction, l, u, v, DissipativityMode::difference));
                }
            }
        }
        rep.statistics[tag + "min_growth_margin"] = worst_growth;
        rep.verdict(tag + "dissipativity_growth", worst_growth >= -1e-9);
        if (cert.f2) {
            rep.statistics[tag + "min_difference_margin"] = worst_diff;
            rep.verdict(tag + "dissipativity_difference", worst_diff >= -1e-9);
        }
    }
    double worst_lip = std::numeric_limits<double>::infinity();
    std::vector<double> s(r), t(r);
    for (double m : {1.0, 10.0, 100.0}) {
        const double L = reaction.lipschitz(m);
        for (std::size_t i = 0; i < samples; ++i) {
            double dist = 0.0;
            for (std::size_t j = 0; j < r; ++j) {
                s[j] = rng.uniform(-m, m);
                t[j] = rng.uniform(-m, m);
                dist += std::abs(s[j] - t[j]);
            }
            for (std::size_t l = 0; l < r; ++l) {
                const double d = std::abs(reaction.evaluate(l, 0, s) - reaction.evaluate(l, 0, t));
                worst_lip = std::min(worst_lip, L * dist - d);
            }
        }
    }
    rep.statistics["min_lipschitz_margin"] = worst_lip;
    rep.verdict("lipschitz", worst_lip >= -1e-9);
    const auto qp = check_quasi_positive(reaction, samples, 10.0);
    rep.statistics["quasi_positive"] = qp.pass;
    rep.statistics["quasi_positive_min_boundary_value"] = qp.min_boundary_value;
    rep.statistics["quasi_positive_min_lipschitz_margin"] = qp.min_lipschitz_margin;
    return rep;
}

ExperimentReport noise_suite(const DomainGrid& grid, const NoiseModel& noise, double radius)
{
    ExperimentReport rep;
    rep.name = "noise";
    rep.parameters = {{"radius", radius}};
    const auto eps = default_eps_grid();
    Table tab{"osgood", {"component", "eps", "integral"}, {}};
    for (std::size_t l = 0; l < noise.components(); ++l) {
        const std::string tag = "component_" + std::to_string(l) + "_";
        const auto& c = noise.component(l);
        if (c.modes() > 0) {
            const double defect = c.basis().orthonormality_defect(grid);
            rep.statistics[tag + "orthonormality_defect"] = defect;
            if (c.basis().kind() == BasisKind::cosine_neumann) {
                rep.verdict(tag + "orthonormal", defect <= 1e-8);
            }
        }
        bool holder = true;
        try {
            audit_holder(c.g());
        } catch (const AuditError& e) {
            holder = false;
            rep.statistics[tag + "holder_failure"] = e.what();
        }
        rep.verdict(tag + "holder_audit", holder);
        rep.statistics[tag + "alpha"] = c.alpha();
        rep.statistics[tag + "beta"] = c.beta();
        rep.statistics[tag + "rho_constant"] = c.rho_constant(radius);
        if (c.rho_constant(radius) > 0.0) {
            const auto os = osgood_check(noise, l, radius, eps);
            rep.statistics[tag + "osgood_increment_ratio"] = os.increment_ratio;
            rep.verdict(tag + "osgood_diverges", os.diverges);
            for (std::size_t i = 0; i < os.eps.size(); ++i) {
                tab.rows.push_back({static_cast<double>(l), os.eps[i], os.integral[i]});
            }
        }
    }
    rep.tables.push_back(std::move(tab));
    return rep;
}

ExperimentReport mollifier_suite(double C, std::size_t n_max, std::size_t probes)
{
    if (!(C > 0.0)) {
        throw ConfigError("mollifier", "rho constant must be positive");
    }
    const auto fam = build_mollifier([C](double s) { return C * s; }, n_max);
    ExperimentReport rep;
    rep.name = "mollifier";
    rep.parameters = {{"rho", "C*s"}, {"C", C}, {"n_max", n_max}, {"probes", probes}};
    Table tab{"levels", {"n", "a_n", "exact", "relative_error", "psi_mass"}, {}};
    double worst = 0.0, worst_mass = 0.0;
    for (std::size_t n = 0; n <= n_max; ++n) {
        const double dn = static_cast<double>(n);
        const double exact = std::exp(-C * dn * (dn + 1.0) / 2.0);
        const double rel = std::abs(fam.a(n) - exact) / exact;
        const double mass = n > 0 ? fam.psi_mass(n) : std::nan("");
        worst = std::max(worst, rel);
        if (n > 0) {
            worst_mass = std::max(worst_mass, std::abs(mass - 1.0));
        }
        tab.rows.push_back({dn, fam.a(n), exact, rel, mass});
    }
    rep.statistics["max_relative_error"] = worst;
    rep.statistics["max_mass_defect"] = worst_mass;
    rep.verdict("levels_match_closed_form", worst <= 1e-8);
    rep.verdict("psi_mass_one", worst_mass <= 1e-8);

    double worst_lo = std::numeric_limits<double>::infinity(), worst_hi = std::numeric_limits<double>::infinity();
    for (std::size_t n = 1; n <= n_max; ++n) {
        for (std::size_t i = 0; i < probes; ++i) {
            double t;
            if (i % 2 == 0) {
                t = -1.5 + 3.0 * static_cast<double>(i) / static_cast<double>(probes - 1);
            } else {
                const double e = -14.0 + 14.2 * static_cast<double>(i) / static_cast<double>(probes);
                t = (i % 4 == 1 ? 1.0 : -1.0) * std::pow(10.0, e);
            }
            const double ph = fam.phi(n, t);
            worst_lo = std::min(worst_lo, ph - (std::abs(t) - fam.a(n - 1)));
            worst_hi = std::min(worst_hi, std::abs(t) - ph);
        }
    }
    rep.statistics["min_lower_sandwich_margin"] = worst_lo;
    rep.statistics["min_upper_sandwich_margin"] = worst_hi;
    rep.verdict("phi_sandwich", worst_lo >= 0.0 && worst_hi >= 0.0);
    rep.tables.push_back(std::move(tab));
    return rep;
}

ExperimentReport ladder_experiment(const Problem& problem, const SolverConfig& config, const LadderOptions& options)
{
    check_initial(problem, options.initial);
    const auto& ens = options.ensemble;
    struct PathResult {
        std::vector<std::size_t> exits;
        bool agree = true;
        bool monotone = true;
        std::string detail;
    };
    auto job = [&](std::size_t p) {
        PathResult res;
        const WienerPath path = ensemble_path(problem, config, ens, p);
        try {
            const auto lr = glue_ladder(problem, config, path, options.initial, options.levels);
            res.exits = lr.report.exit_steps;
            res.monotone = lr.report.monotone;
        } catch (const SolverError& e) {
            if (e.reason() != "ladder") {
                throw;
            }
            res.agree = false;
            res.monotone = false;
            res.detail = e.what();
        }
        return res;
    };
    const auto results = run_indexed<PathResult>(ens.paths, ens.workers, job);

    ExperimentReport rep;
    rep.name = "ladder";
    rep.provenance = provenance_of(problem, ens);
    rep.parameters = {{"levels", options.levels}, {"dt", config.dt}, {"t_end", config.t_end}};
    std::vector<std::string> cols{"path"};
    for (double n : options.levels) {
        std::ostringstream os;
        os << "exit_step_level_" << n;
        cols.push_back(os.str());
    }
    Table tab{"exit_steps", cols, {}};
    std::size_t agree = 0, monotone = 0;
    for (std::size_t p = 0; p < results.size(); ++p) {
        const auto& r = results[p];
        agree += r.agree ? 1 : 0;
        monotone += r.monotone ? 1 : 0;
        std::vector<double> row{static_cast<double>(p)};
        for (std::size_t j = 0; j < options.levels.size(); ++j) {
            row.push_back(j < r.exits.size() ? static_cast<double>(r.exits[j]) : std::nan(""));
        }
        tab.rows.push_back(std::move(row));
        if (!r.agree && !rep.statistics.contains("first_disagreement")) {
            rep.statistics["first_disagreement"] = r.detail;
        }
    }
    const double n = static_cast<double>(std::max<std::size_t>(results.size(), 1));
    rep.statistics["agreeing_fraction"] = static_cast<double>(agree) / n;
    rep.statistics["monotone_fraction"] = static_cast<double>(monotone) / n;
    rep.verdict("bitwise_agreement", agree == results.size());
    rep.verdict("exit_steps_monotone", monotone == results.size());
    rep.tables.push_back(std::move(tab));
    return rep;
}

ExperimentReport est2_experiment(const Problem& problem, const Est2Options& options)
{
    ExperimentReport rep;
    rep.name = "est2";
    rep.parameters = {{"forcings", options.forcings}, {"steps", options.steps}, {"dt", options.dt},
                      {"max_amplitude", options.max_amplitude}, {"seed", options.seed}};
    rep.provenance = {{"problem_digest", Fnv1a::to_hex(problem.digest())}};
    const auto& grid = problem.grid;
    Table tab{"bounds", {"component", "forcing", "sup_u", "sup_v", "bound", "margin"}, {}};
    std::size_t checked = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < problem.components(); ++l) {
        if (!problem.reaction.certificate(l).f2) {
            continue;
        }
        AuditRng rng(derive_seed(options.seed, l));
        for (std::size_t f = 0; f < options.forcings; ++f) {
            // v(t, x) = A sum_j c_j sin(w_j t + x . q_j), bounded by A.
            const double A = rng.uniform(0.0, options.max_amplitude);
            const std::size_t terms = 1 + rng.below(4);
            std::vector<double> c(terms), w(terms), q0(terms), q1(terms);
            double norm = 0.0;
            for (std::size_t j = 0; j < terms; ++j) {
                c[j] = rng.uniform(-1.0, 1.0);
                w[j] = rng.uniform(0.0, 50.0);
                q0[j] = rng.uniform(0.0, 20.0);
                q1[j] = rng.uniform(0.0, 20.0);
                norm += std::abs(c[j]);
            }
            std::vector<Field> forcing;
            for (std::size_t i = 0; i <= options.steps; ++i) {
                const double t = static_cast<double>(i) * options.dt;
                Field v(static_cast<Eigen::Index>(grid.size()));
                for (std::size_t cell = 0; cell < grid.size(); ++cell) {
                    const auto x = grid.center(cell);
                    double acc = 0.0;
                    for (std::size_t j = 0; j < terms; ++j) {
                        double arg = w[j] * t + q0[j] * x[0];
                        if (grid.dim() > 1) {
                            arg += q1[j] * x[1];
                        }
                        acc += c[j] * std::sin(arg);
                    }
                    v[static_cast<Eigen::Index>(cell)] = A * acc / norm;
                }
                forcing.push_back(std::move(v));
            }
            const auto res = est2_bound_check(problem.reaction, l, problem.operators[l], forcing, options.dt);
            worst = std::min(worst, res.margin);
            tab.rows.push_back({static_cast<double>(l), static_cast<double>(f), res.sup_u, res.sup_v, res.bound,
                                res.margin});
            ++checked;
        }
    }
    rep.statistics["checked"] = checked;
    rep.statistics["min_margin"] = checked ? worst : std::nan("");
    rep.verdict("any_certified_component", checked > 0);
    rep.verdict("below_bound", checked > 0 && worst > 0.0);
    rep.tables.push_back(std::move(tab));
    return rep;
}

ExperimentReport convergence_experiment(const Problem& problem, const SolverConfig& config,
                                        const ConvergenceOptions& options)
{
    check_initial(problem, options.initial);
    if (options.refinements < 2) {
        throw ConfigError("refinements", "need at least two refinements for an observed order");
    }
    const auto& ens = options.ensemble;
    SolverConfig base = config;
    base.stride = std::numeric_limits<std::size_t>::max();
    const WienerPath path = ensemble_path(problem, base, ens, 0);
    std::vector<State> finals;
    for (unsigned j = 0; j <= options.refinements; ++j) {
        SolverConfig c = base;
        c.dt = std::ldexp(config.dt, -static_cast<int>(j));
        const Trajectory t = simulate(problem, c, path, options.initial);
        if (t.stopping.triggered) {
            throw SolverError("cap exits", "refinement run stopped at t=" + std::to_string(t.stopping.time));
        }
        finals.push_back(t.states.back());
    }

    ExperimentReport rep;
    rep.name = "convergence";
    rep.provenance = provenance_of(problem, ens);
    rep.parameters = {{"dt", config.dt}, {"t_end", config.t_end}, {"refinements", options.refinements},
                      {"target_order", options.target_order}, {"order_tolerance", options.order_tolerance}};
    Table tab{"self_convergence", {"dt", "gap_to_half_dt"}, {}};
    std::vector<double> gaps, orders;
    for (std::size_t j = 0; j + 1 < finals.size(); ++j) {
        double g = 0.0;
        for (std::size_t l = 0; l < finals[j].size(); ++l) {
            g = std::max(g, sup_norm(finals[j][l] - finals[j + 1][l]));
        }
        gaps.push_back(g);
        tab.rows.push_back({std::ldexp(config.dt, -static_cast<int>(j)), g});
    }
    bool ok = true;
    for (std::size_t j = 1; j < gaps.size(); ++j) {
        orders.push_back(std::log2(gaps[j - 1] / gaps[j]));
        ok = ok && std::abs(orders.back() - options.target_order) <= options.order_tolerance;
    }
    rep.statistics["gaps"] = gaps;
    rep.statistics["orders"] = orders;
    rep.verdict("first_order", ok);
    rep.tables.push_back(std::move(tab));

    const double L = options.heat_length;
    const double ext[] = {L};
    const int cells[] = {static_cast<int>(options.heat_cells)};
    const auto grid = DomainGrid::build(1, ext, cells);
    const auto op = EllipticOperator::assemble(
        grid, CoefficientField::uniform(grid, options.heat_a, 0.0, options.heat_a, options.heat_a));
    const ImplicitPropagator R(op, options.heat_dt);
    Field u0(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t c = 0; c < grid.size(); ++c) {
        u0[static_cast<Eigen::Index>(c)] = std::cos(std::numbers::pi * grid.center(c)[0] / L);
    }
    Field u = u0;
    const auto n = static_cast<std::size_t>(std::llround(options.heat_time / options.heat_dt));
    for (std::size_t i = 0; i < n; ++i) {
        u = R.apply(u);
    }
    const double t = static_cast<double>(n) * options.heat_dt;
    const double rate = -std::log(u.dot(u0) / u0.dot(u0)) / t;
    const double oracle = options.heat_a * std::numbers::pi * std::numbers::pi / (L * L);
    rep.statistics["heat_decay_rate"] = rate;
    rep.statistics["heat_decay_oracle"] = oracle;
    rep.statistics["heat_relative_error"] = std::abs(rate - oracle) / oracle;
    rep.verdict("heat_decay", std::abs(rate - oracle) <= options.heat_tolerance * oracle);
    return rep;
}

ExperimentReport osgood_suite()
{
    struct Case {
        const char* name;
        Modulus rho;
        bool diverges;
    };
    const std::vector<Case> cases{
        {"s", [](double s) { return s; }, true},
        {"s^2", [](double s) { return s * s; }, true},
        {"s(1+ln(1/s))", [](double s) { return s * (1.0 - std::log(s)); }, true},
        {"1", [](double) { return 1.0; }, false},
        {"sqrt(s)", [](double s) { return std::sqrt(s); }, false},
    };
    ExperimentReport rep;
    rep.name = "osgood";
    const auto eps = default_eps_grid();
    rep.parameters = {{"eps", eps}};
    Table tab{"integrals", {"case", "eps", "integral"}, {}};
    bool all = true;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto os = osgood_check(cases[i].rho, eps);
        rep.statistics[std::string(cases[i].name) + "_increment_ratio"] = os.increment_ratio;
        rep.statistics[std::string(cases[i].name) + "_diverges"] = os.diverges;
        all = all && os.diverges == cases[i].diverges;
        for (std::size_t j = 0; j < os.eps.size(); ++j) {
            tab.rows.push_back({static_cast<double>(i), os.eps[j], os.integral[j]});
        }
    }
    const double I6 = integrate_reciprocal([](double s) { return s; }, 1e-6, 1.0);
    const double exact = std::log(1e6);
    rep.statistics["linear_I_1e-6"] = I6;
    rep.statistics["linear_I_relative_error"] = std::abs(I6 - exact) / exact;
    rep.verdict("linear_integral", std::abs(I6 - exact) <= 1e-3 * exact);
    rep.verdict("verdicts_match", all);
    rep.tables.push_back(std::move(tab));
    return rep;
}

}  // namespace srd
