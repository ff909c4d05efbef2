#include "srd/suites.hpp"

#include <cmath>

#include "srd/digest.hpp"
#include "srd/error.hpp"

namespace srd {

namespace {

template <class T>
T param(const RunConfig& cfg, const std::string& key, const T& fallback)
{
    const Json j = experiment_param(cfg, key, Json());
    if (j.is_null()) {
        return fallback;
    }
    try {
        return j.get<T>();
    } catch (const Json::exception& e) {
        throw ConfigError("config", "bad value for experiment." + key + ": " + e.what());
    }
}

std::size_t paths_for(const RunConfig& cfg, const SuiteOptions& opt, std::size_t fallback)
{
    const std::size_t p = opt.paths ? *opt.paths : param<std::size_t>(cfg, "paths", fallback);
    if (p == 0) {
        throw ConfigError("paths", "need at least one path");
    }
    return p;
}

bool has_noise(const Problem& problem)
{
    for (std::size_t l = 0; l < problem.noise.components(); ++l) {
        const auto& c = problem.noise.component(l);
        if (c.modes() > 0 && c.g().name != "zero") {
            return true;
        }
    }
    return false;
}

void stamp(ExperimentReport& rep, const RunConfig& cfg)
{
    rep.provenance["tool"] = "srd";
    rep.provenance["tool_version"] = kToolVersion;
    rep.provenance["config_digest"] = config_digest(cfg);
    rep.provenance["master_seed"] = master_seed(cfg);
}

}  // namespace

std::vector<std::string> suite_names()
{
    return {"operator", "reaction",  "noise",     "mollifier", "osgood",   "convergence",
            "uniqueness", "positivity", "moments", "ladder",    "residual", "est2"};
}

ExperimentReport run_suite(const RunConfig& cfg, const std::string& suite, const SuiteOptions& opt)
{
    const std::uint64_t seed = master_seed(cfg);
    ExperimentReport rep;
    if (suite == "mollifier") {
        rep = mollifier_suite(param(cfg, "C", 1.0), param<std::size_t>(cfg, "n_max", 5),
                              param<std::size_t>(cfg, "probes", 10000));
    } else if (suite == "osgood") {
        rep = osgood_suite();
    } else {
        const Problem problem = build_problem(cfg);
        const SolverConfig sc = build_solver_config(cfg);
        auto initial = [&] { return build_initial(cfg, problem.grid, problem.components()); };
        auto ensemble = [&](std::size_t fallback) {
            return build_ensemble(cfg, paths_for(cfg, opt, fallback), opt.workers);
        };
        if (suite == "operator") {
            rep = operator_suite(problem.operators, seed, param<std::size_t>(cfg, "trials", 1000));
        } else if (suite == "reaction") {
            rep = reaction_suite(problem.reaction, seed, param<std::size_t>(cfg, "samples", 1000));
        } else if (suite == "noise") {
            rep = noise_suite(problem.grid, problem.noise, param(cfg, "radius", 10.0));
        } else if (suite == "convergence") {
            ConvergenceOptions o;
            o.ensemble = ensemble(1);
            o.initial = initial();
            o.refinements = param(cfg, "refinements", 3u);
            o.order_tolerance = param(cfg, "order_tolerance", o.order_tolerance);
            o.heat_cells = param(cfg, "heat_cells", o.heat_cells);
            o.heat_dt = param(cfg, "heat_dt", o.heat_dt);
            o.heat_time = param(cfg, "heat_time", o.heat_time);
            rep = convergence_experiment(problem, sc, o);
        } else if (suite == "uniqueness") {
            UniquenessOptions o;
            o.ensemble = ensemble(64);
            o.initial = initial();
            o.eps_list = param(cfg, "eps", o.eps_list);
            o.twin_paths = param(cfg, "twin_paths", o.twin_paths);
            o.slack = param(cfg, "slack", o.slack);
            o.refinements = param(cfg, "refinements", o.refinements);
            o.cauchy_fraction = param(cfg, "cauchy_fraction", o.cauchy_fraction);
            rep = uniqueness_experiment(problem, sc, o);
        } else if (suite == "positivity") {
            PositivityOptions o;
            o.ensemble = ensemble(64);
            o.initial = initial();
            const Json c = experiment_param(cfg, "c_tol", Json());
            if (c.is_number()) {
                o.c_tol = c.get<double>();
            }
            o.dt_pair = param(cfg, "dt_pair", o.dt_pair);
            o.negative_control = param(cfg, "negative_control", o.negative_control);
            rep = positivity_experiment(problem, sc, o);
        } else if (suite == "moments") {
            MomentOptions o;
            o.ensemble = ensemble(32);
            o.initial = initial();
            o.p = param(cfg, "p", o.p);
            o.levels = param(cfg, "levels", o.levels);
            o.tolerance = param(cfg, "tolerance", o.tolerance);
            rep = moment_experiment(problem, sc, o);
        } else if (suite == "ladder") {
            LadderOptions o;
            o.ensemble = ensemble(32);
            o.initial = initial();
            o.levels = param(cfg, "levels", o.levels);
            rep = ladder_experiment(problem, sc, o);
        } else if (suite == "residual") {
            ResidualOptions o;
            o.ensemble = ensemble(32);
            o.initial = initial();
            const bool noisy = has_noise(problem);
            o.probe_time = param(cfg, "probe_time", o.probe_time);
            o.coarse_level = param(cfg, "coarse_level", o.coarse_level);
            o.refinements = param(cfg, "refinements", o.refinements);
            o.target_ratio = param(cfg, "target_ratio", noisy ? std::sqrt(0.5) : 0.5);
            o.ratio_tolerance = param(cfg, "ratio_tolerance", noisy ? 0.2 : 0.15);
            rep = residual_experiment(problem, sc, o);
        } else if (suite == "est2") {
            Est2Options o;
            o.forcings = param(cfg, "forcings", o.forcings);
            o.steps = param(cfg, "steps", o.steps);
            o.dt = param(cfg, "dt", sc.dt);
            o.max_amplitude = param(cfg, "max_amplitude", o.max_amplitude);
            o.seed = seed;
            rep = est2_experiment(problem, o);
        } else {
            throw ConfigError("suite", "unknown suite '" + suite + "'");
        }
    }
    stamp(rep, cfg);
    return rep;
}

ExperimentReport run_ensemble(const RunConfig& cfg, const SuiteOptions& opt)
{
    const Problem problem = build_problem(cfg);
    SolverConfig sc = build_solver_config(cfg);
    check_experiment_preconditions(cfg, problem);
    const State u0 = build_initial(cfg, problem.grid, problem.components());
    const EnsembleOptions ens = build_ensemble(cfg, paths_for(cfg, opt, 16), opt.workers);

    struct Row {
        std::uint64_t seed = 0;
        double min = 0.0, max_sup = 0.0, final_sup = 0.0, mean_final = 0.0;
        bool exited = false;
        double exit_time = 0.0;
    };
    auto job = [&](std::size_t p) {
        const WienerPath path = ensemble_path(problem, sc, ens, p);
        const Trajectory t = simulate(problem, sc, path, u0);
        Row r;
        r.seed = path.seed();
        r.min = std::numeric_limits<double>::infinity();
        for (const auto& st : t.states) {
            for (const auto& f : st) {
                r.min = std::min(r.min, f.minCoeff());
            }
            r.max_sup = std::max(r.max_sup, state_norm(st));
        }
        r.final_sup = state_norm(t.states.back());
        double m = 0.0;
        for (const auto& f : t.states.back()) {
            m += f.mean();
        }
        r.mean_final = m / static_cast<double>(t.states.back().size());
        r.exited = t.stopping.triggered;
        r.exit_time = t.stopping.triggered ? t.stopping.time : sc.t_end;
        return r;
    };
    const auto rows = run_indexed<Row>(ens.paths, ens.workers, job);

    ExperimentReport rep;
    rep.name = "ensemble";
    rep.parameters = {{"paths", ens.paths}, {"dt", sc.dt}, {"t_end", sc.t_end}, {"dt_fine", ens.dt_fine}};
    rep.provenance["problem_digest"] = Fnv1a::to_hex(problem.digest());
    Table tab{"aggregate", {"path", "min", "max_sup", "final_sup", "final_mean", "exited", "exit_time"}, {}};
    Json seeds = Json::array();
    double mean_final = 0.0, min_all = std::numeric_limits<double>::infinity();
    std::size_t exits = 0;
    for (std::size_t p = 0; p < rows.size(); ++p) {
        const auto& r = rows[p];
        seeds.push_back(r.seed);
        tab.rows.push_back({static_cast<double>(p), r.min, r.max_sup, r.final_sup,
                            r.mean_final, r.exited ? 1.0 : 0.0, r.exit_time});
        mean_final += r.mean_final;
        min_all = std::min(min_all, r.min);
        exits += r.exited ? 1 : 0;
    }
    rep.statistics["mean_final_mean"] = mean_final / static_cast<double>(rows.size());
    rep.statistics["global_min"] = min_all;
    rep.statistics["exit_fraction"] = static_cast<double>(exits) / static_cast<double>(rows.size());
    rep.provenance["path_seeds"] = seeds;
    rep.tables.push_back(std::move(tab));
    stamp(rep, cfg);
    return rep;
}

}  // namespace srd
