#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "srd/config.hpp"
#include "srd/digest.hpp"
#include "srd/error.hpp"
#include "srd/suites.hpp"

namespace fs = std::filesystem;
using namespace srd;

namespace {

enum Exit { ok = 0, config_error = 2, audit_error = 3, runtime_error = 4 };

struct Common {
    std::string config;
    std::string preset;
    std::optional<std::uint64_t> seed;
    std::string out;
    unsigned workers = 1;
    std::optional<std::size_t> paths;
};

void add_common(CLI::App* app, Common& c)
{
    app->add_option("--config", c.config, "run configuration (JSON)");
    app->add_option("--preset", c.preset, "built-in configuration")->check(CLI::IsMember({"fhn"}));
    app->add_option("--seed", c.seed, "master seed (overrides the config)");
    app->add_option("--out", c.out, "output directory");
    app->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber);
    app->add_option("--paths", c.paths, "ensemble size")->check(CLI::PositiveNumber);
}

RunConfig load(const Common& c)
{
    if (!c.config.empty() && !c.preset.empty()) {
        throw ConfigError("args", "--config and --preset are exclusive");
    }
    RunConfig cfg;
    if (!c.config.empty()) {
        cfg = load_config(c.config);
    } else if (!c.preset.empty()) {
        cfg = fhn_preset();
    } else {
        throw ConfigError("args", "need --config or --preset");
    }
    if (c.seed) {
        cfg.raw["master_seed"] = *c.seed;
    }
    return cfg;
}

fs::path out_dir(const Common& c, const RunConfig& cfg, const std::string& tag)
{
    if (!c.out.empty()) {
        return c.out;
    }
    if (cfg.raw.contains("output") && cfg.raw["output"].contains("dir")) {
        return cfg.raw["output"]["dir"].get<std::string>();
    }
    const char* root = std::getenv("SRD_OUTPUT_ROOT");
    const fs::path base = root && *root ? fs::path(root) : fs::path("srd-out");
    return base / (tag + "-" + config_digest(cfg) + "-" + std::to_string(master_seed(cfg)));
}

void save_config(const fs::path& dir, const RunConfig& cfg)
{
    fs::create_directories(dir);
    Json j = cfg.raw;
    if (j.contains("output") && j["output"].is_object()) {
        j["output"].erase("dir");
    }
    std::ofstream(dir / "config.json") << j.dump(2) << '\n';
}

int simulate_cmd(const Common& c)
{
    const RunConfig cfg = load(c);
    const Problem problem = build_problem(cfg);
    check_experiment_preconditions(cfg, problem);
    const SolverConfig sc = build_solver_config(cfg);
    const State u0 = build_initial(cfg, problem.grid, problem.components());
    const EnsembleOptions ens = build_ensemble(cfg, 1, 1);
    const WienerPath path = ensemble_path(problem, sc, ens, 0);
    Trajectory traj = simulate(problem, sc, path, u0);
    traj.provenance.config_digest = config_digest(cfg);

    const fs::path dir = out_dir(c, cfg, "simulate");
    save_config(dir, cfg);
    TrajectoryFormat fmt = TrajectoryFormat::automatic;
    if (cfg.raw.contains("output")) {
        const std::string f = cfg.raw["output"].value("format", "auto");
        if (f == "csv") {
            fmt = TrajectoryFormat::csv;
        } else if (f == "raw") {
            fmt = TrajectoryFormat::raw;
        } else if (f != "auto") {
            throw ConfigError("output", "unknown format '" + f + "'");
        }
    }
    path.write_binary(dir / "path.bin");
    Json extra{{"command", "simulate"},
               {"master_seed", master_seed(cfg)},
               {"path_file", "path.bin"},
               {"path_digest", Fnv1a::to_hex(file_digest(dir / "path.bin"))}};
    write_trajectory(dir, traj, problem.grid, fmt, extra);
    std::cout << "status=ok command=simulate out=" << dir.string() << " stopped=" << traj.stopping.triggered
              << '\n';
    return ok;
}

int report_status(const ExperimentReport& rep, const fs::path& dir, const std::string& command)
{
    if (rep.pass) {
        std::cout << "status=ok command=" << command << " out=" << dir.string() << '\n';
        return ok;
    }
    std::string failed;
    for (const auto& [k, v] : rep.verdicts.items()) {
        if (!v.get<bool>()) {
            failed = k;
            break;
        }
    }
    std::cerr << "error reason=verdict:" << failed << " out=" << dir.string() << '\n';
    return audit_error;
}

int verify_cmd(const Common& c, const std::string& suite)
{
    const RunConfig cfg = load(c);
    const ExperimentReport rep = run_suite(cfg, suite, SuiteOptions{c.paths, c.workers});
    const fs::path dir = out_dir(c, cfg, "verify-" + suite);
    save_config(dir, cfg);
    rep.write(dir);
    return report_status(rep, dir, "verify");
}

int ensemble_cmd(const Common& c)
{
    const RunConfig cfg = load(c);
    const ExperimentReport rep = run_ensemble(cfg, SuiteOptions{c.paths, c.workers});
    const fs::path dir = out_dir(c, cfg, "ensemble");
    save_config(dir, cfg);
    rep.write(dir);
    Json m{{"tool", "srd"},
           {"tool_version", kToolVersion},
           {"command", "ensemble"},
           {"config_digest", config_digest(cfg)},
           {"master_seed", master_seed(cfg)},
           {"seeds", rep.provenance["path_seeds"]},
           {"aggregate", "aggregate.csv"},
           {"aggregate_digest", Fnv1a::to_hex(file_digest(dir / "aggregate.csv"))}};
    std::ofstream(dir / "manifest.json") << m.dump(2) << '\n';
    return report_status(rep, dir, "ensemble");
}

std::string one_line(std::string s)
{
    for (auto& ch : s) {
        if (ch == '\n' || ch == '\r') {
            ch = ' ';
        }
    }
    return s;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Stochastic reaction-diffusion solver"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);
    Common c;
    std::string suite;

    auto* sim = app.add_subcommand("simulate", "run one path and write the trajectory");
    add_common(sim, c);
    auto* ver = app.add_subcommand("verify", "run a verification suite");
    std::string names;
    for (const auto& n : suite_names()) {
        names += (names.empty() ? "" : ", ") + n;
    }
    ver->add_option("suite", suite, names)->required()->check(CLI::IsMember(suite_names()));
    add_common(ver, c);
    auto* ens = app.add_subcommand("ensemble", "run an ensemble and aggregate per-path summaries");
    add_common(ens, c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << "error reason=args detail=" << one_line(e.what()) << '\n';
        return config_error;
    }

    try {
        if (*sim) {
            return simulate_cmd(c);
        }
        if (*ver) {
            return verify_cmd(c, suite);
        }
        return ensemble_cmd(c);
    } catch (const ConfigError& e) {
        std::cerr << "error reason=" << e.reason() << " detail=" << one_line(e.what()) << '\n';
        return config_error;
    } catch (const AuditError& e) {
        std::cerr << "error reason=" << e.reason() << " detail=" << one_line(e.what()) << '\n';
        return audit_error;
    } catch (const SolverError& e) {
        std::cerr << "error reason=" << e.reason() << " detail=" << one_line(e.what()) << '\n';
        return runtime_error;
    } catch (const std::exception& e) {
        std::cerr << "error reason=runtime detail=" << one_line(e.what()) << '\n';
        return runtime_error;
    }
}
