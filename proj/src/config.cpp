#include "srd/config.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "srd/digest.hpp"
#include "srd/error.hpp"

namespace srd {

namespace {

const Json& block(const Json& j, const char* key)
{
    if (!j.contains(key)) {
        throw ConfigError("config", std::string("missing block '") + key + "'");
    }
    return j.at(key);
}

template <class T>
T value(const Json& j, const std::string& key, const T& fallback)
{
    if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) {
        return fallback;
    }
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception& e) {
        throw ConfigError("config", "bad value for '" + key + "': " + e.what());
    }
}

template <class T>
T required(const Json& j, const std::string& key)
{
    if (!j.is_object() || !j.contains(key)) {
        throw ConfigError("config", "missing key '" + key + "'");
    }
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception& e) {
        throw ConfigError("config", "bad value for '" + key + "': " + e.what());
    }
}

const Json& per_component(const Json& j, std::size_t l, std::size_t r, const char* what)
{
    if (j.is_array()) {
        if (j.size() != r) {
            throw ConfigError("components", std::string(what) + " lists " + std::to_string(j.size()) +
                                                " entries for " + std::to_string(r) + " components");
        }
        return j.at(l);
    }
    return j;
}

CouplingTerm coupling_from(const Json& spec, std::size_t l, std::size_t r)
{
    if (spec.is_null() || (spec.is_string() && spec.get<std::string>() == "none")) {
        return CouplingTerm::none();
    }
    const std::string kind = spec.is_string() ? spec.get<std::string>() : required<std::string>(spec, "kind");
    if (kind == "none") {
        return CouplingTerm::none();
    }
    if (kind == "linear") {
        auto w = required<std::vector<double>>(spec, "weights");
        if (w.size() != r) {
            throw ConfigError("reaction", "linear coupling needs one weight per component");
        }
        return CouplingTerm::linear(std::move(w));
    }
    if (kind == "fhn") {
        if (r != 2) {
            throw ConfigError("reaction", "the fhn coupling needs two components");
        }
        const double a = value(spec, "a", 1.0);
        const double b = value(spec, "b", 1.0);
        if (!(a > 0.0) || !(b > 0.0)) {
            throw ConfigError("fhn", "FitzHugh-Nagumo parameters a and b must be positive");
        }
        auto k = l == 0 ? CouplingTerm::linear({0.0, 1.0}) : CouplingTerm::linear({a, -b});
        k.name = "fhn";
        return k;
    }
    throw ConfigError("reaction", "unknown coupling '" + kind + "'");
}

ReactionSystem reaction_from(const Json& j)
{
    if (value<std::string>(j, "preset", "") == "fhn") {
        return fhn_system(value(j, "a", 1.0), value(j, "b", 1.0));
    }
    const Json& comps = required<Json>(j, "components");
    const std::size_t r = comps.size();
    if (r == 0) {
        throw ConfigError("components", "reaction needs at least one component");
    }
    std::vector<PolynomialDrift> drifts;
    std::vector<CouplingTerm> couplings;
    for (std::size_t l = 0; l < r; ++l) {
        const Json& c = comps.at(l);
        drifts.push_back(PolynomialDrift::uniform(value(c, "drift", std::vector<double>{}),
                                                  value(c, "epsilon_lead", 0.0)));
        couplings.push_back(coupling_from(c.contains("coupling") ? c.at("coupling") : Json(), l, r));
    }
    return ReactionSystem::certify(std::move(drifts), std::move(couplings));
}

std::vector<double> lambdas_from(const Json& j, std::size_t K)
{
    const double amplitude = value(j, "amplitude", 1.0);
    const Json& rule = j.contains("lambdas") ? j.at("lambdas") : Json("power:1");
    if (rule.is_string()) {
        const auto s = rule.get<std::string>();
        if (s.rfind("power:", 0) != 0) {
            throw ConfigError("noise", "unknown lambda rule '" + s + "'");
        }
        double p = 0.0;
        try {
            p = std::stod(s.substr(6));
        } catch (const std::exception&) {
            throw ConfigError("noise", "cannot parse exponent in '" + s + "'");
        }
        return power_law_lambdas(K, p, amplitude);
    }
    auto l = rule.get<std::vector<double>>();
    if (l.size() != K) {
        throw ConfigError("noise", "got " + std::to_string(l.size()) + " lambdas for " + std::to_string(K) + " modes");
    }
    for (auto& x : l) {
        x *= amplitude;
    }
    return l;
}

SpectralBasis basis_from(const Json& j, const DomainGrid& grid, const std::filesystem::path& base_dir)
{
    const std::string kind = value<std::string>(j, "basis", "cosine-neumann");
    if (kind == "cosine-neumann") {
        return SpectralBasis::cosine_neumann(grid, value<std::size_t>(j, "modes", 8));
    }
    if (kind == "user-table") {
        auto file = std::filesystem::path(required<std::string>(j, "table"));
        if (file.is_relative()) {
            file = base_dir / file;
        }
        std::ifstream in(file);
        if (!in) {
            throw ConfigError("noise", "cannot open basis table " + file.string());
        }
        std::vector<Field> modes;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || !std::isdigit(static_cast<unsigned char>(line[0]))) {
                continue;
            }
            std::stringstream ss(line);
            std::string cell;
            std::getline(ss, cell, ',');
            const auto idx = static_cast<std::size_t>(std::stoul(cell));
            if (idx >= grid.size()) {
                throw ConfigError("noise", "basis table cell index out of range");
            }
            std::size_t k = 0;
            while (std::getline(ss, cell, ',')) {
                if (modes.size() <= k) {
                    modes.push_back(grid.constant(0.0));
                }
                modes[k++][static_cast<Eigen::Index>(idx)] = std::stod(cell);
            }
        }
        return SpectralBasis::user_table(std::move(modes), value(j, "sup_norms", std::vector<double>{}));
    }
    throw ConfigError("noise", "unknown basis '" + kind + "'");
}

Field field_from(const Json& spec, const DomainGrid& grid)
{
    if (spec.is_number()) {
        return grid.constant(spec.get<double>());
    }
    if (spec.is_array()) {
        const auto v = spec.get<std::vector<double>>();
        if (v.size() != grid.size()) {
            throw ConfigError("initial", "explicit initial field needs one value per cell");
        }
        return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
    const double mean = value(spec, "mean", value(spec, "constant", 0.0));
    const double amp = value(spec, "cosine", 0.0);
    Field f = grid.constant(mean);
    if (amp != 0.0) {
        for (std::size_t c = 0; c < grid.size(); ++c) {
            f[static_cast<Eigen::Index>(c)] += amp * std::cos(std::numbers::pi * grid.center(c)[0] / grid.extent(0));
        }
    }
    return f;
}

}  // namespace

RunConfig parse_config(const std::string& text, std::filesystem::path base_dir)
{
    RunConfig cfg;
    try {
        cfg.raw = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError("parse", std::string("config is not valid JSON: ") + e.what());
    }
    if (!cfg.raw.is_object()) {
        throw ConfigError("parse", "config must be a JSON object");
    }
    if (value(cfg.raw, "version", 0) != 1) {
        throw ConfigError("version", "unsupported config version (expected 1)");
    }
    cfg.base_dir = std::move(base_dir);
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config", "cannot open " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path());
}

RunConfig fhn_preset()
{
    RunConfig cfg;
    cfg.raw = Json::parse(R"({
      "version": 1,
      "master_seed": 42,
      "grid": {"dim": 1, "extent": [1.0], "cells": [32]},
      "operators": [
        {"a": 1.0, "c": 0.0, "eta": 0.25, "M_bound": 2.0},
        {"a": 0.5, "c": 0.0, "eta": 0.25, "M_bound": 2.0}
      ],
      "reaction": {"preset": "fhn", "a": 1.0, "b": 1.0},
      "noise": {"basis": "cosine-neumann", "modes": 8, "lambdas": "power:1", "amplitude": 0.5, "g": "sqrt-plus"},
      "solver": {"dt": 0.001, "dt_fine": 0.000125, "t_end": 1.0, "scheme": "semi-implicit", "sup_cap": 1000.0,
                 "linear_solver": "direct"},
      "initial": {"constant": [0.2, 0.2]},
      "experiment": {"name": "positivity", "paths": 64},
      "output": {"stride": 0, "format": "auto"}
    })");
    return cfg;
}

std::string config_digest(const RunConfig& cfg)
{
    Json j = cfg.raw;
    j.erase("master_seed");
    if (j.contains("output") && j["output"].is_object()) {
        j["output"].erase("dir");
    }
    return Fnv1a().text(j.dump()).hex();
}

std::uint64_t master_seed(const RunConfig& cfg)
{
    return value<std::uint64_t>(cfg.raw, "master_seed", 42);
}

Problem build_problem(const RunConfig& cfg)
{
    const Json& g = block(cfg.raw, "grid");
    const int dim = value(g, "dim", 1);
    const auto extents = required<std::vector<double>>(g, "extent");
    const auto cells = required<std::vector<int>>(g, "cells");
    if (extents.size() != static_cast<std::size_t>(std::max(dim, 0)) ||
        cells.size() != static_cast<std::size_t>(std::max(dim, 0))) {
        if (dim < 1 || dim > 2) {
            throw ConfigError("grid", "unsupported dimension " + std::to_string(dim));
        }
        throw ConfigError("grid", "extent and cells need one entry per axis");
    }
    const DomainGrid grid = DomainGrid::build(dim, extents, cells);

    ReactionSystem reaction = reaction_from(block(cfg.raw, "reaction"));
    const std::size_t r = reaction.components();

    const Json& ops = block(cfg.raw, "operators");
    std::vector<EllipticOperator> operators;
    for (std::size_t l = 0; l < r; ++l) {
        const Json& o = per_component(ops, l, r, "operators");
        const double eta = required<double>(o, "eta");
        const double M = required<double>(o, "M_bound");
        CoefficientField cf;
        if (o.contains("csv")) {
            auto file = std::filesystem::path(o.at("csv").get<std::string>());
            if (file.is_relative()) {
                file = cfg.base_dir / file;
            }
            cf = load_coefficients_csv(file, grid, eta, M);
        } else {
            const Json& a = o.contains("a") ? o.at("a") : Json(1.0);
            const double c = value(o, "c", 0.0);
            if (a.is_number()) {
                cf = CoefficientField::uniform(grid, a.get<double>(), c, eta, M);
            } else {
                const auto t = a.get<std::vector<double>>();
                if (t.size() != 3) {
                    throw ConfigError("shape", "tensor coefficients are given as [a11, a12, a22]");
                }
                cf = CoefficientField::uniform(grid, 1.0, c, eta, M);
                for (auto& entry : cf.tensor) {
                    entry = {t[0], t[1], t[2]};
                }
            }
        }
        operators.push_back(EllipticOperator::assemble(grid, std::move(cf)));
    }

    const Json& nz = block(cfg.raw, "noise");
    std::vector<ComponentNoise> comps;
    for (std::size_t l = 0; l < r; ++l) {
        const Json& n = nz.contains("components") ? per_component(nz.at("components"), l, r, "noise") : nz;
        const Json merged = [&] {
            Json m = nz;
            m.erase("components");
            if (&n != &nz) {
                m.update(n);
            }
            return m;
        }();
        SpectralBasis basis = basis_from(merged, grid, cfg.base_dir);
        const Json& gspec = merged.contains("g") ? merged.at("g") : Json("sqrt-abs");
        const std::string gname = per_component(gspec, l, r, "noise.g").get<std::string>();
        auto lambdas = lambdas_from(merged, basis.modes());
        comps.push_back(build_noise(std::move(basis), std::move(lambdas), HolderFunction::by_name(gname)));
    }
    return Problem::make(std::move(operators), std::move(reaction), NoiseModel(std::move(comps)));
}

SolverConfig build_solver_config(const RunConfig& cfg)
{
    const Json& s = block(cfg.raw, "solver");
    SolverConfig c;
    c.dt = required<double>(s, "dt");
    c.t_end = required<double>(s, "t_end");
    if (!(c.dt > 0.0) || !(c.t_end > 0.0)) {
        throw ConfigError("solver", "dt and t_end must be positive");
    }
    const std::string scheme = value<std::string>(s, "scheme", "semi-implicit");
    if (scheme == "semi-implicit") {
        c.scheme = Scheme::semi_implicit;
    } else if (scheme == "tamed" || scheme == "tamed-semi-implicit") {
        c.scheme = Scheme::tamed;
    } else {
        throw ConfigError("solver", "unknown scheme '" + scheme + "'");
    }
    const Json cap = s.contains("sup_cap") ? s.at("sup_cap") : Json();
    c.sup_cap = cap.is_number() ? cap.get<double>() : std::numeric_limits<double>::infinity();
    const std::string ls = value<std::string>(s, "linear_solver", "direct");
    if (ls == "direct") {
        c.solve.kind = LinearSolverKind::direct;
    } else if (ls == "cg" || ls == "conjugate-gradient") {
        c.solve.kind = LinearSolverKind::conjugate_gradient;
    } else {
        throw ConfigError("solver", "unknown linear solver '" + ls + "'");
    }
    c.solve.tolerance = value(s, "tolerance", 1e-10);
    std::size_t stride = 0;
    if (cfg.raw.contains("output")) {
        stride = value<std::size_t>(cfg.raw.at("output"), "stride", 0);
    }
    // Default: about 64 stored samples per run.
    c.stride = stride > 0 ? stride : std::max<std::size_t>(1, step_count(c) / 64);
    return c;
}

double dt_fine(const RunConfig& cfg)
{
    const Json& s = block(cfg.raw, "solver");
    return value(s, "dt_fine", required<double>(s, "dt"));
}

State build_initial(const RunConfig& cfg, const DomainGrid& grid, std::size_t components)
{
    const Json& j = block(cfg.raw, "initial");
    State u;
    if (j.contains("constant") && j.at("constant").is_array()) {
        const auto v = j.at("constant").get<std::vector<double>>();
        if (v.size() != components) {
            throw ConfigError("initial", "initial.constant needs one value per component");
        }
        for (double x : v) {
            u.push_back(grid.constant(x));
        }
        return u;
    }
    const Json& comps = required<Json>(j, "components");
    for (std::size_t l = 0; l < components; ++l) {
        u.push_back(field_from(per_component(comps, l, components, "initial"), grid));
    }
    return u;
}

EnsembleOptions build_ensemble(const RunConfig& cfg, std::size_t paths, unsigned workers)
{
    EnsembleOptions e;
    e.master_seed = master_seed(cfg);
    e.paths = paths;
    e.workers = workers;
    e.dt_fine = dt_fine(cfg);
    return e;
}

std::string experiment_name(const RunConfig& cfg)
{
    if (!cfg.raw.contains("experiment")) {
        return "none";
    }
    return value<std::string>(cfg.raw.at("experiment"), "name", "none");
}

Json experiment_param(const RunConfig& cfg, const std::string& key, const Json& fallback)
{
    if (!cfg.raw.contains("experiment") || !cfg.raw.at("experiment").contains(key)) {
        return fallback;
    }
    return cfg.raw.at("experiment").at(key);
}

void check_experiment_preconditions(const RunConfig& cfg, const Problem& problem)
{
    if (experiment_name(cfg) == "positivity") {
        check_positivity_preconditions(problem, build_initial(cfg, problem.grid, problem.components()));
    }
}

std::uint64_t file_digest(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("output", "cannot read " + path.string());
    }
    Fnv1a h;
    char buf[1 << 14];
    while (in) {
        in.read(buf, sizeof(buf));
        h.bytes(buf, static_cast<std::size_t>(in.gcount()));
    }
    return h.value();
}

Json write_trajectory(const std::filesystem::path& dir, const Trajectory& traj, const DomainGrid& grid,
                      TrajectoryFormat format, const Json& extra)
{
    std::filesystem::create_directories(dir);
    const std::size_t r = traj.states.empty() ? 0 : traj.states.front().size();
    const bool csv = format == TrajectoryFormat::csv ||
                     (format == TrajectoryFormat::automatic && grid.dim() == 1 && grid.size() <= 256);
    Json m = extra;
    m["tool"] = "srd";
    m["tool_version"] = kToolVersion;
    m["seed"] = traj.provenance.seed;
    m["problem_digest"] = traj.provenance.problem_digest;
    if (!traj.provenance.config_digest.empty()) {
        m["config_digest"] = traj.provenance.config_digest;
    }
    Json g;
    g["dim"] = grid.dim();
    g["extent"] = Json::array();
    g["cells"] = Json::array();
    for (int a = 0; a < grid.dim(); ++a) {
        g["extent"].push_back(grid.extent(a));
        g["cells"].push_back(grid.cells(a));
    }
    m["grid"] = g;
    m["dt"] = traj.dt;
    m["times"] = traj.times;
    m["steps"] = traj.steps;
    m["stopping"] = {{"triggered", traj.stopping.triggered},
                     {"level", traj.stopping.level},
                     {"step", traj.stopping.step},
                     {"time", traj.stopping.time}};

    std::filesystem::path file;
    if (csv) {
        file = dir / "trajectory.csv";
        std::ofstream out(file);
        if (!out) {
            throw ConfigError("output", "cannot write " + file.string());
        }
        out << "step,time,component";
        for (std::size_t c = 0; c < grid.size(); ++c) {
            out << ",x" << c;
        }
        out << '\n' << std::setprecision(17);
        for (std::size_t i = 0; i < traj.states.size(); ++i) {
            for (std::size_t l = 0; l < r; ++l) {
                out << traj.steps[i] << ',' << traj.times[i] << ',' << l;
                for (double x : traj.states[i][l]) {
                    out << ',' << x;
                }
                out << '\n';
            }
        }
        m["format"] = "csv";
    } else {
        file = dir / "trajectory.f64";
        std::ofstream out(file, std::ios::binary);
        if (!out) {
            throw ConfigError("output", "cannot write " + file.string());
        }
        for (const auto& st : traj.states) {
            for (const auto& f : st) {
                for (double x : f) {
                    std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
                    if constexpr (std::endian::native == std::endian::big) {
                        bits = __builtin_bswap64(bits);
                    }
                    out.write(reinterpret_cast<const char*>(&bits), sizeof(bits));
                }
            }
        }
        m["format"] = "raw-f64-le";
        Json shape = Json::array({traj.states.size(), r});
        for (int a = grid.dim() - 1; a >= 0; --a) {
            shape.push_back(grid.cells(a));
        }
        m["shape"] = shape;
        m["layout"] = "time, component, then cells with axis 0 fastest";
    }
    m["file"] = file.filename().string();
    m["file_digest"] = Fnv1a::to_hex(file_digest(file));
    std::ofstream man(dir / "manifest.json");
    man << m.dump(2) << '\n';
    return m;
}

}  // namespace srd
