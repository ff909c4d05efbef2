#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "srd/experiments.hpp"
#include "srd/solver.hpp"

namespace srd {

inline constexpr const char* kToolVersion = "0.1.0";

/// Versioned run configuration ("version": 1). Blocks: grid, operators,
/// reaction, noise, solver, initial, experiment, output, master_seed.
struct RunConfig {
    Json raw;
    /// Directory that relative file references (coefficient CSVs) resolve against.
    std::filesystem::path base_dir;
};

/// Throws ConfigError("parse") for unreadable JSON and ConfigError("version")
/// for an unknown version.
RunConfig parse_config(const std::string& text, std::filesystem::path base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// FitzHugh-Nagumo preset: two components on [0, 1], sqrt-plus noise driven by
/// independent mode families per component, nonnegative initial data.
RunConfig fhn_preset();

/// FNV-1a of the canonical JSON with master_seed and output.dir removed.
std::string config_digest(const RunConfig& cfg);

std::uint64_t master_seed(const RunConfig& cfg);

Problem build_problem(const RunConfig& cfg);
SolverConfig build_solver_config(const RunConfig& cfg);
double dt_fine(const RunConfig& cfg);
State build_initial(const RunConfig& cfg, const DomainGrid& grid, std::size_t components);
EnsembleOptions build_ensemble(const RunConfig& cfg, std::size_t paths, unsigned workers);

/// Name of the configured experiment ("none" when absent).
std::string experiment_name(const RunConfig& cfg);
/// Experiment parameter with a default.
Json experiment_param(const RunConfig& cfg, const std::string& key, const Json& fallback);

/// Checks the preconditions of the configured experiment without running it
/// (for example g(0) = 0 when the experiment is "positivity").
void check_experiment_preconditions(const RunConfig& cfg, const Problem& problem);

enum class TrajectoryFormat { automatic, csv, raw };

/// CSV for 1D runs with at most 256 cells (automatic), raw little-endian
/// float64 otherwise; always writes manifest.json. Returns the manifest.
Json write_trajectory(const std::filesystem::path& dir, const Trajectory& traj, const DomainGrid& grid,
                      TrajectoryFormat format, const Json& extra);

std::uint64_t file_digest(const std::filesystem::path& path);

}  // namespace srd
