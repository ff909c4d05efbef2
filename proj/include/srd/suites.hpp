#pragma once

#include <optional>
#include <string>
#include <vector>

#include "srd/config.hpp"

namespace srd {

struct SuiteOptions {
    /// Overrides experiment.paths.
    std::optional<std::size_t> paths;
    unsigned workers = 1;
};

std::vector<std::string> suite_names();

/// Runs one verification suite on the configured problem. Parameters come
/// from the "experiment" block; missing keys fall back to suite defaults.
ExperimentReport run_suite(const RunConfig& cfg, const std::string& suite, const SuiteOptions& options = {});

/// Per-path summaries (min, max, final sup norm, exit) over an ensemble of
/// plain simulations; row order is the path index.
ExperimentReport run_ensemble(const RunConfig& cfg, const SuiteOptions& options = {});

}  // namespace srd
