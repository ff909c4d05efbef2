#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

namespace srd {

/// Inverse standard normal CDF (Wichura AS241, PPND16; relative error ~1e-16).
double normal_quantile(double p);

/// Brownian increments of one resolution, laid out as (step, component, mode)
/// so a time step reads one contiguous block.
struct IncrementTable {
    std::size_t components = 0;
    std::size_t modes = 0;
    std::size_t steps = 0;
    double dt = 0.0;
    std::vector<double> data;

    std::span<const double> at(std::size_t step, std::size_t l) const
    {
        return {data.data() + (step * components + l) * modes, modes};
    }
};

/// Independent Brownian motions beta_{l,k} sampled at resolution dt_fine.
/// Every fine increment is a pure function of (seed, l, k, i) through a
/// Philox counter-based generator, so entries can be regenerated in any order.
/// Coarser views at dt = 2^j dt_fine are pairwise tree sums of fine
/// increments, so coarsening level j by groups of two gives level j+1 exactly.
class WienerPath {
public:
    WienerPath(std::uint64_t master_seed, std::size_t components, std::size_t modes, std::size_t n_fine,
               double dt_fine);

    std::uint64_t seed() const noexcept { return seed_; }
    std::size_t components() const noexcept { return components_; }
    std::size_t modes() const noexcept { return modes_; }
    std::size_t fine_steps() const noexcept { return n_fine_; }
    double dt_fine() const noexcept { return dt_fine_; }

    /// Fine increment with variance dt_fine.
    double increment(std::size_t l, std::size_t k, std::size_t i) const;

    /// j such that dt = 2^j dt_fine; throws ConfigError otherwise.
    unsigned level_for(double dt) const;

    /// Increments at dt = 2^level dt_fine covering the first `steps` coarse steps
    /// (all available steps when `steps` is 0).
    IncrementTable coarse(unsigned level, std::size_t steps = 0) const;

    /// Binary export: little-endian header (seed, r, K, n_fine as u64; dt_fine
    /// as f64) followed by the fine increments ordered (l, k, i), i fastest.
    void write_binary(const std::filesystem::path& path) const;
    static WienerPath read_binary(const std::filesystem::path& path);

private:
    std::uint64_t seed_;
    std::size_t components_;
    std::size_t modes_;
    std::size_t n_fine_;
    double dt_fine_;
    double scale_;
    // Set for paths replayed from a file; generated on demand otherwise.
    std::shared_ptr<const std::vector<double>> table_;
};

/// Same as the WienerPath constructor.
WienerPath sample_path(std::uint64_t master_seed, std::size_t components, std::size_t modes, std::size_t n_fine,
                       double dt_fine);

}  // namespace srd
