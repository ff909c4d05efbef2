#include "srd/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "srd/error.hpp"

namespace srd {

DomainGrid DomainGrid::build(int dim, std::span<const double> extents, std::span<const int> n_cells)
{
    if (dim != 1 && dim != 2) {
        throw ConfigError("grid", "unsupported dimension " + std::to_string(dim));
    }
    if (extents.size() != static_cast<std::size_t>(dim) || n_cells.size() != static_cast<std::size_t>(dim)) {
        throw ConfigError("grid", "extents and cell counts must have one entry per axis");
    }
    DomainGrid g;
    g.dim_ = dim;
    g.size_ = 1;
    g.volume_ = 1.0;
    for (int axis = 0; axis < dim; ++axis) {
        const double L = extents[axis];
        const int n = n_cells[axis];
        if (!(L > 0.0) || !std::isfinite(L)) {
            throw ConfigError("grid", "nonpositive extent on axis " + std::to_string(axis));
        }
        if (n < 2) {
            throw ConfigError("grid", "cell count < 2 on axis " + std::to_string(axis));
        }
        g.extents_[axis] = L;
        g.n_[axis] = n;
        g.h_[axis] = L / n;
        g.size_ *= static_cast<std::size_t>(n);
        g.volume_ *= g.h_[axis];
    }
    return g;
}

double DomainGrid::measure() const noexcept
{
    double m = 1.0;
    for (int axis = 0; axis < dim_; ++axis) {
        m *= extents_[axis];
    }
    return m;
}

std::array<int, 2> DomainGrid::multi_index(std::size_t cell) const noexcept
{
    const auto n0 = static_cast<std::size_t>(n_[0]);
    return {static_cast<int>(cell % n0), static_cast<int>(cell / n0)};
}

std::array<double, 2> DomainGrid::center(std::size_t cell) const noexcept
{
    const auto [i, j] = multi_index(cell);
    std::array<double, 2> x{(i + 0.5) * h_[0], 0.0};
    if (dim_ == 2) {
        x[1] = (j + 0.5) * h_[1];
    }
    return x;
}

double sup_norm(const Field& f)
{
    return f.size() == 0 ? 0.0 : f.cwiseAbs().maxCoeff();
}

double state_norm(const State& u)
{
    double s = 0.0;
    for (const auto& c : u) {
        s += sup_norm(c);
    }
    return s;
}

double max_component_sup(const State& u)
{
    double s = 0.0;
    for (const auto& c : u) {
        s = std::max(s, sup_norm(c));
    }
    return s;
}

}  // namespace srd
