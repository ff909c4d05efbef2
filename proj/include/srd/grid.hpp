#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace srd {

/// Cell-centered scalar field on a DomainGrid.
using Field = Eigen::VectorXd;

/// r-component state, one Field per component.
using State = std::vector<Field>;

/// Uniform cell-centered grid on the box [0, L_0] x ... (dim 1 or 2).
/// Cells are numbered with axis 0 running fastest.
class DomainGrid {
public:
    static DomainGrid build(int dim, std::span<const double> extents, std::span<const int> n_cells);

    int dim() const noexcept { return dim_; }
    double extent(int axis) const { return extents_.at(axis); }
    int cells(int axis) const { return n_.at(axis); }
    double spacing(int axis) const { return h_.at(axis); }

    std::size_t size() const noexcept { return size_; }
    double cell_volume() const noexcept { return volume_; }
    double measure() const noexcept;

    std::size_t index(int i, int j = 0) const noexcept
    {
        return static_cast<std::size_t>(i) + static_cast<std::size_t>(n_[0]) * static_cast<std::size_t>(j);
    }
    std::array<int, 2> multi_index(std::size_t cell) const noexcept;
    std::array<double, 2> center(std::size_t cell) const noexcept;

    Field constant(double value) const { return Field::Constant(static_cast<Eigen::Index>(size_), value); }

    bool operator==(const DomainGrid&) const = default;

private:
    DomainGrid() = default;

    int dim_ = 1;
    std::array<double, 2> extents_{1.0, 1.0};
    std::array<int, 2> n_{1, 1};
    std::array<double, 2> h_{1.0, 1.0};
    std::size_t size_ = 0;
    double volume_ = 0.0;
};

/// Sup norm of a field.
double sup_norm(const Field& f);

/// Sum over components of the sup norms (the norm of E = C(O)^r).
double state_norm(const State& u);

/// Largest component sup norm.
double max_component_sup(const State& u);

}  // namespace srd
