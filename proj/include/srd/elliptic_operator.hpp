#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <vector>

#include <Eigen/SparseCore>

#include "srd/grid.hpp"

namespace srd {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Diffusion tensor a(x) and zeroth-order coefficient c(x) per cell, with the
/// ellipticity window [eta, M_bound] the tensor eigenvalues must respect.
/// The tensor is stored as (a11, a12, a22); in 1D only a11 is used.
struct CoefficientField {
    std::vector<std::array<double, 3>> tensor;
    std::vector<double> c;
    double eta = 0.0;
    double M_bound = 0.0;

    /// Isotropic a(x) = a*I and constant c.
    static CoefficientField uniform(const DomainGrid& grid, double a, double c, double eta, double M_bound);

    /// Throws ConfigError("shape") on a size mismatch and AuditError("ellipticity")
    /// when some cell has a tensor eigenvalue outside [eta, M_bound].
    void validate(const DomainGrid& grid) const;

    bool nonnegative_c() const;
};

/// Reads one row per cell: `index, a11[, a12, a22], c`. Lines that do not
/// start with a digit are skipped (headers, comments).
CoefficientField load_coefficients_csv(const std::filesystem::path& path, const DomainGrid& grid, double eta,
                                       double M_bound);

/// Cell-centered finite-volume discretization of A = div(a grad .) - c with
/// zero conormal flux on the boundary. Immutable after assembly.
class EllipticOperator {
public:
    static EllipticOperator assemble(const DomainGrid& grid, CoefficientField coeffs);

    const DomainGrid& grid() const noexcept { return grid_; }
    const SparseMatrix& matrix() const noexcept { return matrix_; }
    const CoefficientField& coefficients() const noexcept { return coeffs_; }

    Field apply(const Field& f) const { return matrix_ * f; }

private:
    EllipticOperator(DomainGrid grid, CoefficientField coeffs, SparseMatrix matrix)
        : grid_(std::move(grid)), coeffs_(std::move(coeffs)), matrix_(std::move(matrix)) {}

    DomainGrid grid_;
    CoefficientField coeffs_;
    SparseMatrix matrix_;
};

enum class LinearSolverKind { direct, conjugate_gradient };

struct SolveOptions {
    LinearSolverKind kind = LinearSolverKind::direct;
    /// Relative residual tolerance for conjugate gradient.
    double tolerance = 1e-10;
};

/// Applies (I - tau*A)^{-1}. The factorization (or preconditioner) is built
/// once; copies share it and `apply` is safe to call concurrently.
class ImplicitPropagator {
public:
    ImplicitPropagator(const EllipticOperator& op, double tau, SolveOptions options = {});

    Field apply(const Field& u) const;
    double tau() const noexcept { return tau_; }

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
    double tau_;
};

/// lambda * (lambda I - A)^{-1} f.
Field apply_resolvent(const EllipticOperator& op, double lambda, const Field& f, SolveOptions options = {});

/// One backward-Euler step (I - dt*A)^{-1} u.
Field semigroup_step(const EllipticOperator& op, double dt, const Field& u, SolveOptions options = {});

/// Dense eigenvalues of the assembled matrix in ascending order (small grids).
Eigen::VectorXd operator_spectrum(const EllipticOperator& op);

void write_spectrum_csv(const std::filesystem::path& path, const Eigen::VectorXd& spectrum);

}  // namespace srd
