#include "srd/elliptic_operator.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "srd/error.hpp"

namespace srd {

namespace {

// Eigenvalues of the symmetric 2x2 tensor, (min, max).
std::pair<double, double> tensor_eigenvalues(const std::array<double, 3>& t, int dim)
{
    if (dim == 1) {
        return {t[0], t[0]};
    }
    const double mean = 0.5 * (t[0] + t[2]);
    const double half_diff = 0.5 * (t[0] - t[2]);
    const double radius = std::hypot(half_diff, t[1]);
    return {mean - radius, mean + radius};
}

double harmonic_mean(double a, double b)
{
    return 2.0 * a * b / (a + b);
}

}  // namespace

CoefficientField CoefficientField::uniform(const DomainGrid& grid, double a, double c, double eta, double M_bound)
{
    CoefficientField f;
    f.tensor.assign(grid.size(), {a, 0.0, grid.dim() == 2 ? a : 0.0});
    f.c.assign(grid.size(), c);
    f.eta = eta;
    f.M_bound = M_bound;
    return f;
}

void CoefficientField::validate(const DomainGrid& grid) const
{
    if (tensor.size() != grid.size() || c.size() != grid.size()) {
        throw ConfigError("shape", "coefficient field has " + std::to_string(tensor.size()) + " tensors and " +
                                       std::to_string(c.size()) + " c values for a grid of " +
                                       std::to_string(grid.size()) + " cells");
    }
    if (!(eta > 0.0) || !(M_bound >= eta)) {
        throw ConfigError("ellipticity", "ellipticity window requires 0 < eta <= M_bound");
    }
    constexpr double slack = 1e-12;
    for (std::size_t cell = 0; cell < grid.size(); ++cell) {
        const auto [lo, hi] = tensor_eigenvalues(tensor[cell], grid.dim());
        if (!(lo >= eta * (1.0 - slack)) || !(hi <= M_bound * (1.0 + slack))) {
            throw AuditError("ellipticity", "cell " + std::to_string(cell) + " has tensor eigenvalues [" +
                                                std::to_string(lo) + ", " + std::to_string(hi) +
                                                "] outside [eta, M_bound]");
        }
        if (!std::isfinite(c[cell])) {
            throw AuditError("ellipticity", "non-finite c at cell " + std::to_string(cell));
        }
    }
}

bool CoefficientField::nonnegative_c() const
{
    return std::all_of(c.begin(), c.end(), [](double v) { return v >= 0.0; });
}

CoefficientField load_coefficients_csv(const std::filesystem::path& path, const DomainGrid& grid, double eta,
                                       double M_bound)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("coefficients", "cannot open " + path.string());
    }
    CoefficientField f;
    f.eta = eta;
    f.M_bound = M_bound;
    f.tensor.assign(grid.size(), {0.0, 0.0, 0.0});
    f.c.assign(grid.size(), 0.0);
    std::vector<bool> seen(grid.size(), false);
    const std::size_t expected = grid.dim() == 1 ? 3 : 5;

    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || !std::isdigit(static_cast<unsigned char>(line[first]))) {
            continue;
        }
        std::vector<double> values;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            values.push_back(std::stod(cell));
        }
        if (values.size() != expected) {
            throw ConfigError("coefficients", "expected " + std::to_string(expected) + " columns, got: " + line);
        }
        const auto idx = static_cast<std::size_t>(values[0]);
        if (idx >= grid.size()) {
            throw ConfigError("coefficients", "cell index out of range: " + line);
        }
        if (grid.dim() == 1) {
            f.tensor[idx] = {values[1], 0.0, 0.0};
            f.c[idx] = values[2];
        } else {
            f.tensor[idx] = {values[1], values[2], values[3]};
            f.c[idx] = values[4];
        }
        seen[idx] = true;
    }
    if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) {
        throw ConfigError("shape", "coefficient file does not cover every cell");
    }
    return f;
}

EllipticOperator EllipticOperator::assemble(const DomainGrid& grid, CoefficientField coeffs)
{
    coeffs.validate(grid);

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(grid.size() * (1 + 2 * static_cast<std::size_t>(grid.dim())));
    std::vector<double> diagonal(grid.size(), 0.0);

    auto add_face = [&](std::size_t p, std::size_t q, int axis) {
        const int comp = axis == 0 ? 0 : 2;
        const double h = grid.spacing(axis);
        const double w = harmonic_mean(coeffs.tensor[p][comp], coeffs.tensor[q][comp]) / (h * h);
        triplets.emplace_back(static_cast<int>(p), static_cast<int>(q), w);
        triplets.emplace_back(static_cast<int>(q), static_cast<int>(p), w);
        diagonal[p] -= w;
        diagonal[q] -= w;
    };

    const int n0 = grid.cells(0);
    const int n1 = grid.dim() == 2 ? grid.cells(1) : 1;
    for (int j = 0; j < n1; ++j) {
        for (int i = 0; i < n0; ++i) {
            const auto p = grid.index(i, j);
            if (i + 1 < n0) {
                add_face(p, grid.index(i + 1, j), 0);
            }
            if (grid.dim() == 2 && j + 1 < n1) {
                add_face(p, grid.index(i, j + 1), 1);
            }
        }
    }
    for (std::size_t p = 0; p < grid.size(); ++p) {
        triplets.emplace_back(static_cast<int>(p), static_cast<int>(p), diagonal[p] - coeffs.c[p]);
    }

    const auto n = static_cast<Eigen::Index>(grid.size());
    SparseMatrix m(n, n);
    m.setFromTriplets(triplets.begin(), triplets.end());
    m.makeCompressed();
    return EllipticOperator(grid, std::move(coeffs), std::move(m));
}

struct ImplicitPropagator::Impl {
    LinearSolverKind kind;
    Eigen::SimplicialLDLT<SparseMatrix> ldlt;
    SparseMatrix system;
    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
};

ImplicitPropagator::ImplicitPropagator(const EllipticOperator& op, double tau, SolveOptions options) : tau_(tau)
{
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw ConfigError("dt", "implicit step size must be positive and finite");
    }
    auto impl = std::make_shared<Impl>();
    impl->kind = options.kind;

    const auto n = op.matrix().rows();
    SparseMatrix identity(n, n);
    identity.setIdentity();
    impl->system = identity - tau * op.matrix();
    impl->system.makeCompressed();

    if (options.kind == LinearSolverKind::direct) {
        impl->ldlt.compute(impl->system);
        if (impl->ldlt.info() != Eigen::Success) {
            throw SolverError("factorization", "sparse LDLT factorization failed");
        }
        if (impl->ldlt.vectorD().minCoeff() <= 0.0) {
            throw SolverError("indefinite", "I - tau*A is not positive definite (shift inside the spectrum)");
        }
    } else {
        impl->cg.setTolerance(options.tolerance);
        impl->cg.setMaxIterations(static_cast<Eigen::Index>(10 * n + 100));
        impl->cg.compute(impl->system);
        if (impl->cg.info() != Eigen::Success) {
            throw SolverError("factorization", "conjugate gradient setup failed");
        }
    }
    impl_ = std::move(impl);
}

Field ImplicitPropagator::apply(const Field& u) const
{
    if (impl_->kind == LinearSolverKind::direct) {
        return impl_->ldlt.solve(u);
    }
    Field x = impl_->cg.solve(u);
    if (impl_->cg.info() != Eigen::Success) {
        throw SolverError("cg", "conjugate gradient did not reach tolerance (estimated error " +
                                    std::to_string(impl_->cg.error()) + ")");
    }
    // CG converges on SPD systems only; an indefinite shift shows up as a
    // residual far above tolerance.
    const double rel = (impl_->system * x - u).norm() / std::max(u.norm(), 1e-300);
    if (rel > 1e3 * impl_->cg.tolerance()) {
        throw SolverError("indefinite", "conjugate gradient residual " + std::to_string(rel));
    }
    return x;
}

Field apply_resolvent(const EllipticOperator& op, double lambda, const Field& f, SolveOptions options)
{
    if (!(lambda > 0.0)) {
        throw ConfigError("lambda", "resolvent parameter must be positive");
    }
    // lambda (lambda - A)^{-1} = (I - A/lambda)^{-1}
    return ImplicitPropagator(op, 1.0 / lambda, options).apply(f);
}

Field semigroup_step(const EllipticOperator& op, double dt, const Field& u, SolveOptions options)
{
    return ImplicitPropagator(op, dt, options).apply(u);
}

Eigen::VectorXd operator_spectrum(const EllipticOperator& op)
{
    const Eigen::MatrixXd dense(op.matrix());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

void write_spectrum_csv(const std::filesystem::path& path, const Eigen::VectorXd& spectrum)
{
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("output", "cannot write " + path.string());
    }
    out << "index,eigenvalue\n";
    out.precision(17);
    for (Eigen::Index k = 0; k < spectrum.size(); ++k) {
        out << k << ',' << spectrum[k] << '\n';
    }
}

}  // namespace srd
