#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "srd/grid.hpp"
#include "srd/quadrature.hpp"

namespace srd {

enum class BasisKind { cosine_neumann, user_table };

/// First K functions of an orthonormal basis of L^2(O), tabulated at cell
/// centers, together with their sup norms on the closed domain.
class SpectralBasis {
public:
    /// Neumann cosines e_0 = 1/sqrt(L), e_k = sqrt(2/L) cos(k pi x / L); in 2D the
    /// tensor products ordered by Laplacian eigenvalue, ties by first index.
    static SpectralBasis cosine_neumann(const DomainGrid& grid, std::size_t modes);
    /// Tabulated basis; sup norms default to the tabulated maxima.
    static SpectralBasis user_table(std::vector<Field> values, std::vector<double> sup_norms = {});

    BasisKind kind() const noexcept { return kind_; }
    std::size_t modes() const noexcept { return values_.size(); }
    const Field& mode(std::size_t k) const { return values_.at(k); }
    double sup_norm(std::size_t k) const { return sup_norms_.at(k); }

    /// max_{j,k} |sum_x e_j e_k vol - delta_jk|.
    double orthonormality_defect(const DomainGrid& grid) const;

private:
    BasisKind kind_ = BasisKind::cosine_neumann;
    std::vector<Field> values_;
    std::vector<double> sup_norms_;
};

/// Scalar g with linear growth |g(s)| <= a + b|s| and local 1/2-Hölder
/// constants c_m on [-m, m].
struct HolderFunction {
    std::string name;
    std::function<double(double)> evaluate;
    double growth_a = 0.0;
    double growth_b = 0.0;
    std::function<double(double)> holder_c;
    double exponent = 0.5;

    /// "sqrt-abs", "sqrt-plus", "sqrt-clipped-01", "sqrt-abs-shifted",
    /// "lipschitz:L", "zero". Throws ConfigError for unknown names.
    static HolderFunction by_name(const std::string& name);
};

struct HolderAuditOptions {
    std::uint64_t seed = 0x601dULL;
    int samples = 4000;
    std::vector<double> radii{1.0, 10.0, 100.0};
    double tolerance = 1e-12;
};

/// Randomized audit of the declared growth and Hölder constants.
/// Throws AuditError("holder") / AuditError("growth").
void audit_holder(const HolderFunction& g, const HolderAuditOptions& options = {});

/// Noise of one component: g(s) lambda_k e_k(x) for k < K.
class ComponentNoise {
public:
    ComponentNoise(SpectralBasis basis, std::vector<double> lambdas, HolderFunction g);

    const SpectralBasis& basis() const noexcept { return basis_; }
    const std::vector<double>& lambdas() const noexcept { return lambdas_; }
    const HolderFunction& g() const noexcept { return g_; }
    std::size_t modes() const noexcept { return lambdas_.size(); }

    /// alpha_k = a ||lambda_k e_k||, beta_k = b ||lambda_k e_k||.
    const std::vector<double>& alpha() const noexcept { return alpha_; }
    const std::vector<double>& beta() const noexcept { return beta_; }
    /// sum_k ||lambda_k e_k||^2.
    double mode_energy() const noexcept { return mode_energy_; }
    /// C_m = c_m^2 sum_k ||lambda_k e_k||^2, so rho_m(s) = C_m s.
    double rho_constant(double m) const;
    Modulus rho(double m) const;
    /// rho_m(s) + s when C_m < 1, so that the modulus dominates the identity.
    Modulus adjusted_rho(double m) const;

    bool vanishes() const noexcept { return mode_energy_ == 0.0; }
    std::optional<double> truncation_level() const noexcept { return truncation_; }
    ComponentNoise truncated(double n) const;

    double g_value(double s) const;

    /// x -> sum_k lambda_k e_k(x) dbeta_k (independent of the state).
    Field spatial_forcing(std::span<const double> increments) const;

    /// Per-cell sum_k lambda_k^2 e_k(x)^2.
    Field variance_density() const;

private:
    SpectralBasis basis_;
    std::vector<double> lambdas_;
    HolderFunction g_;
    std::vector<double> alpha_;
    std::vector<double> beta_;
    double mode_energy_ = 0.0;
    Eigen::MatrixXd table_;  // cells x K, entries lambda_k e_k(x)
    std::optional<double> truncation_;
};

/// Validates lengths and audits g; throws ConfigError / AuditError.
ComponentNoise build_noise(SpectralBasis basis, std::vector<double> lambdas, HolderFunction g,
                           const HolderAuditOptions& audit = {});

/// Diagonal noise, one ComponentNoise per equation.
class NoiseModel {
public:
    NoiseModel() = default;
    explicit NoiseModel(std::vector<ComponentNoise> components) : components_(std::move(components)) {}

    std::size_t components() const noexcept { return components_.size(); }
    const ComponentNoise& component(std::size_t l) const { return components_.at(l); }
    /// Largest K over components (the width of the Wiener path).
    std::size_t modes() const noexcept;

    NoiseModel truncated(double n) const;
    /// g_l(0) == 0 for every component.
    bool vanishes_at_zero() const;

private:
    std::vector<ComponentNoise> components_;
};

/// x -> g(u_l(x)) sum_k lambda_k e_k(x) dbeta_k.
Field apply_noise(const NoiseModel& noise, std::size_t l, const Field& u_l, std::span<const double> increments);

/// lambda_k = amplitude (k+1)^{-p}.
std::vector<double> power_law_lambdas(std::size_t modes, double p, double amplitude = 1.0);

struct OsgoodReport {
    bool diverges = false;
    std::vector<double> eps;
    std::vector<double> integral;
    /// Geometric-mean ratio of successive per-decade increments of I(eps).
    double increment_ratio = 0.0;
};

/// I(eps) = int_eps^1 ds / rho(s) on a decreasing eps grid. The integral is
/// declared divergent when its per-decade increments fail to decay
/// geometrically (ratio >= 0.9), i.e. when no finite tail is in sight.
/// Throws AuditError("osgood") if rho is not positive on (0, 1].
OsgoodReport osgood_check(const Modulus& rho, std::span<const double> eps_grid);
OsgoodReport osgood_check(const NoiseModel& noise, std::size_t l, double m, std::span<const double> eps_grid);

/// 10^-1, 10^-2, ..., 10^-12.
std::vector<double> default_eps_grid();

}  // namespace srd
