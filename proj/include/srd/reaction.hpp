#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "srd/grid.hpp"

namespace srd {

/// Odd-degree polynomial drift h(x, s) = sum_{j=1}^{deg} omega_j(x) s^j with
/// either one coefficient row shared by all cells or one row per cell.
/// The identically-zero drift is a permitted degenerate case.
class PolynomialDrift {
public:
    /// `omega[j-1]` is the coefficient of s^j. Trailing zeros are dropped.
    static PolynomialDrift uniform(std::vector<double> omega, double epsilon_lead = 0.0);
    static PolynomialDrift per_cell(std::vector<std::vector<double>> rows, double epsilon_lead = 0.0);
    static PolynomialDrift zero() { return uniform({}); }

    bool is_zero() const noexcept { return degree_ == 0; }
    int degree() const noexcept { return degree_; }
    /// N in degree = 2N + 1 (0 for the zero drift).
    int half_order() const noexcept { return degree_ > 0 ? (degree_ - 1) / 2 : 0; }
    double epsilon_lead() const noexcept { return epsilon_lead_; }

    std::size_t rows() const noexcept { return rows_.size(); }
    std::span<const double> coefficients(std::size_t cell) const;

    double operator()(std::size_t cell, double s) const;

    /// Upper bound on |h'| over [-m, m] and all cells.
    double lipschitz(double m) const;

private:
    std::vector<std::vector<double>> rows_;
    int degree_ = 0;
    double epsilon_lead_ = 0.0;
};

/// Constants certifying the one-sided polynomial bounds on a drift.
/// `a` is the full (F1) constant; `a_one_sided` only covers h <= a on s >= 0
/// and h >= -a on s <= 0. The (F2) sandwich is enforced one-sidedly: the upper
/// bound a2 - b2 s^{2N+1} on s >= 0, the lower bound a1 - b1 s^{2N+1} on s <= 0.
struct F2Constants {
    double a1 = 0.0;
    double a2 = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
};

struct DriftCertificate {
    int N = 0;
    double a = 0.0;
    double a_one_sided = 0.0;
    /// Empty for the zero drift, which admits no positive b.
    std::optional<F2Constants> f2;
};

/// Constants of the sup-norm dissipativity inequalities, derived from a
/// certificate: a' = a, a'' = 2a + max(a2+ + b2, (-a1)+ + b1),
/// b'' = min(b1, b2) / 2^{2N+1}.
struct DissipativityConstants {
    double a_prime = 0.0;
    double a_dprime = 0.0;
    double b_dprime = 0.0;
};

/// Certifies a drift. Throws AuditError("even degree") or
/// AuditError("leading coefficient") on a violation.
DriftCertificate check_f1_f2(const PolynomialDrift& h);

DissipativityConstants dissipativity_constants(const DriftCertificate& cert);

/// Locally Lipschitz coupling k_l(x, s_1..s_r) with declared linear-growth
/// constants and Lipschitz map m -> L_m (l1 norm on the arguments).
struct CouplingTerm {
    using Evaluator = std::function<double(std::size_t cell, std::span<const double> s)>;

    std::string name;
    Evaluator evaluate;
    double growth_c1 = 0.0;
    double growth_c2 = 0.0;
    std::function<double(double)> lipschitz;

    static CouplingTerm none();
    /// k(s) = sum_j weights[j] * s_j.
    static CouplingTerm linear(std::vector<double> weights);
};

struct AuditOptions {
    std::uint64_t seed = 0x5eedULL;
    int samples = 10000;
    std::vector<double> radii{1.0, 10.0, 100.0};
    /// Cells sampled during the audit are drawn from [0, cells).
    std::size_t cells = 1;
    double tolerance = 1e-9;
};

/// Reaction term f_l = h_l + k_l for l = 0..r-1, certified at construction.
/// Immutable; evaluation is pure. A truncated copy freezes h beyond |s| = n
/// and k beyond the l1 ball of radius n.
class ReactionSystem {
public:
    static ReactionSystem certify(std::vector<PolynomialDrift> drifts, std::vector<CouplingTerm> couplings,
                                  const AuditOptions& audit = {});

    std::size_t components() const noexcept { return drifts_.size(); }
    const PolynomialDrift& drift(std::size_t l) const { return drifts_.at(l); }
    const CouplingTerm& coupling(std::size_t l) const { return couplings_.at(l); }
    const DriftCertificate& certificate(std::size_t l) const { return certificates_.at(l); }
    const DissipativityConstants& dissipativity(std::size_t l) const { return dissipativity_.at(l); }

    double drift_value(std::size_t l, std::size_t cell, double s) const;
    double coupling_value(std::size_t l, std::size_t cell, std::span<const double> s) const;
    double evaluate(std::size_t l, std::size_t cell, std::span<const double> s) const
    {
        return drift_value(l, cell, s[l]) + coupling_value(l, cell, s);
    }

    std::optional<double> truncation_level() const noexcept { return truncation_; }
    ReactionSystem truncated(double n) const;

    /// Largest coupling Lipschitz constant over components at radius m.
    double coupling_lipschitz(double m) const;
    /// Bound on the Lipschitz constant of the full f_l over [-m, m]^r.
    double lipschitz(double m) const;

private:
    ReactionSystem() = default;

    std::vector<PolynomialDrift> drifts_;
    std::vector<CouplingTerm> couplings_;
    std::vector<DriftCertificate> certificates_;
    std::vector<DissipativityConstants> dissipativity_;
    std::optional<double> truncation_;
};

/// Pointwise (F_l u)(x) = h_l(x, u_l(x)) + k_l(x, u(x)).
State evaluate_reaction(const ReactionSystem& sys, const State& u);

enum class DissipativityMode { growth, difference };

/// Signed margin of the sup-norm dissipativity inequality at the discrete
/// norming functional phi = sgn(u(x*)) delta_{x*}, x* the lowest-index argmax
/// of |u|. `growth`:      a'(1+|v|)^{2N+1} - <H(u+v), phi>.
/// `difference`: a''(1+|v|)^{2N+1} - b''|u|^{2N+1} - <H(u+v) - H(v), phi>.
double dissipativity_gap(const ReactionSystem& sys, std::size_t l, const Field& u, const Field& v,
                         DissipativityMode mode = DissipativityMode::growth);

struct QuasiPositivityWitness {
    std::size_t component = 0;
    std::size_t cell = 0;
    std::vector<double> point;
    double value = 0.0;
};

struct QuasiPositivityReport {
    bool pass = true;
    std::optional<QuasiPositivityWitness> witness;
    /// Smallest Phi_l(s) over samples with s_l = 0, s_j >= 0.
    double min_boundary_value = 0.0;
    /// Smallest L * sum_j s_j^- + Phi_l(s) over samples with s_l <= 0.
    double min_lipschitz_margin = 0.0;
    double lipschitz_used = 0.0;
    std::size_t samples_checked = 0;
};

struct QuasiPositivityOptions {
    std::uint64_t seed = 0x9051ULL;
    /// Lipschitz constant for the negative-part audit; defaults to sys.lipschitz(m).
    std::optional<double> lipschitz;
    std::size_t cells = 1;
    double tolerance = 1e-9;
};

QuasiPositivityReport check_quasi_positive(const ReactionSystem& sys, std::size_t samples, double range_m,
                                           const QuasiPositivityOptions& options = {});

/// Same check on an explicit sample set: each row is a point in R^r whose
/// component `l` is ignored and replaced by 0 (boundary test) or by -|s_l|
/// (negative-part audit).
QuasiPositivityReport check_quasi_positive_on(const ReactionSystem& sys, std::span<const std::vector<double>> samples,
                                              double lipschitz, double tolerance = 1e-9);

/// f1 = u - u^3 + v, f2 = a u - b v, split as h1 = s - s^3, k1 = v, h2 = 0,
/// k2 = a u - b v. Throws ConfigError for a <= 0 or b <= 0.
ReactionSystem fhn_system(double a, double b);

}  // namespace srd
