#include "srd/reaction.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "srd/error.hpp"
#include "srd/random.hpp"

namespace srd {

namespace {

// Polynomials below are dense coefficient vectors c[0] + c[1] s + ... .
using Poly = std::vector<double>;

double poly_eval(const Poly& c, double s)
{
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        acc = acc * s + *it;
    }
    return acc;
}

Poly poly_derivative(const Poly& c)
{
    Poly d;
    for (std::size_t j = 1; j < c.size(); ++j) {
        d.push_back(static_cast<double>(j) * c[j]);
    }
    return d;
}

Poly reflect(const Poly& c)
{
    Poly r = c;
    for (std::size_t j = 1; j < r.size(); j += 2) {
        r[j] = -r[j];
    }
    return r;
}

void trim(Poly& c)
{
    while (!c.empty() && c.back() == 0.0) {
        c.pop_back();
    }
}

// Real roots of a polynomial via the companion matrix, Newton-polished.
std::vector<double> real_roots(Poly c)
{
    trim(c);
    std::vector<double> roots;
    if (c.size() <= 1) {
        return roots;
    }
    const auto n = static_cast<Eigen::Index>(c.size() - 1);
    const double lead = c.back();
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 1; i < n; ++i) {
        companion(i, i - 1) = 1.0;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        companion(i, n - 1) = -c[static_cast<std::size_t>(i)] / lead;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
    const Poly dc = poly_derivative(c);
    for (Eigen::Index i = 0; i < n; ++i) {
        const std::complex<double> z = es.eigenvalues()[i];
        if (std::abs(z.imag()) > 1e-7 * (1.0 + std::abs(z.real()))) {
            continue;
        }
        double x = z.real();
        for (int it = 0; it < 8; ++it) {
            const double d = poly_eval(dc, x);
            if (d == 0.0) {
                break;
            }
            const double step = poly_eval(c, x) / d;
            x -= step;
            if (std::abs(step) <= 1e-16 * (1.0 + std::abs(x))) {
                break;
            }
        }
        roots.push_back(x);
    }
    return roots;
}

// sup_{s >= 0} p(s); requires p bounded above on the half line.
double sup_on_nonnegative(const Poly& p)
{
    double best = poly_eval(p, 0.0);
    for (double r : real_roots(poly_derivative(p))) {
        if (r > 0.0) {
            best = std::max(best, poly_eval(p, r));
        }
    }
    return best;
}

// sup_{s >= 0} g(s) / (1 + s^d) for deg g <= d.
double sup_ratio_on_nonnegative(const Poly& g, int d)
{
    auto ratio_at = [&](double t) {
        const double s = t / (1.0 - t);
        return poly_eval(g, s) / (1.0 + std::pow(s, d));
    };
    constexpr int grid = 4096;
    double best = -std::numeric_limits<double>::infinity();
    int best_i = 0;
    for (int i = 0; i < grid; ++i) {
        const double v = ratio_at(static_cast<double>(i) / grid);
        if (v > best) {
            best = v;
            best_i = i;
        }
    }
    // Golden-section refinement on the bracketing grid cells.
    double lo = std::max(0.0, (best_i - 1.0) / grid);
    double hi = std::min(1.0 - 1e-12, (best_i + 1.0) / grid);
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 80; ++it) {
        const double x1 = hi - invphi * (hi - lo);
        const double x2 = lo + invphi * (hi - lo);
        if (ratio_at(x1) < ratio_at(x2)) {
            lo = x1;
        } else {
            hi = x2;
        }
    }
    best = std::max(best, ratio_at(0.5 * (lo + hi)));
    const double limit = static_cast<int>(g.size()) - 1 == d ? g.back() : 0.0;
    return std::max(best, limit);
}

double with_margin(double v)
{
    return v + 1e-9 * std::max(1.0, std::abs(v));
}

Poly full_poly(std::span<const double> omega)
{
    Poly p(omega.size() + 1, 0.0);
    std::copy(omega.begin(), omega.end(), p.begin() + 1);
    return p;
}

}  // namespace

PolynomialDrift PolynomialDrift::uniform(std::vector<double> omega, double epsilon_lead)
{
    return per_cell({std::move(omega)}, epsilon_lead);
}

PolynomialDrift PolynomialDrift::per_cell(std::vector<std::vector<double>> rows, double epsilon_lead)
{
    if (rows.empty()) {
        throw ConfigError("reaction", "polynomial drift needs at least one coefficient row");
    }
    PolynomialDrift h;
    h.epsilon_lead_ = epsilon_lead;
    for (auto& row : rows) {
        trim(row);
        h.degree_ = std::max(h.degree_, static_cast<int>(row.size()));
    }
    for (auto& row : rows) {
        row.resize(static_cast<std::size_t>(h.degree_), 0.0);
    }
    h.rows_ = std::move(rows);
    return h;
}

std::span<const double> PolynomialDrift::coefficients(std::size_t cell) const
{
    return rows_.size() == 1 ? rows_.front() : rows_.at(cell);
}

double PolynomialDrift::operator()(std::size_t cell, double s) const
{
    const auto c = coefficients(cell);
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        acc = (acc + *it) * s;
    }
    return acc;
}

double PolynomialDrift::lipschitz(double m) const
{
    double best = 0.0;
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        double bound = 0.0;
        for (std::size_t j = 0; j < rows_[r].size(); ++j) {
            bound += static_cast<double>(j + 1) * std::abs(rows_[r][j]) * std::pow(m, static_cast<double>(j));
        }
        best = std::max(best, bound);
    }
    return best;
}

DriftCertificate check_f1_f2(const PolynomialDrift& h)
{
    DriftCertificate cert;
    if (h.is_zero()) {
        return cert;
    }
    const int d = h.degree();
    if (d % 2 == 0) {
        throw AuditError("even degree", "drift has even degree " + std::to_string(d));
    }
    cert.N = h.half_order();

    double b_upper = std::numeric_limits<double>::infinity();
    double b_lower = std::numeric_limits<double>::infinity();
    bool pure_monomial = true;
    for (std::size_t r = 0; r < h.rows(); ++r) {
        const auto omega = h.coefficients(r);
        const double lead = omega.back();
        if (!(lead < 0.0) || lead > -h.epsilon_lead()) {
            throw AuditError("leading coefficient", "leading coefficient " + std::to_string(lead) +
                                                        " is not below -epsilon_lead");
        }
        for (std::size_t j = 0; j + 1 < omega.size(); ++j) {
            pure_monomial = pure_monomial && omega[j] == 0.0;
        }
        b_upper = std::min(b_upper, -lead);
        b_lower = std::min(b_lower, -lead);
    }
    // A pure monomial admits the exact sandwich; otherwise keep half of the
    // leading coefficient so the remainder stays bounded on the half line.
    if (!pure_monomial) {
        b_upper *= 0.5;
        b_lower *= 0.5;
    }

    F2Constants f2{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), b_lower,
                   b_upper};
    double upper_a2 = -std::numeric_limits<double>::infinity();
    double lower_a1 = std::numeric_limits<double>::infinity();
    double a_one = 0.0;
    double a_full = 0.0;
    for (std::size_t r = 0; r < h.rows(); ++r) {
        const Poly p = full_poly(h.coefficients(r));
        const Poly neg_p = [&] {
            Poly q = p;
            for (auto& c : q) {
                c = -c;
            }
            return q;
        }();

        // (F1), indicator structure.
        const double up_pos = sup_on_nonnegative(p);               // h <= a on s >= 0
        const double low_neg = sup_on_nonnegative(reflect(neg_p)); // -h <= a on s <= 0
        const double low_pos = sup_ratio_on_nonnegative(neg_p, d); // -h <= a (1 + s^d) on s >= 0
        // h <= a (1 + |s|^d) on s <= 0, with s = -t.
        const double up_neg = sup_ratio_on_nonnegative(reflect(p), d);
        a_one = std::max({a_one, up_pos, low_neg});
        a_full = std::max({a_full, up_pos, low_neg, low_pos, up_neg});

        // (F2) upper side: sup_{s>=0} h(s) + b2 s^d.
        Poly aux_up = p;
        aux_up[static_cast<std::size_t>(d)] += b_upper;
        upper_a2 = std::max(upper_a2, sup_on_nonnegative(aux_up));
        // (F2) lower side: inf_{s<=0} h(s) + b1 s^d = -sup_{t>=0} -(h(-t) - b1 t^d).
        Poly aux_low = p;
        aux_low[static_cast<std::size_t>(d)] += b_lower;
        Poly neg_reflected = reflect(aux_low);
        for (auto& c : neg_reflected) {
            c = -c;
        }
        lower_a1 = std::min(lower_a1, -sup_on_nonnegative(neg_reflected));
    }
    cert.a_one_sided = std::max(0.0, with_margin(a_one));
    cert.a = std::max(0.0, with_margin(a_full));
    f2.a2 = with_margin(upper_a2);
    f2.a1 = lower_a1 - 1e-9 * std::max(1.0, std::abs(lower_a1));
    if (pure_monomial) {
        // Exact sandwich: no rounding slack needed.
        f2.a1 = 0.0;
        f2.a2 = 0.0;
    }
    cert.f2 = f2;
    return cert;
}

DissipativityConstants dissipativity_constants(const DriftCertificate& cert)
{
    DissipativityConstants dc;
    dc.a_prime = cert.a;
    if (!cert.f2) {
        dc.a_dprime = 2.0 * cert.a;
        return dc;
    }
    const auto& f2 = *cert.f2;
    dc.a_dprime = 2.0 * cert.a + std::max(std::max(f2.a2, 0.0) + f2.b2, std::max(-f2.a1, 0.0) + f2.b1);
    dc.b_dprime = std::min(f2.b1, f2.b2) / std::pow(2.0, 2 * cert.N + 1);
    return dc;
}

CouplingTerm CouplingTerm::none()
{
    CouplingTerm k;
    k.name = "none";
    k.evaluate = [](std::size_t, std::span<const double>) { return 0.0; };
    k.lipschitz = [](double) { return 0.0; };
    return k;
}

CouplingTerm CouplingTerm::linear(std::vector<double> weights)
{
    CouplingTerm k;
    k.name = "linear";
    double wmax = 0.0;
    for (double w : weights) {
        wmax = std::max(wmax, std::abs(w));
    }
    k.growth_c2 = wmax;
    k.lipschitz = [wmax](double) { return wmax; };
    k.evaluate = [w = std::move(weights)](std::size_t, std::span<const double> s) {
        double acc = 0.0;
        for (std::size_t j = 0; j < w.size() && j < s.size(); ++j) {
            acc += w[j] * s[j];
        }
        return acc;
    };
    return k;
}

ReactionSystem ReactionSystem::certify(std::vector<PolynomialDrift> drifts, std::vector<CouplingTerm> couplings,
                                       const AuditOptions& audit)
{
    if (drifts.empty() || drifts.size() != couplings.size()) {
        throw ConfigError("reaction", "need one drift and one coupling per component");
    }
    const std::size_t r = drifts.size();
    ReactionSystem sys;
    for (const auto& h : drifts) {
        if (!h.is_zero() && h.rows() != 1 && h.rows() < audit.cells) {
            throw ConfigError("shape", "per-cell drift has fewer rows than grid cells");
        }
        sys.certificates_.push_back(check_f1_f2(h));
        sys.dissipativity_.push_back(dissipativity_constants(sys.certificates_.back()));
    }

    AuditRng rng(audit.seed);
    std::vector<double> s(r), t(r);
    for (std::size_t l = 0; l < r; ++l) {
        const auto& k = couplings[l];
        if (!k.evaluate || !k.lipschitz) {
            throw ConfigError("reaction", "coupling " + std::to_string(l) + " is missing an evaluator");
        }
        for (double m : audit.radii) {
            const double L = k.lipschitz(m);
            const int per_radius = std::max(1, audit.samples / static_cast<int>(audit.radii.size()));
            for (int i = 0; i < per_radius; ++i) {
                const std::size_t cell = rng.below(std::max<std::size_t>(audit.cells, 1));
                double l1 = 0.0, dist = 0.0;
                for (std::size_t j = 0; j < r; ++j) {
                    s[j] = rng.uniform(-m, m);
                    t[j] = rng.uniform(-m, m);
                    l1 += std::abs(s[j]);
                    dist += std::abs(s[j] - t[j]);
                }
                const double ks = k.evaluate(cell, s);
                const double kt = k.evaluate(cell, t);
                const double tol = audit.tolerance * std::max(1.0, std::abs(ks) + std::abs(kt));
                if (std::abs(ks) > k.growth_c1 + k.growth_c2 * l1 + tol) {
                    throw AuditError("coupling growth",
                                     "coupling " + std::to_string(l) + " violates its declared linear growth");
                }
                if (std::abs(ks - kt) > L * dist + tol) {
                    throw AuditError("coupling lipschitz", "coupling " + std::to_string(l) +
                                                               " violates its declared Lipschitz constant at m=" +
                                                               std::to_string(m));
                }
            }
        }
    }
    sys.drifts_ = std::move(drifts);
    sys.couplings_ = std::move(couplings);
    return sys;
}

double ReactionSystem::drift_value(std::size_t l, std::size_t cell, double s) const
{
    const auto& h = drifts_[l];
    if (h.is_zero()) {
        return 0.0;
    }
    if (truncation_) {
        s = std::clamp(s, -*truncation_, *truncation_);
    }
    return h(cell, s);
}

double ReactionSystem::coupling_value(std::size_t l, std::size_t cell, std::span<const double> s) const
{
    if (truncation_) {
        double l1 = 0.0;
        for (double v : s) {
            l1 += std::abs(v);
        }
        if (l1 > *truncation_) {
            std::vector<double> projected(s.begin(), s.end());
            const double scale = *truncation_ / l1;
            for (auto& v : projected) {
                v *= scale;
            }
            return couplings_[l].evaluate(cell, projected);
        }
    }
    return couplings_[l].evaluate(cell, s);
}

ReactionSystem ReactionSystem::truncated(double n) const
{
    if (!(n > 0.0)) {
        throw ConfigError("truncation", "truncation level must be positive");
    }
    ReactionSystem copy = *this;
    copy.truncation_ = n;
    return copy;
}

double ReactionSystem::coupling_lipschitz(double m) const
{
    double L = 0.0;
    for (const auto& k : couplings_) {
        L = std::max(L, k.lipschitz(m));
    }
    return L;
}

double ReactionSystem::lipschitz(double m) const
{
    double L = 0.0;
    for (std::size_t l = 0; l < components(); ++l) {
        L = std::max(L, drifts_[l].lipschitz(m) + couplings_[l].lipschitz(m));
    }
    return L;
}

State evaluate_reaction(const ReactionSystem& sys, const State& u)
{
    const std::size_t r = sys.components();
    if (u.size() != r) {
        throw ConfigError("components", "state has " + std::to_string(u.size()) + " components, reaction expects " +
                                            std::to_string(r));
    }
    const auto n = u.front().size();
    State out(r, Field(n));
    std::vector<double> s(r);
    for (Eigen::Index cell = 0; cell < n; ++cell) {
        for (std::size_t j = 0; j < r; ++j) {
            s[j] = u[j][cell];
        }
        for (std::size_t l = 0; l < r; ++l) {
            out[l][cell] = sys.evaluate(l, static_cast<std::size_t>(cell), s);
        }
    }
    return out;
}

double dissipativity_gap(const ReactionSystem& sys, std::size_t l, const Field& u, const Field& v,
                         DissipativityMode mode)
{
    if (u.size() != v.size()) {
        throw ConfigError("shape", "u and v must live on the same grid");
    }
    Eigen::Index star = 0;
    const double unorm = u.cwiseAbs().maxCoeff(&star);  // first maximal index
    if (unorm == 0.0) {
        throw ConfigError("zero field", "dissipativity gap needs u not identically zero");
    }
    const double sign = u[star] > 0.0 ? 1.0 : -1.0;
    const double vnorm = sup_norm(v);
    const int N = sys.certificate(l).N;
    const auto& dc = sys.dissipativity(l);
    const double growth = std::pow(1.0 + vnorm, 2 * N + 1);
    const auto cell = static_cast<std::size_t>(star);
    const double h_uv = sys.drift_value(l, cell, u[star] + v[star]);
    if (mode == DissipativityMode::growth) {
        return dc.a_prime * growth - sign * h_uv;
    }
    const double h_v = sys.drift_value(l, cell, v[star]);
    return dc.a_dprime * growth - dc.b_dprime * std::pow(unorm, 2 * N + 1) - sign * (h_uv - h_v);
}

QuasiPositivityReport check_quasi_positive_on(const ReactionSystem& sys, std::span<const std::vector<double>> samples,
                                              double lipschitz, double tolerance)
{
    QuasiPositivityReport rep;
    rep.lipschitz_used = lipschitz;
    rep.min_boundary_value = std::numeric_limits<double>::infinity();
    rep.min_lipschitz_margin = std::numeric_limits<double>::infinity();
    const std::size_t r = sys.components();
    std::vector<double> s(r);
    for (std::size_t l = 0; l < r; ++l) {
        for (const auto& point : samples) {
            // Boundary test: s_l = 0, s_j = |point_j|.
            for (std::size_t j = 0; j < r; ++j) {
                s[j] = j == l ? 0.0 : std::abs(point[j]);
            }
            const double phi = sys.evaluate(l, 0, s);
            rep.min_boundary_value = std::min(rep.min_boundary_value, phi);
            if (phi < -tolerance && rep.pass) {
                rep.pass = false;
                rep.witness = QuasiPositivityWitness{l, 0, s, phi};
            }
            // Negative-part audit: s_l = -|point_l|.
            double neg = 0.0;
            for (std::size_t j = 0; j < r; ++j) {
                s[j] = j == l ? -std::abs(point[j]) : point[j];
                neg += std::max(-s[j], 0.0);
            }
            const double margin = lipschitz * neg + sys.evaluate(l, 0, s);
            rep.min_lipschitz_margin = std::min(rep.min_lipschitz_margin, margin);
            if (margin < -tolerance && rep.pass) {
                rep.pass = false;
                rep.witness = QuasiPositivityWitness{l, 0, s, margin};
            }
            ++rep.samples_checked;
        }
    }
    return rep;
}

QuasiPositivityReport check_quasi_positive(const ReactionSystem& sys, std::size_t samples, double range_m,
                                           const QuasiPositivityOptions& options)
{
    if (!(range_m > 0.0)) {
        throw ConfigError("range", "quasi-positivity range must be positive");
    }
    const std::size_t r = sys.components();
    AuditRng rng(options.seed);
    std::vector<std::vector<double>> points;
    points.reserve(samples + 2);
    points.emplace_back(r, 0.0);
    points.emplace_back(r, range_m);
    for (std::size_t i = 0; i < samples; ++i) {
        std::vector<double> p(r);
        for (auto& v : p) {
            v = rng.uniform(-range_m, range_m);
        }
        points.push_back(std::move(p));
    }
    const double L = options.lipschitz.value_or(sys.lipschitz(range_m));
    auto rep = check_quasi_positive_on(sys, points, L, options.tolerance);

    // Cell-dependent reactions: repeat the boundary test on sampled cells.
    if (options.cells > 1 && rep.pass) {
        std::vector<double> s(r);
        for (std::size_t i = 0; i < samples && rep.pass; ++i) {
            const std::size_t cell = rng.below(options.cells);
            const std::size_t l = rng.below(r);
            for (std::size_t j = 0; j < r; ++j) {
                s[j] = j == l ? 0.0 : rng.uniform(0.0, range_m);
            }
            const double phi = sys.evaluate(l, cell, s);
            if (phi < -options.tolerance) {
                rep.pass = false;
                rep.witness = QuasiPositivityWitness{l, cell, s, phi};
            }
        }
    }
    return rep;
}

ReactionSystem fhn_system(double a, double b)
{
    if (!(a > 0.0) || !(b > 0.0)) {
        throw ConfigError("fhn", "FitzHugh-Nagumo parameters a and b must be positive");
    }
    std::vector<PolynomialDrift> drifts{PolynomialDrift::uniform({1.0, 0.0, -1.0}, 1.0), PolynomialDrift::zero()};
    std::vector<CouplingTerm> couplings{CouplingTerm::linear({0.0, 1.0}), CouplingTerm::linear({a, -b})};
    couplings[0].name = "fhn";
    couplings[1].name = "fhn";
    auto sys = ReactionSystem::certify(std::move(drifts), std::move(couplings));
    const auto qp = check_quasi_positive(sys, 2000, 10.0);
    if (!qp.pass) {
        throw AuditError("quasi-positivity", "FitzHugh-Nagumo reaction failed the quasi-positivity check");
    }
    return sys;
}

}  // namespace srd
