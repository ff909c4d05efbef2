#include "srd/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <tuple>

#include "srd/error.hpp"
#include "srd/random.hpp"

namespace srd {

namespace {

double cosine_value(int k, double x, double L)
{
    return k == 0 ? 1.0 / std::sqrt(L) : std::sqrt(2.0 / L) * std::cos(k * std::numbers::pi * x / L);
}

double cosine_sup(int k, double L)
{
    return k == 0 ? 1.0 / std::sqrt(L) : std::sqrt(2.0 / L);
}

}  // namespace

SpectralBasis SpectralBasis::cosine_neumann(const DomainGrid& grid, std::size_t modes)
{
    if (modes > grid.size()) {
        throw ConfigError("modes", std::to_string(modes) + " cosine modes exceed the " + std::to_string(grid.size()) +
                                       " grid cells");
    }
    SpectralBasis b;
    b.kind_ = BasisKind::cosine_neumann;
    const double L0 = grid.extent(0);
    if (grid.dim() == 1) {
        for (std::size_t k = 0; k < modes; ++k) {
            Field e(static_cast<Eigen::Index>(grid.size()));
            for (std::size_t cell = 0; cell < grid.size(); ++cell) {
                e[static_cast<Eigen::Index>(cell)] = cosine_value(static_cast<int>(k), grid.center(cell)[0], L0);
            }
            b.values_.push_back(std::move(e));
            b.sup_norms_.push_back(cosine_sup(static_cast<int>(k), L0));
        }
        return b;
    }
    const double L1 = grid.extent(1);
    std::vector<std::tuple<double, int, int>> order;
    const int span = static_cast<int>(modes) + 1;
    for (int k1 = 0; k1 < span; ++k1) {
        for (int k2 = 0; k2 < span; ++k2) {
            const double mu = (k1 / L0) * (k1 / L0) + (k2 / L1) * (k2 / L1);
            order.emplace_back(mu, k1, k2);
        }
    }
    std::sort(order.begin(), order.end());
    for (std::size_t m = 0; m < modes; ++m) {
        const auto [mu, k1, k2] = order[m];
        Field e(static_cast<Eigen::Index>(grid.size()));
        for (std::size_t cell = 0; cell < grid.size(); ++cell) {
            const auto x = grid.center(cell);
            e[static_cast<Eigen::Index>(cell)] = cosine_value(k1, x[0], L0) * cosine_value(k2, x[1], L1);
        }
        b.values_.push_back(std::move(e));
        b.sup_norms_.push_back(cosine_sup(k1, L0) * cosine_sup(k2, L1));
    }
    return b;
}

SpectralBasis SpectralBasis::user_table(std::vector<Field> values, std::vector<double> sup_norms)
{
    SpectralBasis b;
    b.kind_ = BasisKind::user_table;
    if (sup_norms.empty()) {
        for (const auto& v : values) {
            sup_norms.push_back(srd::sup_norm(v));
        }
    }
    if (sup_norms.size() != values.size()) {
        throw ConfigError("basis", "one sup norm per tabulated mode required");
    }
    b.values_ = std::move(values);
    b.sup_norms_ = std::move(sup_norms);
    return b;
}

double SpectralBasis::orthonormality_defect(const DomainGrid& grid) const
{
    double worst = 0.0;
    for (std::size_t j = 0; j < modes(); ++j) {
        for (std::size_t k = j; k < modes(); ++k) {
            const double ip = values_[j].dot(values_[k]) * grid.cell_volume();
            worst = std::max(worst, std::abs(ip - (j == k ? 1.0 : 0.0)));
        }
    }
    return worst;
}

HolderFunction HolderFunction::by_name(const std::string& name)
{
    HolderFunction g;
    g.name = name;
    auto unit = [](double) { return 1.0; };
    if (name == "sqrt-abs") {
        g.evaluate = [](double s) { return std::sqrt(std::abs(s)); };
        g.growth_a = 1.0;
        g.growth_b = 1.0;
        g.holder_c = unit;
    } else if (name == "sqrt-plus") {
        g.evaluate = [](double s) { return std::sqrt(std::max(s, 0.0)); };
        g.growth_a = 1.0;
        g.growth_b = 1.0;
        g.holder_c = unit;
    } else if (name == "sqrt-clipped-01") {
        g.evaluate = [](double s) {
            const double c = std::clamp(s, 0.0, 1.0);
            return std::sqrt(c * (1.0 - c));
        };
        g.growth_a = 0.5;
        g.growth_b = 0.0;
        g.holder_c = unit;
    } else if (name == "sqrt-abs-shifted") {
        g.evaluate = [](double s) { return std::sqrt(std::abs(s)) + 0.1; };
        g.growth_a = 1.1;
        g.growth_b = 1.0;
        g.holder_c = unit;
    } else if (name == "zero") {
        g.evaluate = [](double) { return 0.0; };
        g.holder_c = [](double) { return 0.0; };
    } else if (name.rfind("lipschitz:", 0) == 0) {
        double L = 0.0;
        try {
            L = std::stod(name.substr(10));
        } catch (const std::exception&) {
            throw ConfigError("noise", "cannot parse Lipschitz constant in '" + name + "'");
        }
        if (!(L >= 0.0)) {
            throw ConfigError("noise", "Lipschitz constant must be nonnegative");
        }
        g.evaluate = [L](double s) { return L * s; };
        g.growth_b = L;
        // |L(s - t)| = L |s - t|^{1/2} |s - t|^{1/2} <= L sqrt(2m) |s - t|^{1/2}
        g.holder_c = [L](double m) { return L * std::sqrt(2.0 * m); };
    } else {
        throw ConfigError("noise", "unknown noise function '" + name + "'");
    }
    return g;
}

void audit_holder(const HolderFunction& g, const HolderAuditOptions& options)
{
    if (!g.evaluate || !g.holder_c) {
        throw ConfigError("noise", "noise function '" + g.name + "' is incomplete");
    }
    AuditRng rng(options.seed);
    for (double m : options.radii) {
        const double c = g.holder_c(m);
        for (int i = 0; i < options.samples; ++i) {
            const double s = rng.uniform(-m, m);
            // Alternate wide pairs with close pairs, where the Hölder bound is tight.
            const double t = (i % 2 == 0) ? rng.uniform(-m, m)
                                          : std::clamp(s + rng.uniform(-1.0, 1.0) * std::pow(10.0, -rng.uniform(0.0, 8.0)), -m, m);
            const double gs = g.evaluate(s);
            const double gt = g.evaluate(t);
            const double tol = options.tolerance * std::max(1.0, std::abs(gs) + std::abs(gt));
            if (std::abs(gs) > g.growth_a + g.growth_b * std::abs(s) + tol) {
                throw AuditError("growth", "noise function '" + g.name + "' violates its growth bound at s=" +
                                               std::to_string(s));
            }
            if (std::abs(gs - gt) > c * std::sqrt(std::abs(s - t)) + tol) {
                throw AuditError("holder", "noise function '" + g.name + "' violates its Hölder constant at m=" +
                                               std::to_string(m));
            }
        }
    }
}

ComponentNoise::ComponentNoise(SpectralBasis basis, std::vector<double> lambdas, HolderFunction g)
    : basis_(std::move(basis)), lambdas_(std::move(lambdas)), g_(std::move(g))
{
    if (lambdas_.size() != basis_.modes()) {
        throw ConfigError("noise", "got " + std::to_string(lambdas_.size()) + " lambdas for a basis of " +
                                       std::to_string(basis_.modes()) + " modes");
    }
    const auto cells = basis_.modes() > 0 ? basis_.mode(0).size() : 0;
    table_.resize(cells, static_cast<Eigen::Index>(lambdas_.size()));
    for (std::size_t k = 0; k < lambdas_.size(); ++k) {
        const double w = std::abs(lambdas_[k]) * basis_.sup_norm(k);
        alpha_.push_back(g_.growth_a * w);
        beta_.push_back(g_.growth_b * w);
        mode_energy_ += w * w;
        table_.col(static_cast<Eigen::Index>(k)) = lambdas_[k] * basis_.mode(k);
    }
}

double ComponentNoise::rho_constant(double m) const
{
    const double c = g_.holder_c(m);
    return c * c * mode_energy_;
}

Modulus ComponentNoise::rho(double m) const
{
    return [C = rho_constant(m)](double s) { return C * s; };
}

Modulus ComponentNoise::adjusted_rho(double m) const
{
    const double C = rho_constant(m);
    return [C = C < 1.0 ? C + 1.0 : C](double s) { return C * s; };
}

ComponentNoise ComponentNoise::truncated(double n) const
{
    if (!(n > 0.0)) {
        throw ConfigError("truncation", "truncation level must be positive");
    }
    ComponentNoise copy = *this;
    copy.truncation_ = n;
    return copy;
}

double ComponentNoise::g_value(double s) const
{
    if (truncation_) {
        s = std::clamp(s, -*truncation_, *truncation_);
    }
    return g_.evaluate(s);
}

Field ComponentNoise::spatial_forcing(std::span<const double> increments) const
{
    if (increments.size() < lambdas_.size()) {
        throw ConfigError("noise", "need " + std::to_string(lambdas_.size()) + " increments, got " +
                                       std::to_string(increments.size()));
    }
    const Eigen::Map<const Eigen::VectorXd> db(increments.data(), static_cast<Eigen::Index>(lambdas_.size()));
    return table_ * db;
}

Field ComponentNoise::variance_density() const
{
    return table_.rowwise().squaredNorm();
}

ComponentNoise build_noise(SpectralBasis basis, std::vector<double> lambdas, HolderFunction g,
                           const HolderAuditOptions& audit)
{
    audit_holder(g, audit);
    return ComponentNoise(std::move(basis), std::move(lambdas), std::move(g));
}

std::size_t NoiseModel::modes() const noexcept
{
    std::size_t K = 0;
    for (const auto& c : components_) {
        K = std::max(K, c.modes());
    }
    return K;
}

NoiseModel NoiseModel::truncated(double n) const
{
    std::vector<ComponentNoise> comps;
    for (const auto& c : components_) {
        comps.push_back(c.truncated(n));
    }
    return NoiseModel(std::move(comps));
}

bool NoiseModel::vanishes_at_zero() const
{
    return std::all_of(components_.begin(), components_.end(),
                       [](const ComponentNoise& c) { return c.g().evaluate(0.0) == 0.0; });
}

Field apply_noise(const NoiseModel& noise, std::size_t l, const Field& u_l, std::span<const double> increments)
{
    const auto& c = noise.component(l);
    if (increments.size() != c.modes()) {
        throw ConfigError("noise", "increment vector length " + std::to_string(increments.size()) +
                                       " does not match K=" + std::to_string(c.modes()));
    }
    if (c.modes() == 0) {
        return Field::Zero(u_l.size());
    }
    Field out = c.spatial_forcing(increments);
    if (out.size() != u_l.size()) {
        throw ConfigError("shape", "noise basis does not match the state");
    }
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        out[i] *= c.g_value(u_l[i]);
    }
    return out;
}

std::vector<double> power_law_lambdas(std::size_t modes, double p, double amplitude)
{
    std::vector<double> lambdas(modes);
    for (std::size_t k = 0; k < modes; ++k) {
        lambdas[k] = amplitude * std::pow(static_cast<double>(k + 1), -p);
    }
    return lambdas;
}

std::vector<double> default_eps_grid()
{
    std::vector<double> eps;
    for (int j = 1; j <= 12; ++j) {
        eps.push_back(std::pow(10.0, -j));
    }
    return eps;
}

OsgoodReport osgood_check(const Modulus& rho, std::span<const double> eps_grid)
{
    if (eps_grid.size() < 4) {
        throw ConfigError("osgood", "need at least four eps values");
    }
    for (std::size_t j = 0; j < eps_grid.size(); ++j) {
        if (!(eps_grid[j] > 0.0) || eps_grid[j] >= 1.0 || (j > 0 && !(eps_grid[j] < eps_grid[j - 1]))) {
            throw ConfigError("osgood", "eps grid must decrease within (0, 1)");
        }
    }
    const double lo = eps_grid.back();
    for (int i = 0; i <= 400; ++i) {
        const double s = std::exp(std::log(lo) * (1.0 - i / 400.0));
        const double v = rho(s);
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw AuditError("osgood", "modulus is not positive at s=" + std::to_string(s));
        }
    }

    OsgoodReport rep;
    for (double e : eps_grid) {
        rep.eps.push_back(e);
        rep.integral.push_back(integrate_reciprocal(rho, e, 1.0));
    }
    std::vector<double> per_decade;
    for (std::size_t j = 1; j < rep.integral.size(); ++j) {
        const double decades = std::log10(rep.eps[j - 1] / rep.eps[j]);
        per_decade.push_back((rep.integral[j] - rep.integral[j - 1]) / decades);
    }
    const std::size_t tail = std::min<std::size_t>(3, per_decade.size() - 1);
    double log_ratio = 0.0;
    bool vanished = false;
    for (std::size_t j = per_decade.size() - tail; j < per_decade.size(); ++j) {
        if (!(per_decade[j] > 0.0) || !(per_decade[j - 1] > 0.0)) {
            vanished = true;
            break;
        }
        log_ratio += std::log(per_decade[j] / per_decade[j - 1]);
    }
    rep.increment_ratio = vanished ? 0.0 : std::exp(log_ratio / static_cast<double>(tail));
    rep.diverges = !vanished && rep.increment_ratio >= 0.9;
    return rep;
}

OsgoodReport osgood_check(const NoiseModel& noise, std::size_t l, double m, std::span<const double> eps_grid)
{
    const auto& c = noise.component(l);
    if (c.rho_constant(m) <= 0.0) {
        throw AuditError("osgood", "noise of component " + std::to_string(l) + " has a vanishing modulus");
    }
    return osgood_check(c.rho(m), eps_grid);
}

}  // namespace srd
