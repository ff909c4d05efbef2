#include "srd/mollifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "srd/error.hpp"
#include "srd/noise.hpp"

namespace srd {

void MollifierFamily::check_level(std::size_t n) const
{
    if (n < 1 || n >= a_.size()) {
        throw ConfigError("level", "mollifier level " + std::to_string(n) + " outside 1.." +
                                       std::to_string(a_.size() - 1));
    }
}

double MollifierFamily::psi(std::size_t n, double t) const
{
    check_level(n);
    if (t <= a_[n] || t >= a_[n - 1]) {
        return 0.0;
    }
    return 1.0 / (static_cast<double>(n) * rho_(t));
}

double MollifierFamily::psi_mass(std::size_t n) const
{
    check_level(n);
    return integrate_reciprocal(rho_, a_[n], a_[n - 1]) / static_cast<double>(n);
}

double MollifierFamily::Psi(std::size_t n, double s) const
{
    check_level(n);
    if (s <= a_[n]) {
        return 0.0;
    }
    if (s >= a_[n - 1]) {
        return 1.0;
    }
    return std::clamp(integrate_reciprocal(rho_, a_[n], s) / static_cast<double>(n), 0.0, 1.0);
}

double MollifierFamily::phi(std::size_t n, double t) const
{
    const double x = std::abs(t);
    const double Px = Psi(n, x);
    if (x <= a_[n]) {
        return 0.0;
    }
    const double top = std::min(x, a_[n - 1]);
    const double nn = static_cast<double>(n);
    const double moment = integrate_log([&](double tau) { return tau / (nn * rho_(tau)); }, a_[n], top);
    return std::clamp(x * Px - moment, 0.0, x);
}

double MollifierFamily::dphi(std::size_t n, double t) const
{
    const double P = Psi(n, std::abs(t));
    return t < 0.0 ? -P : P;
}

MollifierFamily build_mollifier(Modulus rho, std::size_t n_max, double a0)
{
    if (!(a0 > 0.0) || !std::isfinite(a0)) {
        throw ConfigError("mollifier", "a0 must be positive");
    }
    if (n_max < 1) {
        throw ConfigError("mollifier", "n_max must be at least 1");
    }
    double prev = 0.0;
    for (int i = 0; i <= 200; ++i) {
        const double s = a0 * std::exp(-700.0 * (1.0 - i / 200.0));
        const double v = rho(s);
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw AuditError("modulus", "rho is not positive at s=" + std::to_string(s));
        }
        if (v < prev * (1.0 - 1e-12)) {
            throw AuditError("modulus", "rho is not increasing near s=" + std::to_string(s));
        }
        prev = v;
    }
    const auto grid = default_eps_grid();
    if (!osgood_check(rho, grid).diverges) {
        throw AuditError("osgood", "int_0 ds/rho(s) converges; no mollifier family exists");
    }

    const double y_floor = std::log(std::numeric_limits<double>::min());
    std::vector<double> a{a0};
    for (std::size_t n = 1; n <= n_max; ++n) {
        const double upper = a.back();
        const double target = static_cast<double>(n);
        auto G = [&](double y) { return integrate_reciprocal(rho, std::exp(y), upper) - target; };
        const double y_hi = std::log(upper);
        double step = 1.0;
        double y_lo = y_hi - step;
        double g_lo = G(y_lo);
        while (g_lo < 0.0) {
            step *= 2.0;
            y_lo = std::max(y_hi - step, y_floor);
            g_lo = G(y_lo);
            if (y_lo == y_floor && g_lo < 0.0) {
                throw ConfigError("underflow", "a_" + std::to_string(n) +
                                                   " underflows double precision; largest feasible n is " +
                                                   std::to_string(n - 1));
            }
        }
        std::uintmax_t iters = 200;
        const auto [lo, hi] = boost::math::tools::toms748_solve(
            G, y_lo, y_hi, g_lo, -target, boost::math::tools::eps_tolerance<double>(50), iters);
        a.push_back(std::exp(0.5 * (lo + hi)));
    }
    return MollifierFamily(std::move(rho), std::move(a));
}

PositivityMollifier positivity_mollifier(Modulus rho, std::size_t n, double a0)
{
    return PositivityMollifier(build_mollifier(std::move(rho), n, a0), n);
}

}  // namespace srd
