#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "doctest.h"

#include "srd/error.hpp"
#include "srd/mollifier.hpp"

using namespace srd;

namespace {

// phi_n(t) = int_0^|t| int_0^s psi_n by nested adaptive quadrature in s and
// in log tau.
double nested_phi(const MollifierFamily& f, std::size_t n, double t)
{
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    const double lo = f.a(n), hi = f.a(n - 1);
    const double x = std::abs(t);
    if (x <= lo) {
        return 0.0;
    }
    auto Psi = [&](double s) {
        const double top = std::min(s, hi);
        if (top <= lo) {
            return 0.0;
        }
        return GK::integrate([&](double y) { const double tau = std::exp(y); return tau * f.psi(n, tau); },
                             std::log(lo), std::log(top), 15, 1e-13);
    };
    const double mid = std::min(x, hi);
    double v = GK::integrate(Psi, lo, mid, 15, 1e-12);
    if (x > hi) {
        v += x - hi;
    }
    return v;
}

}  // namespace

TEST_CASE("levels for a linear modulus")
{
    for (double C : {0.5, 1.0, 2.0}) {
        const auto f = build_mollifier([C](double s) { return C * s; }, 5, 1.0);
        for (std::size_t n = 0; n <= 5; ++n) {
            const double exact = std::exp(-C * n * (n + 1.0) / 2.0);
            CHECK(std::abs(f.a(n) - exact) <= 1e-10 * exact);
        }
    }
    const auto g = build_mollifier([](double s) { return s; }, 2, 0.5);
    CHECK(g.a(2) == doctest::Approx(0.5 * std::exp(-3.0)).epsilon(1e-10));
}

TEST_CASE("level equation for a log-Lipschitz modulus")
{
    auto rho = [](double s) { return s * (1.0 - std::log(s)); };
    // a_n = exp(1 - e^{n(n+1)/2}): a_4 is already below the double range
    const auto f = build_mollifier(rho, 3);
    for (std::size_t n = 1; n <= 3; ++n) {
        CHECK(integrate_reciprocal(rho, f.a(n), f.a(n - 1)) == doctest::Approx(static_cast<double>(n)).epsilon(1e-9));
        CHECK(f.psi_mass(n) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(f.a(n) == doctest::Approx(std::exp(1.0 - std::exp(n * (n + 1) / 2.0))).epsilon(1e-9));
    }
    CHECK_THROWS_AS(build_mollifier(rho, 4), ConfigError);
}

TEST_CASE("phi against nested quadrature")
{
    const auto f = build_mollifier([](double s) { return 1.3 * s; }, 3);
    for (std::size_t n = 1; n <= 3; ++n) {
        for (double u : {0.1, 0.35, 0.6, 0.9, 1.0, 1.4}) {
            const double t = f.a(n) + u * (f.a(n - 1) - f.a(n)) * (u > 1.0 ? 3.0 : 1.0);
            CHECK(f.phi(n, t) == doctest::Approx(nested_phi(f, n, t)).epsilon(1e-9));
            CHECK(f.phi(n, -t) == f.phi(n, t));
        }
        CHECK(f.phi(n, 0.5 * f.a(n)) == 0.0);
    }
}

TEST_CASE("phi derivatives")
{
    const auto f = build_mollifier([](double s) { return 2.0 * s; }, 2);
    const std::size_t n = 2;
    const double t = 0.5 * (f.a(1) + f.a(2));
    const double h = 1e-6 * t;
    CHECK((f.phi(n, t + h) - f.phi(n, t - h)) / (2 * h) == doctest::Approx(f.dphi(n, t)).epsilon(1e-6));
    CHECK((f.dphi(n, t + h) - f.dphi(n, t - h)) / (2 * h) == doctest::Approx(f.psi(n, t)).epsilon(1e-5));
    CHECK(f.psi(n, t) <= 2.0 / (n * 2.0 * t));
    CHECK(f.dphi(n, -t) == -f.dphi(n, t));
    CHECK(f.Psi(n, 10.0) == 1.0);
    CHECK(f.Psi(n, f.a(n)) == 0.0);
}

TEST_CASE("mollifier failures")
{
    try {
        build_mollifier([](double s) { return std::sqrt(s); }, 3);
        FAIL("expected osgood");
    } catch (const AuditError& e) {
        CHECK(e.reason() == "osgood");
    }
    try {
        build_mollifier([](double s) { return s; }, 40);
        FAIL("expected underflow");
    } catch (const ConfigError& e) {
        CHECK(e.reason() == "underflow");
        CHECK(std::string(e.what()).find("largest feasible n is 37") != std::string::npos);
    }
    CHECK_THROWS_AS(build_mollifier([](double s) { return s; }, 0), ConfigError);
    const auto f = build_mollifier([](double s) { return s; }, 2);
    CHECK_THROWS_AS(f.psi(3, 0.1), ConfigError);
}

TEST_CASE("positivity mollifier is one sided")
{
    const auto p = positivity_mollifier([](double s) { return s; }, 2);
    CHECK(p.phi(-0.5) == 0.0);
    CHECK(p.dphi(-0.5) == 0.0);
    CHECK(p.phi(0.5) == p.family().phi(2, 0.5));
    CHECK(p.phi(0.5) > 0.0);
}
