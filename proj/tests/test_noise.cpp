#include <cmath>
#include <numbers>

#include "doctest.h"

#include "srd/error.hpp"
#include "srd/noise.hpp"
#include "srd/wiener_path.hpp"

using namespace srd;

namespace {

DomainGrid line(int n, double L = 1.0)
{
    const double e[] = {L};
    const int c[] = {n};
    return DomainGrid::build(1, e, c);
}

}  // namespace

TEST_CASE("cosine basis")
{
    const auto g = line(32, 2.0);
    const auto b = SpectralBasis::cosine_neumann(g, 10);
    CHECK(b.orthonormality_defect(g) < 1e-13);
    CHECK(b.sup_norm(0) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(b.sup_norm(3) == doctest::Approx(1.0));
    CHECK(b.mode(2)[0] == doctest::Approx(std::cos(2.0 * std::numbers::pi * 0.03125 / 2.0)));

    const double e[] = {1.0, 2.0};
    const int c[] = {8, 8};
    const auto g2 = DomainGrid::build(2, e, c);
    const auto b2 = SpectralBasis::cosine_neumann(g2, 12);
    CHECK(b2.orthonormality_defect(g2) < 1e-13);
    // lowest nonconstant mode varies along the long axis
    const auto& m1 = b2.mode(1);
    CHECK(std::abs(m1[g2.index(0, 0)] - m1[g2.index(7, 0)]) < 1e-14);
    CHECK_THROWS_AS(SpectralBasis::cosine_neumann(g, 33), ConfigError);
}

TEST_CASE("named Hölder functions")
{
    const auto s = HolderFunction::by_name("sqrt-plus");
    CHECK(s.evaluate(4.0) == 2.0);
    CHECK(s.evaluate(-4.0) == 0.0);
    const auto a = HolderFunction::by_name("sqrt-abs");
    CHECK(a.evaluate(-4.0) == 2.0);
    const auto sh = HolderFunction::by_name("sqrt-abs-shifted");
    CHECK(sh.evaluate(0.0) == doctest::Approx(0.1));
    const auto l = HolderFunction::by_name("lipschitz:2");
    CHECK(l.evaluate(-3.0) == -6.0);
    CHECK(l.holder_c(2.0) == doctest::Approx(2.0 * std::sqrt(4.0)));
    for (const char* n : {"sqrt-abs", "sqrt-plus", "sqrt-clipped-01", "sqrt-abs-shifted", "lipschitz:2", "zero"}) {
        CHECK_NOTHROW(audit_holder(HolderFunction::by_name(n)));
    }
    CHECK_THROWS_AS(HolderFunction::by_name("cube"), ConfigError);
}

TEST_CASE("Hölder audit rejects understated constants")
{
    auto g = HolderFunction::by_name("sqrt-abs");
    g.holder_c = [](double) { return 0.5; };
    try {
        audit_holder(g);
        FAIL("expected holder");
    } catch (const AuditError& e) {
        CHECK(e.reason() == "holder");
    }
    auto h = HolderFunction::by_name("lipschitz:1");
    h.growth_b = 0.5;
    try {
        audit_holder(h);
        FAIL("expected growth");
    } catch (const AuditError& e) {
        CHECK(e.reason() == "growth");
    }
}

TEST_CASE("component constants")
{
    const auto g = line(16);
    const auto lam = power_law_lambdas(4, 1.0, 0.5);
    CHECK(lam[3] == doctest::Approx(0.5 / 4.0));
    const auto n = build_noise(SpectralBasis::cosine_neumann(g, 4), lam, HolderFunction::by_name("sqrt-abs"));
    double energy = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
        const double e = lam[k] * (k == 0 ? 1.0 : std::sqrt(2.0));
        energy += e * e;
        CHECK(n.alpha()[k] == doctest::Approx(e));
    }
    CHECK(n.mode_energy() == doctest::Approx(energy));
    CHECK(n.rho_constant(5.0) == doctest::Approx(energy));
    CHECK(n.rho(5.0)(0.3) == doctest::Approx(0.3 * energy));
    CHECK(n.adjusted_rho(5.0)(0.3) == doctest::Approx(0.3 * (energy + 1.0)));
    CHECK_THROWS_AS(build_noise(SpectralBasis::cosine_neumann(g, 4), {1.0}, HolderFunction::by_name("zero")),
                    ConfigError);
}

TEST_CASE("noise application")
{
    const auto g = line(8);
    const auto lam = power_law_lambdas(3, 1.0);
    NoiseModel m({build_noise(SpectralBasis::cosine_neumann(g, 3), lam, HolderFunction::by_name("sqrt-plus"))});
    Field u(8);
    for (int i = 0; i < 8; ++i) {
        u[i] = 0.25 * (i - 3);
    }
    const double d[] = {0.1, -0.2, 0.3};
    const Field out = apply_noise(m, 0, u, d);
    const auto& b = m.component(0).basis();
    for (int i = 0; i < 8; ++i) {
        double f = 0.0;
        for (std::size_t k = 0; k < 3; ++k) {
            f += lam[k] * b.mode(k)[i] * d[k];
        }
        CHECK(out[i] == doctest::Approx(std::sqrt(std::max(u[i], 0.0)) * f));
    }
    CHECK(m.vanishes_at_zero());
    const double short_d[] = {0.1};
    CHECK_THROWS_AS(apply_noise(m, 0, u, short_d), ConfigError);
    const auto t = m.truncated(0.5);
    CHECK(t.component(0).g_value(4.0) == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("Itô isometry for the spatial forcing")
{
    const auto g = line(8);
    const auto c = build_noise(SpectralBasis::cosine_neumann(g, 5), power_law_lambdas(5, 0.5),
                               HolderFunction::by_name("lipschitz:1"));
    const std::size_t n = 40000;
    const double dt = 0.01;
    const WienerPath w(99, 1, 5, n, dt);
    Field acc = Field::Zero(8);
    std::vector<double> d(5);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < 5; ++k) {
            d[k] = w.increment(0, k, i);
        }
        acc += c.spatial_forcing(d).cwiseAbs2();
    }
    const Field var = acc / (static_cast<double>(n) * dt);
    const Field ref = c.variance_density();
    for (int i = 0; i < 8; ++i) {
        CHECK(var[i] == doctest::Approx(ref[i]).epsilon(0.05));
    }
}

TEST_CASE("Osgood check")
{
    const auto eps = default_eps_grid();
    CHECK(eps.size() == 12);
    CHECK(osgood_check([](double s) { return s; }, eps).diverges);
    CHECK_FALSE(osgood_check([](double) { return 1.0; }, eps).diverges);
    CHECK_THROWS_AS(osgood_check([](double s) { return s - 0.5; }, eps), AuditError);
    const std::vector<double> bad{0.1, 0.2, 0.01, 0.001};
    CHECK_THROWS_AS(osgood_check([](double s) { return s; }, bad), ConfigError);
    const auto g = line(4);
    NoiseModel m({build_noise(SpectralBasis::cosine_neumann(g, 2), {1.0, 1.0}, HolderFunction::by_name("zero"))});
    try {
        osgood_check(m, 0, 1.0, eps);
        FAIL("expected osgood");
    } catch (const AuditError& e) {
        CHECK(e.reason() == "osgood");
    }
}
