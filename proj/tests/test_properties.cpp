#include <cmath>
#include <cstring>

#include "doctest.h"

#include "srd/config.hpp"
#include "srd/mollifier.hpp"
#include "srd/random.hpp"
#include "srd/solver.hpp"

using namespace srd;

namespace {

// Hand-rolled generators over AuditRng.
DomainGrid random_grid(AuditRng& rng)
{
    const int dim = 1 + static_cast<int>(rng.below(2));
    const double e[] = {rng.uniform(0.5, 3.0), rng.uniform(0.5, 3.0)};
    const int c[] = {2 + static_cast<int>(rng.below(dim == 1 ? 40 : 10)), 2 + static_cast<int>(rng.below(10))};
    return DomainGrid::build(dim, std::span<const double>(e, static_cast<std::size_t>(dim)),
                             std::span<const int>(c, static_cast<std::size_t>(dim)));
}

CoefficientField random_coefficients(AuditRng& rng, const DomainGrid& g, bool with_c)
{
    auto cf = CoefficientField::uniform(g, 1.0, 0.0, 0.1, 10.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double a = rng.uniform(0.1, 10.0);
        cf.tensor[i] = {a, 0.0, a};
        cf.c[i] = with_c ? rng.uniform(0.0, 5.0) : 0.0;
    }
    return cf;
}

Field random_field(AuditRng& rng, std::size_t n, double lo, double hi)
{
    Field f(static_cast<Eigen::Index>(n));
    for (auto& x : f) {
        x = rng.uniform(lo, hi);
    }
    return f;
}

PolynomialDrift random_drift(AuditRng& rng)
{
    const int N = static_cast<int>(rng.below(3));
    std::vector<double> w(static_cast<std::size_t>(2 * N + 1));
    for (auto& x : w) {
        x = rng.uniform(-3.0, 3.0);
    }
    w.back() = -rng.uniform(0.1, 3.0);
    return PolynomialDrift::uniform(w);
}

}  // namespace

TEST_SUITE("property")
{
    TEST_CASE("negated operators are symmetric M-matrices")
    {
        AuditRng rng(1);
        for (int trial = 0; trial < 200; ++trial) {
            const auto g = random_grid(rng);
            const bool with_c = trial % 2 == 1;
            const auto cf = random_coefficients(rng, g, with_c);
            const auto op = EllipticOperator::assemble(g, cf);
            const Eigen::MatrixXd M(op.matrix());
            CHECK((M - M.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * M.cwiseAbs().maxCoeff());
            for (Eigen::Index i = 0; i < M.rows(); ++i) {
                double row = 0.0;
                for (Eigen::Index j = 0; j < M.cols(); ++j) {
                    if (i != j) {
                        CHECK(M(i, j) >= 0.0);
                    }
                    row += M(i, j);
                }
                CHECK(M(i, i) <= 0.0);
                CHECK(row == doctest::Approx(-cf.c[static_cast<std::size_t>(i)]).scale(M.cwiseAbs().maxCoeff()));
            }
        }
    }

    TEST_CASE("propagator preserves order and contracts the sup norm")
    {
        AuditRng rng(2);
        for (int trial = 0; trial < 300; ++trial) {
            const auto g = random_grid(rng);
            const auto op = EllipticOperator::assemble(g, random_coefficients(rng, g, trial % 3 == 0));
            const double tau = std::exp(rng.uniform(-8.0, 1.0));
            const ImplicitPropagator R(op, tau);
            const Field u = random_field(rng, g.size(), -2.0, 2.0);
            const Field v = u + random_field(rng, g.size(), 0.0, 1.0);
            const Field Ru = R.apply(u), Rv = R.apply(v);
            CHECK(sup_norm(Ru) <= sup_norm(u) * (1.0 + 1e-12));
            CHECK((Rv - Ru).minCoeff() >= 0.0);
            CHECK(R.apply(u.cwiseAbs()).minCoeff() >= 0.0);
            // linearity
            CHECK((R.apply(u + 2.0 * v) - Ru - 2.0 * Rv).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + sup_norm(v)));
        }
    }

    TEST_CASE("drift certificates bound the drift")
    {
        AuditRng rng(3);
        for (int trial = 0; trial < 300; ++trial) {
            const auto h = random_drift(rng);
            const auto c = check_f1_f2(h);
            REQUIRE(c.f2);
            const int d = h.degree();
            for (int i = 0; i < 200; ++i) {
                const double s = std::exp(rng.uniform(-6.0, 4.0));
                const double sd = std::pow(s, d);
                const double tol = 1e-9 * (1.0 + std::abs(h(0, s)) + sd);
                CHECK(h(0, s) <= c.a + tol);
                CHECK(h(0, s) >= -c.a * (1.0 + sd) - tol);
                CHECK(h(0, -s) >= -c.a - tol);
                CHECK(h(0, -s) <= c.a * (1.0 + sd) + tol);
                CHECK(h(0, s) <= c.f2->a2 - c.f2->b2 * sd + tol);
                CHECK(h(0, -s) >= c.f2->a1 + c.f2->b1 * sd - tol);
            }
        }
    }

    TEST_CASE("dissipativity margins stay nonnegative")
    {
        AuditRng rng(4);
        for (int trial = 0; trial < 100; ++trial) {
            auto sys = ReactionSystem::certify({random_drift(rng)}, {CouplingTerm::none()});
            for (int i = 0; i < 50; ++i) {
                const double m = std::exp(rng.uniform(-2.0, 4.0));
                const Field u = random_field(rng, 6, -m, m);
                const Field v = random_field(rng, 6, -m, m);
                CHECK(dissipativity_gap(sys, 0, u, v) >= -1e-9 * (1.0 + std::pow(1.0 + m, 5.0)));
                CHECK(dissipativity_gap(sys, 0, u, v, DissipativityMode::difference) >=
                      -1e-9 * (1.0 + std::pow(1.0 + 2.0 * m, 5.0)));
            }
        }
    }

    TEST_CASE("truncated reactions agree inside the ball")
    {
        AuditRng rng(5);
        const auto sys = fhn_system(1.0, 1.0);
        for (int trial = 0; trial < 500; ++trial) {
            const double n = rng.uniform(0.5, 20.0);
            const auto t = sys.truncated(n);
            double s[] = {rng.uniform(-n, n), rng.uniform(-n, n)};
            if (std::abs(s[0]) + std::abs(s[1]) <= n) {
                CHECK(t.evaluate(0, 0, s) == sys.evaluate(0, 0, s));
                CHECK(t.evaluate(1, 0, s) == sys.evaluate(1, 0, s));
            }
            double far[] = {rng.uniform(-3 * n, 3 * n), rng.uniform(-3 * n, 3 * n)};
            CHECK(std::abs(t.coupling_value(1, 0, far)) <= 2.0 * n + 1e-12);
        }
    }

    TEST_CASE("coarse increments are consistent at every level")
    {
        AuditRng rng(6);
        for (int trial = 0; trial < 30; ++trial) {
            const std::size_t K = 1 + rng.below(5);
            const unsigned L = static_cast<unsigned>(1 + rng.below(5));
            const std::size_t n = (std::size_t{1} << L) * (1 + rng.below(8));
            const WienerPath w(rng.below(1u << 30), 2, K, n, 0.01);
            const auto c = w.coarse(L);
            for (std::size_t i = 0; i < c.steps; ++i) {
                for (std::size_t k = 0; k < K; ++k) {
                    double acc = 0.0;
                    for (std::size_t j = 0; j < (std::size_t{1} << L); ++j) {
                        acc += w.increment(1, k, (i << L) + j);
                    }
                    CHECK(c.at(i, 1)[k] == doctest::Approx(acc).epsilon(1e-13));
                }
            }
        }
    }

    TEST_CASE("mollifier sandwich for random linear moduli")
    {
        AuditRng rng(7);
        for (int trial = 0; trial < 20; ++trial) {
            const double C = rng.uniform(0.2, 3.0);
            const auto f = build_mollifier([C](double s) { return C * s; }, 4);
            for (int i = 0; i < 200; ++i) {
                const std::size_t n = 1 + rng.below(4);
                const double t = (rng.below(2) ? 1.0 : -1.0) * std::exp(rng.uniform(-15.0, 1.0));
                const double p = f.phi(n, t);
                CHECK(p <= std::abs(t));
                CHECK(p >= std::abs(t) - f.a(n - 1));
                CHECK(std::abs(f.dphi(n, t)) <= 1.0);
            }
        }
    }

    TEST_CASE("quasi-positive linear systems stay nonnegative without noise")
    {
        AuditRng rng(8);
        const double e[] = {1.0};
        const int cells[] = {12};
        const auto g = DomainGrid::build(1, e, cells);
        for (int trial = 0; trial < 40; ++trial) {
            const std::size_t r = 1 + rng.below(3);
            std::vector<EllipticOperator> ops;
            std::vector<PolynomialDrift> drifts;
            std::vector<CouplingTerm> couplings;
            std::vector<ComponentNoise> noise;
            for (std::size_t l = 0; l < r; ++l) {
                ops.push_back(EllipticOperator::assemble(g, random_coefficients(rng, g, false)));
                drifts.push_back(PolynomialDrift::uniform({-rng.uniform(0.0, 2.0)}));
                std::vector<double> w(r);
                for (std::size_t j = 0; j < r; ++j) {
                    w[j] = j == l ? 0.0 : rng.uniform(0.0, 2.0);
                }
                couplings.push_back(CouplingTerm::linear(w));
                noise.push_back(build_noise(SpectralBasis::cosine_neumann(g, 0), {}, HolderFunction::by_name("zero")));
            }
            const auto p = Problem::make(std::move(ops), ReactionSystem::certify(drifts, couplings),
                                         NoiseModel(std::move(noise)));
            SolverConfig c;
            c.dt = 0.01;
            c.t_end = 0.5;
            State u0;
            for (std::size_t l = 0; l < r; ++l) {
                u0.push_back(random_field(rng, g.size(), 0.0, 1.0));
            }
            const auto t = simulate(p, c, WienerPath(1, r, 0, 50, 0.01), u0);
            for (const auto& st : t.states) {
                for (const auto& f : st) {
                    CHECK(f.minCoeff() >= 0.0);
                }
            }
        }
    }

    TEST_CASE("ladder agreement on random paths")
    {
        AuditRng rng(9);
        auto cfg = fhn_preset();
        cfg.raw["noise"]["amplitude"] = 1.5;
        const auto p = build_problem(cfg);
        auto sc = build_solver_config(cfg);
        sc.dt = 0.004;
        sc.t_end = 0.5;
        const State u0{p.grid.constant(0.5), p.grid.constant(0.5)};
        const double levels[] = {1.0, 1.5, 3.0, 6.0};
        for (int trial = 0; trial < 10; ++trial) {
            const WienerPath w(rng.below(1u << 30), 2, 8, 125, 0.004);
            const auto lr = glue_ladder(p, sc, w, u0, levels);
            CHECK(lr.report.monotone);
        }
    }

    TEST_CASE("digest is insensitive to key order")
    {
        auto a = fhn_preset();
        const auto b = parse_config(
            R"({"version": 1, "output": {"format": "auto", "stride": 0}, "experiment": {"paths": 64, "name": "positivity"},
                "initial": {"constant": [0.2, 0.2]},
                "solver": {"t_end": 1.0, "sup_cap": 1000.0, "scheme": "semi-implicit", "linear_solver": "direct",
                           "dt_fine": 0.000125, "dt": 0.001},
                "noise": {"g": "sqrt-plus", "amplitude": 0.5, "lambdas": "power:1", "modes": 8, "basis": "cosine-neumann"},
                "reaction": {"b": 1.0, "a": 1.0, "preset": "fhn"},
                "operators": [{"eta": 0.25, "c": 0.0, "a": 1.0, "M_bound": 2.0},
                              {"M_bound": 2.0, "eta": 0.25, "c": 0.0, "a": 0.5}],
                "grid": {"cells": [32], "extent": [1.0], "dim": 1}, "master_seed": 1})");
        CHECK(config_digest(a) == config_digest(b));
    }
}
