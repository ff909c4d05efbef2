#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "doctest.h"

#include "srd/elliptic_operator.hpp"
#include "srd/error.hpp"
#include "srd/experiments.hpp"

using namespace srd;

namespace {

DomainGrid line(int n, double L = 1.0)
{
    const double e[] = {L};
    const int c[] = {n};
    return DomainGrid::build(1, e, c);
}

DomainGrid box(int nx, int ny, double Lx, double Ly)
{
    const double e[] = {Lx, Ly};
    const int c[] = {nx, ny};
    return DomainGrid::build(2, e, c);
}

std::vector<double> neumann_1d(int n, double L, double a)
{
    const double h = L / n;
    std::vector<double> ev;
    for (int k = 0; k < n; ++k) {
        ev.push_back(-a * (2.0 / (h * h)) * (1.0 - std::cos(k * std::numbers::pi / n)));
    }
    std::sort(ev.begin(), ev.end());
    return ev;
}

}  // namespace

TEST_CASE("1D Neumann spectrum matches the closed form")
{
    const int n = 64;
    const auto g = line(n);
    const auto op = EllipticOperator::assemble(g, CoefficientField::uniform(g, 1.0, 0.0, 1.0, 1.0));
    const Eigen::VectorXd spec = operator_spectrum(op);
    const auto exact = neumann_1d(n, 1.0, 1.0);
    // relative error, except for the zero eigenvalue which is compared against the spectral radius
    const double radius = 4.0 * n * n;
    for (int k = 0; k < n; ++k) {
        const double x = exact[static_cast<std::size_t>(k)];
        CHECK(std::abs(spec[k] - x) <= 1e-10 * (x != 0.0 ? std::abs(x) : radius));
    }
}

TEST_CASE("2D spectrum is the Kronecker sum of the 1D spectra")
{
    const auto g = box(6, 5, 2.0, 1.0);
    const auto op = EllipticOperator::assemble(g, CoefficientField::uniform(g, 0.7, 0.0, 0.5, 1.0));
    const Eigen::VectorXd spec = operator_spectrum(op);
    const auto ex = neumann_1d(6, 2.0, 0.7);
    const auto ey = neumann_1d(5, 1.0, 0.7);
    std::vector<double> sum;
    for (double x : ex) {
        for (double y : ey) {
            sum.push_back(x + y);
        }
    }
    std::sort(sum.begin(), sum.end());
    REQUIRE(spec.size() == 30);
    for (int i = 0; i < 30; ++i) {
        CHECK(spec[i] == doctest::Approx(sum[static_cast<std::size_t>(i)]).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("harmonic face average")
{
    const auto g = line(2, 2.0);
    auto cf = CoefficientField::uniform(g, 1.0, 0.0, 0.5, 4.0);
    cf.tensor[1] = {3.0, 0.0, 3.0};
    const auto op = EllipticOperator::assemble(g, cf);
    const Eigen::MatrixXd M(op.matrix());
    // h = 1, face value 2*1*3/(1+3).
    CHECK(M(0, 1) == doctest::Approx(1.5));
    CHECK(M(0, 0) == doctest::Approx(-1.5));
    CHECK(M(1, 1) == doctest::Approx(-1.5));
}

TEST_CASE("zeroth-order term shifts the diagonal")
{
    const auto g = line(8);
    const auto op0 = EllipticOperator::assemble(g, CoefficientField::uniform(g, 1.0, 0.0, 1.0, 1.0));
    const auto op1 = EllipticOperator::assemble(g, CoefficientField::uniform(g, 1.0, 2.5, 1.0, 1.0));
    const Eigen::MatrixXd d = Eigen::MatrixXd(op1.matrix()) - Eigen::MatrixXd(op0.matrix());
    CHECK((d + 2.5 * Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("ellipticity audit")
{
    const auto g = line(4);
    auto cf = CoefficientField::uniform(g, 1.0, 0.0, 0.5, 2.0);
    cf.tensor[2] = {0.1, 0.0, 0.1};
    try {
        EllipticOperator::assemble(g, cf);
        FAIL("expected an audit error");
    } catch (const AuditError& e) {
        CHECK(e.reason() == "ellipticity");
    }
    auto bad = CoefficientField::uniform(g, 1.0, 0.0, 0.5, 2.0);
    bad.c.pop_back();
    CHECK_THROWS_AS(EllipticOperator::assemble(g, bad), ConfigError);
}

TEST_CASE("off-diagonal tensor entries do not enter the two-point flux")
{
    const auto g = box(4, 4, 1.0, 1.0);
    auto a = CoefficientField::uniform(g, 1.0, 0.0, 0.5, 2.0);
    auto b = a;
    for (auto& t : b.tensor) {
        t = {1.0, 0.3, 1.0};
    }
    const Eigen::MatrixXd d =
        Eigen::MatrixXd(EllipticOperator::assemble(g, a).matrix()) - EllipticOperator::assemble(g, b).matrix();
    CHECK(d.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("propagator acts on a discrete cosine by the eigenvalue")
{
    const int n = 32;
    const auto g = line(n);
    const auto op = EllipticOperator::assemble(g, CoefficientField::uniform(g, 1.0, 0.0, 1.0, 1.0));
    const double h = 1.0 / n;
    for (int k : {1, 3, 7}) {
        Field e(n);
        for (int i = 0; i < n; ++i) {
            e[i] = std::cos(k * std::numbers::pi * (i + 0.5) * h);
        }
        const double lambda = -(2.0 / (h * h)) * (1.0 - std::cos(k * std::numbers::pi / n));
        CHECK((op.apply(e) - lambda * e).cwiseAbs().maxCoeff() < 1e-9);
        const double tau = 1e-3;
        const Field w = ImplicitPropagator(op, tau).apply(e);
        CHECK((w - e / (1.0 - tau * lambda)).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("conjugate gradient agrees with the direct solve")
{
    const auto g = box(12, 9, 1.0, 0.75);
    auto cf = CoefficientField::uniform(g, 1.0, 0.0, 0.5, 3.0);
    for (std::size_t i = 0; i < cf.tensor.size(); ++i) {
        const double a = 1.0 + 0.5 * std::sin(0.3 * static_cast<double>(i));
        cf.tensor[i] = {a, 0.0, a};
    }
    const auto op = EllipticOperator::assemble(g, cf);
    Field u(static_cast<Eigen::Index>(g.size()));
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        u[i] = std::cos(0.17 * static_cast<double>(i));
    }
    const Field d = ImplicitPropagator(op, 0.01).apply(u);
    const Field c = ImplicitPropagator(op, 0.01, {LinearSolverKind::conjugate_gradient, 1e-12}).apply(u);
    CHECK((d - c).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((semigroup_step(op, 0.01, u) - d).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("resolvent fixes constants when c = 0")
{
    const auto g = line(10);
    const auto op = EllipticOperator::assemble(g, CoefficientField::uniform(g, 2.0, 0.0, 1.0, 2.0));
    const Field r = apply_resolvent(op, 3.0, g.constant(1.7));
    CHECK((r.array() - 1.7).abs().maxCoeff() < 1e-13);
    CHECK_THROWS_AS(ImplicitPropagator(op, -1.0), ConfigError);
}

TEST_CASE("coefficient CSV")
{
    const auto g = line(3);
    const auto path = std::filesystem::temp_directory_path() / "srd_coeff_test.csv";
    {
        std::ofstream out(path);
        out << "index,a11,c\n0,1.0,0.0\n1,2.0,0.5\n2,1.5,0.0\n";
    }
    const auto cf = load_coefficients_csv(path, g, 0.5, 3.0);
    CHECK(cf.tensor[1][0] == 2.0);
    CHECK(cf.c[1] == 0.5);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_coefficients_csv(path, g, 0.5, 3.0), ConfigError);
}

TEST_CASE("spike smoothing follows the heat kernel peak")
{
    // 1/sqrt(4 pi a t) in 1D, 1/(4 pi a t) in 2D, away from the boundary
    const auto g1 = line(64);
    const auto op1 = EllipticOperator::assemble(g1, CoefficientField::uniform(g1, 1.0, 0.0, 1.0, 1.0));
    const auto g2 = box(32, 32, 1.0, 1.0);
    const auto op2 = EllipticOperator::assemble(g2, CoefficientField::uniform(g2, 0.5, 0.0, 0.5, 1.0));
    const auto rep = operator_suite({op1, op2}, 7, 10);
    CHECK(rep.pass);
    const auto s1 = rep.statistics["component_0_smoothing_scaled_sup"].get<std::vector<double>>();
    const auto s2 = rep.statistics["component_1_smoothing_scaled_sup"].get<std::vector<double>>();
    REQUIRE(s1.size() > 4);
    REQUIRE(s2.size() > 3);
    CHECK(s1[s1.size() / 2] == doctest::Approx(1.0 / std::sqrt(4.0 * std::numbers::pi)).epsilon(0.05));
    CHECK(s2[s2.size() / 2] == doctest::Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(0.1));
}
