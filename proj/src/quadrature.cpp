#include "srd/quadrature.hpp"

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "srd/error.hpp"

namespace srd {

double integrate_log(const std::function<double(double)>& f, double a, double b, double rel_tol)
{
    if (!(a > 0.0) || !(b >= a)) {
        throw ConfigError("quadrature", "log-variable quadrature needs 0 < a <= b");
    }
    if (a == b) {
        return 0.0;
    }
    auto g = [&](double y) {
        const double s = std::exp(y);
        return f(s) * s;
    };
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, std::log(a), std::log(b), 20, rel_tol,
                                                                         &err);
}

double integrate_reciprocal(const Modulus& rho, double a, double b, double rel_tol)
{
    return integrate_log([&](double s) { return 1.0 / rho(s); }, a, b, rel_tol);
}

}  // namespace srd
