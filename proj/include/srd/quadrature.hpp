#pragma once

#include <functional>

namespace srd {

/// A modulus of continuity rho: (0, inf) -> (0, inf).
using Modulus = std::function<double(double)>;

/// int_a^b ds / rho(s) for 0 < a <= b, by adaptive Gauss-Kronrod in the
/// variable y = ln s (the integrand e^y / rho(e^y) is smooth for power-law
/// moduli, so small a costs nothing extra).
double integrate_reciprocal(const Modulus& rho, double a, double b, double rel_tol = 1e-13);

/// int_a^b f(s) ds by adaptive Gauss-Kronrod in y = ln s.
double integrate_log(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-13);

}  // namespace srd
