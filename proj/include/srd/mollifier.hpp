#pragma once

#include <cstddef>
#include <vector>

#include "srd/quadrature.hpp"

namespace srd {

/// Yamada-Watanabe family for a modulus rho: levels a_0 > a_1 > ... with
/// int_{a_n}^{a_{n-1}} ds / rho = n, densities psi_n = 1/(n rho) on
/// (a_n, a_{n-1}), and phi_n(t) = int_0^|t| int_0^s psi_n.
class MollifierFamily {
public:
    MollifierFamily(Modulus rho, std::vector<double> levels) : rho_(std::move(rho)), a_(std::move(levels)) {}

    const Modulus& rho() const noexcept { return rho_; }
    /// a_0, ..., a_{n_max}.
    const std::vector<double>& levels() const noexcept { return a_; }
    std::size_t max_level() const noexcept { return a_.size() - 1; }
    double a(std::size_t n) const { return a_.at(n); }

    double psi(std::size_t n, double t) const;
    /// int_{a_n}^{a_{n-1}} psi_n by quadrature.
    double psi_mass(std::size_t n) const;
    /// Psi_n(s) = int_0^s psi_n for s >= 0.
    double Psi(std::size_t n, double s) const;
    /// phi_n(t), via phi_n(t) = |t| Psi_n(|t|) - int_{a_n}^{min(|t|, a_{n-1})} tau psi_n(tau) dtau.
    double phi(std::size_t n, double t) const;
    /// phi_n'(t) = sgn(t) Psi_n(|t|).
    double dphi(std::size_t n, double t) const;

private:
    void check_level(std::size_t n) const;

    Modulus rho_;
    std::vector<double> a_;
};

/// Root-solves the levels (log-variable quadrature + TOMS 748, 1e-10
/// relative). Throws AuditError("osgood") when rho fails the Osgood check and
/// ConfigError("underflow") naming the largest feasible n when a_n leaves the
/// double range.
MollifierFamily build_mollifier(Modulus rho, std::size_t n_max, double a0 = 1.0);

/// One-sided variant phi_n(t) = 1_{t>0} int_0^t int_0^s psi_n.
class PositivityMollifier {
public:
    PositivityMollifier(MollifierFamily family, std::size_t n) : family_(std::move(family)), n_(n) {}

    const MollifierFamily& family() const noexcept { return family_; }
    std::size_t level() const noexcept { return n_; }
    double phi(double t) const { return t > 0.0 ? family_.phi(n_, t) : 0.0; }
    double dphi(double t) const { return t > 0.0 ? family_.dphi(n_, t) : 0.0; }

private:
    MollifierFamily family_;
    std::size_t n_;
};

PositivityMollifier positivity_mollifier(Modulus rho, std::size_t n, double a0 = 1.0);

}  // namespace srd
