#pragma once

// Elliptic layer: the odd theta function
//
//   theta(z|tau) = -sum_{k in Z} exp( pi*i*tau*(k+1/2)^2 + 2*pi*i*(z+1/2)*(k+1/2) ),
//   Im(tau) > 0,
//
// the Kronecker function phi(z,u) = theta'(0) theta(z+u) / (theta(z) theta(u)),
// the Z_M-indexed variants phi_a with an exponential prefactor, the
// Weierstrass function derived from theta, and residual evaluators for the
// scalar addition formulas.
//
// The series is summed over symmetric index pairs (k, -1-k); terms decay like
// |q|^{(k+1/2)^2} with q = exp(pi*i*tau), so a handful of pairs suffice for
// Im(tau) ~ 1. No argument reduction modulo the period lattice is performed;
// quasi-periodicity is a tested property of the values themselves.

#include <cmath>
#include <cstddef>
#include <vector>

#include "rmi/common.hpp"

namespace rmi {

struct ModularTau {
    cplx tau;

    explicit ModularTau(cplx t) : tau(t) {
        if (!(t.imag() > 0.0))
            throw std::invalid_argument("ModularTau: Im(tau) must be positive");
    }
};

/// Truncation policy for all theta series plus the pole floor shared by the
/// functions built from theta ratios.
struct SeriesConfig {
    double term_tolerance = 1e-16;
    int max_terms = 64;
    double pole_floor = 1e-10;

    void validate() const {
        if (!(term_tolerance > 0.0))
            throw std::invalid_argument("SeriesConfig: term_tolerance must be positive");
        if (max_terms < 8)
            throw std::invalid_argument("SeriesConfig: max_terms must be at least 8");
    }
};

struct TorusPoint {
    cplx z;
};

/// Index a = (a1, a2) in Z_M x Z_M with the associated half period
/// omega_a = (a1 + a2*tau)/M.
struct HalfPeriodIndex {
    int a1 = 0;
    int a2 = 0;
};

inline cplx half_period(const HalfPeriodIndex& a, int m, const ModularTau& tau) {
    return (cplx(double(a.a1)) + cplx(double(a.a2)) * tau.tau) / double(m);
}

namespace detail {

// Smallest K with |q|^{(K+1/2)^2} < tol; the loop keeps summing past K while
// the actual pair magnitude is still above tol (large |Im z| delays decay).
inline int theta_a_priori_terms(cplx tau, double tol) {
    const double logq = -pi * tau.imag(); // log|q|
    const double target = std::log(tol) / logq;
    const double k = std::sqrt(std::max(target, 0.25)) - 0.5;
    return std::max(1, static_cast<int>(std::ceil(k)));
}

} // namespace detail

/// d^order/dz^order of theta(z|tau), term-by-term differentiated series.
inline cplx theta_deriv(cplx z, const ModularTau& tau, const SeriesConfig& cfg, int order) {
    cfg.validate();
    if (order < 0 || order > 3)
        throw std::invalid_argument("theta_deriv: order must be in 0..3");

    const cplx ipt = iu * pi * tau.tau;
    const cplx i2p = iu * (2.0 * pi);
    const int k_min = detail::theta_a_priori_terms(tau.tau, cfg.term_tolerance);

    cplx acc{0.0, 0.0};
    double scale = 0.0;
    int quiet = 0;
    for (int k = 0;; ++k) {
        if (k >= cfg.max_terms)
            throw divergence_error("theta series hit max_terms before reaching term_tolerance");
        cplx pair{0.0, 0.0};
        for (int kk : {k, -1 - k}) {
            const cplx m(kk + 0.5, 0.0);
            cplx term = std::exp(ipt * m * m + i2p * (z + 0.5) * m);
            for (int d = 0; d < order; ++d) term *= i2p * m;
            pair += term;
        }
        acc += pair;
        scale = std::max(scale, std::abs(pair));
        quiet = (std::abs(pair) < cfg.term_tolerance) ? quiet + 1 : 0;
        if (quiet >= 2 && k + 1 >= k_min) break;
    }
    if (!is_finite(acc))
        throw divergence_error("theta series overflowed");
    return -acc;
}

inline cplx theta(cplx z, const ModularTau& tau, const SeriesConfig& cfg) {
    return theta_deriv(z, tau, cfg, 0);
}

/// theta^(order)(0|tau) for order in {1,3}; order 1 feeds the phi prefactor,
/// order 3 the additive constant of the Weierstrass function.
inline cplx theta_d0(const ModularTau& tau, int order, const SeriesConfig& cfg) {
    if (order != 1 && order != 3)
        throw std::invalid_argument("theta_d0: order must be 1 or 3");
    return theta_deriv(cplx{0.0, 0.0}, tau, cfg, order);
}

/// Kronecker function phi(z,u) = theta'(0) theta(z+u) / (theta(z) theta(u)).
/// Symmetric in (z,u); simple pole with residue 1 at z = 0.
inline cplx kronecker_phi(cplx z, cplx u, const ModularTau& tau, const SeriesConfig& cfg) {
    const cplx tz = theta(z, tau, cfg);
    const cplx tu = theta(u, tau, cfg);
    if (std::abs(tz) < cfg.pole_floor || std::abs(tu) < cfg.pole_floor)
        throw pole_error("kronecker_phi: argument too close to the period lattice");
    return theta_d0(tau, 1, cfg) * theta(z + u, tau, cfg) / (tz * tu);
}

/// phi_a(z, s) = exp(2*pi*i*a2*z/M) * phi(z, s); the second argument s is the
/// already-combined shift (half period plus Planck offset).
inline cplx phi_a(const HalfPeriodIndex& a, cplx z, cplx s, int m,
                  const ModularTau& tau, const SeriesConfig& cfg) {
    if (m < 1) throw std::invalid_argument("phi_a: M must be positive");
    const cplx pref = std::exp(iu * (2.0 * pi) * double(a.a2) * z / double(m));
    return pref * kronecker_phi(z, s, tau, cfg);
}

/// Weierstrass function for the lattice Z + tau*Z, via
/// wp(z) = (theta'(z)/theta(z))^2 - theta''(z)/theta(z) + theta'''(0)/(3 theta'(0)).
/// The constant term makes the Laurent expansion at 0 equal 1/z^2 + O(z^2),
/// which phi(z,u) phi(z,-u) = wp(z) - wp(u) does not by itself pin down.
inline cplx weierstrass_p(cplx z, const ModularTau& tau, const SeriesConfig& cfg) {
    const cplx t0 = theta(z, tau, cfg);
    if (std::abs(t0) < cfg.pole_floor)
        throw pole_error("weierstrass_p: argument too close to the period lattice");
    const cplx t1 = theta_deriv(z, tau, cfg, 1);
    const cplx t2 = theta_deriv(z, tau, cfg, 2);
    const cplx lg = t1 / t0;
    return lg * lg - t2 / t0 + theta_d0(tau, 3, cfg) / (3.0 * theta_d0(tau, 1, cfg));
}

namespace detail {

inline double rel_scalar_residual(cplx lhs, cplx rhs) {
    return std::abs(lhs - rhs) / std::max(1.0, std::max(std::abs(lhs), std::abs(rhs)));
}

} // namespace detail

/// Residual of the addition formula
///   phi(z1,u1) phi(z2,u2) = phi(z1,u1+u2) phi(z2-z1,u2) + phi(z2,u1+u2) phi(z1-z2,u1).
inline double check_fay(cplx z1, cplx u1, cplx z2, cplx u2,
                        const ModularTau& tau, const SeriesConfig& cfg) {
    const cplx lhs = kronecker_phi(z1, u1, tau, cfg) * kronecker_phi(z2, u2, tau, cfg);
    const cplx rhs = kronecker_phi(z1, u1 + u2, tau, cfg) * kronecker_phi(z2 - z1, u2, tau, cfg) +
                     kronecker_phi(z2, u1 + u2, tau, cfg) * kronecker_phi(z1 - z2, u1, tau, cfg);
    return detail::rel_scalar_residual(lhs, rhs);
}

/// Residual of the n-point generalization
///   prod_i phi(w_i,u_i) = sum_i phi(w_i, sum_l u_l) prod_{j != i} phi(w_j - w_i, u_j).
inline double check_higher_fay(const std::vector<cplx>& ws, const std::vector<cplx>& us,
                               const ModularTau& tau, const SeriesConfig& cfg) {
    if (ws.size() != us.size() || ws.empty())
        throw std::invalid_argument("check_higher_fay: need equally sized nonempty lists");
    const std::size_t n = ws.size();

    cplx lhs{1.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) lhs *= kronecker_phi(ws[i], us[i], tau, cfg);

    cplx total_u{0.0, 0.0};
    for (cplx u : us) total_u += u;

    cplx rhs{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        cplx term = kronecker_phi(ws[i], total_u, tau, cfg);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            term *= kronecker_phi(ws[j] - ws[i], us[j], tau, cfg);
        }
        rhs += term;
    }
    return detail::rel_scalar_residual(lhs, rhs);
}

} // namespace rmi
