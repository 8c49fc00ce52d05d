#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rmi {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline const cplx iu{0.0, 1.0};

/// Raised when an evaluation lands too close to a pole of a theta
/// denominator (or an explicit zero-argument restriction is violated).
struct pole_error : std::runtime_error {
    explicit pole_error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a series hits its term cap before the tolerance is met.
struct divergence_error : std::runtime_error {
    explicit divergence_error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised on dimension mismatches and ill-conditioned inversions.
struct algebra_error : std::runtime_error {
    explicit algebra_error(const std::string& what) : std::runtime_error(what) {}
};

inline bool is_finite(cplx v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
}

} // namespace rmi
