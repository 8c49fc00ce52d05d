#pragma once

// Deterministic sampling of generic evaluation points. All randomness flows
// through mt19937_64 with explicit scaling (no standard-library
// distributions, whose output is implementation defined), so a fixed seed
// reproduces bit-identical points on any platform.
//
// Points are drawn uniformly from the fundamental parallelogram
// {s + t*tau : 0 <= s,t < 1} and rejected while any argument required by the
// identity under test comes within lattice distance 0.05 of a pole. The
// Planck parameter is rejected while any theta value entering the R-matrix
// coefficients or its normalization sits below 1e-3.

#include <cstdint>
#include <functional>
#include <random>
#include <string_view>
#include <vector>

#include "rmi/elliptic.hpp"

namespace rmi {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform in [0, 1) with 53 bits.
    double unit() { return double(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

private:
    std::mt19937_64 gen_;
};

/// Stable seed derivation for independent cells: splitmix64 absorbed over a
/// tag string, so results do not depend on evaluation order.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
    std::uint64_t x = base;
    auto mix = [&x](std::uint64_t v) {
        x += 0x9e3779b97f4a7c15ull + v;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        x = z ^ (z >> 31);
    };
    for (char c : tag) mix(static_cast<std::uint64_t>(static_cast<unsigned char>(c)));
    mix(tag.size());
    return x;
}

/// Euclidean distance from w to the nearest point of Z + tau*Z.
inline double lattice_distance(cplx w, const ModularTau& tau) {
    const double t = w.imag() / tau.tau.imag();
    const double s = w.real() - t * tau.tau.real();
    const double fs = s - std::floor(s);
    const double ft = t - std::floor(t);
    double best = 1e300;
    for (int ds = 0; ds <= 1; ++ds)
        for (int dt = 0; dt <= 1; ++dt) {
            const cplx d = cplx(fs - ds) + cplx(ft - dt) * tau.tau;
            best = std::min(best, std::abs(d));
        }
    return best;
}

inline cplx sample_parallelogram(Rng& rng, const ModularTau& tau) {
    return cplx(rng.unit()) + cplx(rng.unit()) * tau.tau;
}

/// Test-domain modular parameter: Im in [0.8, 2.0], |Re| <= 0.5.
inline ModularTau sample_tau(Rng& rng) {
    return ModularTau(cplx(rng.uniform(-0.5, 0.5), rng.uniform(0.8, 2.0)));
}

/// Planck parameter with all R-matrix theta denominators and the
/// normalization phi(h, .) well conditioned, for both signs of h.
inline cplx sample_hbar(Rng& rng, int m, const ModularTau& tau, const SeriesConfig& cfg,
                        double floor = 1e-3) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
        const cplx h = sample_parallelogram(rng, tau);
        bool ok = std::abs(theta(h, tau, cfg)) >= floor;
        for (int sign : {+1, -1}) {
            for (int a1 = 0; ok && a1 < m; ++a1)
                for (int a2 = 0; ok && a2 < m; ++a2) {
                    const cplx s = double(sign) * h / double(m) +
                                   half_period({a1, a2}, m, tau);
                    ok = std::abs(theta(s, tau, cfg)) >= floor;
                }
            if (!ok) break;
        }
        if (ok) return h;
    }
    throw std::runtime_error("sample_hbar: rejection did not terminate");
}

/// Generic shift parameter, kept away from the lattice (and with 2*eta away
/// too, which the kernel substitution checks rely on).
inline cplx sample_eta(Rng& rng, const ModularTau& tau, double min_dist = 0.05) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
        const cplx e = sample_parallelogram(rng, tau);
        if (lattice_distance(e, tau) >= min_dist &&
            lattice_distance(2.0 * e, tau) >= min_dist)
            return e;
    }
    throw std::runtime_error("sample_eta: rejection did not terminate");
}

/// Draw `count` points, resampling the whole set while any argument the
/// caller derives from them is within min_dist of the lattice.
inline std::vector<cplx> sample_generic_points(
    Rng& rng, int count, const ModularTau& tau,
    const std::function<std::vector<cplx>(const std::vector<cplx>&)>& required_args,
    double min_dist = 0.05) {
    for (int attempt = 0; attempt < 5000; ++attempt) {
        std::vector<cplx> pts;
        pts.reserve(count);
        for (int i = 0; i < count; ++i) pts.push_back(sample_parallelogram(rng, tau));
        bool ok = true;
        for (cplx arg : required_args(pts)) {
            if (lattice_distance(arg, tau) < min_dist) { ok = false; break; }
        }
        if (ok) return pts;
    }
    throw std::runtime_error("sample_generic_points: rejection did not terminate");
}

/// All pairwise differences of the given points, the usual pole set of an
/// R-matrix product.
inline std::vector<cplx> pairwise_differences(const std::vector<cplx>& pts) {
    std::vector<cplx> out;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = 0; j < pts.size(); ++j)
            if (i != j) out.push_back(pts[i] - pts[j]);
    return out;
}

} // namespace rmi
