#pragma once

// Residue extraction for operator-valued meromorphic functions:
//
//   Res_{z=c} f = (1/2*pi*i) contour_integral f(z) dz
//
// by the trapezoid rule on a circle around c. Equidistant nodes make the
// rule exponentially accurate for integrands analytic in an annulus around
// the circle, so the node count is doubled until two successive estimates
// agree, from 64 up to a hard cap of 512.

#include <functional>

#include "rmi/common.hpp"
#include "rmi/tensor.hpp"

namespace rmi {

struct ResidueOptions {
    double radius = 1e-2;
    int nodes = 64;
    int max_nodes = 512;
    double agree_tol = 1e-7;
};

inline Matrix residue_fixed_nodes(const std::function<Matrix(cplx)>& f, cplx center,
                                  double radius, int nodes) {
    Matrix acc;
    for (int k = 0; k < nodes; ++k) {
        const double t = 2.0 * pi * double(k) / double(nodes);
        const cplx w = std::exp(iu * t);
        Matrix val = f(center + radius * w);
        val *= radius * w / double(nodes);
        if (k == 0)
            acc = std::move(val);
        else
            acc += val;
    }
    return acc;
}

/// Residue of f at center, assuming at most a simple pole inside the circle
/// and no other singularity within reach of the quadrature nodes.
inline Matrix numeric_residue(const std::function<Matrix(cplx)>& f, cplx center,
                              const ResidueOptions& opt = {}) {
    Matrix est = residue_fixed_nodes(f, center, opt.radius, opt.nodes);
    for (int nodes = opt.nodes * 2; nodes <= opt.max_nodes; nodes *= 2) {
        Matrix next = residue_fixed_nodes(f, center, opt.radius, nodes);
        const double diff = (next - est).frobenius() /
                            std::max(1.0, std::max(next.frobenius(), est.frobenius()));
        est = std::move(next);
        if (diff <= opt.agree_tol) break;
    }
    return est;
}

} // namespace rmi
