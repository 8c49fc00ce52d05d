#pragma once

// GL_M elliptic R-matrix in the fundamental representation:
//
//   R^h(z) = (1/M) sum_{alpha in Z_M^2} phi_alpha(z, h/M + omega_alpha)
//                                       T_alpha tensor T_{-alpha},
//
// built on the finite Heisenberg pair Q, Lambda with
// T_alpha = exp(pi*i*a1*a2/M) Q^a1 Lambda^a2. For M = 1 the construction
// collapses to the scalar Kronecker function phi(z, h).
//
// T is evaluated at literal integer pairs, so T_{-alpha} means the exact
// inverse of T_alpha (not a mod-M representative, whose prefactor differs
// by a sign for some M).
//
// Alongside the constructors this header carries residual evaluators for
// the standard single-R facts: Yang-Baxter, associative Yang-Baxter and its
// n-point extension, unitarity in both normalizations, skew-symmetry, Z_M
// symmetry, lattice quasi-periodicity, and the two residues (the
// transposition operator in z, the identity in h).

#include <functional>
#include <vector>

#include "rmi/contour.hpp"
#include "rmi/elliptic.hpp"
#include "rmi/tensor.hpp"

namespace rmi {

/// Q_kk = exp(2*pi*i*k/M) with k = 1..M.
inline Matrix q_matrix(int m) {
    Matrix q(static_cast<std::size_t>(m));
    for (int k = 1; k <= m; ++k)
        q(k - 1, k - 1) = std::exp(iu * (2.0 * pi) * double(k) / double(m));
    return q;
}

/// Lambda_kl = 1 iff k - l + 1 = 0 mod M (cyclic shift).
inline Matrix lambda_matrix(int m) {
    Matrix l(static_cast<std::size_t>(m));
    for (int k = 1; k <= m; ++k)
        for (int j = 1; j <= m; ++j)
            if (((k - j + 1) % m + m) % m == 0) l(k - 1, j - 1) = 1.0;
    return l;
}

namespace detail {

inline Matrix matrix_power_mod(const Matrix& base, int e, int m) {
    int r = ((e % m) + m) % m; // base^M = Id, so reduce the exponent
    Matrix out = Matrix::identity(base.dim());
    for (int k = 0; k < r; ++k) out = out * base;
    return out;
}

} // namespace detail

/// T_alpha = exp(pi*i*a1*a2/M) Q^a1 Lambda^a2, alpha any integer pair.
inline Matrix t_alpha(int a1, int a2, int m) {
    const cplx pref = std::exp(iu * pi * double(a1) * double(a2) / double(m));
    return pref * (detail::matrix_power_mod(q_matrix(m), a1, m) *
                   detail::matrix_power_mod(lambda_matrix(m), a2, m));
}

inline cplx kappa(const HalfPeriodIndex& a, const HalfPeriodIndex& b, int m) {
    return std::exp(iu * pi * double(a.a2 * b.a1 - a.a1 * b.a2) / double(m));
}

struct RMatrixParams {
    int M = 1;
    cplx hbar{0.2, 0.1};
    ModularTau tau{cplx{0.0, 1.0}};
    SeriesConfig cfg{};

    LatticeSpec lattice(int sites, std::size_t cap = 4096) const {
        return LatticeSpec(M, sites, cap);
    }
};

namespace detail {

inline RMatrixParams with_hbar(const RMatrixParams& p, cplx h) {
    RMatrixParams q = p;
    q.hbar = h;
    return q;
}

} // namespace detail

/// The elliptic R-matrix as a two-site operator, parameter params.hbar.
inline TwoSiteOperator baxter_belavin_r(cplx z, const RMatrixParams& p) {
    const int m = p.M;
    const std::size_t mm = static_cast<std::size_t>(m);
    Matrix sum(mm * mm);
    for (int a1 = 0; a1 < m; ++a1)
        for (int a2 = 0; a2 < m; ++a2) {
            const HalfPeriodIndex a{a1, a2};
            const cplx s = p.hbar / double(m) + half_period(a, m, p.tau);
            const cplx coeff = phi_a(a, z, s, m, p.tau, p.cfg) / double(m);
            const Matrix ta = t_alpha(a1, a2, m);
            const Matrix tna = t_alpha(-a1, -a2, m);
            for (std::size_t r1 = 0; r1 < mm; ++r1)
                for (std::size_t c1 = 0; c1 < mm; ++c1) {
                    const cplx v1 = coeff * ta(r1, c1);
                    if (v1 == cplx{0.0, 0.0}) continue;
                    for (std::size_t r2 = 0; r2 < mm; ++r2)
                        for (std::size_t c2 = 0; c2 < mm; ++c2)
                            sum(r1 * mm + r2, c1 * mm + c2) += v1 * tna(r2, c2);
                }
        }
    return {m, std::move(sum)};
}

/// Normalized variant bar R(z) = R(z) / phi(h, z).
inline TwoSiteOperator bar_r(cplx z, const RMatrixParams& p) {
    const cplx norm = kronecker_phi(p.hbar, z, p.tau, p.cfg);
    if (std::abs(norm) < p.cfg.pole_floor)
        throw pole_error("bar_r: phi(h, z) vanishes (z = -h mod lattice)");
    TwoSiteOperator r = baxter_belavin_r(z, p);
    r.mat *= 1.0 / norm;
    return r;
}

/// Swap conjugation on a two-site operator: P op P.
inline TwoSiteOperator swap_conjugate(const TwoSiteOperator& op) {
    const Matrix p = two_site_swap(op.M).mat;
    return {op.M, p * op.mat * p};
}

/// R with legs swapped and argument negated, i.e. R^h_{21}(-z). By
/// skew-symmetry this equals -R^{-h}_{12}(z); identity sums written with
/// parameter -h are realized through this operator.
inline TwoSiteOperator r_minus_hbar(cplx z, const RMatrixParams& p) {
    return swap_conjugate(baxter_belavin_r(-z, p));
}

/// Rational degeneration R(z) = Id/h + P/z.
inline TwoSiteOperator yang_r(cplx z, cplx hbar, int m) {
    if (std::abs(z) == 0.0 || std::abs(hbar) == 0.0)
        throw pole_error("yang_r: z and hbar must be nonzero");
    const std::size_t mm = static_cast<std::size_t>(m);
    TwoSiteOperator p = two_site_swap(m);
    Matrix out = Matrix::identity(mm * mm);
    out *= 1.0 / hbar;
    p.mat *= 1.0 / z;
    out += p.mat;
    return {m, std::move(out)};
}

// ---------------------------------------------------------------------------
// Residual evaluators. All residuals are Frobenius norms normalized by
// max(1, largest operand norm).

namespace detail {

inline double residual_vs_zero(const Matrix& m, double scale) {
    return m.frobenius() / std::max(1.0, scale);
}

} // namespace detail

/// R12(u) R13(u+v) R23(v) - R23(v) R13(u+v) R12(u) on three sites.
inline double check_qybe(cplx u, cplx v, const RMatrixParams& p,
                         std::function<TwoSiteOperator(cplx, const RMatrixParams&)> r =
                             baxter_belavin_r) {
    const LatticeSpec spec = p.lattice(3);
    const TwoSiteOperator r12 = r(u, p), r13 = r(u + v, p), r23 = r(v, p);
    Matrix lhs = apply_two_site(r12, 1, 2, spec,
                  apply_two_site(r13, 1, 3, spec,
                   apply_two_site(r23, 2, 3, spec, Matrix::identity(spec.dim()))));
    Matrix rhs = apply_two_site(r23, 2, 3, spec,
                  apply_two_site(r13, 1, 3, spec,
                   apply_two_site(r12, 1, 2, spec, Matrix::identity(spec.dim()))));
    return detail::residual_vs_zero(lhs - rhs, std::max(lhs.frobenius(), rhs.frobenius()));
}

/// R^u_12 R^{u'}_23 - R^{u'}_13 R^{u-u'}_12 - R^{u'-u}_23 R^u_13 with
/// R^h_ab = R^h(z_a - z_b). The parameter differences u - u' live on the
/// Planck axis, so u = u' sits on the h = 0 pole.
inline double check_aybe(cplx u, cplx uprime, cplx z1, cplx z2, cplx z3,
                         const RMatrixParams& p) {
    const SeriesConfig& cfg = p.cfg;
    if (std::abs(theta(u - uprime, p.tau, cfg)) < 1e-6)
        throw pole_error("check_aybe: u - u' on the lattice (R^{u-u'} singular)");
    const LatticeSpec spec = p.lattice(3);
    const Matrix id = Matrix::identity(spec.dim());

    const auto r = [&](cplx h, cplx z) { return baxter_belavin_r(z, detail::with_hbar(p, h)); };
    Matrix lhs = apply_two_site(r(u, z1 - z2), 1, 2, spec,
                  apply_two_site(r(uprime, z2 - z3), 2, 3, spec, id));
    Matrix rhs1 = apply_two_site(r(uprime, z1 - z3), 1, 3, spec,
                   apply_two_site(r(u - uprime, z1 - z2), 1, 2, spec, id));
    Matrix rhs2 = apply_two_site(r(uprime - u, z2 - z3), 2, 3, spec,
                   apply_two_site(r(u, z1 - z3), 1, 3, spec, id));
    const double scale = std::max({lhs.frobenius(), rhs1.frobenius(), rhs2.frobenius()});
    return detail::residual_vs_zero(lhs - rhs1 - rhs2, scale);
}

/// n-point extension on n+1 sites: the ordered product
/// prod_i R^{u_i}_{a,i}(w_i) against its single-sum expansion with the total
/// parameter U = sum u_i. The numbered sites occupy lattice positions
/// 1..n+1 skipping position a.
inline double check_higher_aybe(const std::vector<cplx>& us, const std::vector<cplx>& ws,
                                int a, const RMatrixParams& p,
                                std::size_t dimension_cap = 4096) {
    if (us.size() != ws.size() || us.empty())
        throw std::invalid_argument("check_higher_aybe: need equally sized nonempty lists");
    const int n = static_cast<int>(us.size());
    if (a < 1 || a > n + 1)
        throw std::invalid_argument("check_higher_aybe: a must lie in 1..n+1");
    const LatticeSpec spec = p.lattice(n + 1, dimension_cap);
    const Matrix id = Matrix::identity(spec.dim());
    const auto site = [&](int i) { return i < a ? i : i + 1; }; // numbered -> lattice
    const auto r = [&](cplx h, cplx z) { return baxter_belavin_r(z, detail::with_hbar(p, h)); };

    // left side, rightmost factor applied first
    Matrix lhs = id;
    for (int i = n; i >= 1; --i)
        lhs = apply_two_site(r(us[i - 1], ws[i - 1]), a, site(i), spec, lhs);

    cplx total_u{0.0, 0.0};
    for (cplx u : us) total_u += u;

    Matrix rhs(spec.dim());
    for (int m = 1; m <= n; ++m) {
        Matrix term = id;
        for (int j = m - 1; j >= 1; --j)
            term = apply_two_site(r(us[j - 1], ws[j - 1] - ws[m - 1]), site(m), site(j), spec, term);
        term = apply_two_site(r(total_u, ws[m - 1]), a, site(m), spec, term);
        for (int j = n; j >= m + 1; --j)
            term = apply_two_site(r(us[j - 1], ws[j - 1] - ws[m - 1]), site(m), site(j), spec, term);
        rhs += term;
    }
    return detail::residual_vs_zero(lhs - rhs, std::max(lhs.frobenius(), rhs.frobenius()));
}

/// Unitarity in both normalizations:
///   R^h(z) R^h_21(-z) = phi(h,z) phi(h,-z) Id   and   bar variant = Id.
/// Returns {plain residual, normalized residual}.
inline std::pair<double, double> check_unitarity(cplx z, const RMatrixParams& p) {
    const TwoSiteOperator r = baxter_belavin_r(z, p);
    const TwoSiteOperator rs = r_minus_hbar(z, p); // R^h_21(-z)
    const Matrix prod = r.mat * rs.mat;
    const cplx scalar = kronecker_phi(p.hbar, z, p.tau, p.cfg) *
                        kronecker_phi(p.hbar, -z, p.tau, p.cfg);
    Matrix expect = Matrix::identity(prod.dim());
    expect *= scalar;
    const double res_plain = rel_residual(prod, expect);

    const TwoSiteOperator br = bar_r(z, p);
    const TwoSiteOperator brs = swap_conjugate(bar_r(-z, p));
    const double res_bar = rel_residual(br.mat * brs.mat, Matrix::identity(prod.dim()));
    return {res_plain, res_bar};
}

/// Skew-symmetry: R^h_12(z) + R^{-h,direct}_21(-z) = 0, the second operator
/// built with the negated parameter and swapped legs.
inline double check_skew_symmetry(cplx z, const RMatrixParams& p) {
    const TwoSiteOperator lhs = baxter_belavin_r(z, p);
    const TwoSiteOperator direct =
        swap_conjugate(baxter_belavin_r(-z, detail::with_hbar(p, -p.hbar)));
    Matrix sum = lhs.mat + direct.mat;
    return detail::residual_vs_zero(sum, std::max(lhs.mat.frobenius(), direct.mat.frobenius()));
}

/// (Q tensor Q) R = R (Q tensor Q) and the Lambda twin. Returns the two
/// residuals.
inline std::pair<double, double> check_zm_symmetry(cplx z, const RMatrixParams& p) {
    const TwoSiteOperator r = baxter_belavin_r(z, p);
    const std::size_t mm = static_cast<std::size_t>(p.M);
    const auto kron = [&](const Matrix& a, const Matrix& b) {
        Matrix out(mm * mm);
        for (std::size_t r1 = 0; r1 < mm; ++r1)
            for (std::size_t c1 = 0; c1 < mm; ++c1)
                for (std::size_t r2 = 0; r2 < mm; ++r2)
                    for (std::size_t c2 = 0; c2 < mm; ++c2)
                        out(r1 * mm + r2, c1 * mm + c2) = a(r1, c1) * b(r2, c2);
        return out;
    };
    const Matrix qq = kron(q_matrix(p.M), q_matrix(p.M));
    const Matrix ll = kron(lambda_matrix(p.M), lambda_matrix(p.M));
    const double scale = r.mat.frobenius();
    const double res_q = detail::residual_vs_zero(qq * r.mat - r.mat * qq, scale);
    const double res_l = detail::residual_vs_zero(ll * r.mat - r.mat * ll, scale);
    return {res_q, res_l};
}

/// Lattice quasi-periodicity:
///   R(z+1)   = (Q^-1 tensor 1) R(z) (Q tensor 1)
///   R(z+tau) = exp(-2*pi*i*h/M) (L^-1 tensor 1) R(z) (L tensor 1).
/// Returns the two residuals.
inline std::pair<double, double> check_r_quasi_periodicity(cplx z, const RMatrixParams& p) {
    const std::size_t mm = static_cast<std::size_t>(p.M);
    const auto kron_left = [&](const Matrix& a) {
        Matrix out(mm * mm);
        for (std::size_t r1 = 0; r1 < mm; ++r1)
            for (std::size_t c1 = 0; c1 < mm; ++c1)
                for (std::size_t d = 0; d < mm; ++d)
                    out(r1 * mm + d, c1 * mm + d) = a(r1, c1);
        return out;
    };
    const Matrix q1 = kron_left(q_matrix(p.M));
    const Matrix l1 = kron_left(lambda_matrix(p.M));
    const Matrix q1inv = op_inverse(q1);
    const Matrix l1inv = op_inverse(l1);

    const Matrix r0 = baxter_belavin_r(z, p).mat;
    const Matrix r_one = baxter_belavin_r(z + 1.0, p).mat;
    const Matrix r_tau = baxter_belavin_r(z + p.tau.tau, p).mat;

    const double res1 = rel_residual(r_one, q1inv * r0 * q1);
    const cplx phase = std::exp(-iu * (2.0 * pi) * p.hbar / double(p.M));
    const double res_tau = rel_residual(r_tau, phase * (l1inv * r0 * l1));
    return {res1, res_tau};
}

/// Residue of z -> R(z) at z = 0 by circle quadrature; recovers the
/// transposition operator.
inline Matrix r_residue_in_z(const RMatrixParams& p, const ResidueOptions& opt = {}) {
    return numeric_residue(
        [&](cplx z) { return baxter_belavin_r(z, p).mat; }, cplx{0.0, 0.0}, opt);
}

/// Residue of h -> R^h(z) at h = 0; recovers Id tensor Id.
inline Matrix r_residue_in_hbar(cplx z, const RMatrixParams& p, const ResidueOptions& opt = {}) {
    return numeric_residue(
        [&](cplx h) { return baxter_belavin_r(z, detail::with_hbar(p, h)).mat; },
        cplx{0.0, 0.0}, opt);
}

} // namespace rmi
