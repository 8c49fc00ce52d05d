#pragma once

// Ordered products of embedded R-matrices over index subsets, and the two
// sums whose difference the main identity asserts to vanish.
//
// For disjoint site subsets I, J three product families appear, indexed by
// the pairs they run over:
//
//   rij        pairs (i in I, j in J) with i < j
//   rij_prime  pairs (i in I, j in J) with i > j
//   y          all pairs (i in I, j in J)
//
// Each family is defined with one of two specific factor orderings (blocks
// indexed by elements of the first or of the second set); the two orderings
// agree as operators because factors on disjoint site pairs commute, and
// that agreement is itself one of the verified identities, so the evaluator
// never reorders anything: plans are evaluated strictly left to right.
//
// A plan factor (i, j, sign, shift_i, shift_j) denotes the R-matrix with
// parameter sign*hbar and argument (z_i + shift_i) - (z_j + shift_j),
// embedded at sites (i, j).

#include <algorithm>
#include <vector>

#include "rmi/rmatrix.hpp"

namespace rmi {

/// The 2N evaluation points: z_i = x_i for i <= N, z_i = y_{i-N} above.
struct SiteAssignment {
    int N = 0;
    std::vector<cplx> xs, ys;

    SiteAssignment(std::vector<cplx> x, std::vector<cplx> y)
        : N(static_cast<int>(x.size())), xs(std::move(x)), ys(std::move(y)) {
        if (N == 0 || ys.size() != static_cast<std::size_t>(N))
            throw std::invalid_argument("SiteAssignment: need N matching x- and y-points");
    }

    cplx z(int site) const {
        if (site < 1 || site > 2 * N)
            throw std::invalid_argument("SiteAssignment: site out of range");
        return site <= N ? xs[site - 1] : ys[site - N - 1];
    }

    std::vector<cplx> coords() const {
        std::vector<cplx> c;
        c.reserve(2 * N);
        for (int s = 1; s <= 2 * N; ++s) c.push_back(z(s));
        return c;
    }
};

/// Strictly increasing site indices inside a declared universe [lo, hi];
/// complements are always taken within that universe.
struct IndexSubset {
    std::vector<int> elems;
    int lo = 1;
    int hi = 0;

    IndexSubset() = default;
    IndexSubset(std::vector<int> e, int lo_, int hi_) : elems(std::move(e)), lo(lo_), hi(hi_) {
        for (std::size_t k = 0; k < elems.size(); ++k) {
            if (elems[k] < lo || elems[k] > hi)
                throw std::invalid_argument("IndexSubset: element outside universe");
            if (k > 0 && elems[k] <= elems[k - 1])
                throw std::invalid_argument("IndexSubset: elements must strictly increase");
        }
    }

    int size() const { return static_cast<int>(elems.size()); }

    bool contains(int v) const {
        return std::binary_search(elems.begin(), elems.end(), v);
    }

    IndexSubset complement() const {
        std::vector<int> c;
        for (int v = lo; v <= hi; ++v)
            if (!contains(v)) c.push_back(v);
        return {std::move(c), lo, hi};
    }

    bool disjoint_from(const IndexSubset& o) const {
        for (int v : elems)
            if (o.contains(v)) return false;
        return true;
    }
};

/// All k-element subsets of `universe` in lexicographic order (one empty
/// subset for k = 0).
inline std::vector<std::vector<int>> k_subsets(const std::vector<int>& universe, int k) {
    const int n = static_cast<int>(universe.size());
    if (k < 0 || k > n) throw std::invalid_argument("k_subsets: k out of range");
    std::vector<std::vector<int>> out;
    std::vector<int> pick(k);
    auto rec = [&](auto&& self, int start, int depth) -> void {
        if (depth == k) {
            out.push_back(pick);
            return;
        }
        for (int p = start; p < n; ++p) {
            pick[depth] = universe[p];
            self(self, p + 1, depth + 1);
        }
    };
    rec(rec, 0, 0);
    return out;
}

struct PlanFactor {
    int i = 0;
    int j = 0;
    int hbar_sign = +1;
    cplx shift_i{0.0, 0.0};
    cplx shift_j{0.0, 0.0};

    bool operator==(const PlanFactor&) const = default;
};

struct ProductPlan {
    std::vector<PlanFactor> factors;

    ProductPlan& append(const ProductPlan& o) {
        factors.insert(factors.end(), o.factors.begin(), o.factors.end());
        return *this;
    }

    std::vector<std::pair<int, int>> site_pairs() const {
        std::vector<std::pair<int, int>> out;
        out.reserve(factors.size());
        for (const PlanFactor& f : factors) out.emplace_back(f.i, f.j);
        return out;
    }
};

/// Which set's elements index the blocks of the ordered product.
enum class BlockOrder { first_set, second_set };

/// Product over pairs i in I, j in J with i < j.
/// second_set ordering: blocks over j ascending, i descending inside.
/// first_set ordering: blocks over i descending, j ascending inside.
inline ProductPlan plan_rij(const std::vector<int>& I, const std::vector<int>& J,
                            BlockOrder order = BlockOrder::second_set) {
    ProductPlan plan;
    if (order == BlockOrder::second_set) {
        for (int j : J)
            for (auto it = I.rbegin(); it != I.rend(); ++it)
                if (*it < j) plan.factors.push_back({*it, j});
    } else {
        for (auto it = I.rbegin(); it != I.rend(); ++it)
            for (int j : J)
                if (j > *it) plan.factors.push_back({*it, j});
    }
    return plan;
}

/// Product over pairs i in I, j in J with i > j.
/// first_set ordering: blocks over i descending, j ascending inside.
/// second_set ordering: blocks over j ascending, i descending inside.
inline ProductPlan plan_rij_prime(const std::vector<int>& I, const std::vector<int>& J,
                                  BlockOrder order = BlockOrder::first_set) {
    ProductPlan plan;
    if (order == BlockOrder::first_set) {
        for (auto it = I.rbegin(); it != I.rend(); ++it)
            for (int j : J)
                if (j < *it) plan.factors.push_back({*it, j});
    } else {
        for (int j : J)
            for (auto it = I.rbegin(); it != I.rend(); ++it)
                if (*it > j) plan.factors.push_back({*it, j});
    }
    return plan;
}

/// Product over all pairs (i in I, j in J).
/// first_set ordering: blocks over i ascending, j ascending inside.
/// second_set ordering: blocks over j ascending, i ascending inside.
inline ProductPlan plan_y(const std::vector<int>& I, const std::vector<int>& J,
                          BlockOrder order = BlockOrder::first_set) {
    ProductPlan plan;
    if (order == BlockOrder::first_set) {
        for (int i : I)
            for (int j : J) plan.factors.push_back({i, j});
    } else {
        for (int j : J)
            for (int i : I) plan.factors.push_back({i, j});
    }
    return plan;
}

inline ProductPlan swap_legs(ProductPlan plan) {
    for (PlanFactor& f : plan.factors) {
        std::swap(f.i, f.j);
        std::swap(f.shift_i, f.shift_j);
    }
    return plan;
}

inline ProductPlan with_sign(ProductPlan plan, int sign) {
    for (PlanFactor& f : plan.factors) f.hbar_sign = sign;
    return plan;
}

inline ProductPlan with_first_leg_shift(ProductPlan plan, cplx shift) {
    for (PlanFactor& f : plan.factors) f.shift_i += shift;
    return plan;
}

/// Left-to-right evaluation of a plan on the given lattice. With bar = true
/// every factor is divided by its own normalization phi(sign*h, argument).
inline Matrix eval_plan(const ProductPlan& plan, const std::vector<cplx>& coords,
                        const RMatrixParams& params, const LatticeSpec& spec,
                        bool bar = false) {
    Matrix acc = Matrix::identity(spec.dim());
    for (auto it = plan.factors.rbegin(); it != plan.factors.rend(); ++it) {
        const PlanFactor& f = *it;
        const cplx arg = (coords.at(f.i - 1) + f.shift_i) - (coords.at(f.j - 1) + f.shift_j);
        RMatrixParams p = params;
        p.hbar = double(f.hbar_sign) * params.hbar;
        TwoSiteOperator op = baxter_belavin_r(arg, p);
        if (bar) {
            const cplx norm = kronecker_phi(p.hbar, arg, p.tau, p.cfg);
            if (std::abs(norm) < p.cfg.pole_floor)
                throw pole_error("eval_plan: bar normalization vanishes");
            op.mat *= 1.0 / norm;
        }
        acc = apply_two_site(op, f.i, f.j, spec, acc);
    }
    return acc;
}

// ---------------------------------------------------------------------------
// The two sums of the main identity. Sites are passed as explicit ordered
// lists so that the same builders drive the reduced sums on a punctured
// lattice in the residue analysis.

struct SumTerm {
    std::vector<int> subset; // the I (resp. J) indexing this term
    ProductPlan plan;
};

/// First sum: for each I in the x-range, rij(I, I^c) y(Y-range, I)
/// rij_prime(I, I^c), in the block orderings whose concatenation is the
/// fully expanded reference form.
inline std::vector<SumTerm> f1_terms(int k, const std::vector<int>& x_sites,
                                     const std::vector<int>& y_sites) {
    std::vector<SumTerm> out;
    for (const std::vector<int>& I : k_subsets(x_sites, k)) {
        std::vector<int> ic;
        for (int v : x_sites)
            if (!std::binary_search(I.begin(), I.end(), v)) ic.push_back(v);
        ProductPlan plan = plan_rij(I, ic, BlockOrder::first_set);
        plan.append(plan_y(y_sites, I, BlockOrder::second_set));
        plan.append(plan_rij_prime(I, ic, BlockOrder::first_set));
        out.push_back({I, std::move(plan)});
    }
    return out;
}

enum class F2Form { direct_minus_hbar, rewritten_plus_hbar };

/// Second sum. The direct form keeps the J-indexed products with parameter
/// -h and carries the overall (-1)^k; the rewritten form trades each -h
/// factor for a +h factor with swapped legs, the per-factor signs exactly
/// cancelling the prefactor. Both evaluate to the same operator, which is a
/// product-level witness of skew-symmetry.
inline std::vector<SumTerm> f2_terms(int k, const std::vector<int>& x_sites,
                                     const std::vector<int>& y_sites, F2Form form) {
    std::vector<SumTerm> out;
    for (const std::vector<int>& J : k_subsets(y_sites, k)) {
        std::vector<int> jc;
        for (int v : y_sites)
            if (!std::binary_search(J.begin(), J.end(), v)) jc.push_back(v);
        ProductPlan plan;
        if (form == F2Form::direct_minus_hbar) {
            plan = plan_rij(J, jc, BlockOrder::first_set);
            plan.append(plan_y(x_sites, J, BlockOrder::second_set));
            plan.append(plan_rij_prime(J, jc, BlockOrder::first_set));
            plan = with_sign(std::move(plan), -1);
        } else {
            plan = swap_legs(plan_rij(J, jc, BlockOrder::first_set));
            plan.append(swap_legs(plan_y(x_sites, J, BlockOrder::second_set)));
            plan.append(swap_legs(plan_rij_prime(J, jc, BlockOrder::first_set)));
        }
        out.push_back({J, std::move(plan)});
    }
    return out;
}

/// Evaluate a term list as a plain sum; max_term_norm reports the largest
/// summand Frobenius norm (the residual yardstick).
inline Matrix eval_sum(const std::vector<SumTerm>& terms, const std::vector<cplx>& coords,
                       const RMatrixParams& params, const LatticeSpec& spec,
                       cplx prefactor, double* max_term_norm = nullptr) {
    Matrix acc(spec.dim());
    double peak = 0.0;
    for (const SumTerm& t : terms) {
        Matrix v = eval_plan(t.plan, coords, params, spec);
        peak = std::max(peak, v.frobenius());
        v *= prefactor;
        acc += v;
    }
    if (max_term_norm) *max_term_norm = peak;
    return acc;
}

inline Matrix eval_f1(int k, const std::vector<int>& x_sites, const std::vector<int>& y_sites,
                      const std::vector<cplx>& coords, const RMatrixParams& params,
                      const LatticeSpec& spec, double* max_term_norm = nullptr) {
    return eval_sum(f1_terms(k, x_sites, y_sites), coords, params, spec, cplx{1.0, 0.0},
                    max_term_norm);
}

inline Matrix eval_f2(int k, const std::vector<int>& x_sites, const std::vector<int>& y_sites,
                      const std::vector<cplx>& coords, const RMatrixParams& params,
                      const LatticeSpec& spec, F2Form form, double* max_term_norm = nullptr) {
    const cplx prefactor = (form == F2Form::direct_minus_hbar && (k % 2) == 1)
                               ? cplx{-1.0, 0.0}
                               : cplx{1.0, 0.0};
    return eval_sum(f2_terms(k, x_sites, y_sites, form), coords, params, spec, prefactor,
                    max_term_norm);
}

// ---------------------------------------------------------------------------
// Boundary operators of the residue factorization at z_a = z_b, a in the
// x-range, b in the y-range (plans on the full 2N-site lattice; the h-side
// trailing transposition is applied by the evaluator below).

inline ProductPlan plan_g(int a, int b, int n) {
    ProductPlan plan;
    for (int l = a + 1; l <= n; ++l) plan.factors.push_back({a, l});
    for (int l = b + 1; l <= 2 * n; ++l) plan.factors.push_back({l, b});
    return plan;
}

inline ProductPlan plan_h_r_part(int a, int b, int n) {
    ProductPlan plan;
    for (int m = n + 1; m <= b - 1; ++m) plan.factors.push_back({m, a});
    for (int m = 1; m <= a - 1; ++m) plan.factors.push_back({b, m});
    return plan;
}

inline Matrix eval_g(int a, int b, int n, const std::vector<cplx>& coords,
                     const RMatrixParams& params, const LatticeSpec& spec) {
    return eval_plan(plan_g(a, b, n), coords, params, spec);
}

inline Matrix eval_h(int a, int b, int n, const std::vector<cplx>& coords,
                     const RMatrixParams& params, const LatticeSpec& spec) {
    return eval_plan(plan_h_r_part(a, b, n), coords, params, spec) *
           permutation_p(a, b, spec);
}

} // namespace rmi
