#pragma once

// Dense complex matrix algebra and the embedding of two-site operators into
// the L-site tensor space (C^M)^{tensor L}. Everything is value-semantic and
// dense; this is the oracle backend, sized for desk-scale lattices
// (dimension capped at 4096 by default).
//
// Basis convention: site 1 is the most significant digit of the mixed-radix
// state index, i.e. |d1 d2 ... dL> has index sum_i d_i * M^(L-i).

#include <cstddef>
#include <vector>

#include "rmi/common.hpp"

namespace rmi {

struct LatticeSpec {
    int M = 1;
    int L = 1;
    std::size_t dimension_cap = 4096;

    LatticeSpec(int m, int l, std::size_t cap = 4096) : M(m), L(l), dimension_cap(cap) {
        if (m < 1 || l < 1)
            throw std::invalid_argument("LatticeSpec: M and L must be positive");
        std::size_t d = 1;
        for (int s = 0; s < l; ++s) {
            d *= static_cast<std::size_t>(m);
            if (d > cap)
                throw std::invalid_argument("LatticeSpec: M^L exceeds the dimension cap");
        }
    }

    std::size_t dim() const {
        std::size_t d = 1;
        for (int s = 0; s < L; ++s) d *= static_cast<std::size_t>(M);
        return d;
    }

    // M^(L-i): stride of the digit at 1-based site i.
    std::size_t site_stride(int i) const {
        std::size_t d = 1;
        for (int s = 0; s < L - i; ++s) d *= static_cast<std::size_t>(M);
        return d;
    }
};

/// Row-major dense complex matrix.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t n) : n_(n), a_(n * n, cplx{0.0, 0.0}) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t dim() const { return n_; }
    cplx& operator()(std::size_t r, std::size_t c) { return a_[r * n_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return a_[r * n_ + c]; }
    cplx* row(std::size_t r) { return a_.data() + r * n_; }
    const cplx* row(std::size_t r) const { return a_.data() + r * n_; }

    double frobenius() const {
        double s = 0.0;
        for (const cplx& v : a_) s += std::norm(v);
        return std::sqrt(s);
    }

    Matrix& operator+=(const Matrix& o) {
        require_same_dim(o);
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        require_same_dim(o);
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
        return *this;
    }
    Matrix& operator*=(cplx c) {
        for (cplx& v : a_) v *= c;
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(cplx c, Matrix a) { return a *= c; }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        a.require_same_dim(b);
        const std::size_t n = a.n_;
        Matrix out(n);
        for (std::size_t i = 0; i < n; ++i) {
            const cplx* arow = a.row(i);
            cplx* orow = out.row(i);
            for (std::size_t k = 0; k < n; ++k) {
                const cplx aik = arow[k];
                if (aik == cplx{0.0, 0.0}) continue;
                const cplx* brow = b.row(k);
                for (std::size_t j = 0; j < n; ++j) orow[j] += aik * brow[j];
            }
        }
        return out;
    }

private:
    void require_same_dim(const Matrix& o) const {
        if (n_ != o.n_) throw algebra_error("Matrix: dimension mismatch");
    }

    std::size_t n_ = 0;
    std::vector<cplx> a_;
};

inline Matrix op_mul(const Matrix& a, const Matrix& b) { return a * b; }
inline Matrix op_add(const Matrix& a, const Matrix& b) { return a + b; }
inline Matrix op_scale(cplx c, const Matrix& a) { return c * a; }

/// ||a-b||_F / max(1, ||a||_F, ||b||_F).
inline double rel_residual(const Matrix& a, const Matrix& b) {
    if (a.dim() != b.dim()) throw algebra_error("rel_residual: dimension mismatch");
    const double num = (a - b).frobenius();
    return num / std::max({1.0, a.frobenius(), b.frobenius()});
}

/// Inverse by LU with partial pivoting. The pivot-growth based condition
/// estimate rejects matrices with estimated condition above cond_cap;
/// bracketed inverses in product identities are computed, never cancelled
/// symbolically.
inline Matrix op_inverse(const Matrix& a, double cond_cap = 1e8) {
    const std::size_t n = a.dim();
    Matrix lu = a;
    Matrix inv = Matrix::identity(n);
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;

    double max_pivot = 0.0, min_pivot = 0.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        double best = std::abs(lu(col, col));
        for (std::size_t r = col + 1; r < n; ++r) {
            const double m = std::abs(lu(r, col));
            if (m > best) { best = m; piv = r; }
        }
        if (best == 0.0) throw algebra_error("op_inverse: singular matrix");
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) {
                std::swap(lu(piv, c), lu(col, c));
                std::swap(inv(piv, c), inv(col, c));
            }
        }
        max_pivot = std::max(max_pivot, best);
        min_pivot = (col == 0) ? best : std::min(min_pivot, best);
        const cplx d = lu(col, col);
        for (std::size_t r = col + 1; r < n; ++r) {
            const cplx f = lu(r, col) / d;
            if (f == cplx{0.0, 0.0}) continue;
            lu(r, col) = 0.0;
            for (std::size_t c = col + 1; c < n; ++c) lu(r, c) -= f * lu(col, c);
            for (std::size_t c = 0; c < n; ++c) inv(r, c) -= f * inv(col, c);
        }
    }
    if (min_pivot <= 0.0 || max_pivot / min_pivot > cond_cap)
        throw algebra_error("op_inverse: matrix too ill-conditioned");
    // back substitution
    for (std::size_t col = n; col-- > 0;) {
        const cplx d = lu(col, col);
        for (std::size_t c = 0; c < n; ++c) inv(col, c) /= d;
        for (std::size_t r = 0; r < col; ++r) {
            const cplx f = lu(r, col);
            if (f == cplx{0.0, 0.0}) continue;
            for (std::size_t c = 0; c < n; ++c) inv(r, c) -= f * inv(col, c);
        }
    }
    return inv;
}

/// Operator on C^M tensor C^M, stored as an M^2 x M^2 matrix in the basis
/// e_a tensor e_b with index a*M + b.
struct TwoSiteOperator {
    int M = 1;
    Matrix mat;

    TwoSiteOperator() = default;
    TwoSiteOperator(int m, Matrix v) : M(m), mat(std::move(v)) {
        if (mat.dim() != static_cast<std::size_t>(M) * static_cast<std::size_t>(M))
            throw algebra_error("TwoSiteOperator: matrix must be M^2 x M^2");
    }
};

/// The transposition P(v tensor w) = w tensor v on C^M tensor C^M.
inline TwoSiteOperator two_site_swap(int m) {
    const std::size_t mm = static_cast<std::size_t>(m);
    Matrix p(mm * mm);
    for (std::size_t a = 0; a < mm; ++a)
        for (std::size_t b = 0; b < mm; ++b)
            p(b * mm + a, a * mm + b) = 1.0;
    return {m, std::move(p)};
}

inline void check_sites(int i, int j, const LatticeSpec& spec) {
    if (i < 1 || i > spec.L || j < 1 || j > spec.L)
        throw std::invalid_argument("site index out of range");
    if (i == j)
        throw std::invalid_argument("two-site operator needs distinct sites");
}

/// Dense embedding: op acting on sites (i, j) (first factor on i, second on
/// j, no implicit swap for i > j), identity elsewhere.
inline Matrix embed(const TwoSiteOperator& op, int i, int j, const LatticeSpec& spec) {
    check_sites(i, j, spec);
    if (op.M != spec.M) throw algebra_error("embed: local dimension mismatch");
    const std::size_t dim = spec.dim();
    const std::size_t m = static_cast<std::size_t>(spec.M);
    const std::size_t si = spec.site_stride(i);
    const std::size_t sj = spec.site_stride(j);

    Matrix out(dim);
    for (std::size_t col = 0; col < dim; ++col) {
        const std::size_t di = (col / si) % m;
        const std::size_t dj = (col / sj) % m;
        const std::size_t base = col - di * si - dj * sj;
        const std::size_t opcol = di * m + dj;
        for (std::size_t ai = 0; ai < m; ++ai)
            for (std::size_t aj = 0; aj < m; ++aj) {
                const cplx v = op.mat(ai * m + aj, opcol);
                if (v == cplx{0.0, 0.0}) continue;
                out(base + ai * si + aj * sj, col) = v;
            }
    }
    return out;
}

/// embed(op,i,j) * A without forming the embedded matrix: O(dim^2 M^2).
/// The dense embed above stays the oracle of record; the two paths are held
/// equal by tests.
inline Matrix apply_two_site(const TwoSiteOperator& op, int i, int j,
                             const LatticeSpec& spec, const Matrix& a) {
    check_sites(i, j, spec);
    if (op.M != spec.M) throw algebra_error("apply_two_site: local dimension mismatch");
    const std::size_t dim = spec.dim();
    if (a.dim() != dim) throw algebra_error("apply_two_site: dimension mismatch");
    const std::size_t m = static_cast<std::size_t>(spec.M);
    const std::size_t si = spec.site_stride(i);
    const std::size_t sj = spec.site_stride(j);

    Matrix out(dim);
    for (std::size_t s = 0; s < dim; ++s) {
        const std::size_t di = (s / si) % m;
        const std::size_t dj = (s / sj) % m;
        const std::size_t base = s - di * si - dj * sj;
        const std::size_t opcol = di * m + dj;
        const cplx* arow = a.row(s);
        for (std::size_t ai = 0; ai < m; ++ai)
            for (std::size_t aj = 0; aj < m; ++aj) {
                const cplx v = op.mat(ai * m + aj, opcol);
                if (v == cplx{0.0, 0.0}) continue;
                cplx* orow = out.row(base + ai * si + aj * sj);
                for (std::size_t c = 0; c < dim; ++c) orow[c] += v * arow[c];
            }
    }
    return out;
}

/// Transposition of the factors at sites (i, j), embedded densely.
inline Matrix permutation_p(int i, int j, const LatticeSpec& spec) {
    return embed(two_site_swap(spec.M), i, j, spec);
}

/// An M x M operator acting on a single site, identity elsewhere.
inline Matrix embed_one_site(const Matrix& op, int i, const LatticeSpec& spec) {
    if (i < 1 || i > spec.L) throw std::invalid_argument("site index out of range");
    if (op.dim() != static_cast<std::size_t>(spec.M))
        throw algebra_error("embed_one_site: local dimension mismatch");
    const std::size_t dim = spec.dim();
    const std::size_t m = static_cast<std::size_t>(spec.M);
    const std::size_t si = spec.site_stride(i);
    Matrix out(dim);
    for (std::size_t col = 0; col < dim; ++col) {
        const std::size_t di = (col / si) % m;
        const std::size_t base = col - di * si;
        for (std::size_t ai = 0; ai < m; ++ai) {
            const cplx v = op(ai, di);
            if (v == cplx{0.0, 0.0}) continue;
            out(base + ai * si, col) = v;
        }
    }
    return out;
}

} // namespace rmi
