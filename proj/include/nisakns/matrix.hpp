#pragma once

// Dense complex N x N algebra for small N: the carrier for potentials,
// hierarchy coefficients, dressing fields and integral constants.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nisakns/error.hpp"

namespace nisakns {

using cplx = std::complex<double>;

class SquareMatrix {
public:
    /// Zero matrix of dimension n (n >= 2).
    explicit SquareMatrix(std::size_t n) : n_(n), a_(n * n, cplx{}) {
        if (n < 2) {
            throw Error(ErrorKind::shape, "matrix dimension must be at least 2, got " + std::to_string(n));
        }
    }

    /// Row-major entries.
    SquareMatrix(std::size_t n, std::initializer_list<cplx> entries) : SquareMatrix(n) {
        if (entries.size() != n * n) {
            throw Error(ErrorKind::shape, "expected " + std::to_string(n * n) + " entries, got " +
                                              std::to_string(entries.size()));
        }
        std::copy(entries.begin(), entries.end(), a_.begin());
    }

    static SquareMatrix identity(std::size_t n) {
        SquareMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static SquareMatrix diagonal(std::span<const cplx> d) {
        SquareMatrix m(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    std::size_t dim() const noexcept { return n_; }

    cplx& operator()(std::size_t i, std::size_t j) noexcept { return a_[i * n_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const noexcept { return a_[i * n_ + j]; }

    std::span<const cplx> entries() const noexcept { return a_; }

    cplx trace() const noexcept {
        cplx s{};
        for (std::size_t i = 0; i < n_; ++i) s += (*this)(i, i);
        return s;
    }

    /// Max-entry norm.
    double max_abs() const noexcept {
        double m = 0.0;
        for (const auto& v : a_) m = std::max(m, std::abs(v));
        return m;
    }

    std::vector<cplx> diag() const {
        std::vector<cplx> d(n_);
        for (std::size_t i = 0; i < n_; ++i) d[i] = (*this)(i, i);
        return d;
    }

    bool is_diagonal(double tol) const noexcept {
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                if (i != j && std::abs((*this)(i, j)) > tol) return false;
        return true;
    }

    SquareMatrix& operator+=(const SquareMatrix& o) {
        require_same(o);
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }
    SquareMatrix& operator-=(const SquareMatrix& o) {
        require_same(o);
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
        return *this;
    }
    SquareMatrix& operator*=(cplx s) noexcept {
        for (auto& v : a_) v *= s;
        return *this;
    }
    /// Adds s * I.
    SquareMatrix& add_scalar(cplx s) noexcept {
        for (std::size_t i = 0; i < n_; ++i) (*this)(i, i) += s;
        return *this;
    }

    void require_same(const SquareMatrix& o) const {
        if (o.n_ != n_) {
            throw Error(ErrorKind::shape, "dimension mismatch: " + std::to_string(n_) + " vs " +
                                              std::to_string(o.n_));
        }
    }

    friend SquareMatrix operator+(SquareMatrix a, const SquareMatrix& b) { return a += b; }
    friend SquareMatrix operator-(SquareMatrix a, const SquareMatrix& b) { return a -= b; }
    friend SquareMatrix operator-(SquareMatrix a) { return a *= -1.0; }
    friend SquareMatrix operator*(SquareMatrix a, cplx s) { return a *= s; }
    friend SquareMatrix operator*(cplx s, SquareMatrix a) { return a *= s; }
    friend SquareMatrix operator*(SquareMatrix a, double s) { return a *= s; }
    friend SquareMatrix operator*(double s, SquareMatrix a) { return a *= s; }

    friend SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b) {
        a.require_same(b);
        const std::size_t n = a.n_;
        SquareMatrix c(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) {
                const cplx aik = a(i, k);
                if (aik == cplx{}) continue;
                for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

private:
    std::size_t n_;
    std::vector<cplx> a_;
};

inline std::vector<cplx> apply(const SquareMatrix& a, std::span<const cplx> v) {
    if (v.size() != a.dim()) throw Error(ErrorKind::shape, "vector length does not match matrix dimension");
    std::vector<cplx> out(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j) out[i] += a(i, j) * v[j];
    return out;
}

inline double max_abs_diff(const SquareMatrix& a, const SquareMatrix& b) { return (a - b).max_abs(); }

/// The fixed diagonal generator J of sl(N): distinct entries summing to zero.
class DiagonalGenerator {
public:
    explicit DiagonalGenerator(std::vector<cplx> diag, double tol = Tolerances{}.algebraic)
        : diag_(std::move(diag)) {
        if (diag_.size() < 2) throw Error(ErrorKind::shape, "generator needs at least 2 entries");
        const cplx sum = std::accumulate(diag_.begin(), diag_.end(), cplx{});
        if (std::abs(sum) > tol) {
            throw Error(ErrorKind::domain, "generator entries must sum to zero (J in sl(N)), sum = " +
                                               std::to_string(std::abs(sum)),
                        std::abs(sum));
        }
        for (std::size_t i = 0; i < diag_.size(); ++i)
            for (std::size_t k = i + 1; k < diag_.size(); ++k)
                if (std::abs(diag_[i] - diag_[k]) <= tol) {
                    throw Error(ErrorKind::singular_generator,
                                "generator entries must be pairwise distinct (J_" + std::to_string(i + 1) +
                                    " == J_" + std::to_string(k + 1) + ")");
                }
    }

    std::size_t dim() const noexcept { return diag_.size(); }
    cplx operator[](std::size_t i) const noexcept { return diag_[i]; }
    std::span<const cplx> entries() const noexcept { return diag_; }
    SquareMatrix matrix() const { return SquareMatrix::diagonal(diag_); }

    /// Indices ordering the entries by decreasing real part.
    std::vector<std::size_t> descending_order() const {
        std::vector<std::size_t> idx(diag_.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return diag_[a].real() > diag_[b].real(); });
        return idx;
    }

private:
    std::vector<cplx> diag_;
};

inline SquareMatrix commutator(const SquareMatrix& a, const SquareMatrix& b) { return a * b - b * a; }

/// [J, a] computed entrywise: (J_i - J_k) a_ik.
inline SquareMatrix commutator(const DiagonalGenerator& j, const SquareMatrix& a) {
    if (a.dim() != j.dim()) throw Error(ErrorKind::shape, "generator and matrix dimensions differ");
    SquareMatrix c(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t k = 0; k < a.dim(); ++k)
            if (i != k) c(i, k) = (j[i] - j[k]) * a(i, k);
    return c;
}

/// pi_0: projection onto the centralizer of J (the diagonal part).
inline SquareMatrix project_diag(const SquareMatrix& a, const DiagonalGenerator& j) {
    if (a.dim() != j.dim()) throw Error(ErrorKind::shape, "generator and matrix dimensions differ");
    SquareMatrix d(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) d(i, i) = a(i, i);
    return d;
}

/// pi_1: projection onto the orthogonal complement (the off-diagonal part).
inline SquareMatrix project_off(const SquareMatrix& a, const DiagonalGenerator& j) {
    if (a.dim() != j.dim()) throw Error(ErrorKind::shape, "generator and matrix dimensions differ");
    SquareMatrix o = a;
    for (std::size_t i = 0; i < a.dim(); ++i) o(i, i) = 0.0;
    return o;
}

/// Inverse of ad_J restricted to off-diagonal matrices: X with [J, X] = y.
inline SquareMatrix adj_inverse(const SquareMatrix& y, const DiagonalGenerator& j,
                                double tol = Tolerances{}.algebraic) {
    if (y.dim() != j.dim()) throw Error(ErrorKind::shape, "generator and matrix dimensions differ");
    const double scale = std::max(1.0, y.max_abs());
    for (std::size_t i = 0; i < y.dim(); ++i) {
        if (std::abs(y(i, i)) > tol * scale) {
            throw Error(ErrorKind::domain, "ad_J is only invertible on off-diagonal matrices; diagonal entry " +
                                               std::to_string(i + 1) + " is nonzero",
                        std::abs(y(i, i)));
        }
    }
    SquareMatrix x(y.dim());
    for (std::size_t i = 0; i < y.dim(); ++i)
        for (std::size_t k = 0; k < y.dim(); ++k) {
            if (i == k) continue;
            const cplx gap = j[i] - j[k];
            if (gap == cplx{}) throw Error(ErrorKind::singular_generator, "coincident generator entries");
            x(i, k) = y(i, k) / gap;
        }
    return x;
}

namespace detail {

// LU with partial pivoting in place; returns the determinant.
inline cplx lu_decompose(std::vector<cplx>& a, std::size_t n, std::vector<std::size_t>& piv) {
    piv.resize(n);
    std::iota(piv.begin(), piv.end(), 0);
    cplx det = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        double best = std::abs(a[c * n + c]);
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r * n + c]) > best) {
                best = std::abs(a[r * n + c]);
                p = r;
            }
        if (p != c) {
            for (std::size_t k = 0; k < n; ++k) std::swap(a[c * n + k], a[p * n + k]);
            std::swap(piv[c], piv[p]);
            det = -det;
        }
        const cplx pivot = a[c * n + c];
        det *= pivot;
        if (pivot == cplx{}) return 0.0;
        for (std::size_t r = c + 1; r < n; ++r) {
            const cplx m = a[r * n + c] / pivot;
            a[r * n + c] = m;
            for (std::size_t k = c + 1; k < n; ++k) a[r * n + k] -= m * a[c * n + k];
        }
    }
    return det;
}

inline cplx cofactor_det(const SquareMatrix& a, std::vector<std::size_t>& rows, std::size_t col) {
    const std::size_t m = rows.size();
    if (m == 1) return a(rows[0], col);
    if (m == 2) return a(rows[0], col) * a(rows[1], col + 1) - a(rows[1], col) * a(rows[0], col + 1);
    cplx sum{};
    double sign = 1.0;
    for (std::size_t r = 0; r < m; ++r) {
        std::vector<std::size_t> minor;
        minor.reserve(m - 1);
        for (std::size_t q = 0; q < m; ++q)
            if (q != r) minor.push_back(rows[q]);
        sum += sign * a(rows[r], col) * cofactor_det(a, minor, col + 1);
        sign = -sign;
    }
    return sum;
}

}  // namespace detail

/// Cofactor expansion for n <= 4, LU with partial pivoting beyond.
inline cplx det(const SquareMatrix& a) {
    const std::size_t n = a.dim();
    if (n <= 4) {
        std::vector<std::size_t> rows(n);
        std::iota(rows.begin(), rows.end(), 0);
        return detail::cofactor_det(a, rows, 0);
    }
    std::vector<cplx> lu(a.entries().begin(), a.entries().end());
    std::vector<std::size_t> piv;
    return detail::lu_decompose(lu, n, piv);
}

/// Throws a conditioning error (carrying |det|) when |det a| falls below
/// `tol.singular * max_entry^n`.
inline SquareMatrix invert(const SquareMatrix& a, const Tolerances& tol = {}) {
    const std::size_t n = a.dim();
    const double scale = a.max_abs();
    const double d = std::abs(det(a));
    if (scale == 0.0 || d <= tol.singular * std::pow(scale, static_cast<double>(n))) {
        throw Error(ErrorKind::conditioning, "matrix is numerically singular, |det| = " + std::to_string(d), d);
    }
    if (n == 2) {
        const cplx dd = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
        return SquareMatrix(2, {a(1, 1) / dd, -a(0, 1) / dd, -a(1, 0) / dd, a(0, 0) / dd});
    }
    std::vector<cplx> lu(a.entries().begin(), a.entries().end());
    std::vector<std::size_t> piv;
    detail::lu_decompose(lu, n, piv);
    SquareMatrix inv(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::vector<cplx> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            cplx s = piv[i] == col ? cplx{1.0} : cplx{};
            for (std::size_t k = 0; k < i; ++k) s -= lu[i * n + k] * y[k];
            y[i] = s;
        }
        for (std::size_t i = n; i-- > 0;) {
            cplx s = y[i];
            for (std::size_t k = i + 1; k < n; ++k) s -= lu[i * n + k] * inv(k, col);
            inv(i, col) = s / lu[i * n + i];
        }
    }
    return inv;
}

inline SquareMatrix power(const SquareMatrix& a, std::size_t k) {
    SquareMatrix r = SquareMatrix::identity(a.dim());
    for (std::size_t i = 0; i < k; ++i) r = r * a;
    return r;
}

/// Coefficients c_0..c_n of det(lambda I - a) via Faddeev-LeVerrier.
inline std::vector<cplx> characteristic_polynomial(const SquareMatrix& a) {
    const std::size_t n = a.dim();
    std::vector<cplx> c(n + 1);
    c[n] = 1.0;
    SquareMatrix m(n);
    for (std::size_t k = 1; k <= n; ++k) {
        m = a * m;
        m.add_scalar(c[n - k + 1]);
        c[n - k] = -(a * m).trace() / static_cast<double>(k);
    }
    return c;
}

}  // namespace nisakns
