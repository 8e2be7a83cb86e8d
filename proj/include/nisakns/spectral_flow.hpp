#pragma once

// Spectral parameter dynamics lambda_t = f(lambda), the averaged quotient
// polynomial g(lambda), and the permutation-extremes functional used by the
// asymptotic analysis of dressing frames.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nisakns/error.hpp"
#include "nisakns/matrix.hpp"

namespace nisakns {

/// Dense polynomial, coefficients stored lowest power first. Leading zeros
/// are allowed and kept.
class Polynomial {
public:
    Polynomial() : c_{cplx{}} {}
    explicit Polynomial(std::vector<cplx> coeffs) : c_(std::move(coeffs)) {
        if (c_.empty()) c_.push_back(cplx{});
    }

    static Polynomial monomial(std::size_t k, cplx scale = 1.0) {
        std::vector<cplx> c(k + 1);
        c[k] = scale;
        return Polynomial(std::move(c));
    }

    std::span<const cplx> coeffs() const noexcept { return c_; }
    std::size_t size() const noexcept { return c_.size(); }

    /// Coefficient of lambda^i; zero past the stored length.
    cplx operator[](std::size_t i) const noexcept { return i < c_.size() ? c_[i] : cplx{}; }

    /// Degree ignoring leading zeros; -1 for the zero polynomial.
    int degree() const noexcept {
        for (std::size_t i = c_.size(); i-- > 0;)
            if (c_[i] != cplx{}) return static_cast<int>(i);
        return -1;
    }

    bool is_zero() const noexcept { return degree() < 0; }

    cplx operator()(cplx z) const noexcept {
        cplx acc{};
        for (std::size_t i = c_.size(); i-- > 0;) acc = acc * z + c_[i];
        return acc;
    }

    /// Same polynomial with at least `len` stored coefficients.
    Polynomial padded(std::size_t len) const {
        std::vector<cplx> c = c_;
        if (c.size() < len) c.resize(len);
        return Polynomial(std::move(c));
    }

    friend bool operator==(const Polynomial&, const Polynomial&) = default;

private:
    std::vector<cplx> c_;
};

/// The flow polynomial f in lambda_t = f(lambda).
using SpectralPolynomial = Polynomial;

/// deg f <= n + 2 for a hierarchy of order n.
inline void require_degree_bound(const SpectralPolynomial& f, std::size_t order) {
    if (f.degree() > static_cast<int>(order) + 2) {
        throw Error(ErrorKind::domain, "flow polynomial degree " + std::to_string(f.degree()) +
                                           " exceeds hierarchy order + 2 = " + std::to_string(order + 2));
    }
}

enum class EvolutionMethod { closed_form, rk4 };

struct SpectralPath {
    cplx initial{};
    SpectralPolynomial flow;
    EvolutionMethod method = EvolutionMethod::closed_form;
    double rk4_step = 1e-4;
    double horizon_lo = -0.4;
    double horizon_hi = 0.4;
};

namespace detail {

// Index k and scale c when f = c lambda^k (or f == 0, reported as k = 0, c = 0).
inline std::pair<std::size_t, cplx> as_monomial(const SpectralPolynomial& f) {
    const int d = f.degree();
    if (d < 0) return {0, cplx{}};
    for (int i = 0; i < d; ++i)
        if (f[static_cast<std::size_t>(i)] != cplx{}) {
            throw Error(ErrorKind::domain, "closed-form evolution needs a monomial flow; use rk4");
        }
    return {static_cast<std::size_t>(d), f[static_cast<std::size_t>(d)]};
}

inline cplx evolve_closed_form(const SpectralPath& path, double t) {
    const auto [k, c] = as_monomial(path.flow);
    const cplx z0 = path.initial;
    if (c == cplx{} || z0 == cplx{}) return k == 0 ? z0 + c * t : z0;
    if (k == 0) return z0 + c * t;
    if (k == 1) return z0 * std::exp(c * t);
    // z^{1-k} = z0^{1-k} - (k-1) c t, i.e. z = z0 * base^{-1/(k-1)} with base
    // travelling on a straight segment from 1; the principal root tracks the
    // branch until base reaches 0.
    const double km1 = static_cast<double>(k - 1);
    const cplx rate = km1 * c * std::pow(z0, km1);
    const cplx base = 1.0 - rate * t;
    const bool crossed = std::abs(base.imag()) <= 1e-15 * std::abs(base) && base.real() <= 0.0;
    if (std::abs(base) < 1e-14 || crossed) {
        const double t_crit = (1.0 / rate).real();
        throw Error(ErrorKind::blow_up, "spectral parameter leaves its branch; critical time " +
                                            std::to_string(t_crit),
                    t_crit);
    }
    return z0 * std::pow(base, -1.0 / km1);
}

inline cplx evolve_rk4(const SpectralPath& path, double t) {
    if (t < path.horizon_lo || t > path.horizon_hi) {
        throw Error(ErrorKind::domain, "t = " + std::to_string(t) + " outside rk4 horizon [" +
                                           std::to_string(path.horizon_lo) + ", " +
                                           std::to_string(path.horizon_hi) + "]");
    }
    if (!(path.rk4_step > 0.0)) throw Error(ErrorKind::domain, "rk4 step must be positive");
    const auto steps = static_cast<std::size_t>(std::ceil(std::abs(t) / path.rk4_step - 1e-12));
    if (steps == 0) return path.initial;
    const double h = t / static_cast<double>(steps);
    const auto& f = path.flow;
    cplx z = path.initial;
    for (std::size_t s = 0; s < steps; ++s) {
        const cplx k1 = f(z);
        const cplx k2 = f(z + 0.5 * h * k1);
        const cplx k3 = f(z + 0.5 * h * k2);
        const cplx k4 = f(z + h * k3);
        const cplx dz = h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!std::isfinite(dz.real()) || !std::isfinite(dz.imag()) ||
            std::abs(h * k1) > 0.5 * std::max(1.0, std::abs(z))) {
            throw Error(ErrorKind::stiffness, "rk4 step rejected at t = " + std::to_string(h * s),
                        h * static_cast<double>(s));
        }
        z += dz;
    }
    return z;
}

}  // namespace detail

/// lambda(t) solving lambda_t = f(lambda), lambda(0) = path.initial.
inline cplx evolve_lambda(const SpectralPath& path, double t) {
    return path.method == EvolutionMethod::closed_form ? detail::evolve_closed_form(path, t)
                                                       : detail::evolve_rk4(path, t);
}

/// q with q(lambda) (lambda - root) = f(lambda) - f(root), by synthetic division.
inline Polynomial synthetic_quotient(const SpectralPolynomial& f, cplx root) {
    const std::size_t d = f.size() - 1;
    if (d == 0) return Polynomial();
    std::vector<cplx> q(d);
    q[d - 1] = f[d];
    for (std::size_t k = d - 1; k >= 1; --k) q[k - 1] = f[k] + root * q[k];
    return Polynomial(std::move(q));
}

struct GPolynomial {
    Polynomial coeffs;
    std::vector<cplx> roots_used;

    cplx operator()(cplx z) const noexcept { return coeffs(z); }
    cplx operator[](std::size_t i) const noexcept { return coeffs[i]; }
};

/// g = (1/N) sum_i (f(lambda) - f(lambda_i)) / (lambda - lambda_i). Roots are
/// summed in (Re, Im) lexicographic order so the result does not depend on
/// the input order.
inline GPolynomial compute_g(const SpectralPolynomial& f, std::span<const cplx> lambdas, std::size_t n_dim) {
    if (lambdas.empty()) throw Error(ErrorKind::domain, "compute_g needs at least one spectral value");
    if (lambdas.size() != n_dim) {
        throw Error(ErrorKind::shape, "expected " + std::to_string(n_dim) + " spectral values, got " +
                                          std::to_string(lambdas.size()));
    }
    std::vector<cplx> sorted(lambdas.begin(), lambdas.end());
    std::sort(sorted.begin(), sorted.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    const std::size_t len = std::max<std::size_t>(f.size() - 1, 1);
    std::vector<cplx> acc(len);
    for (const cplx r : sorted) {
        const Polynomial q = synthetic_quotient(f, r);
        for (std::size_t i = 0; i < q.size(); ++i) acc[i] += q[i];
    }
    const double inv_n = 1.0 / static_cast<double>(n_dim);
    for (auto& a : acc) a *= inv_n;
    return GPolynomial{Polynomial(std::move(acc)), std::move(sorted)};
}

struct PermExtremes {
    double min;
    double max;
};

/// min/max over permutations sigma of sum_i xs_i ys_sigma(i): sorted pairing
/// gives the max, reversed pairing the min.
inline PermExtremes perm_extremes(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw Error(ErrorKind::shape, "perm_extremes needs equal-length lists");
    std::vector<double> a(xs.begin(), xs.end());
    std::vector<double> b(ys.begin(), ys.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const std::size_t n = a.size();
    double lo = 0.0;
    double hi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        hi += a[i] * b[i];
        lo += a[i] * b[n - 1 - i];
    }
    return {lo, hi};
}

/// True when Re(lambda (J_j - J_k)) stays away from zero for all j < k.
inline bool avoids_gamma_j(cplx lambda, const DiagonalGenerator& j, double tol = Tolerances{}.gamma_avoidance) {
    for (std::size_t a = 0; a < j.dim(); ++a)
        for (std::size_t b = a + 1; b < j.dim(); ++b)
            if (std::abs((lambda * (j[a] - j[b])).real()) <= tol) return false;
    return true;
}

}  // namespace nisakns
