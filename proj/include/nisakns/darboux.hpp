#pragma once

// Darboux transformation for the non-isospectral AKNS hierarchy.
//
// A frame of eigenfunction columns H = (h_1..h_N) at spectral values
// Lambda = diag(lambda_1..lambda_N) gives the dressing field S = H Lambda H^-1,
// the new potential P' = P + [J, S] and new coefficients V'_i obtained by
// matching powers of lambda in
//
//   V'(l)(l I - S) = (l I - S) V(l) + (f(l) I - S_t) - g(l)(l I - S).
//
// The integral constants are not preserved: alpha'_j = alpha_j + beta_j(Lambda)
// with beta_j = sum_{k=0}^{n-j+1} f_{j+k+1} Lambda^k - g_j I. Scalars enter as
// multiples of I; since N g_j = sum_k f_{j+k+1} tr(Lambda^k), every beta_j is
// trace-free.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nisakns/error.hpp"
#include "nisakns/grid.hpp"
#include "nisakns/hierarchy.hpp"
#include "nisakns/matrix.hpp"
#include "nisakns/parallel.hpp"
#include "nisakns/spectral_flow.hpp"
#include "nisakns/stencil.hpp"

namespace nisakns {

/// Largest coefficient deviation between the characteristic polynomial of s
/// and prod (z - lambda_i), each coefficient scaled by the matching power of
/// max(1, |lambda|).
inline double spectrum_error(const SquareMatrix& s, std::span<const cplx> lambdas) {
    const auto cp = characteristic_polynomial(s);
    std::vector<cplx> ref{1.0};
    for (const cplx l : lambdas) {
        std::vector<cplx> next(ref.size() + 1);
        for (std::size_t i = 0; i < ref.size(); ++i) {
            next[i + 1] += ref[i];
            next[i] -= l * ref[i];
        }
        ref = std::move(next);
    }
    if (ref.size() != cp.size()) throw Error(ErrorKind::shape, "spectrum length differs from dimension");
    double scale = 1.0;
    for (const cplx l : lambdas) scale = std::max(scale, std::abs(l));
    double err = 0.0;
    for (std::size_t i = 0; i < cp.size(); ++i) {
        const double w = std::pow(scale, static_cast<double>(cp.size() - 1 - i));
        err = std::max(err, std::abs(cp[i] - ref[i]) / w);
    }
    return err;
}

inline bool spectrum_matches(const SquareMatrix& s, std::span<const cplx> lambdas, double tol) {
    return spectrum_error(s, lambdas) <= tol;
}

/// S = H Lambda H^-1. Columns are rescaled to unit max-norm first, which
/// leaves S unchanged and keeps exponentially large eigenfunctions in range.
inline SquareMatrix build_s(const SquareMatrix& h, std::span<const cplx> lambdas, const Tolerances& tol = {}) {
    const std::size_t n = h.dim();
    if (lambdas.size() != n) throw Error(ErrorKind::shape, "one spectral value per frame column is required");
    SquareMatrix hn = h;
    for (std::size_t c = 0; c < n; ++c) {
        double m = 0.0;
        for (std::size_t r = 0; r < n; ++r) m = std::max(m, std::abs(h(r, c)));
        if (m == 0.0 || !std::isfinite(m)) {
            throw Error(ErrorKind::conditioning, "frame column " + std::to_string(c + 1) + " is zero or not finite",
                        0.0);
        }
        for (std::size_t r = 0; r < n; ++r) hn(r, c) /= m;
    }
    const SquareMatrix inv = invert(hn, tol);
    SquareMatrix hl = hn;
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) hl(r, c) *= lambdas[c];
    return hl * inv;
}

/// P' = P + [J, S].
inline SquareMatrix transform_p(const SquareMatrix& p, const DiagonalGenerator& j, const SquareMatrix& s,
                                double tol = Tolerances{}.algebraic) {
    p.require_same(s);
    for (std::size_t i = 0; i < p.dim(); ++i)
        if (std::abs(p(i, i)) > tol) throw Error(ErrorKind::domain, "potential must be off-diagonal");
    return p + commutator(j, s);
}

/// V'_0..V'_n from V_0..V_n by descending coefficient matching:
///   V'_n = V_n + (f_{n+1} - g_n) I + g_{n+1} S,
///   V'_i = V_i + V'_{i+1} S - S V_{i+1} + (f_{i+1} - g_i) I + g_{i+1} S.
/// Missing high coefficients of f (up to n+2) and g (up to n+1) count as zero.
inline std::vector<SquareMatrix> transform_v(std::span<const SquareMatrix> vs, const SquareMatrix& s,
                                             const SpectralPolynomial& f, const GPolynomial& g) {
    if (vs.empty()) throw Error(ErrorKind::shape, "transform_v needs at least V_0");
    const std::size_t n = vs.size() - 1;
    require_degree_bound(f, n);
    if (g.coeffs.degree() > static_cast<int>(n) + 1) {
        throw Error(ErrorKind::shape, "g has degree above hierarchy order + 1");
    }
    for (const auto& v : vs) v.require_same(s);
    std::vector<SquareMatrix> out(n + 1, SquareMatrix(s.dim()));
    out[n] = vs[n] + s * g[n + 1];
    out[n].add_scalar(f[n + 1] - g[n]);
    for (std::size_t i = n; i-- > 0;) {
        SquareMatrix v = vs[i] + out[i + 1] * s - s * vs[i + 1] + s * g[i + 1];
        v.add_scalar(f[i + 1] - g[i]);
        out[i] = std::move(v);
    }
    return out;
}

/// |V'(l)(l I - S) - (l I - S)V(l) - (f(l) I - S_t) + g(l)(l I - S)|_max at one
/// point, with V and V' given by their coefficient lists.
inline double governing_residual(std::span<const SquareMatrix> v, std::span<const SquareMatrix> vp,
                                 const SquareMatrix& s, const SquareMatrix& s_t, const SpectralPolynomial& f,
                                 const GPolynomial& g, cplx l) {
    const auto eval = [&](std::span<const SquareMatrix> c) {
        SquareMatrix acc = c.back();
        for (std::size_t i = c.size() - 1; i-- > 0;) {
            acc *= l;
            acc += c[i];
        }
        return acc;
    };
    SquareMatrix dressing = -s;
    dressing.add_scalar(l);
    SquareMatrix rhs = -s_t;
    rhs.add_scalar(f(l));
    return (eval(vp) * dressing - dressing * eval(v) - rhs + dressing * g(l)).max_abs();
}

struct ConstantShift {
    std::vector<SquareMatrix> betas;
};

/// beta_j(Lambda) = sum_{k=0}^{n-j+1} f_{j+k+1} Lambda^k - g_j I, 0 <= j <= n.
inline ConstantShift beta_shift(const SpectralPolynomial& f, const SquareMatrix& lambda_diag, const GPolynomial& g,
                                std::size_t n, double tol = Tolerances{}.algebraic) {
    if (!lambda_diag.is_diagonal(tol)) throw Error(ErrorKind::domain, "Lambda must be diagonal");
    require_degree_bound(f, n);
    const std::size_t dim = lambda_diag.dim();
    std::vector<SquareMatrix> powers{SquareMatrix::identity(dim)};
    for (std::size_t k = 1; k <= n + 1; ++k) powers.push_back(powers.back() * lambda_diag);
    ConstantShift shift;
    for (std::size_t j = 0; j <= n; ++j) {
        SquareMatrix b(dim);
        for (std::size_t k = 0; k <= n - j + 1; ++k) b += powers[k] * f[j + k + 1];
        b.add_scalar(-g[j]);
        shift.betas.push_back(std::move(b));
    }
    return shift;
}

enum class ShiftDirection { forward, inverse };

/// forward: alpha + beta (constants after dressing); inverse: alpha - beta
/// (seed constants that dress onto alpha).
inline IntegralConstants shift_constants(const IntegralConstants& c, const ConstantShift& shift, ShiftDirection dir) {
    if (c.alphas.size() != shift.betas.size()) {
        throw Error(ErrorKind::shape, "constant shift order " + std::to_string(shift.betas.size()) +
                                          " differs from constants order " + std::to_string(c.alphas.size()));
    }
    IntegralConstants out = c;
    for (std::size_t i = 0; i < out.alphas.size(); ++i) {
        if (dir == ShiftDirection::forward)
            out.alphas[i] += shift.betas[i];
        else
            out.alphas[i] -= shift.betas[i];
    }
    return out;
}

/// p(lambda)(lambda I - S) phi with p the principal N-th root of
/// 1 / det(lambda I - S) = 1 / prod(lambda - lambda_i).
inline std::vector<cplx> transform_eigenfunction(std::span<const cplx> phi, cplx lambda, const SquareMatrix& s,
                                                 std::span<const cplx> spectrum, const Tolerances& tol = {}) {
    const std::size_t n = s.dim();
    if (phi.size() != n) throw Error(ErrorKind::shape, "eigenfunction length differs from dimension");
    if (spectrum.size() != n) throw Error(ErrorKind::shape, "spectrum length differs from dimension");
    cplx det_p = 1.0;
    for (const cplx l : spectrum) {
        if (std::abs(lambda - l) < tol.degenerate) {
            throw Error(ErrorKind::degenerate_dressing, "spectral value coincides with an eigenvalue of S",
                        std::abs(lambda - l));
        }
        det_p *= lambda - l;
    }
    const cplx p = std::pow(1.0 / det_p, 1.0 / static_cast<double>(n));
    SquareMatrix factor = -s;
    factor.add_scalar(lambda);
    auto out = nisakns::apply(factor, phi);
    for (auto& v : out) v *= p;
    return out;
}

/// (dp/dt) / p = -(1/N) d/dt log det(lambda(t) I - S(t)) from time samples,
/// using d(det)/dt / det so no logarithm branch is involved.
inline cplx log_p_derivative(std::span<const SquareMatrix> s_samples, std::span<const cplx> lambda_samples,
                             std::size_t k, double dt) {
    if (s_samples.size() != lambda_samples.size()) throw Error(ErrorKind::shape, "sample counts differ");
    std::vector<cplx> dets;
    for (std::size_t i = 0; i < s_samples.size(); ++i) {
        SquareMatrix m = -s_samples[i];
        m.add_scalar(lambda_samples[i]);
        dets.push_back(det(m));
    }
    const cplx ddet = time_derivative<cplx>(dets, k, dt);
    return -ddet / (dets[k] * static_cast<double>(s_samples[k].dim()));
}

/// Eigenfunction column `column` sampled along the whole x-grid at time
/// sample t_index: result[xi] is the column vector at x = grid.x(xi).
using ColumnSampler = std::function<std::vector<std::vector<cplx>>(std::size_t column, std::size_t t_index)>;

struct DarbouxFrame {
    std::vector<SpectralPath> lambdas;
    std::vector<std::vector<cplx>> mixing;
    FieldGrid h_field;
    FieldGrid s_field;

    std::vector<cplx> lambda_values(double t) const {
        std::vector<cplx> v;
        for (const auto& p : lambdas) v.push_back(evolve_lambda(p, t));
        return v;
    }
};

/// Samples H on the grid, validates Gamma_J avoidance and invertibility,
/// builds S at every sample and checks that its spectrum is {lambda_i(t)}.
inline DarbouxFrame assemble_frame(const Grid& grid, const DiagonalGenerator& j, std::vector<SpectralPath> lambdas,
                                   std::vector<std::vector<cplx>> mixing, const ColumnSampler& columns,
                                   const Tolerances& tol = {}) {
    const std::size_t n = j.dim();
    if (lambdas.size() != n) throw Error(ErrorKind::shape, "a frame needs one spectral path per dimension");
    DarbouxFrame frame{std::move(lambdas), std::move(mixing), FieldGrid(grid, n), FieldGrid(grid, n)};
    for (std::size_t ti = 0; ti < grid.nt(); ++ti) {
        const double t = grid.t()[ti];
        const auto lv = frame.lambda_values(t);
        bool distinct = false;
        for (std::size_t a = 0; a < n; ++a) {
            if (!avoids_gamma_j(lv[a], j, tol.gamma_avoidance)) {
                throw Error(ErrorKind::domain, "lambda_" + std::to_string(a + 1) + "(" + std::to_string(t) +
                                                   ") lies on Gamma_J");
            }
            for (std::size_t b = a + 1; b < n; ++b)
                if (std::abs(lv[a] - lv[b]) > tol.algebraic) distinct = true;
        }
        if (!distinct) throw Error(ErrorKind::domain, "frame spectral values must not all coincide");
        std::vector<std::vector<std::vector<cplx>>> cols;
        for (std::size_t c = 0; c < n; ++c) {
            cols.push_back(columns(c, ti));
            if (cols.back().size() != grid.nx()) throw Error(ErrorKind::shape, "column sampler returned wrong length");
        }
        std::vector<std::optional<Error>> failures(grid.nx());
        parallel_for(grid.nx(), [&](std::size_t xi) {
            SquareMatrix h(n);
            for (std::size_t c = 0; c < n; ++c)
                for (std::size_t r = 0; r < n; ++r) h(r, c) = cols[c][xi][r];
            try {
                SquareMatrix s = build_s(h, lv, tol);
                if (!spectrum_matches(s, lv, tol.similarity)) {
                    throw Error(ErrorKind::conditioning, "dressing field lost similarity to Lambda at x = " +
                                                             std::to_string(grid.x(xi)));
                }
                frame.s_field.set(ti, xi, std::move(s));
                frame.h_field.set(ti, xi, std::move(h));
            } catch (const Error& e) {
                failures[xi] = e;
            }
        });
        for (auto& f : failures)
            if (f) throw *f;
    }
    return frame;
}

struct FrameAsymptotics {
    double t;
    double left_deviation;                  // |S(x_min) - Lambda|_max
    double right_offdiag;                   // largest off-diagonal |S(x_max)|
    double right_deviation;                 // |S(x_max) - diag(lambda_perm)|_max
    std::vector<std::size_t> right_permutation;
    std::optional<double> left_rate;         // fit of |S - Lambda|_max, left quarter
    std::optional<double> left_diag_rate;    // diagonal entries only
    std::optional<double> left_offdiag_rate; // off-diagonal entries only
    double gap_min;                          // m: min over sigma of sum Re(lambda_k) J_sigma(k)
    double gap_max;                          // M
    double gap_next;                         // next permutation sum above m
    std::optional<double> left_det_slope;    // d log|det H| / dx, left quarter
    std::optional<double> right_det_slope;   // right quarter
};

namespace detail {
inline double log_abs_det_columns(const SquareMatrix& h) {
    SquareMatrix hn = h;
    double log_scale = 0.0;
    for (std::size_t c = 0; c < h.dim(); ++c) {
        double m = 0.0;
        for (std::size_t r = 0; r < h.dim(); ++r) m = std::max(m, std::abs(h(r, c)));
        log_scale += std::log(m);
        for (std::size_t r = 0; r < h.dim(); ++r) hn(r, c) /= m;
    }
    return std::log(std::abs(det(hn))) + log_scale;
}

inline std::optional<double> linear_slope(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() < 3) return std::nullopt;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}
}  // namespace detail

/// Smallest sum_i xs_i ys_sigma(i) strictly above the minimum, reached by one
/// transposition of the minimizing (reversed sorted) pairing. The diagonal of
/// S - Lambda decays like exp((next - m) x) at the left edge; for N = 2 this
/// is M - m.
inline double next_permutation_sum(std::span<const double> xs, std::span<const double> ys) {
    std::vector<double> a(xs.begin(), xs.end());
    std::vector<double> b(ys.begin(), ys.end());
    std::sort(a.begin(), a.end());
    std::sort(b.rbegin(), b.rend());
    const std::size_t n = a.size();
    double m = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        m += a[i] * b[i];
        scale = std::max(scale, std::abs(a[i] * b[i]));
    }
    double next = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = i + 1; k < n; ++k) {
            const double inc = (a[i] - a[k]) * (b[k] - b[i]);
            if (inc > 1e-12 * std::max(scale, 1.0)) next = std::min(next, m + inc);
        }
    return next;
}

/// Edge behaviour of S: S -> Lambda as x -> -inf and S -> a permuted
/// diagonal as x -> +inf, with fitted decay rates and det H growth slopes
/// to compare against the permutation extremes m, M.
inline FrameAsymptotics asymptotic_s_check(const DarbouxFrame& frame, std::size_t t_index,
                                           const DiagonalGenerator& j) {
    const Grid& g = frame.s_field.grid();
    const double t = g.t()[t_index];
    const auto lv = frame.lambda_values(t);
    const std::size_t n = lv.size();
    const SquareMatrix lambda = SquareMatrix::diagonal(lv);
    const auto s = frame.s_field.slice(t_index);
    const auto h = frame.h_field.slice(t_index);

    FrameAsymptotics r{};
    r.t = t;
    r.left_deviation = (s.front() - lambda).max_abs();

    const SquareMatrix& right = s.back();
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (a != b) r.right_offdiag = std::max(r.right_offdiag, std::abs(right(a, b)));
    std::vector<cplx> permuted(n);
    for (std::size_t a = 0; a < n; ++a) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < n; ++k)
            if (std::abs(right(a, a) - lv[k]) < std::abs(right(a, a) - lv[best])) best = k;
        r.right_permutation.push_back(best);
        permuted[a] = lv[best];
    }
    r.right_deviation = (right - SquareMatrix::diagonal(permuted)).max_abs();

    const std::size_t quarter = std::max<std::size_t>(g.nx() / 4, 3);
    std::vector<double> xs, full, diag, off, logdet_l, logdet_r, xs_r;
    for (std::size_t xi = 0; xi < quarter; ++xi) {
        const SquareMatrix d = s[xi] - lambda;
        double dm = 0.0, om = 0.0;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) (a == b ? dm : om) = std::max(a == b ? dm : om, std::abs(d(a, b)));
        xs.push_back(g.x(xi));
        full.push_back(std::max(dm, om));
        diag.push_back(dm);
        off.push_back(om);
        logdet_l.push_back(detail::log_abs_det_columns(h[xi]));
    }
    for (std::size_t xi = g.nx() - quarter; xi < g.nx(); ++xi) {
        xs_r.push_back(g.x(xi));
        logdet_r.push_back(detail::log_abs_det_columns(h[xi]));
    }
    double scale = 1.0;
    for (const cplx l : lv) scale = std::max(scale, std::abs(l));
    const double floor = 1e-14 * scale;
    r.left_rate = fit_log_slope(xs, full, floor);
    r.left_diag_rate = fit_log_slope(xs, diag, floor);
    r.left_offdiag_rate = fit_log_slope(xs, off, floor);
    r.left_det_slope = detail::linear_slope(xs, logdet_l);
    r.right_det_slope = detail::linear_slope(xs_r, logdet_r);

    std::vector<double> re_l, re_j;
    for (std::size_t a = 0; a < n; ++a) {
        re_l.push_back(lv[a].real());
        re_j.push_back(j[a].real());
    }
    const auto ext = perm_extremes(re_l, re_j);
    r.gap_min = ext.min;
    r.gap_max = ext.max;
    r.gap_next = next_permutation_sum(re_l, re_j);
    return r;
}

/// Refuses frames whose det H does not grow like exp(m x) at the left edge
/// and exp(M x) at the right edge (a vanishing leading coefficient).
inline void require_frame_growth(const FrameAsymptotics& a, double rel_tol = 0.05) {
    const double span = std::max(1e-12, a.gap_max - a.gap_min);
    const auto off = [&](std::optional<double> slope, double target) {
        return !slope || std::abs(*slope - target) > rel_tol * span;
    };
    if (off(a.left_det_slope, a.gap_min) || off(a.right_det_slope, a.gap_max)) {
        throw Error(ErrorKind::conditioning,
                    "frame det H does not follow the exp(m x) / exp(M x) edge growth; a leading coefficient vanishes",
                    a.left_det_slope.value_or(std::nan("")));
    }
}

}  // namespace nisakns
