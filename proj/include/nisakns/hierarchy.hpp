#pragma once

// Non-isospectral AKNS hierarchy on a grid: the coefficients V_0..V_n of
// V(lambda) = sum_i V_i lambda^i built from a potential P by descending
// recurrence, plus residual evaluators for the zero-curvature condition and
// the evolution equation of P.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nisakns/error.hpp"
#include "nisakns/grid.hpp"
#include "nisakns/matrix.hpp"
#include "nisakns/parallel.hpp"
#include "nisakns/spectral_flow.hpp"
#include "nisakns/stencil.hpp"

namespace nisakns {

/// alpha_0..alpha_n, the values of V_i - f_i J x at x -> -inf. Held at one t.
struct IntegralConstants {
    std::vector<SquareMatrix> alphas;

    std::size_t order() const {
        if (alphas.empty()) throw Error(ErrorKind::shape, "integral constants are empty");
        return alphas.size() - 1;
    }
    std::size_t dim() const { return alphas.at(0).dim(); }

    static IntegralConstants zero(std::size_t order, std::size_t dim) {
        return IntegralConstants{std::vector<SquareMatrix>(order + 1, SquareMatrix(dim))};
    }

    void validate(double tol = Tolerances{}.algebraic) const {
        for (std::size_t i = 0; i < alphas.size(); ++i) {
            alphas[i].require_same(alphas[0]);
            if (std::abs(alphas[i].trace()) > tol * std::max(1.0, alphas[i].max_abs())) {
                throw Error(ErrorKind::domain, "integral constant alpha_" + std::to_string(i) +
                                                   " is not trace-free",
                            std::abs(alphas[i].trace()));
            }
        }
    }
};

/// V_0..V_n sampled along the x-grid at time t.
struct HierarchyFields {
    Grid grid;
    double t = 0.0;
    std::vector<Profile> vs;
    IntegralConstants constants;
    SpectralPolynomial flow;
    DiagonalGenerator generator;

    std::size_t order() const { return vs.size() - 1; }

    /// V(lambda) at sample xi.
    SquareMatrix evaluate(std::size_t xi, cplx lambda) const {
        SquareMatrix acc = vs.back()[xi];
        for (std::size_t i = vs.size() - 1; i-- > 0;) {
            acc *= lambda;
            acc += vs[i][xi];
        }
        return acc;
    }

    Profile evaluate(cplx lambda) const {
        Profile out(grid.nx(), SquareMatrix(generator.dim()));
        parallel_for(grid.nx(), [&](std::size_t xi) { out[xi] = evaluate(xi, lambda); });
        return out;
    }
};

/// Builds V_n..V_0 from P:
///   V_n^off = 0,
///   V_i^diag = alpha_i + f_i J x + int_{x_min}^x pi_0([P, V_i^off]),
///   V_{i-1}^off = ad_J^{-1}(d/dx V_i^off - pi_1([P, V_i])).
/// The integral is a cumulative trapezoid treating P as zero left of the grid.
inline HierarchyFields build_hierarchy(std::span<const SquareMatrix> p, const Grid& grid, const DiagonalGenerator& j,
                                       const SpectralPolynomial& f, const IntegralConstants& c, double t,
                                       const Tolerances& tol = {}) {
    const std::size_t nx = grid.nx();
    const std::size_t dim = j.dim();
    if (p.size() != nx) throw Error(ErrorKind::shape, "potential length differs from nx");
    for (const auto& m : p)
        if (m.dim() != dim) throw Error(ErrorKind::shape, "potential dimension differs from generator");
    if (c.dim() != dim) throw Error(ErrorKind::shape, "integral constants dimension differs from generator");
    c.validate(tol.algebraic);
    const std::size_t n = c.order();
    if (f.degree() > static_cast<int>(n)) {
        throw Error(ErrorKind::domain, "flow degree " + std::to_string(f.degree()) + " exceeds hierarchy order " +
                                           std::to_string(n));
    }
    for (std::size_t i = 0; i <= n; ++i)
        if (!c.alphas[i].is_diagonal(tol.algebraic * std::max(1.0, c.alphas[i].max_abs()))) {
            throw Error(ErrorKind::domain, "alpha_" + std::to_string(i) + " must commute with J (diagonal)");
        }
    require_off_diagonal(p, tol.algebraic);
    require_decay(p, tol.decay);

    const double h = grid.h();
    const SquareMatrix jm = j.matrix();
    std::vector<Profile> vs(n + 1, Profile(nx, SquareMatrix(dim)));
    Profile off(nx, SquareMatrix(dim));  // V_i^off, starting with V_n^off = 0

    for (std::size_t i = n + 1; i-- > 0;) {
        Profile source(nx, SquareMatrix(dim));
        parallel_for(nx, [&](std::size_t xi) { source[xi] = project_diag(commutator(p[xi], off[xi]), j); });
        const Profile integral = cumulative_trapezoid<SquareMatrix>(source, h, SquareMatrix(dim));
        const cplx fi = f[i];
        parallel_for(nx, [&](std::size_t xi) {
            SquareMatrix v = c.alphas[i] + jm * (fi * grid.x(xi)) + integral[xi];
            v += off[xi];
            vs[i][xi] = std::move(v);
        });
        if (i == 0) break;
        const Profile d_off = derivative<SquareMatrix>(off, h);
        Profile next(nx, SquareMatrix(dim));
        parallel_for(nx, [&](std::size_t xi) {
            next[xi] = adj_inverse(d_off[xi] - project_off(commutator(p[xi], vs[i][xi]), j), j,
                                   std::max(tol.algebraic, 1e-9));
        });
        off = std::move(next);
    }
    return HierarchyFields{grid, t, std::move(vs), c, f, j};
}

inline HierarchyFields build_hierarchy(const FieldGrid& p, std::size_t t_index, const DiagonalGenerator& j,
                                       const SpectralPolynomial& f, const IntegralConstants& c,
                                       const Tolerances& tol = {}) {
    return build_hierarchy(p.slice(t_index), p.grid(), j, f, c, p.grid().t()[t_index], tol);
}

namespace detail {

inline Profile time_derivative_profile(const FieldGrid& p, std::size_t t_index) {
    const Grid& g = p.grid();
    const double dt = g.dt();
    Profile out(g.nx(), SquareMatrix(p.dim()));
    parallel_for(g.nx(), [&](std::size_t xi) {
        Profile samples;
        samples.reserve(g.nt());
        for (std::size_t k = 0; k < g.nt(); ++k) samples.push_back(p.at(k, xi));
        out[xi] = time_derivative<SquareMatrix>(samples, t_index, dt);
    });
    return out;
}

inline double interior_max(std::span<const double> v) {
    double m = 0.0;
    for (std::size_t i = edge_margin; i + edge_margin < v.size(); ++i) m = std::max(m, v[i]);
    return m;
}

}  // namespace detail

/// max over interior x and the given lambda values of
/// |f(lambda) J + P_t - V_x + [lambda J + P, V]|_max at time sample t_index.
inline double zero_curvature_residual_at(const FieldGrid& p, const HierarchyFields& hf,
                                         std::span<const cplx> lambda_values, std::size_t t_index) {
    const Grid& g = p.grid();
    if (g.nt() < 2) throw Error(ErrorKind::stencil, "zero-curvature residual needs at least two t samples");
    if (t_index >= g.nt()) throw Error(ErrorKind::stencil, "time index out of range");
    if (hf.grid.nx() != g.nx()) throw Error(ErrorKind::shape, "hierarchy and potential grids differ");
    const Profile pt = detail::time_derivative_profile(p, t_index);
    const auto pslice = p.slice(t_index);
    const SquareMatrix jm = hf.generator.matrix();
    double worst = 0.0;
    for (const cplx lambda : lambda_values) {
        const Profile v = hf.evaluate(lambda);
        const Profile vx = derivative<SquareMatrix>(v, g.h());
        const SquareMatrix ft = jm * hf.flow(lambda);
        std::vector<double> r(g.nx());
        parallel_for(g.nx(), [&](std::size_t xi) {
            SquareMatrix u = jm * lambda + pslice[xi];
            r[xi] = (ft + pt[xi] - vx[xi] + commutator(u, v[xi])).max_abs();
        });
        worst = std::max(worst, detail::interior_max(r));
    }
    return worst;
}

/// As above, with each lambda evolved along its path to the sample time.
inline double zero_curvature_residual(const FieldGrid& p, const HierarchyFields& hf,
                                      std::span<const SpectralPath> lambda_samples, std::size_t t_index) {
    if (t_index >= p.grid().nt()) throw Error(ErrorKind::stencil, "time index out of range");
    std::vector<cplx> values;
    for (const auto& path : lambda_samples) values.push_back(evolve_lambda(path, p.grid().t()[t_index]));
    return zero_curvature_residual_at(p, hf, values, t_index);
}

/// max over interior (t, x) of |P_t - V_{0,x}^off + pi_1([P, V_0])|_max, the
/// off-diagonal part of the lambda^0 coefficient equation. For N = 2 this is
/// P_t - V_{0,x}^off + [P, V_0^diag].
inline double evolution_residual(const FieldGrid& p, std::span<const HierarchyFields> hf) {
    const Grid& g = p.grid();
    if (g.nt() < 3) throw Error(ErrorKind::stencil, "evolution residual needs at least three t samples");
    if (hf.size() != g.nt()) throw Error(ErrorKind::shape, "one hierarchy per t sample is required");
    const DiagonalGenerator& j = hf.front().generator;
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < g.nt(); ++k) {
        const Profile pt = detail::time_derivative_profile(p, k);
        Profile v0_off(g.nx(), SquareMatrix(p.dim()));
        for (std::size_t xi = 0; xi < g.nx(); ++xi) v0_off[xi] = project_off(hf[k].vs[0][xi], j);
        const Profile dv = derivative<SquareMatrix>(v0_off, g.h());
        const auto pslice = p.slice(k);
        std::vector<double> r(g.nx());
        parallel_for(g.nx(), [&](std::size_t xi) {
            r[xi] = (pt[xi] - dv[xi] + project_off(commutator(pslice[xi], hf[k].vs[0][xi]), j)).max_abs();
        });
        worst = std::max(worst, detail::interior_max(r));
    }
    return worst;
}

/// Coefficient equations of the recurrence at one t:
///   commutator = max |[J, V_n]|,
///   residual   = max over interior x and 1 <= i <= n of
///                |f_i J - V_{i,x} + [J, V_{i-1}] + [P, V_i]|,
///                together with the diagonal part of the i = 0 equation,
///                pi_0(f_0 J - V_{0,x} + [P, V_0]), which holds for any P
///                (its off-diagonal part is the evolution equation).
struct CoefficientResidual {
    double commutator = 0.0;
    double residual = 0.0;
};

inline CoefficientResidual coefficient_residual(std::span<const SquareMatrix> p, const HierarchyFields& hf) {
    const Grid& g = hf.grid;
    if (p.size() != g.nx()) throw Error(ErrorKind::shape, "potential length differs from nx");
    const DiagonalGenerator& j = hf.generator;
    const SquareMatrix jm = j.matrix();
    CoefficientResidual out;
    for (const auto& v : hf.vs.back()) out.commutator = std::max(out.commutator, commutator(j, v).max_abs());
    for (std::size_t i = 1; i <= hf.order(); ++i) {
        const Profile vx = derivative<SquareMatrix>(hf.vs[i], g.h());
        std::vector<double> r(g.nx());
        parallel_for(g.nx(), [&](std::size_t xi) {
            r[xi] = (jm * hf.flow[i] - vx[xi] + commutator(j, hf.vs[i - 1][xi]) + commutator(p[xi], hf.vs[i][xi]))
                        .max_abs();
        });
        out.residual = std::max(out.residual, detail::interior_max(r));
    }
    const Profile v0x = derivative<SquareMatrix>(hf.vs[0], g.h());
    std::vector<double> r(g.nx());
    parallel_for(g.nx(), [&](std::size_t xi) {
        r[xi] = project_diag(jm * hf.flow[0] - v0x[xi] + commutator(p[xi], hf.vs[0][xi]), j).max_abs();
    });
    out.residual = std::max(out.residual, detail::interior_max(r));
    return out;
}

struct LevelAsymptotics {
    std::size_t level;
    double deviation;                  // |V_i(x_min) - f_i J x_min - alpha_i|_max
    std::optional<double> decay_rate;  // fitted d log(deviation) / dx, left quarter
};

struct AsymptoticReport {
    double t;
    std::vector<LevelAsymptotics> levels;

    double max_deviation() const {
        double m = 0.0;
        for (const auto& l : levels) m = std::max(m, l.deviation);
        return m;
    }
};

/// Deviation of every V_i from its left-edge limit f_i J x + alpha_i.
inline AsymptoticReport asymptotic_check(const HierarchyFields& hf) {
    const Grid& g = hf.grid;
    const SquareMatrix jm = hf.generator.matrix();
    const std::size_t quarter = std::max<std::size_t>(g.nx() / 4, 3);
    AsymptoticReport report{hf.t, {}};
    for (std::size_t i = 0; i <= hf.order(); ++i) {
        std::vector<double> xs;
        std::vector<double> dev;
        double scale = 1.0;
        for (std::size_t xi = 0; xi < quarter; ++xi) {
            const SquareMatrix limit = jm * (hf.flow[i] * g.x(xi)) + hf.constants.alphas[i];
            xs.push_back(g.x(xi));
            dev.push_back((hf.vs[i][xi] - limit).max_abs());
            scale = std::max(scale, limit.max_abs());
        }
        report.levels.push_back({i, dev.front(), fit_log_slope(xs, dev, 1e-13 * scale)});
    }
    return report;
}

}  // namespace nisakns
