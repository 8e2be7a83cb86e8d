#pragma once

// Grid-refinement studies. Each level halves h and refines the time step
// with it (dt = dt_over_h * h) on the stencil {t_c - dt, t_c, t_c + dt}, so
// a residual with O(h^2 + dt^2) error shows order 2 instead of stalling at
// the time-difference floor.

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "nisakns/error.hpp"
#include "nisakns/grid.hpp"
#include "nisakns/hierarchy.hpp"
#include "nisakns/matrix.hpp"
#include "nisakns/seed.hpp"
#include "nisakns/soliton.hpp"
#include "nisakns/spectral_flow.hpp"
#include "nisakns/stencil.hpp"

namespace nisakns {

struct StudyLevel {
    std::size_t nx;
    double h;
    double dt;
    double residual;
};

struct OrderStudy {
    std::vector<StudyLevel> levels;
    double order = 0.0;
};

/// `levels` grids ending at nx_finest, each with half the spacing of the
/// previous one. (nx_finest - 1) must be divisible by 2^(levels - 1).
inline std::vector<Grid> nested_grids(double x_min, double x_max, std::size_t nx_finest, std::size_t levels,
                                      double t_center, double dt_over_h) {
    if (levels < 2) throw Error(ErrorKind::grid, "an order study needs at least two grid levels");
    const std::size_t factor = std::size_t{1} << (levels - 1);
    if ((nx_finest - 1) % factor != 0) {
        throw Error(ErrorKind::grid, "nx - 1 = " + std::to_string(nx_finest - 1) + " is not divisible by 2^" +
                                         std::to_string(levels - 1) + " for nested refinement");
    }
    std::vector<Grid> out;
    for (std::size_t l = 0; l < levels; ++l) {
        const std::size_t nx = (nx_finest - 1) / (factor >> l) + 1;
        const double h = (x_max - x_min) / static_cast<double>(nx - 1);
        const double dt = dt_over_h * h;
        out.emplace_back(x_min, x_max, nx, std::vector<double>{t_center - dt, t_center, t_center + dt});
    }
    return out;
}

inline OrderStudy run_study(const std::vector<Grid>& grids, const std::function<double(const Grid&)>& residual) {
    OrderStudy s;
    std::vector<double> hs, errs;
    for (const auto& g : grids) {
        const double r = residual(g);
        s.levels.push_back({g.nx(), g.h(), g.dt(), r});
        hs.push_back(g.h());
        errs.push_back(r);
    }
    s.order = observed_order(hs, errs);
    return s;
}

/// Spectral parameters the zero-curvature residual is sampled at.
inline std::vector<SpectralPath> default_lambda_samples(const SpectralPolynomial& f) {
    return {SpectralPath{0.5, f}, SpectralPath{cplx(-0.8, 0.3), f}, SpectralPath{cplx(0.0, 0.9), f}};
}

/// Zero-curvature residual of a dressed system at the middle time sample.
inline double dressed_zero_curvature(const DressedSystem& sys, std::span<const SpectralPath> samples) {
    return zero_curvature_residual(sys.p, sys.v.at(1), samples, 1);
}

/// One Gaussian bump a exp(-((x - c)/w)^2) per off-diagonal entry.
struct GaussianBump {
    cplx amplitude;
    double center;
    double width;
};

/// Static potential whose off-diagonal entries, in row-major order, are the
/// given bumps (N(N-1) of them).
inline Profile gaussian_potential(const Grid& g, std::size_t n, std::span<const GaussianBump> bumps) {
    if (bumps.size() != n * (n - 1)) throw Error(ErrorKind::shape, "need one bump per off-diagonal entry");
    Profile p(g.nx(), SquareMatrix(n));
    for (std::size_t xi = 0; xi < g.nx(); ++xi) {
        std::size_t k = 0;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) {
                if (a == b) continue;
                const double z = (g.x(xi) - bumps[k].center) / bumps[k].width;
                p[xi](a, b) = bumps[k].amplitude * std::exp(-z * z);
                ++k;
            }
    }
    return p;
}

/// Coefficient-equation study for a static Gaussian-bump potential with
/// N = 2, n = 2, f = lambda^2 and alpha_2 = J.
inline OrderStudy gaussian_coefficient_study(std::span<const GaussianBump> bumps, double x_min, double x_max,
                                             std::size_t nx_finest, std::size_t levels) {
    const DiagonalGenerator j({1.0, -1.0});
    const auto f = SpectralPolynomial::monomial(2);
    auto c = IntegralConstants::zero(2, 2);
    c.alphas[2] = j.matrix();
    const auto grids = nested_grids(x_min, x_max, nx_finest, levels, 0.0, 1.0);
    return run_study(grids, [&](const Grid& g) {
        const Profile p = gaussian_potential(g, 2, bumps);
        return coefficient_residual(p, build_hierarchy(p, g, j, f, c, 0.0)).residual;
    });
}

namespace mkdv {

inline SolitonSpec with_grid(SolitonSpec spec, const Grid& g) {
    spec.grid = g;
    return spec;
}

/// Zero-curvature order of the once- or twice-dressed system.
inline OrderStudy zero_curvature_study(const SolitonSpec& base, std::size_t solitons, std::size_t levels,
                                       double t_center, double dt_over_h) {
    const auto samples = default_lambda_samples(flow());
    const Grid& b = base.grid;
    return run_study(nested_grids(b.x_min(), b.x_max(), b.nx(), levels, t_center, dt_over_h), [&](const Grid& g) {
        return dressed_zero_curvature(dressed_system(with_grid(base, g), solitons), samples);
    });
}

/// Orders of the recurrence-derived and printed residuals for the closed-form 1-soliton.
struct MkdvStudy {
    OrderStudy recurrence;
    OrderStudy printed;
    MkdvReport finest;
};

inline MkdvStudy residual_study(const SolitonSpec& base, std::size_t levels, double t_center, double dt_over_h) {
    const Grid& b = base.grid;
    MkdvStudy out;
    std::vector<double> hs, rec, pr;
    for (const auto& g : nested_grids(b.x_min(), b.x_max(), b.nx(), levels, t_center, dt_over_h)) {
        const SolitonSpec spec = with_grid(base, g);
        ScalarField u(g);
        for (std::size_t ti = 0; ti < g.nt(); ++ti)
            for (std::size_t xi = 0; xi < g.nx(); ++xi) u.at(ti, xi) = closed_form_u(spec, g.x(xi), g.t()[ti]);
        out.finest = mkdv_residual(u);
        out.recurrence.levels.push_back({g.nx(), g.h(), g.dt(), out.finest.recurrence_residual});
        out.printed.levels.push_back({g.nx(), g.h(), g.dt(), out.finest.printed_residual});
        hs.push_back(g.h());
        rec.push_back(out.finest.recurrence_residual);
        pr.push_back(out.finest.printed_residual);
    }
    out.recurrence.order = observed_order(hs, rec);
    out.printed.order = observed_order(hs, pr);
    return out;
}

}  // namespace mkdv

}  // namespace nisakns
