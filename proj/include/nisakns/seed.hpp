#pragma once

// The trivial seed P = 0 and iterated dressing on top of it.
//
// With P = 0 the hierarchy is diagonal, V_i = alpha_i(t) + f_i J x, and the
// Lax pair has the elementary solutions
//
//   Phi(x, t; lambda) = diag(exp(lambda(t) J_k x + theta_k(t))),
//   theta_k(t) = int_0^t sum_i alpha_i(s)_kk lambda(s)^i ds,
//
// where lambda(s) follows the flow. To land on target constants alpha after
// dressing with frames Lambda_1..Lambda_m, the seed uses
// alpha - sum_f beta(Lambda_f(t)).

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nisakns/darboux.hpp"
#include "nisakns/error.hpp"
#include "nisakns/grid.hpp"
#include "nisakns/hierarchy.hpp"
#include "nisakns/matrix.hpp"
#include "nisakns/parallel.hpp"
#include "nisakns/spectral_flow.hpp"
#include "nisakns/stencil.hpp"

namespace nisakns {

/// Spectral paths and mixing vectors of one dressing step.
struct FrameSpec {
    std::vector<SpectralPath> lambdas;
    std::vector<std::vector<cplx>> mixing;
};

/// Closed-form override for theta_k(t): (path, t) -> theta_1..theta_N.
using PhaseFunction = std::function<std::vector<cplx>(const SpectralPath&, double)>;

class TrivialSeed {
public:
    TrivialSeed(DiagonalGenerator j, SpectralPolynomial f, IntegralConstants target, std::vector<FrameSpec> frames,
                PhaseFunction phases = {}, std::size_t quadrature_panels = 16)
        : j_(std::move(j)),
          f_(std::move(f)),
          target_(std::move(target)),
          frames_(std::move(frames)),
          phase_fn_(std::move(phases)),
          panels_(quadrature_panels),
          rule_(10) {
        if (target_.dim() != j_.dim()) throw Error(ErrorKind::shape, "target constants dimension differs from J");
        target_.validate();
        if (f_.degree() > static_cast<int>(target_.order())) {
            throw Error(ErrorKind::domain, "the trivial seed needs deg f <= hierarchy order");
        }
        for (const auto& fr : frames_) {
            if (fr.lambdas.size() != j_.dim() || fr.mixing.size() != j_.dim()) {
                throw Error(ErrorKind::shape, "each frame needs N spectral paths and N mixing vectors");
            }
            for (const auto& m : fr.mixing)
                if (m.size() != j_.dim()) throw Error(ErrorKind::shape, "mixing vector length differs from N");
        }
    }

    const DiagonalGenerator& generator() const noexcept { return j_; }
    const SpectralPolynomial& flow() const noexcept { return f_; }
    const IntegralConstants& target() const noexcept { return target_; }
    const std::vector<FrameSpec>& frames() const noexcept { return frames_; }
    std::size_t order() const { return target_.order(); }

    /// beta(Lambda_f(t)) for frame f.
    ConstantShift shift(std::size_t frame, double t) const {
        std::vector<cplx> lv;
        for (const auto& p : frames_.at(frame).lambdas) lv.push_back(evolve_lambda(p, t));
        const auto g = compute_g(f_, lv, j_.dim());
        return beta_shift(f_, SquareMatrix::diagonal(lv), g, order());
    }

    /// Constants after the first `applied` frames have dressed the seed.
    IntegralConstants constants(double t, std::size_t applied = 0) const {
        IntegralConstants c = target_;
        for (std::size_t k = applied; k < frames_.size(); ++k) c = shift_constants(c, shift(k, t), ShiftDirection::inverse);
        return c;
    }

    HierarchyFields hierarchy(const Grid& grid, double t) const {
        const Profile zero(grid.nx(), SquareMatrix(j_.dim()));
        return build_hierarchy(zero, grid, j_, f_, constants(t), t);
    }

    /// theta_k(t) along the path, by Gauss-Legendre quadrature unless a
    /// closed form was supplied.
    std::vector<cplx> phases(const SpectralPath& path, double t) const {
        if (phase_fn_) return phase_fn_(path, t);
        const std::size_t n = j_.dim();
        std::vector<cplx> out(n);
        if (t == 0.0) return out;
        for (std::size_t k = 0; k < n; ++k) {
            out[k] = rule_.integrate(
                [&](double s) {
                    const auto c = constants(s);
                    const cplx l = evolve_lambda(path, s);
                    cplx acc = 0.0;
                    cplx pw = 1.0;
                    for (const auto& a : c.alphas) {
                        acc += a(k, k) * pw;
                        pw *= l;
                    }
                    return acc;
                },
                0.0, t, panels_);
        }
        return out;
    }

    /// Phi(lambda(t)) m at every grid x for time t.
    std::vector<std::vector<cplx>> column(const SpectralPath& path, std::span<const cplx> mixing, const Grid& grid,
                                          double t) const {
        const std::size_t n = j_.dim();
        if (mixing.size() != n) throw Error(ErrorKind::shape, "mixing vector length differs from N");
        const cplx l = evolve_lambda(path, t);
        const auto th = phases(path, t);
        std::vector<std::vector<cplx>> out(grid.nx(), std::vector<cplx>(n));
        for (std::size_t xi = 0; xi < grid.nx(); ++xi)
            for (std::size_t k = 0; k < n; ++k) out[xi][k] = mixing[k] * std::exp(l * j_[k] * grid.x(xi) + th[k]);
        return out;
    }

private:
    DiagonalGenerator j_;
    SpectralPolynomial f_;
    IntegralConstants target_;
    std::vector<FrameSpec> frames_;
    PhaseFunction phase_fn_;
    std::size_t panels_;
    GaussLegendre rule_;
};

/// Potential, coefficients and frames after dressing the seed with every
/// frame in order.
struct DressedSystem {
    FieldGrid p;
    std::vector<HierarchyFields> v;  // one per t sample
    std::vector<DarbouxFrame> frames;
};

/// Frame k uses the seed columns carried through the earlier dressing
/// factors, p(lambda)(lambda I - S_j), j < k.
inline DressedSystem dress(const TrivialSeed& seed, const Grid& grid, const Tolerances& tol = {}) {
    const DiagonalGenerator& j = seed.generator();
    const std::size_t n = j.dim();
    DressedSystem out{FieldGrid(grid, n), {}, {}};
    for (double t : grid.t()) out.v.push_back(seed.hierarchy(grid, t));

    for (std::size_t k = 0; k < seed.frames().size(); ++k) {
        const FrameSpec& spec = seed.frames()[k];
        const auto sampler = [&](std::size_t c, std::size_t ti) {
            const double t = grid.t()[ti];
            auto col = seed.column(spec.lambdas[c], spec.mixing[c], grid, t);
            const cplx l = evolve_lambda(spec.lambdas[c], t);
            for (const auto& prev : out.frames) {
                const auto spectrum = prev.lambda_values(t);
                for (std::size_t xi = 0; xi < grid.nx(); ++xi)
                    col[xi] = transform_eigenfunction(col[xi], l, prev.s_field.at(ti, xi), spectrum, tol);
            }
            return col;
        };
        DarbouxFrame frame = assemble_frame(grid, j, spec.lambdas, spec.mixing, sampler, tol);

        for (std::size_t ti = 0; ti < grid.nt(); ++ti) {
            const double t = grid.t()[ti];
            const auto g = compute_g(seed.flow(), frame.lambda_values(t), n);
            HierarchyFields& hf = out.v[ti];
            std::vector<Profile> next(hf.vs.size(), Profile(grid.nx(), SquareMatrix(n)));
            parallel_for(grid.nx(), [&](std::size_t xi) {
                const SquareMatrix& s = frame.s_field.at(ti, xi);
                out.p.set(ti, xi, transform_p(out.p.at(ti, xi), j, s));
                std::vector<SquareMatrix> vs;
                for (const auto& level : hf.vs) vs.push_back(level[xi]);
                auto vt = transform_v(vs, s, seed.flow(), g);
                for (std::size_t i = 0; i < vt.size(); ++i) next[i][xi] = std::move(vt[i]);
            });
            hf.vs = std::move(next);
            hf.constants = seed.constants(t, k + 1);
        }
        out.frames.push_back(std::move(frame));
    }
    return out;
}

}  // namespace nisakns
