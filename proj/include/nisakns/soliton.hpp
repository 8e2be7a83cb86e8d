#pragma once

// Solitons of the non-isospectral MKdV equation
//
//   u_t + (1 - x/4)(u_xxx + 6 u^2 u_x) - (3/4) u_xx - u^3 - (1/2) u_x int_{-inf}^x u^2 = 0
//
// from the N = 2 hierarchy with J = diag(1, -1), f = lambda^3, n = 3 and
// constants alpha_3 = -4J, alpha_2 = alpha_1 = alpha_0 = 0. The potential is
// P = [[0, u], [-u, 0]], and lambda_0(t) = -(kappa0 - 2t)^{-1/2}.
//
// One dressing of the trivial seed at Lambda = diag(lambda_0, -lambda_0) gives
//   xi = lambda_0 x - 4 lambda_0 - ln(-lambda_0) + c0,
//   S  = lambda_0 [[tanh 2xi, sech 2xi], [sech 2xi, -tanh 2xi]],
//   u  = 2 lambda_0 sech 2xi.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
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
#include "nisakns/seed.hpp"
#include "nisakns/spectral_flow.hpp"
#include "nisakns/stencil.hpp"

namespace nisakns::mkdv {

inline DiagonalGenerator generator() { return DiagonalGenerator({1.0, -1.0}); }
inline SpectralPolynomial flow() { return SpectralPolynomial::monomial(3); }
inline constexpr std::size_t order = 3;

/// alpha_3 = -4J, all others zero.
inline IntegralConstants target_constants() {
    auto c = IntegralConstants::zero(order, 2);
    c.alphas[3] = generator().matrix() * -4.0;
    return c;
}

inline SpectralPath path(cplx initial) { return SpectralPath{initial, flow()}; }

struct SolitonSpec {
    double kappa0 = 1.0;
    double c0 = -4.0;
    double t_lo = -0.4;
    double t_hi = 0.4;
    Grid grid{-10.0, 10.0, 2001, {0.0, 0.05, 0.1}};
    std::optional<cplx> second_lambda;  // lambda_1(0) of the second frame
    double second_shift = 0.0;          // phase offset of the second frame

    double lambda0(double t) const {
        if (!(kappa0 - 2.0 * t > 0.0)) {
            throw Error(ErrorKind::blow_up, "kappa0 - 2t must stay positive; critical time " +
                                                std::to_string(kappa0 / 2.0),
                        kappa0 / 2.0);
        }
        return -1.0 / std::sqrt(kappa0 - 2.0 * t);
    }

    void require_in_window(double t) const {
        if (t < t_lo || t > t_hi) {
            throw Error(ErrorKind::domain, "t = " + std::to_string(t) + " lies outside the window [" +
                                               std::to_string(t_lo) + ", " + std::to_string(t_hi) + "]");
        }
    }

    void validate() const {
        if (!(kappa0 > 0.0)) throw Error(ErrorKind::domain, "kappa0 must be positive");
        if (!(t_lo <= 0.0 && 0.0 <= t_hi)) throw Error(ErrorKind::domain, "the t window must contain 0");
        lambda0(t_hi);
        for (double t : grid.t()) require_in_window(t);
        if (!second_lambda) return;
        const cplx mu = *second_lambda;
        if (mu.imag() != 0.0) throw Error(ErrorKind::domain, "second_lambda must be real (complex solitons are not supported)");
        if (mu.real() == 0.0) throw Error(ErrorKind::domain, "second_lambda must be nonzero");
        const double kappa1 = 1.0 / (mu.real() * mu.real());
        if (!(kappa1 - 2.0 * t_hi > 0.0)) {
            throw Error(ErrorKind::blow_up, "second_lambda leaves its branch inside the t window; critical time " +
                                                std::to_string(kappa1 / 2.0),
                        kappa1 / 2.0);
        }
        if (std::abs(kappa1 - kappa0) < Tolerances{}.degenerate) {
            throw Error(ErrorKind::degenerate_dressing, "second_lambda coincides with +-lambda_0",
                        std::abs(kappa1 - kappa0));
        }
    }
};

/// int_0^t a(s) b(s) ds for two cubic-flow paths with real initial values:
/// sa sb [ln(sqrt(ka) + sqrt(kb)) - ln(sqrt(ka - 2t) + sqrt(kb - 2t))].
inline double pair_integral(double a0, double b0, double t) {
    const double ka = 1.0 / (a0 * a0);
    const double kb = 1.0 / (b0 * b0);
    const double sign = (a0 < 0) == (b0 < 0) ? 1.0 : -1.0;
    return sign * (std::log(std::sqrt(ka) + std::sqrt(kb)) - std::log(std::sqrt(ka - 2 * t) + std::sqrt(kb - 2 * t)));
}

/// Closed-form seed phases for real cubic-flow paths when the seed carries
/// alpha_1 = -sum_f Lambda_f:
///   theta_1 = -4 (lambda(t) - lambda(0)) - sum_f int_0^t lambda_f lambda,
///   theta_2 = -theta_1.
inline PhaseFunction closed_form_phases(std::vector<double> frame_lambdas) {
    return [fl = std::move(frame_lambdas)](const SpectralPath& p, double t) {
        if (p.initial.imag() != 0.0) throw Error(ErrorKind::domain, "closed-form phases need a real spectral path");
        const double l0 = p.initial.real();
        const double lt = evolve_lambda(p, t).real();
        double th = -4.0 * (lt - l0);
        for (double f : fl) th -= pair_integral(f, l0, t);
        return std::vector<cplx>{th, -th};
    };
}

inline double xi(const SolitonSpec& spec, double x, double t) {
    const double l = spec.lambda0(t);
    return l * x - 4.0 * l - std::log(-l) + spec.c0;
}

/// C_0(t) = exp(-4 lambda_0 - ln(-lambda_0) + c0).
inline double c0_factor(const SolitonSpec& spec, double t) {
    const double l = spec.lambda0(t);
    return std::exp(-4.0 * l - std::log(-l) + spec.c0);
}

inline SquareMatrix closed_form_s(const SolitonSpec& spec, double x, double t) {
    const double l = spec.lambda0(t);
    const double z = 2.0 * xi(spec, x, t);
    const double th = std::tanh(z);
    const double sh = 1.0 / std::cosh(z);
    return SquareMatrix(2, {l * th, l * sh, l * sh, -l * th});
}

inline double closed_form_u(const SolitonSpec& spec, double x, double t) {
    return 2.0 * spec.lambda0(t) / std::cosh(2.0 * xi(spec, x, t));
}

/// H = [[C_0 e^{lambda_0 x}, -C_0^{-1} e^{-lambda_0 x}], [C_0^{-1} e^{-lambda_0 x}, C_0 e^{lambda_0 x}]].
inline SquareMatrix frame_h(const SolitonSpec& spec, double x, double t) {
    const double e = std::exp(xi(spec, x, t));  // C_0 e^{lambda_0 x}
    return SquareMatrix(2, {e, -1.0 / e, 1.0 / e, e});
}

/// Real samples u(x, t) on a grid, t-major.
struct ScalarField {
    Grid grid;
    std::vector<double> u;

    explicit ScalarField(Grid g) : grid(std::move(g)), u(grid.nt() * grid.nx(), 0.0) {}

    double at(std::size_t ti, std::size_t xi) const { return u[ti * grid.nx() + xi]; }
    double& at(std::size_t ti, std::size_t xi) { return u[ti * grid.nx() + xi]; }
    std::span<const double> slice(std::size_t ti) const {
        return std::span<const double>(u).subspan(ti * grid.nx(), grid.nx());
    }

    /// P = [[0, u], [-u, 0]].
    FieldGrid to_potential() const {
        FieldGrid p(grid, 2);
        for (std::size_t ti = 0; ti < grid.nt(); ++ti)
            for (std::size_t xi = 0; xi < grid.nx(); ++xi) {
                const double v = at(ti, xi);
                p.set(ti, xi, SquareMatrix(2, {0.0, v, -v, 0.0}));
            }
        return p;
    }
};

/// Offsets that make the seed columns Phi(+-lambda) m reproduce the frame
/// phase: m = (e^d, e^-d) for +lambda and (-e^-d, e^d) for -lambda.
inline FrameSpec symmetric_frame(double lambda_initial, double offset) {
    const double e = std::exp(offset);
    return FrameSpec{{path(lambda_initial), path(-lambda_initial)}, {{e, 1.0 / e}, {-1.0 / e, e}}};
}

/// Trivial seed for one or two dressings: frame 1 at +-lambda_0 with the
/// offset that turns its phase into xi, frame 2 at +-second_lambda.
inline TrivialSeed seed_for(const SolitonSpec& spec, std::size_t solitons) {
    spec.validate();
    const double l0 = spec.lambda0(0.0);
    std::vector<FrameSpec> frames{symmetric_frame(l0, spec.c0 - 4.0 * l0 - std::log(-l0))};
    std::vector<double> fl{l0};
    if (solitons >= 2) {
        if (!spec.second_lambda) throw Error(ErrorKind::config, "a 2-soliton needs second_lambda");
        const double mu = spec.second_lambda->real();
        frames.push_back(symmetric_frame(mu, spec.second_shift));
        fl.push_back(mu);
    }
    return TrivialSeed(generator(), flow(), target_constants(), std::move(frames), closed_form_phases(std::move(fl)));
}

struct SeedState {
    Profile p;           // P = 0
    HierarchyFields hf;  // V_3 = (x - 4)J, V_2 = V_0 = 0, V_1 = -Lambda
    TrivialSeed seed;

    /// Phi(x, t; lambda) = diag(e^{lambda x + theta}, e^{-lambda x - theta}),
    /// lambda given by its value at time hf.t.
    SquareMatrix phi(double x, cplx lambda) const {
        const SpectralPath back{lambda, flow()};
        const cplx l0 = evolve_lambda(back, -hf.t);
        const auto th = seed.phases(path(l0), hf.t);
        return SquareMatrix(2, {std::exp(lambda * x + th[0]), 0.0, 0.0, std::exp(-lambda * x + th[1])});
    }
};

inline SeedState trivial_seed(const SolitonSpec& spec, double t) {
    spec.require_in_window(t);
    TrivialSeed seed = seed_for(spec, 1);
    const Grid g = spec.grid.with_times({t});
    auto hf = seed.hierarchy(g, t);
    return SeedState{Profile(g.nx(), SquareMatrix(2)), std::move(hf), std::move(seed)};
}

struct OneSoliton {
    ScalarField darboux;
    ScalarField closed_form;
    FieldGrid s;
    double max_difference = 0.0;
};

/// u from P' = [J, S], S = H Lambda H^-1 with the closed-form frame H,
/// alongside 2 lambda_0 sech 2 xi.
inline OneSoliton one_soliton(const SolitonSpec& spec) {
    spec.validate();
    const Grid& g = spec.grid;
    OneSoliton out{ScalarField(g), ScalarField(g), FieldGrid(g, 2), 0.0};
    const DiagonalGenerator j = generator();
    for (std::size_t ti = 0; ti < g.nt(); ++ti) {
        const double t = g.t()[ti];
        const double l = spec.lambda0(t);
        const std::vector<cplx> lv{l, -l};
        for (std::size_t xi = 0; xi < g.nx(); ++xi) {
            const double x = g.x(xi);
            SquareMatrix s = build_s(frame_h(spec, x, t), lv);
            const SquareMatrix p = transform_p(SquareMatrix(2), j, s);
            out.darboux.at(ti, xi) = p(0, 1).real();
            out.closed_form.at(ti, xi) = closed_form_u(spec, x, t);
            out.max_difference = std::max(out.max_difference, std::abs(out.darboux.at(ti, xi) - out.closed_form.at(ti, xi)));
            out.s.set(ti, xi, std::move(s));
        }
    }
    return out;
}

/// Seed-route dressing (one or two frames) on the SolitonSpec grid.
inline DressedSystem dressed_system(const SolitonSpec& spec, std::size_t solitons, const Tolerances& tol = {}) {
    return dress(seed_for(spec, solitons), spec.grid, tol);
}

struct TwoSoliton {
    ScalarField u;
    DressedSystem system;
    double reduction_error = 0.0;   // max |p + q| of P''
    double imag_part = 0.0;         // max |Im p|
    double min_normalized_det = 0.0; // min |det H_2| after unit column scaling
    bool det_sign_constant = true;   // Re(det H_2 conj(det H_2(x_min))) > 0 everywhere
};

inline TwoSoliton two_soliton(const SolitonSpec& spec, const Tolerances& tol = {}) {
    if (!spec.second_lambda) throw Error(ErrorKind::config, "a 2-soliton needs second_lambda");
    TwoSoliton out{ScalarField(spec.grid), dressed_system(spec, 2, tol)};
    const Grid& g = spec.grid;
    out.min_normalized_det = 1e300;
    const DarbouxFrame& f2 = out.system.frames.at(1);
    for (std::size_t ti = 0; ti < g.nt(); ++ti) {
        cplx ref = 0.0;
        for (std::size_t xi = 0; xi < g.nx(); ++xi) {
            const SquareMatrix& p = out.system.p.at(ti, xi);
            out.u.at(ti, xi) = p(0, 1).real();
            out.reduction_error = std::max(out.reduction_error, std::abs(p(0, 1) + p(1, 0)));
            out.imag_part = std::max(out.imag_part, std::abs(p(0, 1).imag()));
            SquareMatrix h = f2.h_field.at(ti, xi);
            for (std::size_t c = 0; c < 2; ++c) {
                const double m = std::max(std::abs(h(0, c)), std::abs(h(1, c)));
                h(0, c) /= m;
                h(1, c) /= m;
            }
            const cplx d = det(h);
            out.min_normalized_det = std::min(out.min_normalized_det, std::abs(d));
            if (xi == 0) ref = d;
            if ((d * std::conj(ref)).real() <= 0.0) out.det_sign_constant = false;
        }
    }
    return out;
}

struct MkdvTerm {
    std::string name;
    double max_abs;
};

struct MkdvReport {
    double recurrence_residual = 0.0;  // P_t - V_{0,x}^off + [P, V_0^diag]
    double printed_residual = 0.0;     // the printed scalar equation
    std::vector<MkdvTerm> terms;       // printed-equation terms, max over the interior
};

/// Both residuals over interior (t, x). The nonlocal integral starts at
/// x_min, so u(x_min)^2 must be below 1e-16.
inline MkdvReport mkdv_residual(const ScalarField& u) {
    const Grid& g = u.grid;
    if (g.nt() < 3) throw Error(ErrorKind::stencil, "the MKdV residual needs at least three t samples");
    const double dt = g.dt();
    for (std::size_t ti = 0; ti < g.nt(); ++ti) {
        const double edge = u.at(ti, 0) * u.at(ti, 0);
        if (!(edge < 1e-16)) {
            throw Error(ErrorKind::truncation, "u(x_min)^2 = " + std::to_string(edge) +
                                                   " is too large to truncate the nonlocal integral",
                        edge);
        }
    }

    MkdvReport report;
    const char* names[] = {"u_t", "(1-x/4) u_xxx", "(1-x/4) 6u^2 u_x", "-(3/4) u_xx", "-u^3",
                           "-(1/2) u_x int u^2"};
    std::vector<double> term_max(6, 0.0);
    const double h = g.h();
    for (std::size_t k = 1; k + 1 < g.nt(); ++k) {
        const auto s = u.slice(k);
        const auto ux = derivative<double>(s, h);
        const auto uxx = second_derivative<double>(s, h);
        const auto uxxx = third_derivative<double>(s, h);
        std::vector<double> sq(g.nx());
        for (std::size_t xi = 0; xi < g.nx(); ++xi) sq[xi] = s[xi] * s[xi];
        const auto integral = cumulative_trapezoid<double>(sq, h, 0.0);
        for (std::size_t xi = edge_margin; xi + edge_margin < g.nx(); ++xi) {
            std::vector<double> samples;
            for (std::size_t q = 0; q < g.nt(); ++q) samples.push_back(u.at(q, xi));
            const double x = g.x(xi);
            const double w = 1.0 - x / 4.0;
            const double v = s[xi];
            const double terms[6] = {time_derivative<double>(samples, k, dt), w * uxxx[xi], w * 6.0 * v * v * ux[xi],
                                     -0.75 * uxx[xi], -v * v * v, -0.5 * ux[xi] * integral[xi]};
            double r = 0.0;
            for (std::size_t q = 0; q < 6; ++q) {
                r += terms[q];
                term_max[q] = std::max(term_max[q], std::abs(terms[q]));
            }
            report.printed_residual = std::max(report.printed_residual, std::abs(r));
        }
    }
    for (std::size_t q = 0; q < 6; ++q) report.terms.push_back({names[q], term_max[q]});

    const FieldGrid p = u.to_potential();
    std::vector<HierarchyFields> hf;
    for (std::size_t ti = 0; ti < g.nt(); ++ti)
        hf.push_back(build_hierarchy(p, ti, generator(), flow(), target_constants()));
    report.recurrence_residual = evolution_residual(p, hf);
    return report;
}

}  // namespace nisakns::mkdv
