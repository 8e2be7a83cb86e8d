// Acceptance run: one PASS/FAIL line per criterion on the desk-scale grid
// (x in [-10, 10], nx = 2001, t = 0, 0.05, 0.1). Exit status is the number
// of failing criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "nisakns/darboux.hpp"
#include "nisakns/scenario.hpp"
#include "nisakns/soliton.hpp"
#include "nisakns/studies.hpp"

using namespace nisakns;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b) {
    char buf[200];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
    char buf[240];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

bool in_order_window(double p) { return p >= 1.8 && p <= 2.2; }

mkdv::SolitonSpec desk_spec() {
    mkdv::SolitonSpec spec;
    spec.t_hi = 0.2;
    spec.second_lambda = -1.5;
    spec.grid = Grid(-10.0, 10.0, 2001, {0.0, 0.05, 0.1});
    return spec;
}

Outcome g_identity() {
    const double l0 = -1.0;
    const std::vector<cplx> ls{l0, -l0};
    const auto g = compute_g(SpectralPolynomial::monomial(3), ls, 2);
    const double err = std::max({std::abs(g[0] - l0 * l0), std::abs(g[1]), std::abs(g[2] - 1.0), std::abs(g[3])});
    return {err < 1e-14, fmt("max coefficient error %.3e (< 1e-14)", err)};
}

Outcome beta_table() {
    double err = 0.0;
    for (double t : {0.0, 0.05, 0.1}) {
        const double l = -1.0 / std::sqrt(1.0 - 2.0 * t);
        const std::vector<cplx> ls{l, -l};
        const auto f = SpectralPolynomial::monomial(3);
        const auto b = beta_shift(f, SquareMatrix::diagonal(ls), compute_g(f, ls, 2), 3);
        err = std::max({err, b.betas[0].max_abs(), (b.betas[1] - SquareMatrix::diagonal(ls)).max_abs(),
                        b.betas[2].max_abs(), b.betas[3].max_abs()});
    }
    return {err < 1e-13, fmt("max entry error %.3e (< 1e-13)", err)};
}

Outcome dressing_closed_form() {
    auto spec = desk_spec();
    spec.grid = spec.grid.with_times({0.0, 0.1});
    const auto sys = mkdv::dressed_system(spec, 1);
    double err = 0.0;
    for (std::size_t ti = 0; ti < 2; ++ti)
        for (std::size_t xi = 0; xi < spec.grid.nx(); ++xi) {
            const double t = spec.grid.t()[ti];
            const double l = -1.0 / std::sqrt(1.0 - 2.0 * t);
            const double z = 2.0 * (l * spec.grid.x(xi) - 4.0 * l - std::log(-l) + spec.c0);
            const SquareMatrix expect(2, {l * std::tanh(z), l / std::cosh(z), l / std::cosh(z), -l * std::tanh(z)});
            err = std::max(err, (sys.frames[0].s_field.at(ti, xi) - expect).max_abs());
        }
    return {err < 1e-12, fmt("max entry error %.3e (< 1e-12)", err)};
}

Outcome dual_route() {
    const auto spec = desk_spec();
    const auto one = mkdv::one_soliton(spec);
    const double u00 = one.darboux.at(0, 1000);
    const bool ok = one.max_difference < 1e-10 && std::abs(u00 + 2.0) < 1e-10 && spec.grid.x(1000) == 0.0;
    return {ok, fmt("max |u - 2 l0 sech 2xi| %.3e (< 1e-10), u(0,0) = %.15f", one.max_difference, u00)};
}

Outcome spectral_flow() {
    SpectralPath p{-1.0, SpectralPolynomial::monomial(3)};
    double closed = 0.0;
    for (double t = -0.4; t <= 0.4 + 1e-12; t += 0.01) {
        const cplx l = evolve_lambda(p, t);
        closed = std::max(closed, std::abs(l * l - 1.0 / (1.0 - 2.0 * t)));
    }
    const cplx exact = evolve_lambda(p, 0.2);
    p.method = EvolutionMethod::rk4;
    const double rk4 = std::abs(evolve_lambda(p, 0.2) - exact);
    return {closed < 1e-10 && rk4 < 1e-8,
            fmt("closed form %.3e (< 1e-10), rk4 at t = 0.2 %.3e (< 1e-8)", closed, rk4)};
}

Outcome zero_curvature_order() {
    const auto study = mkdv::zero_curvature_study(desk_spec(), 1, 3, 0.05, 1.0);
    return {in_order_window(study.order),
            fmt("order %.3f over nx 501/1001/2001 (in [1.8, 2.2]), finest residual %.3e", study.order,
                study.levels.back().residual)};
}

Outcome constant_shift() {
    const auto spec = desk_spec();
    const auto sys = mkdv::dressed_system(spec, 1);
    double err = 0.0;
    for (const auto& hf : sys.v) {
        const SquareMatrix jm = mkdv::generator().matrix();
        const Grid& g = hf.grid;
        const SquareMatrix a3 = hf.vs[3][0] - jm * g.x(0);
        const SquareMatrix a1 = hf.vs[1][0];
        err = std::max({err, (a3 - jm * (-4.0)).max_abs(), a1.max_abs(), asymptotic_check(hf).max_deviation()});
    }
    return {err < 1e-6, fmt("max left-edge deviation %.3e (< 1e-6)", err)};
}

Outcome asymptotic_property() {
    const auto spec = desk_spec();
    const auto sys = mkdv::dressed_system(spec, 1);
    const auto a = asymptotic_s_check(sys.frames[0], 0, mkdv::generator());
    const double target = 4.0 * std::abs(spec.lambda0(0.0));
    const double rate = a.left_rate.value_or(std::nan(""));
    const bool rate_ok = std::abs(rate - target) <= 0.1 * target;
    const bool permuted = a.right_permutation == std::vector<std::size_t>{1, 0};
    const bool right_ok = a.right_offdiag < 1e-8 && a.right_deviation < 1e-8 && permuted;
    std::string detail = fmt("|S - Lambda|_inf left rate %.4f vs 4|l0| = %.4f (10%%); diagonal-only rate %.4f", rate,
                             target, a.left_diag_rate.value_or(std::nan("")));
    detail += fmt("; right off-diagonal %.3e, permuted ", a.right_offdiag) + (permuted ? "yes" : "no");
    return {rate_ok && right_ok, detail};
}

Outcome recurrence_oracle() {
    const std::vector<GaussianBump> bumps{{cplx(0.6, 0.2), -0.7, 1.1}, {cplx(-0.3, 0.5), 0.9, 0.8}};
    const auto study = gaussian_coefficient_study(bumps, -10.0, 10.0, 2001, 3);
    return {in_order_window(study.order),
            fmt("order %.3f (in [1.8, 2.2]), finest residual %.3e", study.order, study.levels.back().residual)};
}

Outcome governing_relation() {
    const auto cfg = parse_config(read_file(std::string(NISAKNS_SOURCE_DIR) + "/configs/mkdv_soliton.cfg"));
    const double r = detail::governing_check(make_setup(cfg), 0.05);
    return {r < 1e-8, fmt("max residual over 20 random lambda %.3e (< 1e-8)", r)};
}

Outcome two_soliton() {
    const auto spec = desk_spec();
    const auto two = mkdv::two_soliton(spec);
    const auto study = mkdv::zero_curvature_study(spec, 2, 3, 0.05, 0.25);
    const bool regular = two.det_sign_constant && two.min_normalized_det > 1e-8;
    return {in_order_window(study.order) && two.reduction_error < 1e-10 && regular,
            fmt("order %.3f (in [1.8, 2.2]), |p + q| %.3e (< 1e-10), min normalized det H %.3e", study.order,
                two.reduction_error, two.min_normalized_det)};
}

Outcome mkdv_residual() {
    const auto study = mkdv::residual_study(desk_spec(), 3, 0.05, 1.0);
    std::string detail = fmt("recurrence order %.3f (in [1.8, 2.2]); printed order %.3f, residual %.3e [",
                             study.recurrence.order, study.printed.order, study.finest.printed_residual);
    for (std::size_t i = 0; i < study.finest.terms.size(); ++i)
        detail += (i ? ", " : "") + study.finest.terms[i].name + fmt(" %.2e", study.finest.terms[i].max_abs);
    detail += "]";
    return {in_order_window(study.recurrence.order), detail};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"g-polynomial identity", g_identity},
        {"beta table", beta_table},
        {"dressing field closed form", dressing_closed_form},
        {"1-soliton dual route", dual_route},
        {"spectral flow", spectral_flow},
        {"zero-curvature convergence", zero_curvature_order},
        {"constant-shift round trip", constant_shift},
        {"asymptotic property", asymptotic_property},
        {"recurrence oracle", recurrence_oracle},
        {"governing relation", governing_relation},
        {"2-soliton", two_soliton},
        {"MKdV residual", mkdv_residual},
    };
    const auto start = std::chrono::steady_clock::now();
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        failures += o.pass ? 0 : 1;
        std::printf("%s %2zu %-28s %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%d of %zu criteria failed, %.1f s\n", failures, criteria.size(), secs);
    return failures;
}
