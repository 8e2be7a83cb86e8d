#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "nisakns/soliton.hpp"
#include "nisakns/stencil.hpp"
#include "nisakns/studies.hpp"

using namespace nisakns;

namespace {

mkdv::SolitonSpec spec_with(std::vector<double> t, std::optional<cplx> second = std::nullopt) {
    mkdv::SolitonSpec spec;
    spec.t_hi = 0.2;
    spec.grid = Grid(-10.0, 10.0, 2001, std::move(t));
    spec.second_lambda = second;
    return spec;
}

}  // namespace

TEST_CASE("dressing field equals lambda0 [[tanh, sech], [sech, -tanh]] of 2 xi", "[soliton]") {
    const auto spec = spec_with({0.0, 0.1});
    const auto one = mkdv::one_soliton(spec);
    double err = 0.0;
    for (std::size_t ti = 0; ti < 2; ++ti)
        for (std::size_t xi = 0; xi < spec.grid.nx(); ++xi) {
            const double t = spec.grid.t()[ti];
            const double x = spec.grid.x(xi);
            const double l = -1.0 / std::sqrt(1.0 - 2.0 * t);
            const double z = 2.0 * (l * x - 4.0 * l - std::log(-l) - 4.0);
            const SquareMatrix expect(2, {l * std::tanh(z), l / std::cosh(z), l / std::cosh(z), -l * std::tanh(z)});
            err = std::max(err, (one.s.at(ti, xi) - expect).max_abs());
        }
    CHECK(err < 1e-12);
}

TEST_CASE("one-soliton: Darboux route equals 2 lambda0 sech 2 xi", "[soliton]") {
    const auto spec = spec_with({0.0, 0.05, 0.1});
    const auto one = mkdv::one_soliton(spec);
    CHECK(one.max_difference < 1e-10);
    CHECK(std::abs(one.darboux.at(0, 1000) - (-2.0)) < 1e-10);
    CHECK(spec.grid.x(1000) == 0.0);
}

TEST_CASE("seed-route dressing reproduces the closed-form dressing field", "[soliton]") {
    const auto spec = spec_with({0.0, 0.05, 0.1});
    const auto sys = mkdv::dressed_system(spec, 1);
    double err = 0.0;
    for (std::size_t ti = 0; ti < 3; ++ti)
        for (std::size_t xi = 0; xi < spec.grid.nx(); ++xi)
            err = std::max(err, (sys.frames[0].s_field.at(ti, xi) -
                                 mkdv::closed_form_s(spec, spec.grid.x(xi), spec.grid.t()[ti]))
                                    .max_abs());
    CHECK(err < 1e-10);
}

TEST_CASE("seeding with alpha - beta recovers alpha at the left edge", "[soliton]") {
    for (std::size_t solitons : {1u, 2u}) {
        const auto spec = spec_with({0.0, 0.05, 0.1}, -1.5);
        const auto sys = mkdv::dressed_system(spec, solitons);
        for (const auto& hf : sys.v) {
            const auto report = asymptotic_check(hf);
            INFO("solitons " << solitons << " t " << hf.t);
            CHECK(report.max_deviation() < 1e-6);
            CHECK((hf.constants.alphas[3] - mkdv::target_constants().alphas[3]).max_abs() == 0.0);
            CHECK(hf.constants.alphas[1].max_abs() < 1e-15);
        }
    }
}

TEST_CASE("closed-form pair integral matches quadrature", "[soliton]") {
    CHECK(std::abs(mkdv::pair_integral(-1.0, -1.5, 0.1) - 0.182356452502271532046459893131) < 1e-14);
    CHECK(std::abs(mkdv::pair_integral(-1.0, 1.0, 0.2) - (-0.255412811882995360106474125238)) < 1e-14);
    CHECK(std::abs(mkdv::pair_integral(-1.0, -1.0, 0.3) - 0.458145365937077504836187990255) < 1e-14);
    const GaussLegendre rule(8);
    const auto f = SpectralPolynomial::monomial(3);
    const SpectralPath a{-0.8, f}, b{1.3, f};
    const double q = rule.integrate([&](double s) { return (evolve_lambda(a, s) * evolve_lambda(b, s)).real(); },
                                    0.0, 0.15, 16);
    CHECK(std::abs(mkdv::pair_integral(-0.8, 1.3, 0.15) - q) < 1e-13);
}

TEST_CASE("closed-form and quadrature seed phases agree", "[soliton]") {
    const auto spec = spec_with({0.0, 0.1});
    const auto closed = mkdv::seed_for(spec, 1);
    const TrivialSeed quad(closed.generator(), closed.flow(), closed.target(), closed.frames());
    for (const auto& path : closed.frames()[0].lambdas)
        for (double t : {0.05, 0.1, 0.2}) {
            const auto a = closed.phases(path, t);
            const auto b = quad.phases(path, t);
            CHECK(std::abs(a[0] - b[0]) < 1e-12);
            CHECK(std::abs(a[1] - b[1]) < 1e-12);
        }
}

TEST_CASE("two-soliton keeps the reduction and stays regular", "[soliton]") {
    const auto spec = spec_with({0.0, 0.05, 0.1}, -1.5);
    const auto two = mkdv::two_soliton(spec);
    CHECK(two.reduction_error < 1e-10);
    CHECK(two.imag_part < 1e-10);
    CHECK(two.det_sign_constant);
    CHECK(two.min_normalized_det > 1e-8);
    // peak at the collision: 2|lambda_0| + 2|lambda_1|
    double peak = 0.0;
    for (std::size_t xi = 0; xi < spec.grid.nx(); ++xi) peak = std::max(peak, std::abs(two.u.at(0, xi)));
    CHECK(peak == Catch::Approx(5.0).epsilon(1e-6));
}

TEST_CASE("two-soliton zero-curvature residual converges at second order", "[soliton]") {
    const auto spec = spec_with({0.0, 0.05, 0.1}, -1.5);
    const auto study = mkdv::zero_curvature_study(spec, 2, 3, 0.05, 0.25);
    INFO("order " << study.order);
    CHECK(study.order > 1.8);
    CHECK(study.order < 2.2);
}

TEST_CASE("one-soliton zero-curvature residual converges at second order", "[soliton]") {
    const auto spec = spec_with({0.0, 0.05, 0.1});
    const auto study = mkdv::zero_curvature_study(spec, 1, 3, 0.05, 1.0);
    INFO("order " << study.order);
    CHECK(study.order > 1.8);
    CHECK(study.order < 2.2);
}

TEST_CASE("MKdV residuals: recurrence form converges, printed form is tabulated", "[soliton]") {
    const auto spec = spec_with({0.0, 0.05, 0.1});
    const auto study = mkdv::residual_study(spec, 3, 0.05, 1.0);
    CHECK(study.recurrence.order > 1.8);
    CHECK(study.recurrence.order < 2.2);
    CHECK(study.printed.levels.size() == 3);
    CHECK(study.finest.terms.size() >= 4);
    for (const auto& t : study.finest.terms) CHECK(std::isfinite(t.max_abs));
}

TEST_CASE("MKdV residual refuses truncated domains", "[soliton]") {
    mkdv::SolitonSpec spec;
    spec.grid = Grid(-4.0, 4.0, 401, {0.0, 0.01, 0.02});
    mkdv::ScalarField u(spec.grid);
    for (std::size_t ti = 0; ti < 3; ++ti)
        for (std::size_t xi = 0; xi < spec.grid.nx(); ++xi)
            u.at(ti, xi) = mkdv::closed_form_u(spec, spec.grid.x(xi), spec.grid.t()[ti]);
    try {
        mkdv::mkdv_residual(u);
        FAIL("expected truncation error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::truncation);
    }
}

TEST_CASE("soliton parameters are validated", "[soliton]") {
    auto spec = spec_with({0.0});
    SECTION("t window beyond the blow-up of lambda0") {
        spec.t_hi = 0.6;
        CHECK_THROWS_AS(spec.validate(), Error);
    }
    SECTION("complex second spectral value") {
        spec.second_lambda = cplx(-1.5, 0.2);
        CHECK_THROWS_AS(spec.validate(), Error);
    }
    SECTION("second spectral value that blows up inside the window") {
        spec.second_lambda = -1.5;
        spec.t_hi = 0.3;
        try {
            spec.validate();
            FAIL("expected blow-up");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::blow_up);
        }
    }
    SECTION("second spectral value coinciding with +-lambda0") {
        spec.second_lambda = 1.0;
        try {
            spec.validate();
            FAIL("expected degenerate dressing");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::degenerate_dressing);
        }
    }
    SECTION("grid time outside the window") {
        spec.grid = Grid(-10.0, 10.0, 201, {0.0, 0.3});
        CHECK_THROWS_AS(spec.validate(), Error);
    }
}
