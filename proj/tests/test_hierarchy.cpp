#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "nisakns/hierarchy.hpp"
#include "nisakns/soliton.hpp"
#include "nisakns/studies.hpp"

using namespace nisakns;

namespace {

const std::vector<GaussianBump> bumps{{cplx(0.6, 0.2), -0.7, 1.1}, {cplx(-0.3, 0.5), 0.9, 0.8}};

IntegralConstants quadratic_constants(const DiagonalGenerator& j) {
    auto c = IntegralConstants::zero(2, j.dim());
    c.alphas[2] = j.matrix();
    return c;
}

FieldGrid closed_form_potential(const mkdv::SolitonSpec& spec) {
    mkdv::ScalarField u(spec.grid);
    for (std::size_t ti = 0; ti < spec.grid.nt(); ++ti)
        for (std::size_t xi = 0; xi < spec.grid.nx(); ++xi)
            u.at(ti, xi) = mkdv::closed_form_u(spec, spec.grid.x(xi), spec.grid.t()[ti]);
    return u.to_potential();
}

}  // namespace

TEST_CASE("zero potential gives V_i = alpha_i + f_i J x", "[hierarchy]") {
    const DiagonalGenerator j({2.0, -0.5, -1.5});
    const Grid g(-4.0, 4.0, 81, {0.0});
    const SpectralPolynomial f({0.0, cplx(0.5, 0.5), 0.0, 2.0});
    auto c = IntegralConstants::zero(3, 3);
    c.alphas[1] = SquareMatrix::diagonal(std::vector<cplx>{1.0, 0.0, -1.0});
    c.alphas[3] = SquareMatrix::diagonal(std::vector<cplx>{-2.0, 3.0, -1.0});
    const Profile p(g.nx(), SquareMatrix(3));
    const auto hf = build_hierarchy(p, g, j, f, c, 0.0);
    REQUIRE(hf.order() == 3);
    double err = 0.0;
    for (std::size_t i = 0; i <= 3; ++i)
        for (std::size_t xi = 0; xi < g.nx(); ++xi)
            err = std::max(err, (hf.vs[i][xi] - (c.alphas[i] + j.matrix() * (f[i] * g.x(xi)))).max_abs());
    CHECK(err == 0.0);
}

TEST_CASE("Gaussian potential: recurrence residual converges at second order", "[hierarchy]") {
    const auto study = gaussian_coefficient_study(bumps, -10.0, 10.0, 2001, 3);
    INFO("order " << study.order);
    CHECK(study.order > 1.8);
    CHECK(study.order < 2.2);
    for (std::size_t k = 1; k < study.levels.size(); ++k) CHECK(study.levels[k].residual < study.levels[k - 1].residual);
}

TEST_CASE("Gaussian potential: V_n commutes with J and every V_i is trace-free", "[hierarchy]") {
    const DiagonalGenerator j({1.0, -1.0});
    const Grid g(-10.0, 10.0, 1001, {0.0});
    const Profile p = gaussian_potential(g, 2, bumps);
    const auto hf = build_hierarchy(p, g, j, SpectralPolynomial::monomial(2), quadratic_constants(j), 0.0);
    const auto res = coefficient_residual(p, hf);
    CHECK(res.commutator == 0.0);
    for (const auto& level : hf.vs)
        for (const auto& v : level) CHECK(std::abs(v.trace()) < 1e-12);
}

TEST_CASE("left-edge limits recover the integral constants", "[hierarchy]") {
    const DiagonalGenerator j({1.0, -1.0});
    const Grid g(-10.0, 10.0, 1001, {0.0});
    const Profile p = gaussian_potential(g, 2, bumps);
    const auto hf = build_hierarchy(p, g, j, SpectralPolynomial::monomial(2), quadratic_constants(j), 0.0);
    const auto report = asymptotic_check(hf);
    CHECK(report.max_deviation() < 1e-12);
}

TEST_CASE("closed-form soliton satisfies the evolution equation to second order", "[hierarchy]") {
    mkdv::SolitonSpec base;
    std::vector<double> hs, rs;
    for (std::size_t nx : {501u, 1001u, 2001u}) {
        const double h = 20.0 / static_cast<double>(nx - 1);
        mkdv::SolitonSpec spec = base;
        spec.grid = Grid(-10.0, 10.0, nx, {0.05 - h, 0.05, 0.05 + h});
        const FieldGrid p = closed_form_potential(spec);
        std::vector<HierarchyFields> hf;
        for (std::size_t ti = 0; ti < 3; ++ti)
            hf.push_back(build_hierarchy(p, ti, mkdv::generator(), mkdv::flow(), mkdv::target_constants()));
        hs.push_back(h);
        rs.push_back(evolution_residual(p, hf));
    }
    const double order = observed_order(hs, rs);
    INFO("residuals " << rs[0] << " " << rs[1] << " " << rs[2]);
    CHECK(order > 1.8);
    CHECK(order < 2.2);
}

TEST_CASE("zero-curvature residual of the closed-form soliton is small", "[hierarchy]") {
    mkdv::SolitonSpec spec;
    const double h = 0.01;
    spec.grid = Grid(-10.0, 10.0, 2001, {0.05 - h, 0.05, 0.05 + h});
    const FieldGrid p = closed_form_potential(spec);
    const auto hf = build_hierarchy(p, 1, mkdv::generator(), mkdv::flow(), mkdv::target_constants());
    const auto samples = default_lambda_samples(mkdv::flow());
    CHECK(zero_curvature_residual(p, hf, samples, 1) < 5e-2);
}

TEST_CASE("hierarchy preconditions", "[hierarchy]") {
    const DiagonalGenerator j({1.0, -1.0});
    const Grid g(-5.0, 5.0, 101, {0.0});
    const auto c = quadratic_constants(j);

    SECTION("potential must decay at the edges") {
        Profile p(g.nx(), SquareMatrix(2, {0.0, 0.1, 0.1, 0.0}));
        try {
            build_hierarchy(p, g, j, SpectralPolynomial::monomial(2), c, 0.0);
            FAIL("expected decay error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::decay);
        }
    }
    SECTION("potential must be off-diagonal") {
        Profile p(g.nx(), SquareMatrix(2));
        p[50](0, 0) = 1.0;
        CHECK_THROWS_AS(build_hierarchy(p, g, j, SpectralPolynomial::monomial(2), c, 0.0), Error);
    }
    SECTION("flow degree may not exceed n") {
        const Profile p(g.nx(), SquareMatrix(2));
        CHECK_THROWS_AS(build_hierarchy(p, g, j, SpectralPolynomial::monomial(3), c, 0.0), Error);
    }
    SECTION("constants must be diagonal and trace-free") {
        const Profile p(g.nx(), SquareMatrix(2));
        auto bad = c;
        bad.alphas[0] = SquareMatrix(2, {1.0, 0.0, 0.0, 1.0});
        CHECK_THROWS_AS(build_hierarchy(p, g, j, SpectralPolynomial::monomial(2), bad, 0.0), Error);
    }
}
