#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "nisakns/spectral_flow.hpp"

using namespace nisakns;

namespace {

SpectralPath cubic(cplx l0) { return SpectralPath{l0, SpectralPolynomial::monomial(3)}; }

}  // namespace

TEST_CASE("cubic flow closed form obeys lambda^2 (kappa - 2t) = 1", "[spectral-flow]") {
    const auto p = cubic(-1.0);
    for (double t : {-0.3, -0.1, 0.0, 0.05, 0.1, 0.2, 0.35}) {
        const cplx l = evolve_lambda(p, t);
        CHECK(std::abs(l * l - 1.0 / (1.0 - 2.0 * t)) < 1e-10);
        CHECK(l.real() < 0.0);
    }
    CHECK(std::abs(evolve_lambda(p, 0.2) - (-1.29099444873580562839308846659)) < 1e-14);
}

TEST_CASE("rk4 agrees with the closed form and converges at fourth order", "[spectral-flow]") {
    auto p = cubic(-1.0);
    const cplx exact = evolve_lambda(p, 0.2);
    p.method = EvolutionMethod::rk4;
    CHECK(std::abs(evolve_lambda(p, 0.2) - exact) < 1e-8);

    p.rk4_step = 0.02;
    const double e1 = std::abs(evolve_lambda(p, 0.2) - exact);
    p.rk4_step = 0.01;
    const double e2 = std::abs(evolve_lambda(p, 0.2) - exact);
    const double ratio = e1 / e2;
    CHECK(ratio > 14.0);
    CHECK(ratio < 18.0);
}

TEST_CASE("rk4 refuses times outside its horizon", "[spectral-flow]") {
    auto p = cubic(-1.0);
    p.method = EvolutionMethod::rk4;
    p.horizon_hi = 0.3;
    CHECK_THROWS_AS(evolve_lambda(p, 0.31), Error);
}

TEST_CASE("quadratic flow follows lambda0 / (1 - lambda0 t)", "[spectral-flow]") {
    const SpectralPath p{cplx(0.4, 0.3), SpectralPolynomial::monomial(2)};
    for (double t : {0.1, 0.5, 1.0}) {
        const cplx expect = p.initial / (1.0 - p.initial * t);
        CHECK(std::abs(evolve_lambda(p, t) - expect) < 1e-13);
    }
}

TEST_CASE("cubic flow reports the blow-up time", "[spectral-flow]") {
    const auto p = cubic(-1.0);
    try {
        evolve_lambda(p, 0.5);
        FAIL("expected blow-up");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::blow_up);
        REQUIRE(e.value().has_value());
        CHECK(std::abs(*e.value() - 0.5) < 1e-12);
    }
}

TEST_CASE("non-monomial flows need rk4", "[spectral-flow]") {
    SpectralPath p{0.5, SpectralPolynomial({1.0, 0.0, 1.0})};
    CHECK_THROWS_AS(evolve_lambda(p, 0.1), Error);
    p.method = EvolutionMethod::rk4;
    // lambda' = 1 + lambda^2: lambda = tan(t + atan(lambda0))
    CHECK(std::abs(evolve_lambda(p, 0.3) - std::tan(0.3 + std::atan(0.5))) < 1e-12);
}

TEST_CASE("g for the cubic flow at +-lambda0 is lambda^2 + lambda0^2", "[spectral-flow]") {
    const auto f = SpectralPolynomial::monomial(3);
    for (double l0 : {-1.0, -1.3, 0.7}) {
        const std::vector<cplx> ls{l0, -l0};
        const auto g = compute_g(f, ls, 2);
        CHECK(std::abs(g[0] - l0 * l0) < 1e-14);
        CHECK(std::abs(g[1]) < 1e-14);
        CHECK(std::abs(g[2] - 1.0) < 1e-14);
        CHECK(g.coeffs.degree() == 2);
    }
}

TEST_CASE("g matches its divided-difference definition", "[spectral-flow]") {
    const SpectralPolynomial f({0.3, -1.0, cplx(0.5, 0.2), 0.0, 2.0});
    const std::vector<cplx> ls{cplx(0.4, 0.1), -0.9, cplx(0.2, -1.1)};
    const auto g = compute_g(f, ls, 3);
    for (cplx z : {cplx(1.7, 0.3), cplx(-0.6, 2.0)}) {
        cplx expect = 0.0;
        for (const cplx l : ls) expect += (f(z) - f(l)) / (z - l);
        expect /= 3.0;
        CHECK(std::abs(g(z) - expect) < 1e-12 * std::abs(expect));
    }
}

TEST_CASE("g does not depend on the order of the spectral values", "[spectral-flow]") {
    const SpectralPolynomial f({0.1, 0.2, 0.3, 0.4, 0.5});
    std::vector<cplx> ls{cplx(0.4, 0.1), -0.9, cplx(0.2, -1.1), 1.3};
    const auto ref = compute_g(f, ls, 4);
    std::sort(ls.begin(), ls.end(), [](cplx a, cplx b) { return a.imag() < b.imag(); });
    do {
        const auto g = compute_g(f, ls, 4);
        for (std::size_t i = 0; i < ref.coeffs.size(); ++i) CHECK(g[i] == ref[i]);
    } while (std::next_permutation(ls.begin(), ls.end(), [](cplx a, cplx b) { return a.imag() < b.imag(); }));
}

TEST_CASE("permutation extremes match exhaustive enumeration", "[spectral-flow]") {
    CHECK(perm_extremes(std::vector<double>{1, -1}, std::vector<double>{-1, 1}).min == -2.0);
    CHECK(perm_extremes(std::vector<double>{1, -1}, std::vector<double>{-1, 1}).max == 2.0);
    std::mt19937 rng(29);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> xs(5), ys(5);
        for (auto& v : xs) v = u(rng);
        for (auto& v : ys) v = u(rng);
        std::vector<std::size_t> perm(5);
        std::iota(perm.begin(), perm.end(), 0);
        double lo = 1e300, hi = -1e300;
        do {
            double s = 0.0;
            for (std::size_t i = 0; i < 5; ++i) s += xs[i] * ys[perm[i]];
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        } while (std::next_permutation(perm.begin(), perm.end()));
        const auto ext = perm_extremes(xs, ys);
        CHECK(std::abs(ext.min - lo) < 1e-12);
        CHECK(std::abs(ext.max - hi) < 1e-12);
    }
}

TEST_CASE("Gamma_J avoidance", "[spectral-flow]") {
    const DiagonalGenerator j({1.0, -1.0});
    CHECK(avoids_gamma_j(-1.0, j));
    CHECK_FALSE(avoids_gamma_j(cplx(0.0, 2.0), j));
    CHECK(avoids_gamma_j(cplx(0.3, 2.0), j));
}

TEST_CASE("flow degree is bounded by n + 2", "[spectral-flow]") {
    CHECK_NOTHROW(require_degree_bound(SpectralPolynomial::monomial(5), 3));
    CHECK_THROWS_AS(require_degree_bound(SpectralPolynomial::monomial(6), 3), Error);
}

TEST_CASE("synthetic quotient divides out a root", "[spectral-flow]") {
    const SpectralPolynomial f({-6.0, 11.0, -6.0, 1.0});  // (z - 1)(z - 2)(z - 3)
    const auto q = synthetic_quotient(f, 2.0);
    for (cplx z : {cplx(0.5), cplx(4.0, 1.0)}) CHECK(std::abs(q(z) * (z - 2.0) - f(z)) < 1e-12);
}
