#include <catch_amalgamated.hpp>

#include <complex>
#include <random>
#include <vector>

#include "nisakns/matrix.hpp"

using namespace nisakns;
using Catch::Matchers::WithinAbs;

namespace {

SquareMatrix random_matrix(std::size_t n, std::mt19937& rng) {
    std::normal_distribution<double> d;
    SquareMatrix m(n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) m(a, b) = cplx(d(rng), d(rng));
    return m;
}

SquareMatrix random_off_diagonal(std::size_t n, std::mt19937& rng) {
    SquareMatrix m = random_matrix(n, rng);
    for (std::size_t a = 0; a < n; ++a) m(a, a) = 0.0;
    return m;
}

}  // namespace

TEST_CASE("generator rejects repeated or non trace-free entries", "[matrix]") {
    REQUIRE_NOTHROW(DiagonalGenerator({1.0, -1.0}));
    try {
        DiagonalGenerator({1.0, 1.0, -2.0});
        FAIL("expected singular-generator error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::singular_generator);
    }
    try {
        DiagonalGenerator({1.0, 2.0});
        FAIL("expected domain error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::domain);
    }
}

TEST_CASE("diagonal and off-diagonal projections split a matrix", "[matrix]") {
    std::mt19937 rng(7);
    const DiagonalGenerator j({2.0, 0.5, -2.5});
    const SquareMatrix a = random_matrix(3, rng);
    const SquareMatrix d = project_diag(a, j);
    const SquareMatrix o = project_off(a, j);
    CHECK((d + o - a).max_abs() == 0.0);
    CHECK(d.is_diagonal(0.0));
    for (std::size_t i = 0; i < 3; ++i) CHECK(o(i, i) == cplx{});
}

TEST_CASE("[J, A] has zero diagonal and matches the generic commutator", "[matrix]") {
    std::mt19937 rng(11);
    const DiagonalGenerator j({1.0, -1.0});
    const SquareMatrix a = random_matrix(2, rng);
    const SquareMatrix c = commutator(j, a);
    CHECK(c(0, 0) == cplx{});
    CHECK(c(1, 1) == cplx{});
    CHECK((c - commutator(j.matrix(), a)).max_abs() < 1e-15);
}

TEST_CASE("ad_J inverse undoes the commutator on off-diagonal matrices", "[matrix]") {
    std::mt19937 rng(3);
    const DiagonalGenerator j({3.0, 1.0, -4.0});
    for (int trial = 0; trial < 5; ++trial) {
        const SquareMatrix y = random_off_diagonal(3, rng);
        const SquareMatrix x = adj_inverse(y, j);
        CHECK((commutator(j, x) - y).max_abs() < 1e-14);
        for (std::size_t i = 0; i < 3; ++i) CHECK(x(i, i) == cplx{});
    }
    SquareMatrix bad = random_off_diagonal(3, rng);
    bad(1, 1) = 0.5;
    CHECK_THROWS_AS(adj_inverse(bad, j), Error);
}

TEST_CASE("inverse round trip and singular matrices", "[matrix]") {
    std::mt19937 rng(5);
    for (std::size_t n : {2u, 3u, 5u}) {
        const SquareMatrix a = random_matrix(n, rng);
        const SquareMatrix prod = a * invert(a);
        CHECK((prod - SquareMatrix::identity(n)).max_abs() < 1e-12);
    }
    const SquareMatrix s(2, {1.0, 2.0, 2.0, 4.0});
    try {
        invert(s);
        FAIL("expected conditioning error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::conditioning);
        REQUIRE(e.value().has_value());
        CHECK(*e.value() < 1e-12);
    }
}

TEST_CASE("determinant is multiplicative", "[matrix]") {
    std::mt19937 rng(17);
    const SquareMatrix a = random_matrix(4, rng);
    const SquareMatrix b = random_matrix(4, rng);
    const cplx lhs = det(a * b);
    const cplx rhs = det(a) * det(b);
    CHECK(std::abs(lhs - rhs) < 1e-11 * std::abs(rhs));
    const SquareMatrix tri(3, {2.0, 5.0, 7.0, 0.0, -3.0, 1.0, 0.0, 0.0, cplx(0.0, 4.0)});
    CHECK(std::abs(det(tri) - cplx(0.0, -24.0)) < 1e-14);
}

TEST_CASE("characteristic polynomial satisfies Cayley-Hamilton", "[matrix]") {
    std::mt19937 rng(23);
    const SquareMatrix a = random_matrix(3, rng);
    const auto c = characteristic_polynomial(a);
    REQUIRE(c.size() == 4);
    CHECK(std::abs(c[3] - 1.0) < 1e-15);
    CHECK(std::abs(c[2] + a.trace()) < 1e-13);
    CHECK(std::abs(c[0] + det(a)) < 1e-12);
    SquareMatrix sum(3);
    for (std::size_t k = 0; k < 4; ++k) sum += power(a, k) * c[k];
    CHECK(sum.max_abs() < 1e-12);
}

TEST_CASE("shape mismatches are reported", "[matrix]") {
    const SquareMatrix a(2), b(3);
    CHECK_THROWS_AS(a + b, Error);
    CHECK_THROWS_AS(a * b, Error);
}
