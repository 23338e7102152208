#include <catch_amalgamated.hpp>

#include <random>

#include <ietlab/int_matrix.hpp>
#include <ietlab/permutation.hpp>
#include <ietlab/polynomial.hpp>
#include <ietlab/real.hpp>
#include <ietlab/smith.hpp>
#include <ietlab/roots.hpp>

using namespace ietlab;

TEST_CASE("symmetric pairs", "[core]") {
    auto p2 = make_symmetric_pair(2);
    CHECK(p2.monodromy(1) == 2);
    CHECK(p2.monodromy(2) == 1);
    CHECK(p2.irreducible());

    auto p4 = make_symmetric_pair(4);
    for (int j = 1; j <= 4; ++j) CHECK(p4.monodromy(j) == 5 - j);

    CHECK_THROWS_MATCHES(make_symmetric_pair(1), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) { return e.kind() == ErrorKind::DegenerateAlphabet; }));
}

TEST_CASE("symmetric pairs are irreducible up to d = 12", "[core][property]") {
    for (int d = 2; d <= 12; ++d) CHECK(make_symmetric_pair(d).irreducible());
}

TEST_CASE("make_pair round trip and validation", "[core]") {
    std::vector<int> pi0{1, 2, 3, 4, 5, 6, 7}, pi1{6, 7, 4, 5, 3, 1, 2};
    auto p = ietlab::make_pair(pi0, pi1);
    CHECK(p.pi0() == pi0);
    CHECK(p.pi1() == pi1);
    CHECK(p.irreducible());

    CHECK_FALSE(ietlab::make_pair({1, 2, 3}, {1, 2, 3}).irreducible());

    try {
        ietlab::make_pair({1, 1, 2}, {1, 2, 3});
        FAIL("expected InvalidPermutation");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidPermutation);
    }
}

TEST_CASE("integer matrix arithmetic", "[core]") {
    IntMatrix a{{2, 1}, {1, 1}};
    CHECK(matpow(a, 0) == IntMatrix::identity(2));
    CHECK(matpow(a, 2) == IntMatrix{{5, 3}, {3, 2}});
    CHECK(mat_transpose(IntMatrix{{1, 2}, {3, 4}}) == IntMatrix{{1, 3}, {2, 4}});
    try {
        matmul(IntMatrix::identity(4), IntMatrix::identity(5));
        FAIL("expected DimensionError");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DimensionError);
    }
}

TEST_CASE("matrix products are associative and exact", "[core][property]") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<long> dist(-50, 50);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t d = 2 + trial % 5;
        auto rnd = [&] {
            IntMatrix m(d, d);
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j) m(i, j) = dist(rng);
            return m;
        };
        IntMatrix x = rnd(), y = rnd(), z = rnd();
        CHECK((x * y) * z == x * (y * z));
        IntMatrix big = matpow(x, 12);
        CHECK(big == matpow(x, 6) * matpow(x, 6));
        CHECK(big == matpow(x, 5) * matpow(x, 7));
    }
}

TEST_CASE("determinant and trace", "[core]") {
    CHECK(determinant(IntMatrix{{2, 1}, {1, 1}}) == 1);
    CHECK(determinant(IntMatrix{{0, 1}, {1, 0}}) == -1);
    CHECK(determinant(IntMatrix{{1, 2, 3}, {4, 5, 6}, {7, 8, 10}}) == -3);
    CHECK(trace(IntMatrix{{1, 2}, {3, 4}}) == 5);
}

TEST_CASE("precision context", "[core]") {
    PrecisionContext ctx;
    CHECK(ctx.bits == 128);
    CHECK(ctx.eps() == Real::pow2(-64, 128));
    CHECK_THROWS_AS(PrecisionContext(32), Error);
    Real third = Real(1L, 256) / Real(3L, 256);
    CHECK(abs(third * 3L - 1L) < Real::pow2(-250, 256));
}

TEST_CASE("characteristic polynomial", "[core]") {
    Poly f = charpoly(IntMatrix{{2, 1}, {1, 1}});
    CHECK(f.integer_coeffs() == std::vector<mpz_class>{1, -3, 1});
    Poly g = charpoly(IntMatrix{{10, 24, 18, 7}, {4, 11, 8, 2}, {1, 2, 2, 0}, {3, 7, 5, 3}});
    CHECK(g.integer_coeffs() == std::vector<mpz_class>{1, -26, 56, -26, 1});
}

TEST_CASE("cyclotomic splitting and square-free parts", "[core]") {
    Poly x1 = Poly::from_ints({-1, 1});
    Poly q = Poly::from_ints({1, -26, 56, -26, 1});
    Poly f = x1 * x1 * x1 * q;
    auto [cyc, rest] = split_cyclotomic(f);
    REQUIRE(cyc.size() == 1);
    CHECK(cyc[0].index == 1);
    CHECK(cyc[0].multiplicity == 3);
    CHECK(rest.monic().integer_coeffs() == q.integer_coeffs());
    auto sq = squarefree_decomposition(x1 * x1 * q);
    REQUIRE(sq.size() == 2);
    CHECK(sq[0].second == 1);
    CHECK(sq[1].second == 2);
}

TEST_CASE("root isolation gives disjoint certified disks", "[core]") {
    auto roots = isolate_roots(Poly::from_ints({1, -26, 56, -26, 1}), 128);
    REQUIRE(roots.size() == 4);
    for (const auto& r : roots) CHECK(r.real);
    auto cplx = isolate_roots(Poly::from_ints({1, 0, 1}), 128);
    REQUIRE(cplx.size() == 2);
    for (const auto& r : cplx) {
        CHECK_FALSE(r.real);
        CHECK(abs(r.z.abs() - 1L) < Real::pow2(-100, 128));
    }
}

TEST_CASE("smith normal form and integer kernels", "[core]") {
    IntMatrix a{{2, 4, 4}, {-6, 6, 12}, {10, -4, -16}};
    SmithForm s = smith_normal_form(a);
    CHECK(s.u * a * s.v == s.d);
    CHECK(s.invariant_factors() == std::vector<mpz_class>{2, 6, 12});
    CHECK(std::abs(determinant(s.u).get_si()) == 1);
    CHECK(std::abs(determinant(s.v).get_si()) == 1);

    auto ker = integer_kernel(IntMatrix{{1, 1, 1}});
    REQUIRE(ker.size() == 2);
    for (const auto& v : ker) CHECK(v[0] + v[1] + v[2] == 0);
}
