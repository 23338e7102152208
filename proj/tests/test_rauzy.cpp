#include <catch_amalgamated.hpp>

#include <random>

#include <ietlab/iet.hpp>
#include <ietlab/periodic.hpp>
#include <ietlab/permutation.hpp>
#include <ietlab/rauzy.hpp>

using namespace ietlab;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::DomainError;
}

const std::vector<int> kLoop72{1, 0, 1, 1, 1, 1, 1, 1, 0, 1, 1, 0, 1, 1, 1, 0, 0, 1, 1, 1, 1, 0, 1, 0, 0, 0, 0, 1, 1, 1};

const IntMatrix kA72prime{{9, 8, 20, 20, 15, 5, 5}, {1, 2, 4, 4, 3, 2, 2}, {2, 2, 6, 5, 4, 1, 1}, {2, 2, 5, 6, 4, 1, 1},
                          {1, 1, 2, 2, 2, 0, 0},    {2, 2, 4, 4, 3, 2, 1}, {1, 1, 3, 3, 2, 1, 2}};

PermutationPair pair72() { return ietlab::make_pair({1, 2, 3, 4, 5, 6, 7}, {6, 7, 4, 5, 3, 1, 2}); }

PermutationPair random_irreducible(std::mt19937_64& rng, int d) {
    std::vector<int> p0(d), p1(d);
    std::iota(p0.begin(), p0.end(), 1);
    for (;;) {
        std::iota(p1.begin(), p1.end(), 1);
        std::shuffle(p1.begin(), p1.end(), rng);
        auto p = ietlab::make_pair(p0, p1);
        if (p.irreducible()) return p;
    }
}

} // namespace

TEST_CASE("omega matrix", "[rauzy]") {
    CHECK(omega_matrix(make_symmetric_pair(2)) == IntMatrix{{0, 1}, {-1, 0}});
    auto om4 = omega_matrix(make_symmetric_pair(4));
    CHECK(rank_q(om4) == 4);
    auto om7 = omega_matrix(pair72());
    for (std::size_t i = 0; i < 7; ++i)
        for (std::size_t j = 0; j < 7; ++j) CHECK(om7(i, j) == -om7(j, i));
    CHECK(kind_of([] { omega_matrix(ietlab::make_pair({1, 2, 3}, {1, 2, 3})); }) == ErrorKind::ReduciblePair);
}

TEST_CASE("single Rauzy step", "[rauzy]") {
    Iet t(make_symmetric_pair(2), {Real(3L, 128), Real(1L, 128)});
    auto [step, next] = rauzy_step(t);
    CHECK(step.eps == 1);
    CHECK(next.lambda()[0] == 2L);
    CHECK(next.lambda()[1] == 1L);
    CHECK(next.length() < t.length());
    CHECK(std::abs(determinant(step.theta).get_si()) == 1);

    Iet tie(make_symmetric_pair(2), {Real(1L, 128), Real(1L, 128)});
    CHECK(kind_of([&] { rauzy_step(tie); }) == ErrorKind::KeaneViolation);

    Iet near(make_symmetric_pair(2), {Real(1L, 128), Real(1L, 128) + Real::pow2(-100, 128)});
    CHECK(kind_of([&] { rauzy_step(near); }) == ErrorKind::NearBreakpoint);
}

TEST_CASE("Theta^t Omega Theta equals the new Omega on random steps", "[rauzy][property]") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        const int d = 2 + trial % 7;
        auto p = random_irreducible(rng, d);
        RealVector lam;
        for (int a = 0; a < d; ++a) lam.emplace_back(Real(u(rng), 128) + Real(1L, 128) / Real(7L + a, 128));
        Iet t(p, lam);
        for (int k = 0; k < 25; ++k) {
            auto [step, next] = rauzy_step(t);
            IntMatrix lhs = mat_transpose(step.theta) * omega_matrix(t.pair()) * step.theta;
            CHECK(lhs == omega_matrix(next.pair()));
            t = next;
        }
    }
}

TEST_CASE("iterate_induction", "[rauzy]") {
    Iet t(make_symmetric_pair(4), {Real(1L, 128), Real(2L, 128).with_bits(128), sqrt(Real(2L, 128)), sqrt(Real(3L, 128))});
    auto r0 = iterate_induction(t, 0);
    CHECK(r0.steps.empty());
    CHECK(r0.theta == IntMatrix::identity(4));
    CHECK(r0.iet.lambda()[2] == t.lambda()[2]);

    auto r = iterate_induction(t, 40);
    RealVector back = matvec(r.theta, r.iet.lambda());
    for (int a = 0; a < 4; ++a) CHECK(abs(back[a] - t.lambda()[a]) <= Real::pow2(-64, 128) * 4L);
    CHECK(std::abs(determinant(r.theta).get_si()) == 1);

    Iet tie(make_symmetric_pair(2), {Real(2L, 128), Real(1L, 128)});
    try {
        iterate_induction(tie, 5);
        FAIL("expected KeaneViolation");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::KeaneViolation);
        REQUIRE(e.step().has_value());
        CHECK(*e.step() == 1);
    }
}

TEST_CASE("golden 2-IET has induction period 2", "[rauzy]") {
    Real phi = (Real(1L, 128) + sqrt(Real(5L, 128))) / 2L;
    Iet t(make_symmetric_pair(2), {phi, Real(1L, 128)});
    auto per = detect_period(t, 10, Real::pow2(-100, 128));
    REQUIRE(per.has_value());
    CHECK(2 % per->steps == 0);
}

TEST_CASE("loop replay reproduces the 7x7 matrix", "[rauzy]") {
    LoopReplay r = replay_loop(pair72(), kLoop72);
    CHECK(r.end == pair72());
    CHECK(r.product == kA72prime);
    CHECK_FALSE(kA72prime.is_positive());
    CHECK(matpow(kA72prime, 2).is_positive());
}

TEST_CASE("build_periodic_from_loop", "[rauzy]") {
    PeriodicIet p = build_periodic_from_loop(pair72(), kLoop72);
    CHECK(p.loop_matrix == kA72prime);
    CHECK(p.matrix.is_positive());
    CHECK(p.loop_verified);
    CHECK(p.base_period == 30);
    CHECK(abs(sum(p.lambda, 128) - 1L) < Real::pow2(-120, 128));
    CHECK(eigen_residual(p.matrix, p.lambda, p.rho) <= p.ctx.eps());
    CHECK(p.rho_lo <= p.rho);
    CHECK(p.rho <= p.rho_hi);

    // the loop word is the induction itinerary of the PF lengths
    auto run = iterate_induction(p.iet(), p.base_period);
    for (std::size_t k = 0; k < run.steps.size(); ++k) CHECK(run.steps[k].eps == kLoop72[k]);
    CHECK(run.iet.pair() == p.pair);
    for (int a = 0; a < 7; ++a) CHECK(abs(run.iet.lambda()[a] * p.loop_rho - p.lambda[a]) < Real::pow2(-100, 128));

    CHECK(kind_of([] { build_periodic_from_loop(pair72(), {}); }) == ErrorKind::NotALoop);
    CHECK(kind_of([] { build_periodic_from_loop(pair72(), {1, 0}); }) == ErrorKind::NotALoop);
}

TEST_CASE("build_periodic_from_matrix", "[rauzy]") {
    const mpfr_prec_t b = 128;
    IntMatrix m1{{1, 1, 1, 1}, {1, 2, 0, 0}, {0, 0, 2, 1}, {2, 3, 2, 2}};
    PeriodicIet p = build_periodic_from_matrix(make_symmetric_pair(4), m1);
    CHECK_FALSE(p.loop_verified);
    Real ap = (Real(7L, b) + sqrt(Real(5L, b))) / 2L;
    Real rho1 = (ap + sqrt(ap * ap - 4L)) / 2L;
    CHECK(abs(p.loop_rho - rho1) / rho1 < Real::pow2(-100, b));

    IntMatrix ad{{18, 28, 31, 38, 18}, {10, 16, 8, 9, 6}, {13, 20, 36, 46, 18}, {2, 3, 16, 22, 6}, {39, 61, 63, 77, 37}};
    PeriodicIet q = build_periodic_from_matrix(make_symmetric_pair(5), ad);
    Real s21 = sqrt(Real(21L, b));
    CHECK(abs(q.loop_rho - (Real(55L, b) + s21 * 12L)) < Real::pow2(-100, b));
    RealVector expect{s21 + 1L, Real(2L, b), s21 + 1L, Real(2L, b), s21 + 7L};
    Real tot = sum(expect, b);
    for (int a = 0; a < 5; ++a) CHECK(abs(q.lambda[a] - expect[a] / tot) < Real::pow2(-110, b));

    CHECK(kind_of([] { build_periodic_from_matrix(make_symmetric_pair(2), IntMatrix{{0, 1}, {1, 0}}); }) ==
          ErrorKind::NotPrimitive);
}

TEST_CASE("Keane scan", "[rauzy]") {
    Iet tie(make_symmetric_pair(2), {Real(1L, 128), Real(1L, 128)});
    auto r = keane_check(tie, 1);
    CHECK(r.collision);
    CHECK(r.m == 1);

    Iet rational(make_symmetric_pair(2), {Real(2L, 128), Real(1L, 128)});
    CHECK(keane_check(rational, 10).collision);

    PeriodicIet p = build_periodic_from_loop(pair72(), kLoop72);
    CHECK_FALSE(keane_check(p.iet(), 10000).collision);
}
