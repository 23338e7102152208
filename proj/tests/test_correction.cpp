#include <catch_amalgamated.hpp>

#include <cmath>

#include <ietlab/correction.hpp>
#include <ietlab/repro.hpp>
#include <ietlab/singularity.hpp>

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

Splitting split_of(const PeriodicIet& p) { return splitting(p.tower_matrix, p.ctx, singularity_data(p.pair).kappa); }

Real max_diff(const std::vector<RealVector>& a, const std::vector<RealVector>& b) {
    Real m = Real::zero(a[0][0].bits());
    for (std::size_t i = 0; i < a.size(); ++i) m = max(m, abs(a[i][0] - b[i][0]));
    return m;
}

// 7-letter value vector equal to a 4-letter cocycle whose extras sit on 7-letter endpoints
RealVector lift_to_seven(const Cocycle& phi, const Iet& t4, const Iet& t7) {
    const auto groups = four_letter_groups();
    RealVector u(7);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (int a : groups[g]) {
            Real v = phi.constants[g][0];
            for (const auto& e : phi.extras)
                if (e.gamma > t4.left(static_cast<int>(g)) && e.gamma <= t7.left(a) + t7.tolerance()) v += e.jump[0];
            u[a] = v;
        }
    }
    return u;
}

} // namespace

TEST_CASE("correct_step on the five-letter eigenvectors", "[correction]") {
    PeriodicIet p = fixed_vector_iet();
    Splitting sp = split_of(p);
    auto tab = fixed_vector_table(p.ctx.bits);
    const Real tol = Real::pow2(-90, p.ctx.bits);

    auto r2 = correct_step(tab.v[1], sp, p.lambda);
    for (std::size_t a = 0; a < 5; ++a) {
        CHECK(abs(r2.h[a][0] + tab.v[1][a]) < tol);
        CHECK(abs(r2.corrected.constants[a][0]) < tol);
    }
    auto r24 = correct_step(vec_add(tab.v[1], tab.v[3]), sp, p.lambda);
    for (std::size_t a = 0; a < 5; ++a) {
        CHECK(abs(r24.h[a][0] + tab.v[1][a]) < tol);
        CHECK(abs(r24.corrected.constants[a][0] - tab.v[3][a]) < tol);
    }
    auto r4 = correct_step(tab.v[3], sp, p.lambda);
    for (std::size_t a = 0; a < 5; ++a) CHECK(abs(r4.h[a][0]) < tol);

    RealVector ones(5, Real(1L, p.ctx.bits));
    CHECK(kind_of([&] { correct_step(ones, sp, p.lambda); }) == ErrorKind::NotZeroMean);
}

TEST_CASE("correct_bv on a pure step cocycle matches correct_step", "[correction]") {
    PeriodicIet p0 = four_letter_iet();
    const Iet t0 = p0.iet();
    Cocycle probe = Cocycle::step_scalar({Real(1L, 128), Real(-2L, 128), Real(3L, 128), Real(0L, 128)}).with_zero_mean(t0);
    CorrectionPlan plan = plan_correction(probe, p0, 80);
    CHECK(plan.depth == 1);

    PrecisionContext ctx(plan.bits);
    PeriodicIet p = four_letter_iet(ctx);
    const Iet t = p.iet();
    Splitting sp = split_of(p);
    RealVector v{Real(1L, ctx.bits), Real(-2L, ctx.bits), Real(3L, ctx.bits), Real(0L, ctx.bits)};
    Cocycle phi = Cocycle::step_scalar(v).with_zero_mean(t);
    RealVector v0;
    for (const auto& c : phi.constants) v0.push_back(c[0]);

    auto exact = correct_step(v0, sp, p.lambda);
    for (std::size_t k : {std::size_t{5}, plan.depth}) {
        auto series = correct_bv(phi, p, sp, k);
        CHECK(max_diff(series.h, exact.h) <= series.tail_bound + series.rounding_bound);
    }
    auto dflt = correct_bv(phi, p, sp);
    CHECK(max_diff(dflt.h, exact.h) <= dflt.tail_bound + dflt.rounding_bound);
    CHECK(dflt.tail_bound < Real::pow2(-60, ctx.bits));

    auto zero = correct_bv(Cocycle::zero(4, 1, ctx.bits), p, sp, std::size_t{3});
    for (const auto& h : zero.h) CHECK(h[0].is_zero());
    CHECK(kind_of([&] { correct_bv(phi, p, sp, std::size_t{0}); }) == ErrorKind::DomainError);
}

TEST_CASE("extras on the 4-IET are corrected like steps on the 7-IET", "[correction]") {
    PeriodicIet p0 = four_letter_iet();
    PeriodicIet s0 = seven_letter_iet();
    CorrectionPlan plan = plan_correction(gamma_cocycle(p0, s0.lambda), p0, 80);
    PrecisionContext ctx(plan.bits);
    PeriodicIet p = four_letter_iet(ctx);
    PeriodicIet seven = seven_letter_iet(ctx);
    Cocycle phi = gamma_cocycle(p, seven.lambda);
    REQUIRE(phi.extras.size() == 3);

    Splitting sp = split_of(p);
    auto bv = correct_bv(phi, p, sp, plan.depth);
    RealVector u = lift_to_seven(phi, p.iet(), seven.iet());
    auto st = correct_step(u, split_of(seven), seven.lambda);
    const auto groups = four_letter_groups();
    Real worst = Real::zero(ctx.bits);
    for (std::size_t g = 0; g < groups.size(); ++g)
        for (int a : groups[g]) worst = max(worst, abs(st.h[a][0] - bv.h[g][0]));
    CHECK(worst <= bv.tail_bound + bv.rounding_bound + Real::pow2(-80, ctx.bits));
}

TEST_CASE("corrected cocycle stays bounded under renormalization", "[correction][growth]") {
    PeriodicIet p0 = four_letter_iet();
    PeriodicIet s0 = seven_letter_iet();
    CorrectionPlan plan = plan_correction(gamma_cocycle(p0, s0.lambda), p0, 64);
    PrecisionContext ctx(std::max<mpfr_prec_t>(plan.bits, correction_bits(p0, 64, 12)));
    PeriodicIet p = four_letter_iet(ctx);
    Splitting sp = split_of(p);
    Cocycle phi = gamma_cocycle(p, seven_letter_iet(ctx).lambda);
    RealVector u2 = zero_mean_unstable_direction(sp, p.lambda);
    Cocycle strong = phi.plus_step_scalar(u2);

    for (const Cocycle& c : {phi, strong}) {
        auto res = correct_bv(c, p, sp, plan.depth, 12);
        Real m = Real::zero(ctx.bits);
        for (const auto& s : res.growth) m = max(m, s);
        CHECK(m < 10L);
        GrowthReport after = growth_check(res.corrected, p, 12);
        CHECK(after.bounded);
        GrowthReport before = growth_check(c, p, 12);
        CHECK(before.sup[12] > after.sup[12] * 5L);
    }
    GrowthReport before = growth_check(strong, p, 12);
    const double rho2 = std::exp(sp.theta_plus.to_double());
    CHECK(before.per_step_growth > 0.95 * rho2);
}

TEST_CASE("correction of a stable or central vector is trivial", "[correction]") {
    PeriodicIet p = seven_letter_iet();
    Splitting sp = split_of(p);
    for (const auto& v : sp.stable) {
        auto r = correct_step(v, sp, p.lambda);
        for (const auto& h : r.h) CHECK(abs(h[0]) < Real::pow2(-90, p.ctx.bits));
    }
    for (const auto& c : sp.central_exact) {
        RealVector v;
        for (const auto& z : c) v.push_back(Real(z, p.ctx.bits));
        if (abs(dot(v, p.lambda)) > Real::pow2(-90, p.ctx.bits)) continue;
        auto r = correct_step(v, sp, p.lambda);
        GrowthReport g = growth_check(r.corrected, p, 6);
        CHECK(abs(g.sup[6] - g.sup[0]) < Real::pow2(-60, p.ctx.bits));
    }
}

TEST_CASE("correcting a PL cocycle lowers its deviation exponent", "[correction][deviation]") {
    auto pl = [](mpfr_prec_t b, const Iet& t) {
        auto r = [b](long v) { return RealVector{Real(v, b)}; };
        return Cocycle::piecewise_linear(r(1), {r(0), r(1), r(-1), r(2), r(0), r(-2), r(1)}).with_zero_mean(t);
    };
    PeriodicIet p0 = seven_letter_iet();
    CorrectionPlan plan = plan_correction(pl(128, p0.iet()), p0, 64);
    PrecisionContext ctx(plan.bits);
    PeriodicIet p = seven_letter_iet(ctx);
    Cocycle phi = pl(ctx.bits, p.iet());
    auto res = correct_bv(phi, p, split_of(p), plan.depth);
    CHECK(res.tail_bound < Real::pow2(-60, ctx.bits));
    auto before = deviation_profile(phi, p.iet(), 1000000, 16);
    auto after = deviation_profile(res.corrected, p.iet(), 1000000, 16);
    CHECK(after.exponent < before.exponent);
}
