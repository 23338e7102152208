#include <catch_amalgamated.hpp>

#include <cmath>

#include <ietlab/ergodicity.hpp>
#include <ietlab/polynomial.hpp>
#include <ietlab/repro.hpp>
#include <ietlab/rotation.hpp>
#include <ietlab/singularity.hpp>
#include <ietlab/special_flow.hpp>

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

Real R(long v, mpfr_prec_t b = 128) { return Real(v, b); }

Real golden(mpfr_prec_t b = 128) { return (sqrt(R(5, b)) - 1L) / 2L; }

Splitting split_of(const PeriodicIet& p) { return splitting(p.tower_matrix, p.ctx, singularity_data(p.pair).kappa); }

} // namespace

TEST_CASE("fixed space of the five-letter example matrix", "[ergodicity][fixed]") {
    PeriodicIet p = fixed_vector_iet();
    FixedSpaceBasis fb = fixed_space_basis(p);
    REQUIRE(fb.k == 1);
    CHECK(fb.fixed_exact);
    CHECK(fb.zero_mean);
    CHECK(fb.generates);
    IntVector v3{-1, -2, 0, -1, 1};
    IntVector neg{1, 2, 0, 1, -1};
    CHECK((fb.vectors[0] == v3 || fb.vectors[0] == neg));
    CHECK(static_cast<int>(fb.k) + 1 >= singularity_data(p.pair).kappa);
}

TEST_CASE("the 4-letter example has no fixed vectors", "[ergodicity][fixed]") {
    PeriodicIet p = four_letter_iet();
    CHECK(charpoly(p.tower_matrix).eval(mpz_class(1)) != 0);
    CHECK(kind_of([&] { fixed_space_basis(p); }) == ErrorKind::EmptyFixedSpace);
    FixedSpaceBasis empty;
    CHECK(kind_of([&] { build_fixed_cocycle(empty); }) == ErrorKind::EmptyFixedSpace);
}

TEST_CASE("fixed space dimension is at least kappa - 1", "[ergodicity][fixed]") {
    PeriodicIet p = seven_letter_iet();
    const std::size_t kappa = singularity_data(p.pair).kappa;
    if (kappa > 1) {
        FixedSpaceBasis fb = fixed_space_basis(p);
        CHECK(fb.k + 1 >= kappa);
        CHECK(fb.fixed_exact);
        CHECK(fb.zero_mean);
        CHECK(fb.generates);
    }
}

TEST_CASE("fixed-space cocycle is constant on towers", "[ergodicity][towers]") {
    PeriodicIet p = fixed_vector_iet();
    FixedSpaceBasis fb = fixed_space_basis(p);
    Cocycle phi = build_fixed_cocycle(fb);
    CHECK(abs(phi.mean(p.iet())[0]) < Real::pow2(-100, 128));
    EssentialReport rep = essential_value_probe(phi, p, 2);
    for (const auto& c : rep.candidates) {
        CHECK(c.constant);
        CHECK(c.converged);
        for (const auto& lv : c.levels) {
            CHECK(lv.constant);
            CHECK(lv.base_value[0] == static_cast<long double>(fb.w[c.letter][0].get_si()));
            CHECK(lv.measure > 0);
        }
    }
}

TEST_CASE("stable step cocycle has tower values tending to zero", "[ergodicity][towers]") {
    PeriodicIet p = fixed_vector_iet();
    auto tab = fixed_vector_table(p.ctx.bits);
    EssentialReport rep = essential_value_probe(Cocycle::step_scalar(tab.v[3]), p, 2);
    for (const auto& c : rep.candidates) {
        CHECK(std::fabs(c.levels[2].base_value[0]) < std::fabs(c.levels[0].base_value[0]) + 1e-12L);
        CHECK(std::fabs(c.limit[0]) < 0.01L);
    }
}

TEST_CASE("linear images of cocycles", "[ergodicity]") {
    Cocycle phi = Cocycle::step({{R(1), R(0)}, {R(0), R(1)}, {R(-1), R(-1)}});
    RealMatrix r(1, 2, 128);
    r(0, 0) = R(1);
    r(0, 1) = sqrt(R(2));
    Cocycle img = apply_linear(r, phi);
    CHECK(img.dim == 1);
    CHECK(abs(img.constants[1][0] - sqrt(R(2))) < Real::pow2(-120, 128));
    CHECK(kind_of([&] { apply_linear(RealMatrix(1, 3, 128), phi); }) == ErrorKind::DimensionError);
}

TEST_CASE("coboundary classification", "[ergodicity][coboundary]") {
    PeriodicIet p = fixed_vector_iet();
    Splitting sp = split_of(p);
    auto tab = fixed_vector_table(p.ctx.bits);
    CHECK(coboundary_classify(tab.v[3], sp, p.lambda).cls == CoboundaryClass::Coboundary);
    CHECK(coboundary_classify(tab.v[4], sp, p.lambda).cls == CoboundaryClass::Coboundary);
    CHECK(coboundary_classify(tab.v[1], sp, p.lambda).cls == CoboundaryClass::NotCoboundary);
    CHECK(coboundary_classify(tab.v[2], sp, p.lambda).cls == CoboundaryClass::CentralUndetermined);
    CHECK(coboundary_classify(RealVector(5, R(0)), sp, p.lambda).cls == CoboundaryClass::Coboundary);
    CHECK(kind_of([&] { coboundary_classify(RealVector(5, R(1)), sp, p.lambda); }) == ErrorKind::NotZeroMean);
}

TEST_CASE("coboundary has bounded Birkhoff sums", "[ergodicity][coboundary]") {
    PeriodicIet p = fixed_vector_iet();
    auto tab = fixed_vector_table(p.ctx.bits);
    auto prof = deviation_profile(Cocycle::step_scalar(tab.v[3]), p.iet(), 200000, 8);
    CHECK(prof.exponent < 0.05L);
    long double mx = 0;
    for (auto s : prof.sup) mx = std::max(mx, s);
    CHECK(mx < 50 * sup_norm(tab.v[3]).to_double());
}

TEST_CASE("lattice containment of the five-letter eigenvector combinations", "[ergodicity][lattice]") {
    const mpfr_prec_t b = 128;
    auto tab = fixed_vector_table(b);
    const Real tol(1e-20, b);
    std::vector<LatticeQuery> q{{"sum", Cocycle::step_scalar(vec_add(tab.v[1], tab.v[3])), R(1)},
                                {"difference", Cocycle::step_scalar(vec_sub(tab.v[1], tab.v[3])), sqrt(R(5))}};
    LatticeReport rep = lattice_containment(q, tol);
    REQUIRE(rep.checks.size() == 2);
    CHECK(rep.checks[0].contained);
    CHECK(rep.checks[1].contained);
    CHECK(rep.trivial_intersection);
    CHECK(rep.conclusion == "essential values contained in {0}");

    std::vector<LatticeQuery> bad{{"v2", Cocycle::step_scalar(tab.v[1]), R(1)}};
    LatticeReport r2 = lattice_containment(bad, tol);
    CHECK_FALSE(r2.checks[0].contained);
    CHECK_FALSE(r2.trivial_intersection);

    std::vector<LatticeQuery> same{{"a", Cocycle::step_scalar({R(2), R(-2)}), R(1)},
                                   {"b", Cocycle::step_scalar({R(2), R(-2)}), R(2)}};
    CHECK_FALSE(lattice_containment(same, tol).trivial_intersection);
}

TEST_CASE("skew-product recurrence statistics", "[ergodicity][simulate]") {
    PeriodicIet p = seven_letter_iet();
    const Iet t = p.iet();
    auto xs = sample_points(t, 4, 5);

    auto zero = skew_simulate(t, Cocycle::zero(7, 1, 128), xs, 1000, {0.5L});
    CHECK(zero.samples == 4);
    CHECK(zero.hits[0].back() == 4000);

    Splitting sp = split_of(p);
    std::vector<RealVector> vals;
    RealVector a = sp.stable[0], c = sp.stable.size() > 1 ? sp.stable[1] : sp.stable[0];
    RealVector u2 = zero_mean_unstable_direction(sp, p.lambda);
    for (std::size_t i = 0; i < 7; ++i) vals.push_back({a[i] + u2[i], c[i] - u2[i] / 2L});
    Cocycle two = Cocycle::step(vals);
    auto rec = skew_simulate(t, two, xs, 100000, {0.5L, 1.0L, 2.0L});
    for (std::size_t e = 0; e < rec.eps.size(); ++e)
        for (std::size_t k = 1; k < rec.checkpoints.size(); ++k) CHECK(rec.hits[e][k] >= rec.hits[e][k - 1]);
    for (std::size_t k = 0; k < rec.checkpoints.size(); ++k) {
        CHECK(rec.hits[1][k] >= rec.hits[0][k]);
        CHECK(rec.hits[2][k] >= rec.hits[1][k]);
    }
    CHECK(rec.hits[2].back() > rec.hits[2][2]);

    RealVector drift(7, R(1));
    auto tr = skew_simulate(t, Cocycle::step_scalar(drift), xs, 10000, {0.5L});
    CHECK(tr.hits[0].back() == 0);
    for (auto f : tr.final_norm) CHECK(std::fabs(f - 10000) < 1e-6L);
}

TEST_CASE("continued fractions", "[ergodicity][rotation]") {
    auto g = continued_fraction(golden(), 30);
    for (long a : g.a) CHECK(a == 1);
    for (std::size_t n = 2; n < g.q.size(); ++n) CHECK(g.q[n] == g.q[n - 1] + g.q[n - 2]);
    CHECK(g.bpq);
    CHECK(convergent_bounds_hold(g));

    auto s = continued_fraction(sqrt(R(2)) - 1L, 30);
    for (long a : s.a) CHECK(a == 2);
    CHECK(convergent_bounds_hold(s));

    CHECK(kind_of([] { continued_fraction(Real(1L, 128) / 3L, 10); }) == ErrorKind::RationalInput);
}

TEST_CASE("Denjoy-Koksma at Fibonacci denominators", "[ergodicity][rotation]") {
    const Real half = R(1) / 2L;
    CircleStep phi = CircleStep::make({R(0), half}, {half, -half});
    CHECK(phi.variation() == 2L);
    CHECK(phi.mean().is_zero());
    auto rep = denjoy_koksma_check(phi, golden(), 10000, 50);
    CHECK(rep.violations == 0);
    CHECK(rep.samples + rep.aborted == 50);
    CHECK(rep.q.back() == 6765);
    for (auto m : rep.max_abs) CHECK(m <= 2.0L);

    CircleStep zero = CircleStep::make({R(0)}, {R(0)});
    auto z = denjoy_koksma_check(zero, golden(), 1000, 5);
    for (auto m : z.max_abs) CHECK(m == 0);
}

TEST_CASE("bounded-type rotations have logarithmic deviations", "[ergodicity][rotation]") {
    const Real half = R(1) / 2L;
    CircleStep phi = CircleStep::make({R(0), half}, {half, -half});
    const Iet t = rotation_iet(golden());
    auto prof = deviation_profile(phi.to_cocycle(t), t, 1000000, 8);
    long double slope = log_growth_slope(prof);
    CHECK(std::isfinite(static_cast<double>(slope)));
    CHECK(slope > 0);
    CHECK(prof.exponent < 0.2L);
}

TEST_CASE("product of two rotations", "[ergodicity][rotation]") {
    const Real half = R(1) / 2L;
    CircleStep phi = CircleStep::make({R(0), half}, {R(1), R(-1)});
    CircleStep zero = CircleStep::make({R(0)}, {R(0)});
    auto rep = product_rotation_simulate(golden(), sqrt(R(2)) - 1L, phi, phi, 200000, 4, 2000);
    CHECK(rep.origin_returns > 0);
    CHECK(rep.frequency > 0);
    CHECK(rep.spacing1.sup_ratio < 10L);
    CHECK(rep.spacing2.sup_ratio < 10L);

    auto one = product_rotation_simulate(golden(), sqrt(R(2)) - 1L, phi, zero, 10000, 2, 100);
    auto single = skew_simulate(rotation_iet(golden()), phi.to_cocycle(rotation_iet(golden())),
                                sample_points(rotation_iet(golden()), 2, 0), 10000, {0.5L});
    CHECK(one.origin_returns == single.hits[0].back());

    CircleStep frac = CircleStep::make({R(0), half}, {half, -half});
    CHECK(kind_of([&] { product_rotation_simulate(golden(), golden(), frac, phi, 10, 1); }) == ErrorKind::DomainError);
}

TEST_CASE("special flow", "[ergodicity][flow]") {
    PeriodicIet p = seven_letter_iet();
    const Iet t = p.iet();
    Cocycle unit = Cocycle::step_scalar(RealVector(7, R(1)));
    for (const auto& x : sample_points(t, 5, 2)) {
        FlowState s0{x, R(0)};
        FlowState same = special_flow_step(t, unit, s0, R(0));
        CHECK(same.x == x);
        FlowState one = special_flow_step(t, unit, s0, R(1));
        CHECK(abs(one.x - t.apply(x)) < t.tolerance());
        CHECK(abs(one.s) < t.tolerance());
    }
    Cocycle roof = Cocycle::piecewise_linear({R(1)}, std::vector<RealVector>(7, {R(2)}));
    for (const auto& x : sample_points(t, 5, 4)) {
        FlowState s0{x, R(1) / 3L};
        Real t1 = R(7) / 3L, t2 = R(11) / 5L;
        FlowState a = special_flow_step(t, roof, special_flow_step(t, roof, s0, t1), t2);
        FlowState b = special_flow_step(t, roof, s0, t1 + t2);
        CHECK(abs(a.x - b.x) < t.tolerance());
        CHECK(abs(a.s - b.s) < Real::pow2(-80, 128));
        FlowState back = special_flow_step(t, roof, b, -(t1 + t2));
        CHECK(abs(back.x - x) < t.tolerance());
        CHECK(abs(back.s - s0.s) < Real::pow2(-80, 128));
    }
    Cocycle neg = Cocycle::step_scalar(RealVector(7, R(-1)));
    CHECK(kind_of([&] { special_flow_step(t, neg, {R(0), R(0)}, R(1)); }) == ErrorKind::DomainError);
    CHECK(kind_of([&] { special_flow_step(t, unit, {R(0), R(2)}, R(1)); }) == ErrorKind::DomainError);
}
