#include <catch_amalgamated.hpp>

#include <ietlab/periodic.hpp>
#include <ietlab/singularity.hpp>
#include <ietlab/spectral.hpp>

using namespace ietlab;

namespace {

const mpfr_prec_t B = 128;

const IntMatrix kA72{{10, 24, 18, 7}, {4, 11, 8, 2}, {1, 2, 2, 0}, {3, 7, 5, 3}};
const IntMatrix kA72prime{{9, 8, 20, 20, 15, 5, 5}, {1, 2, 4, 4, 3, 2, 2}, {2, 2, 6, 5, 4, 1, 1}, {2, 2, 5, 6, 4, 1, 1},
                          {1, 1, 2, 2, 2, 0, 0},    {2, 2, 4, 4, 3, 2, 1}, {1, 1, 3, 3, 2, 1, 2}};
const IntMatrix kAD{{18, 28, 31, 38, 18}, {10, 16, 8, 9, 6}, {13, 20, 36, 46, 18}, {2, 3, 16, 22, 6}, {39, 61, 63, 77, 37}};

Real r(long v) { return Real(v, B); }

struct FixedVectorData {
    Real s5 = sqrt(r(5)), s21 = sqrt(r(21));
    RealVector v2{r(-2), -s5 - 1L, r(2), s5 + 1L, r(0)};
    RealVector v3{r(-1), r(-2), r(0), r(-1), r(1)};
    RealVector v4{r(-2), s5 - 1L, r(2), -s5 + 1L, r(0)};
};

Real residual_in(const std::vector<RealVector>& basis, const RealVector& v) {
    RealVector c = coordinates(basis, v, Real::pow2(-120, B));
    RealVector p(v.size(), r(0));
    for (std::size_t j = 0; j < basis.size(); ++j)
        for (std::size_t i = 0; i < v.size(); ++i) p[i] += c[j] * basis[j][i];
    return sup_norm(vec_sub(v, p));
}

} // namespace

TEST_CASE("spectrum of a 2x2 hyperbolic matrix", "[spectral]") {
    auto s = lyapunov_spectrum(IntMatrix{{2, 1}, {1, 1}});
    REQUIRE(s.exponents.size() == 2);
    Real l = log((r(3) + sqrt(r(5))) / 2L);
    CHECK(abs(s.exponents[0] - l) < Real::pow2(-110, B));
    CHECK(abs(s.exponents[1] + l) < Real::pow2(-110, B));
    CHECK(s.zero_multiplicity == 0);
}

TEST_CASE("spectrum of the grouped 4-IET matrix", "[spectral]") {
    auto s = lyapunov_spectrum(kA72);
    CHECK(abs(s.ratio() - Real(0.164, B)) < Real(5e-4, B));
    const Real s115 = sqrt(r(115));
    Real rho1 = r(13) / 2L + s115 / 2L + sqrt(r(280) + s115 * 26L) / 2L;
    CHECK(abs(s.exponents[0] - log(rho1)) < Real::pow2(-110, B));
    CHECK(s.zero_multiplicity == 0);
    CHECK(s.jordan_max == 1);
    for (std::size_t i = 0; i < 4; ++i) CHECK(abs(s.exponents[i] + s.exponents[3 - i]) < Real::pow2(-100, B));

    auto sp = splitting(kA72);
    CHECK(sp.stable.size() == 2);
    CHECK(sp.central.empty());
    CHECK(sp.unstable.size() == 2);
    CHECK(sp.non_degenerate);
    CHECK(abs(sp.theta_plus - s.exponents[1]) < Real::pow2(-100, B));
}

TEST_CASE("spectrum of the 5x5 non-regular example", "[spectral]") {
    auto s = lyapunov_spectrum(kAD);
    Real e1 = log(r(55) + sqrt(r(21)) * 12L), e2 = log(r(9) + sqrt(r(5)) * 4L);
    std::vector<Real> want{e1, e2, r(0), -e2, -e1};
    REQUIRE(s.exponents.size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(abs(s.exponents[i] - want[i]) < Real::pow2(-100, B));
    CHECK(s.zero_multiplicity == 1);
    CHECK(s.zero_multiplicity == static_cast<std::size_t>(singularity_data(make_symmetric_pair(5)).kappa - 1));

    auto sp = splitting(kAD, PrecisionContext(), 2);
    CHECK(sp.stable.size() == 2);
    CHECK(sp.central.size() == 1);
    CHECK(sp.unstable.size() == 2);
    CHECK(sp.non_degenerate);
    REQUIRE(sp.central_exact.size() == 1);
    IntVector v3{-1, -2, 0, -1, 1};
    IntVector neg;
    for (auto& x : v3) neg.push_back(-x);
    CHECK((sp.central_exact[0] == v3 || sp.central_exact[0] == neg));

    FixedVectorData v;
    CHECK(residual_in(sp.unstable, v.v2) < Real::pow2(-100, B));
    CHECK(residual_in(sp.stable, v.v4) < Real::pow2(-100, B));
    CHECK(residual_in(sp.central, v.v3) < Real::pow2(-100, B));

    for (const auto* group : {&sp.stable, &sp.central, &sp.unstable})
        for (const auto& b : *group) CHECK(invariance_defect(kAD, *group, b) < Real::pow2(-90, B));

    PeriodicIet p = build_periodic_from_matrix(make_symmetric_pair(5), kAD);
    for (const auto* group : {&sp.stable, &sp.central})
        for (const auto& b : *group) CHECK(abs(dot(b, p.lambda)) < Real::pow2(-100, B));

    auto parts = sp.decompose(vec_add(v.v2, v.v4));
    CHECK(sup_norm(vec_sub(parts.u, v.v2)) < Real::pow2(-100, B));
    CHECK(sup_norm(vec_sub(parts.s, v.v4)) < Real::pow2(-100, B));
    CHECK(sup_norm(parts.c) < Real::pow2(-100, B));
}

TEST_CASE("7-letter loop matrix has three central directions", "[spectral]") {
    auto s = lyapunov_spectrum(kA72prime);
    CHECK(s.zero_multiplicity == 3);
    auto sd = singularity_data(ietlab::make_pair({1, 2, 3, 4, 5, 6, 7}, {6, 7, 4, 5, 3, 1, 2}));
    CHECK(s.zero_multiplicity == static_cast<std::size_t>(sd.kappa - 1));
    CHECK(s.jordan_max == 1);
    for (std::size_t i = 0; i < 7; ++i) CHECK(abs(s.exponents[i] + s.exponents[6 - i]) < Real::pow2(-100, B));
}

TEST_CASE("four-letter family spectra are symmetric and non-degenerate", "[spectral]") {
    for (long n = 1; n <= 6; ++n) {
        IntMatrix m{{1, 1, 1, 1}, {n, n + 1, 0, 0}, {0, 0, 2, 1}, {n + 1, n + 2, 2, 2}};
        auto s = lyapunov_spectrum(m);
        CHECK(s.zero_multiplicity == 0);
        CHECK(s.exponents[1] > 0L);
        for (std::size_t i = 0; i < 4; ++i) CHECK(abs(s.exponents[i] + s.exponents[3 - i]) < Real::pow2(-100, B));
    }
}

TEST_CASE("non-primitive input is rejected", "[spectral]") {
    try {
        lyapunov_spectrum(IntMatrix{{0, 1}, {1, 0}});
        FAIL("expected NotPrimitive");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotPrimitive);
    }
}

TEST_CASE("singularity data", "[spectral]") {
    auto s2 = singularity_data(make_symmetric_pair(2));
    CHECK(s2.kappa == 1);
    CHECK(s2.genus == 1);
    auto s4 = singularity_data(make_symmetric_pair(4));
    CHECK(s4.kappa == 1);
    CHECK(s4.genus == 2);
    auto s5 = singularity_data(make_symmetric_pair(5));
    CHECK(s5.kappa == 2);
    CHECK(s5.genus == 2);
    auto p7 = ietlab::make_pair({1, 2, 3, 4, 5, 6, 7}, {6, 7, 4, 5, 3, 1, 2});
    auto s7 = singularity_data(p7);
    CHECK(s7.kappa + 2 * s7.genus == 8);
    for (auto [p, s] : {std::pair{make_symmetric_pair(2), s2}, {make_symmetric_pair(4), s4}, {make_symmetric_pair(5), s5}, {p7, s7}})
        CHECK(verify_singularity_data(p, s));
    for (int d = 2; d <= 9; ++d) CHECK(verify_singularity_data(make_symmetric_pair(d), singularity_data(make_symmetric_pair(d))));
}

TEST_CASE("hyperbolic parts annihilate the b vectors", "[spectral]") {
    auto sd = singularity_data(make_symmetric_pair(5));
    auto sp = splitting(kAD, PrecisionContext(), 2);
    for (const auto* group : {&sp.stable, &sp.unstable})
        for (const auto& h : *group)
            for (const auto& b : sd.b_vectors) CHECK(abs(dot(h, to_real(b, B))) < Real::pow2(-100, B));
}

TEST_CASE("second exponent governs growth off the PF direction", "[spectral]") {
    auto s = lyapunov_spectrum(kA72);
    // the PF component must stay below the signal after 200 steps, hence the precision
    const PrecisionContext hp(1200);
    auto sp = splitting(kA72, hp);
    PeriodicIet p = build_periodic_from_matrix(make_symmetric_pair(4), kA72, hp);
    const auto& u = sp.unstable;
    Real a = dot(u[1], p.lambda), b = dot(u[0], p.lambda);
    RealVector v = vec_sub(vec_scale(u[0], a), vec_scale(u[1], b));
    const int n = 200;
    RealVector x = v;
    IntMatrix at = mat_transpose(kA72);
    for (int k = 0; k < n; ++k) x = matvec(at, x);
    Real growth = (log(sup_norm(x)) - log(sup_norm(v))) / Real(static_cast<long>(n), 1200);
    CHECK(abs(growth - s.exponents[1]) < Real(0.05, B));
}

TEST_CASE("nu ratio", "[spectral]") {
    IntMatrix ones{{1, 1, 1}, {1, 1, 1}, {1, 1, 1}};
    CHECK(nu_ratio(ones) == 1);
    CHECK(nu_ratio(IntMatrix{{2, 1}, {1, 1}}) == 2);
    IntMatrix a2 = matpow(kA72, 2), a4 = matpow(kA72, 4);
    CHECK(nu_ratio(a4) <= nu_ratio(a2));
    try {
        nu_ratio(kA72);
        FAIL("expected NotPositive");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotPositive);
    }
}
