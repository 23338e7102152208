#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstddef>
#include <string>
#include <vector>

#include "birkhoff.hpp"
#include "cocycle.hpp"
#include "ergodicity.hpp"
#include "int_matrix.hpp"
#include "periodic.hpp"
#include "permutation.hpp"
#include "rauzy.hpp"
#include "real.hpp"
#include "spectral.hpp"

namespace ietlab {

/// One computed-versus-reference comparison.
struct ReproEntry {
    std::string name;
    std::string computed;
    std::string reference;
    std::string source;  ///< "printed" for values given in the source text, "closed form" or "derived" otherwise
    double abs_delta = 0;
    double rel_delta = 0;
    double tolerance = 0;
    bool pass = false;
};

struct ReproReport {
    std::string id;
    std::vector<ReproEntry> entries;
    double seconds = 0;
    bool pass() const {
        for (const auto& e : entries)
            if (!e.pass) return false;
        return !entries.empty();
    }
};

namespace detail {

inline void add_numeric(ReproReport& r, const std::string& name, const Real& got, const Real& want, double rel_tol,
                        const std::string& source) {
    ReproEntry e;
    e.name = name;
    e.computed = got.str(30);
    e.reference = want.str(30);
    e.source = source;
    Real ad = abs(got - want);
    e.abs_delta = ad.to_double();
    e.rel_delta = want.is_zero() ? e.abs_delta : (ad / abs(want)).to_double();
    e.tolerance = rel_tol;
    e.pass = !(ad > abs(want) * Real(rel_tol, got.bits()));
    r.entries.push_back(std::move(e));
}

inline void add_flag(ReproReport& r, const std::string& name, bool ok, const std::string& source,
                     const std::string& computed = "", const std::string& reference = "") {
    ReproEntry e;
    e.name = name;
    e.computed = computed.empty() ? (ok ? "true" : "false") : computed;
    e.reference = reference.empty() ? "true" : reference;
    e.source = source;
    e.pass = ok;
    r.entries.push_back(std::move(e));
}

inline std::string matrix_str(const IntMatrix& m) {
    std::string s = "[";
    for (std::size_t i = 0; i < m.rows(); ++i) {
        s += i ? ",[" : "[";
        for (std::size_t j = 0; j < m.cols(); ++j) s += (j ? "," : "") + m(i, j).get_str();
        s += "]";
    }
    return s + "]";
}

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

} // namespace detail

// ---- data of the worked examples -------------------------------------------

/// The 7-letter pair (1..7 | 6,7,4,5,3,1,2) and its 30-step loop.
inline PermutationPair seven_letter_pair() { return make_pair({1, 2, 3, 4, 5, 6, 7}, {6, 7, 4, 5, 3, 1, 2}); }
inline std::vector<int> seven_letter_loop() {
    return {1, 0, 1, 1, 1, 1, 1, 1, 0, 1, 1, 0, 1, 1, 1, 0, 0, 1, 1, 1, 1, 0, 1, 0, 0, 0, 0, 1, 1, 1};
}
inline IntMatrix seven_letter_matrix() {
    return {{9, 8, 20, 20, 15, 5, 5}, {1, 2, 4, 4, 3, 2, 2}, {2, 2, 6, 5, 4, 1, 1}, {2, 2, 5, 6, 4, 1, 1},
            {1, 1, 2, 2, 2, 0, 0},    {2, 2, 4, 4, 3, 2, 1}, {1, 1, 3, 3, 2, 1, 2}};
}
inline IntMatrix four_letter_matrix() { return {{10, 24, 18, 7}, {4, 11, 8, 2}, {1, 2, 2, 0}, {3, 7, 5, 3}}; }
/// Letters of the 7-IET merged into each letter of the 4-IET.
inline std::vector<std::vector<int>> four_letter_groups() { return {{0, 1}, {2, 3}, {4}, {5, 6}}; }

inline PeriodicIet seven_letter_iet(const PrecisionContext& ctx = PrecisionContext()) {
    return build_periodic_from_loop(seven_letter_pair(), seven_letter_loop(), ctx);
}

/// λ on π^sym_4 obtained by merging the 7-IET lengths.
inline RealVector grouped_lengths(const RealVector& seven) {
    RealVector out;
    for (const auto& g : four_letter_groups()) {
        Real s = Real::zero(seven[0].bits());
        for (int a : g) s += seven[a];
        out.push_back(s);
    }
    return out;
}

/// The 4-IET, with its loop found by running induction on the merged lengths.
inline PeriodicIet four_letter_iet(const PrecisionContext& ctx = PrecisionContext()) {
    PeriodicIet seven = seven_letter_iet(ctx);
    Iet t(make_symmetric_pair(4), grouped_lengths(seven.lambda), ctx);
    auto per = detect_period(t, 500, ctx.loose_eps());
    if (!per) fail(ErrorKind::NotALoop, "merged lengths are not of periodic type within 500 steps");
    return build_periodic_from_loop(make_symmetric_pair(4), per->loop, ctx);
}

/// γ₁ = λ′₁, γ₂ = λ′₁+λ′₂+λ′₃, γ₃ = λ′₁+…+λ′₆ (positions in the top row).
inline std::vector<Real> four_letter_gammas(const RealVector& seven) {
    const PermutationPair p = seven_letter_pair();
    RealVector by_pos;
    for (int pos = 1; pos <= 7; ++pos) by_pos.push_back(seven[p.letter_at(0, pos)]);
    Real g1 = by_pos[0];
    Real g2 = by_pos[0] + by_pos[1] + by_pos[2];
    Real g3 = g2 + by_pos[3] + by_pos[4] + by_pos[5];
    return {g1, g2, g3};
}

/// Piecewise-constant zero-mean cocycle on the 4-IET whose only
/// discontinuities are the three γ's, with jumps 1, √2 and −1−√2.
inline Cocycle gamma_cocycle(const PeriodicIet& four, const RealVector& seven_lambda) {
    const mpfr_prec_t b = four.ctx.bits;
    const Iet t = four.iet();
    auto g = four_letter_gammas(seven_lambda);
    const Real s2 = sqrt(Real(2L, b));
    std::vector<Real> jumps{Real(1L, b), s2, -s2 - 1L};
    std::vector<Jump> ex;
    for (std::size_t i = 0; i < 3; ++i) ex.push_back({g[i], {jumps[i]}});
    // value at each left endpoint: sum of the jumps already passed
    RealVector v;
    for (std::size_t a = 0; a < t.d(); ++a) {
        Real acc = Real::zero(b);
        for (std::size_t i = 0; i < 3; ++i)
            if (g[i] < t.left(static_cast<int>(a))) acc += jumps[i];
        v.push_back(acc);
    }
    return Cocycle::step_scalar(v, ex).with_zero_mean(t);
}

/// Zero-mean unit vector (sup norm) spanning Γ_u ∩ Γ₀ when dim Γ_u = 2.
inline RealVector zero_mean_unstable_direction(const Splitting& sp, const RealVector& lambda) {
    if (sp.unstable.size() != 2) fail(ErrorKind::Unsupported, "needs a two-dimensional unstable space");
    const mpfr_prec_t b = sp.bits;
    const RealVector lam = to_bits(lambda, b);
    const RealVector& a = sp.unstable[0];
    const RealVector& c = sp.unstable[1];
    RealVector u = vec_sub(vec_scale(a, dot(c, lam)), vec_scale(c, dot(a, lam)));
    return vec_scale(u, Real(1L, b) / sup_norm(u));
}

inline IntMatrix family_matrix(long n) {
    return {{1, 1, 1, 1}, {n, n + 1, 0, 0}, {0, 0, 2, 1}, {n + 1, n + 2, 2, 2}};
}

/// ρ₁ > ρ₂ > 1 > ρ₃ > ρ₄ from a_n^± = (n+6 ± √(n²+4))/2.
inline std::vector<Real> family_closed_form(long n, mpfr_prec_t b) {
    Real nn(n, b);
    Real root = sqrt(nn * nn + 4L);
    Real ap = (nn + 6L + root) / 2L, am = (nn + 6L - root) / 2L;
    Real sp = sqrt(ap * ap - 4L), sm = sqrt(am * am - 4L);
    return {(ap + sp) / 2L, (am + sm) / 2L, (am - sm) / 2L, (ap - sp) / 2L};
}

inline IntMatrix fixed_vector_matrix() {
    return {{18, 28, 31, 38, 18}, {10, 16, 8, 9, 6}, {13, 20, 36, 46, 18}, {2, 3, 16, 22, 6}, {39, 61, 63, 77, 37}};
}

inline PeriodicIet fixed_vector_iet(const PrecisionContext& ctx = PrecisionContext()) {
    return build_periodic_from_matrix(make_symmetric_pair(5), fixed_vector_matrix(), ctx);
}

struct FixedVectorTable {
    std::vector<Real> rho;
    std::vector<RealVector> v;
};

inline FixedVectorTable fixed_vector_table(mpfr_prec_t b) {
    const Real s5 = sqrt(Real(5L, b)), s21 = sqrt(Real(21L, b));
    const Real z = Real::zero(b);
    auto n = [b](long x) { return Real(x, b); };
    FixedVectorTable t;
    t.rho = {n(55) + s21 * 12L, n(9) + s5 * 4L, n(1), n(9) - s5 * 4L, n(55) - s21 * 12L};
    t.v = {{s21 - 1L, s21 + 1L, s21 + 3L, s21 + 5L, n(4)},
           {n(-2), -s5 - 1L, n(2), s5 + 1L, z},
           {n(-1), n(-2), z, n(-1), n(1)},
           {n(-2), s5 - 1L, n(2), -s5 + 1L, z},
           {-s21 - 1L, -s21 + 1L, -s21 + 3L, -s21 + 5L, n(4)}};
    return t;
}

// ---- reports ---------------------------------------------------------------

inline ReproReport appendix_b(long n, const PrecisionContext& ctx = PrecisionContext()) {
    detail::Stopwatch sw;
    ReproReport r;
    r.id = "appendix-b n=" + std::to_string(n);
    const mpfr_prec_t b = ctx.bits;
    auto spec = lyapunov_spectrum(family_matrix(n), ctx);
    auto want = family_closed_form(n, b);
    const double tol = std::ldexp(1.0, -static_cast<int>(b / 2));
    for (std::size_t i = 0; i < 4; ++i)
        detail::add_numeric(r, "rho" + std::to_string(i + 1), exp(spec.exponents[i]), want[i], tol, "closed form");
    Real nn(n, b), root = sqrt(nn * nn + 4L);
    Real prod = ((nn + 6L + root) / 2L) * ((nn + 6L - root) / 2L);
    detail::add_numeric(r, "a+ * a- = 3n+8", prod, Real(3 * n + 8, b), tol, "closed form");
    Real ratio = log(want[1]) / log(want[0]);
    detail::add_numeric(r, "theta2/theta1", spec.ratio(), ratio, tol, "closed form");
    r.seconds = sw.seconds();
    return r;
}

/// θ₂/θ₁ of M(n) from the computed spectrum.
inline Real family_ratio(long n, const PrecisionContext& ctx = PrecisionContext()) {
    return lyapunov_spectrum(family_matrix(n), ctx).ratio();
}

inline ReproReport example_7_2(const PrecisionContext& ctx = PrecisionContext()) {
    detail::Stopwatch sw;
    ReproReport r;
    r.id = "example-7-2";
    const mpfr_prec_t b = ctx.bits;
    LoopReplay rep = replay_loop(seven_letter_pair(), seven_letter_loop());
    detail::add_flag(r, "loop returns to the starting pair", rep.end == seven_letter_pair(), "printed");
    detail::add_flag(r, "loop product equals A'", rep.product == seven_letter_matrix(), "printed",
                     detail::matrix_str(rep.product), detail::matrix_str(seven_letter_matrix()));
    detail::add_flag(r, "A' is not positive", !rep.product.is_positive(), "derived");
    detail::add_flag(r, "(A')^2 is positive", matpow(rep.product, 2).is_positive(), "printed");

    PeriodicIet seven = seven_letter_iet(ctx);
    PeriodicIet four = four_letter_iet(ctx);
    detail::add_flag(r, "grouped matrix equals A", four.loop_matrix == four_letter_matrix(), "printed",
                     detail::matrix_str(four.loop_matrix), detail::matrix_str(four_letter_matrix()));
    detail::add_flag(r, "grouped loop length", four.base_period == 18, "derived", std::to_string(four.base_period), "18");

    auto spec = lyapunov_spectrum(four_letter_matrix(), ctx);
    const Real s115 = sqrt(Real(115L, b));
    Real rho1 = Real(13L, b) / 2L + s115 / 2L + sqrt(Real(280L, b) + s115 * 26L) / 2L;
    Real rho2 = Real(13L, b) / 2L - s115 / 2L + sqrt(Real(280L, b) - s115 * 26L) / 2L;
    detail::add_numeric(r, "rho1", exp(spec.exponents[0]), rho1, 1e-25, "printed");
    detail::add_numeric(r, "rho2", exp(spec.exponents[1]), rho2, 1e-25, "printed");
    detail::add_numeric(r, "theta2/theta1", spec.ratio(), Real(0.164, b), 5e-4 / 0.164, "printed");

    // the 7-IET and the 4-IET are the same map; the γ's sit strictly inside
    Iet t7 = seven.iet();
    Iet t4(make_symmetric_pair(4), grouped_lengths(seven.lambda), ctx);
    bool same = true;
    for (const auto& x : sample_points(t7, 200))
        if (abs(t7.apply(x) - t4.apply(x)) > t7.tolerance()) same = false;
    detail::add_flag(r, "7-IET and grouped 4-IET agree pointwise", same, "derived");
    auto gam = four_letter_gammas(seven.lambda);
    bool inside = true;
    for (const auto& g : gam)
        for (std::size_t a = 0; a < 4; ++a)
            if (abs(g - t4.left(static_cast<int>(a))) <= t4.tolerance()) inside = false;
    detail::add_flag(r, "gammas avoid the 4-IET endpoints", inside, "derived");
    bool gamma_endpoints = true;
    for (const auto& g : gam) {
        bool hit = false;
        for (std::size_t a = 0; a < 7; ++a)
            if (abs(g - t7.left(static_cast<int>(a))) <= t7.tolerance()) hit = true;
        gamma_endpoints = gamma_endpoints && hit;
    }
    detail::add_flag(r, "gammas are endpoints of the periodic 7-IET", gamma_endpoints && seven.loop_verified, "derived");
    r.seconds = sw.seconds();
    return r;
}

inline ReproReport appendix_d(const PrecisionContext& ctx = PrecisionContext()) {
    detail::Stopwatch sw;
    ReproReport r;
    r.id = "appendix-d";
    const mpfr_prec_t b = ctx.bits;
    const IntMatrix a = fixed_vector_matrix();
    const IntMatrix at = mat_transpose(a);
    PeriodicIet p = fixed_vector_iet(ctx);
    FixedVectorTable tab = fixed_vector_table(b);

    detail::add_numeric(r, "PF eigenvalue", p.loop_rho, tab.rho[0], 1e-25, "printed");
    auto spec = lyapunov_spectrum(a, ctx);
    detail::add_numeric(r, "PF eigenvalue from the spectrum", exp(spec.exponents[0]), tab.rho[0], 1e-25, "printed");
    const Real s21 = sqrt(Real(21L, b));
    RealVector lam{s21 + 1L, Real(2L, b), s21 + 1L, Real(2L, b), s21 + 7L};
    lam = normalized(lam);
    Real worst = Real::zero(b);
    for (std::size_t i = 0; i < 5; ++i) worst = max(worst, abs(lam[i] - p.lambda[i]));
    detail::add_numeric(r, "PF eigenvector deviation", worst, Real::zero(b), 0, "printed");
    r.entries.back().pass = worst < Real(1e-25, b);
    r.entries.back().tolerance = 1e-25;

    for (std::size_t i = 0; i < 5; ++i) {
        RealVector lhs = matvec(at, tab.v[i]);
        Real res = sup_norm(vec_sub(lhs, vec_scale(tab.v[i], tab.rho[i])));
        ReproEntry e;
        e.name = "A^t v" + std::to_string(i + 1) + " = rho" + std::to_string(i + 1) + " v" + std::to_string(i + 1);
        e.computed = res.str(6);
        e.reference = "0";
        e.source = "printed";
        e.abs_delta = res.to_double();
        e.tolerance = 1e-25;
        e.pass = res < Real(1e-25, b) * tab.rho[i];
        r.entries.push_back(std::move(e));
    }
    IntVector v3{-1, -2, 0, -1, 1};
    detail::add_flag(r, "A^t v3 = v3 exactly", matvec(at, v3) == v3, "printed");

    Splitting sp = splitting(a, ctx, singularity_data(make_symmetric_pair(5)).kappa);
    auto c4 = coboundary_classify(tab.v[3], sp, p.lambda);
    auto c2 = coboundary_classify(tab.v[1], sp, p.lambda);
    detail::add_flag(r, "classify(v4)", c4.cls == CoboundaryClass::Coboundary, "printed", to_string(c4.cls), "Coboundary");
    detail::add_flag(r, "classify(v2)", c2.cls == CoboundaryClass::NotCoboundary, "printed", to_string(c2.cls),
                     "NotCoboundary");

    const Real tol(1e-20, b);
    std::vector<LatticeQuery> q{
        {"v2+v4 in Z", Cocycle::step_scalar(vec_add(tab.v[1], tab.v[3])), Real(1L, b)},
        {"v2-v4 in sqrt5 Z", Cocycle::step_scalar(vec_sub(tab.v[1], tab.v[3])), sqrt(Real(5L, b))}};
    LatticeReport lr = lattice_containment(q, tol);
    for (const auto& c : lr.checks) detail::add_flag(r, c.label, c.contained, "printed", c.max_deviation.str(6), "0");
    detail::add_flag(r, "E(phi2) in {0}", lr.trivial_intersection, "printed", lr.conclusion,
                     "essential values contained in {0}");
    detail::add_flag(r, "phi2 is non-regular", lr.trivial_intersection && c2.cls == CoboundaryClass::NotCoboundary,
                     "printed");

    // a coboundary has bounded Birkhoff sums
    auto prof = deviation_profile(Cocycle::step_scalar(tab.v[3]), p.iet(), 1000000, 8);
    long double sup = 0;
    for (auto x : prof.sup) sup = std::max(sup, x);
    char buf[96];
    std::snprintf(buf, sizeof buf, "sup %.6Lg, exponent %.4Lf", sup, prof.exponent);
    detail::add_flag(r, "phi4 Birkhoff sums bounded up to 10^6", prof.exponent < 0.05L, "derived", buf, "exponent < 0.05");
    r.seconds = sw.seconds();
    return r;
}

} // namespace ietlab
