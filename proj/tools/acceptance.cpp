// Acceptance run: one PASS/FAIL line per criterion. Tolerances are fixed here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <ietlab/ietlab.hpp>

using namespace ietlab;

namespace {

constexpr mpfr_prec_t kBits = 128;
constexpr std::uint64_t kSeed = 20240917;

// 1
constexpr double kC1RhoRel = 1e-25;
constexpr double kC1RatioAbs = 5e-4;
constexpr double kC1Seconds = 5;
// 2
constexpr long kC2ClosedFormMaxN = 10;
constexpr long kC2MonotoneMaxN = 100;
constexpr long kC2FarN = 10000;
constexpr double kC2FarBound = 0.11;
constexpr double kC2Seconds = 10;
// 3
constexpr double kC3Seconds = 5;
// 4
constexpr std::size_t kC4MaxPower = 4;  // A^1..A^4
constexpr std::size_t kC4PointsPerTower = 100;
constexpr double kC4Seconds = 60;
// 5
constexpr std::uint64_t kC5Nmax = 1000000;
constexpr std::size_t kC5Samples = 16;
constexpr int kC5Cocycles = 5;
constexpr double kC5Slack = 0.1;
constexpr double kC5StableBound = 0.02;
constexpr double kC5Seconds = 600;
// 6
constexpr std::size_t kC6Levels = 12;
constexpr mpfr_prec_t kC6TargetBits = 64;
constexpr double kC6BoundedRatio = 2.0;
constexpr double kC6Seconds = 300;
// 7
constexpr std::uint64_t kC7Qmax = 1000000;
constexpr std::size_t kC7Samples = 1000;
constexpr double kC7Bound = 2.0;
constexpr double kC7Seconds = 120;
// 8
constexpr int kC8Steps = 1000;
constexpr int kC8StepsPerTrial = 10;
constexpr int kC8MaxD = 8;
constexpr double kC8Seconds = 120;
// 9
constexpr std::size_t kC9Nmax = 10000;
constexpr double kC9MaxC = 1000;
constexpr double kC9Seconds = 120;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmtd(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

Splitting split_of(const PeriodicIet& p) { return splitting(p.tower_matrix, p.ctx, singularity_data(p.pair).kappa); }

const ReproEntry* find(const ReproReport& r, const std::string& name) {
    for (const auto& e : r.entries)
        if (e.name == name) return &e;
    return nullptr;
}

Outcome criterion1() {
    ReproReport r = example_7_2(PrecisionContext(kBits));
    const ReproEntry* rho1 = find(r, "rho1");
    const ReproEntry* rho2 = find(r, "rho2");
    const ReproEntry* ratio = find(r, "theta2/theta1");
    bool ok = r.pass() && rho1 && rho2 && ratio && rho1->rel_delta < kC1RhoRel && rho2->rel_delta < kC1RhoRel &&
              ratio->abs_delta < kC1RatioAbs && r.seconds < kC1Seconds;
    std::string d = ratio ? "theta2/theta1 = " + ratio->computed.substr(0, 8) + " (|delta| " + fmtd("%.1e", ratio->abs_delta) + ")" : "";
    if (rho1 && rho2) d += ", rho rel deltas " + fmtd("%.1e", rho1->rel_delta) + " / " + fmtd("%.1e", rho2->rel_delta);
    return {ok, d};
}

Outcome criterion2() {
    const PrecisionContext ctx(kBits);
    bool closed = true;
    double worst = 0;
    for (long n = 1; n <= kC2ClosedFormMaxN; ++n) {
        ReproReport r = appendix_b(n, ctx);
        closed = closed && r.pass();
        for (const auto& e : r.entries) {
            if (e.name.rfind("rho", 0) != 0) continue;
            worst = std::max(worst, e.rel_delta);
            if (e.rel_delta > std::ldexp(1.0, -64)) closed = false;
        }
    }
    std::vector<Real> ratios;
    for (long n = 1; n <= kC2MonotoneMaxN; ++n) ratios.push_back(family_ratio(n, ctx));
    std::vector<long> rises;
    for (std::size_t i = 1; i < ratios.size(); ++i)
        if (!(ratios[i] < ratios[i - 1])) rises.push_back(static_cast<long>(i));
    const Real far = family_ratio(kC2FarN, ctx);
    const bool far_ok = far < Real(kC2FarBound, kBits);

    std::string d = "closed forms n<=10 max rel " + fmtd("%.1e", worst) + "; ratio(" + std::to_string(kC2FarN) + ") = " +
                    far.str(5) + "; ";
    if (rises.empty()) {
        d += "strictly decreasing on 1..100";
    } else {
        d += "not strictly decreasing: ratio(" + std::to_string(rises[0]) + ") = " + ratios[rises[0] - 1].str(5) + " < ratio(" +
             std::to_string(rises[0] + 1) + ") = " + ratios[rises[0]].str(5) + ", " + std::to_string(rises.size()) +
             " increase(s)";
    }
    return {closed && rises.empty() && far_ok, d};
}

Outcome criterion3() {
    ReproReport r = appendix_d(PrecisionContext(kBits));
    std::size_t ok = 0;
    for (const auto& e : r.entries) ok += e.pass;
    const ReproEntry* pf = find(r, "PF eigenvalue");
    std::string d = std::to_string(ok) + "/" + std::to_string(r.entries.size()) + " checks";
    if (pf) d += ", PF rel delta " + fmtd("%.1e", pf->rel_delta);
    return {r.pass() && r.seconds < kC3Seconds, d};
}

Outcome criterion4() {
    std::mt19937_64 rng(kSeed);
    std::uniform_int_distribution<long> val(-9, 9);
    bool ok = true;
    std::uint64_t points = 0, mismatches = 0, steps = 0;
    for (const PeriodicIet& p : {seven_letter_iet(PrecisionContext(kBits)), fixed_vector_iet(PrecisionContext(kBits))}) {
        IntVector v;
        for (std::size_t a = 0; a < p.d(); ++a) v.push_back(mpz_class(val(rng)));
        for (std::size_t n = 0; n + 1 <= kC4MaxPower; ++n) {
            const TowerCheck tc = check_towers(p, n);
            ok = ok && tc.counts_match && tc.returns_inside && tc.window_match;
            steps += tc.steps;
            const ValueIdentityCheck vc = tower_value_identity(p, n, v, kC4PointsPerTower);
            points += vc.points;
            mismatches += vc.mismatches;
            steps += vc.steps;
            ok = ok && vc.mismatches == 0 && vc.points >= kC4PointsPerTower * p.d();
        }
    }
    return {ok, "visit counts A^1..A^4 on both IETs, value identity at " + std::to_string(points) + " points, " +
                    std::to_string(mismatches) + " mismatches, " + std::to_string(steps) + " orbit steps"};
}

Outcome criterion5() {
    const PeriodicIet p = seven_letter_iet(PrecisionContext(kBits));
    const Iet t = p.iet();
    const LyapunovSpectrum spec = lyapunov_spectrum(p.tower_matrix, p.ctx);
    const double ratio = spec.ratio().to_double();
    const long double log_power = spec.jordan_max + 1;
    std::mt19937_64 rng(kSeed);
    std::uniform_int_distribution<long> slope(-8, 8), cst(-12, 12);
    bool ok = true;
    double worst = -INFINITY, worst_corr = -INFINITY;
    for (int i = 0; i < kC5Cocycles; ++i) {
        long s = 0;
        while (s == 0) s = slope(rng);
        std::vector<RealVector> c;
        for (std::size_t a = 0; a < p.d(); ++a) c.push_back({Real(cst(rng), kBits) / 4L});
        Cocycle phi = Cocycle::piecewise_linear({Real(s, kBits) / 4L}, c).with_zero_mean(t);
        DeviationProfile prof = deviation_profile(phi, t, kC5Nmax, kC5Samples, log_power, kSeed + i);
        worst = std::max(worst, static_cast<double>(prof.exponent));
        worst_corr = std::max(worst_corr, static_cast<double>(prof.corrected_exponent));
        ok = ok && prof.samples > 0 && static_cast<double>(prof.exponent) <= ratio + kC5Slack;
    }
    const Splitting sp = split_of(p);
    DeviationProfile st = deviation_profile(Cocycle::step_scalar(sp.stable[0]), t, kC5Nmax, kC5Samples, 0, kSeed);
    ok = ok && static_cast<double>(st.exponent) <= kC5StableBound;
    return {ok, "max PL exponent " + fmtd("%.4f", worst) + " (log^" + std::to_string(spec.jordan_max + 1) + "-corrected " +
                    fmtd("%.4f", worst_corr) + ") vs bound " + fmtd("%.4f", ratio + kC5Slack) + "; stable step exponent " +
                    fmtd("%.4f", static_cast<double>(st.exponent))};
}

RealVector lift_to_seven(const Cocycle& phi, const Iet& t4, const Iet& t7) {
    const auto groups = four_letter_groups();
    RealVector u(7);
    for (std::size_t g = 0; g < groups.size(); ++g)
        for (int a : groups[g]) {
            Real v = phi.constants[g][0];
            for (const auto& e : phi.extras)
                if (e.gamma > t4.left(static_cast<int>(g)) && e.gamma <= t7.left(a) + t7.tolerance()) v += e.jump[0];
            u[a] = v;
        }
    return u;
}

Outcome criterion6() {
    const PeriodicIet p0 = four_letter_iet(PrecisionContext(kBits));
    const PeriodicIet s0 = seven_letter_iet(PrecisionContext(kBits));
    const CorrectionPlan plan = plan_correction(gamma_cocycle(p0, s0.lambda), p0, kC6TargetBits);
    const PrecisionContext ctx(std::max(plan.bits, correction_bits(p0, kC6TargetBits, kC6Levels)));
    const PeriodicIet p = four_letter_iet(ctx);
    const PeriodicIet seven = seven_letter_iet(ctx);
    const Splitting sp = split_of(p);
    const Cocycle phi = gamma_cocycle(p, seven.lambda);
    const Cocycle strong = phi.plus_step_scalar(zero_mean_unstable_direction(sp, p.lambda));
    const double rho2 = std::exp(sp.theta_plus.to_double());

    const CorrectionResult res = correct_bv(phi, p, sp, plan.depth, kC6Levels);
    const GrowthReport after = growth_check(res.corrected, p, kC6Levels);
    const GrowthReport before = growth_check(phi, p, kC6Levels);
    const GrowthReport before_strong = growth_check(strong, p, kC6Levels);
    const GrowthReport after_strong = growth_check(correct_bv(strong, p, sp, plan.depth).corrected, p, kC6Levels);
    double sup_after = 0;
    for (const auto& s : after.sup) sup_after = std::max(sup_after, s.to_double());

    const CorrectionResult st = correct_step(lift_to_seven(phi, p.iet(), seven.iet()), split_of(seven), seven.lambda);
    const auto groups = four_letter_groups();
    Real worst = Real::zero(ctx.bits);
    for (std::size_t g = 0; g < groups.size(); ++g)
        for (int a : groups[g]) worst = max(worst, abs(st.h[a][0] - res.h[g][0]));
    const Real bound = res.tail_bound + res.rounding_bound;
    const bool agree = worst <= bound;

    const bool ok = after.late_over_early <= kC6BoundedRatio && before.per_step_growth >= rho2 && agree;
    return {ok, "corrected sup <= " + fmtd("%.3f", sup_after) + " (late/early " + fmtd("%.2f", after.late_over_early) +
                    "); uncorrected growth/step over k=6..12 " + fmtd("%.5f", before.per_step_growth) + " vs exp(theta2) " +
                    fmtd("%.5f", rho2) + "; with a unit unstable step added " + fmtd("%.5f", before_strong.per_step_growth) +
                    " (corrected late/early " + fmtd("%.2f", after_strong.late_over_early) + "); step vs series " +
                    worst.str(3) + " <= " + bound.str(3)};
}

Outcome criterion7() {
    const PrecisionContext ctx(kBits);
    const Real golden = (sqrt(ctx.num(5)) - 1L) / 2L;
    const CircleStep phi = CircleStep::make({ctx.num(0), ctx.num(1) / 2L}, {ctx.num(1) / 2L, -ctx.num(1) / 2L});
    const DenjoyKoksmaReport rep = denjoy_koksma_check(phi, golden, kC7Qmax, kC7Samples, ctx);
    long double worst = 0;
    std::size_t over = 0;
    for (auto m : rep.max_abs) {
        worst = std::max(worst, m);
        if (m > kC7Bound) ++over;
    }
    const bool ok = rep.violations == 0 && over == 0 && rep.samples == kC7Samples && !rep.q.empty();
    return {ok, std::to_string(rep.q.size()) + " denominators up to " + std::to_string(rep.q.back()) + ", " +
                    std::to_string(rep.samples) + " points, max |sum| " + fmtd("%.3f", static_cast<double>(worst)) + ", " +
                    std::to_string(rep.violations + over) + " violations"};
}

PermutationPair random_irreducible(std::mt19937_64& rng, int d) {
    std::vector<int> pi0(d), pi1(d);
    for (int i = 0; i < d; ++i) pi0[i] = i + 1;
    for (;;) {
        pi1 = pi0;
        std::shuffle(pi1.begin(), pi1.end(), rng);
        PermutationPair p(pi0, pi1);
        if (p.irreducible()) return p;
    }
}

Outcome criterion8() {
    std::mt19937_64 rng(kSeed);
    std::uniform_int_distribution<int> dim(2, kC8MaxD);
    int steps = 0, omega_fail = 0, recon_fail = 0, skipped = 0;
    double worst = 0;
    while (steps < kC8Steps) {
        const int d = dim(rng);
        const PermutationPair pair = random_irreducible(rng, d);
        RealVector lam;
        for (int a = 0; a < d; ++a) {
            Real hi(static_cast<long>(rng() >> 2), kBits), lo(static_cast<long>(rng() >> 2), kBits);
            lam.push_back((hi + lo / Real::pow2(62, kBits) + 1L) / Real::pow2(62, kBits));
        }
        const Iet t(pair, normalized(lam), PrecisionContext(kBits));
        Iet cur = t;
        IntMatrix theta = IntMatrix::identity(d);
        try {
            for (int k = 0; k < kC8StepsPerTrial && steps < kC8Steps; ++k, ++steps) {
                auto [st, next] = rauzy_step(cur);
                if (!(mat_transpose(st.theta) * omega_matrix(cur.pair()) * st.theta == omega_matrix(st.new_pair))) ++omega_fail;
                theta = theta * st.theta;
                cur = std::move(next);
                RealVector back = matvec(theta, cur.lambda());
                Real err = Real::zero(kBits);
                for (int a = 0; a < d; ++a) err = max(err, abs(back[a] - t.lambda()[a]));
                worst = std::max(worst, err.to_double());
                if (err > Real::pow2(-64, kBits) * static_cast<long>(d)) ++recon_fail;
            }
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NearBreakpoint && e.kind() != ErrorKind::KeaneViolation) throw;
            ++skipped;
        }
    }
    return {omega_fail == 0 && recon_fail == 0,
            std::to_string(steps) + " steps, " + std::to_string(omega_fail) + " Omega mismatches, max |lambda - Theta lambda'| " +
                fmtd("%.1e", worst) + " (bound d*2^-64), " + std::to_string(skipped) + " trials cut short"};
}

Outcome criterion9() {
    const PeriodicIet p = seven_letter_iet(PrecisionContext(kBits));
    std::vector<std::size_t> all;
    for (std::size_t n = 1; n <= kC9Nmax; ++n) all.push_back(n);
    const PartitionReport rep = partition_Pn(p.iet(), kC9Nmax, all);
    const double c = std::max(rep.sup_n_max.to_double(), rep.sup_inv_n_min.to_double());
    return {c <= kC9MaxC && rep.profile.size() == kC9Nmax,
            "c = " + fmtd("%.3f", c) + " (sup n*max gap " + rep.sup_n_max.str(5) + ", sup 1/(n*min gap) " +
                rep.sup_inv_n_min.str(5) + ") over n <= " + std::to_string(kC9Nmax)};
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* title;
        double seconds;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> all{
        {1, "seven-letter example reproduction", kC1Seconds, criterion1},
        {2, "four-letter family closed forms and ratio monotonicity", kC2Seconds, criterion2},
        {3, "five-letter example with a fixed vector", kC3Seconds, criterion3},
        {4, "tower visit counts and value identity", kC4Seconds, criterion4},
        {5, "deviation exponents of zero-mean cocycles", kC5Seconds, criterion5},
        {6, "correction efficacy", kC6Seconds, criterion6},
        {7, "Denjoy-Koksma for the golden rotation", kC7Seconds, criterion7},
        {8, "Rauzy identities on random pairs", kC8Seconds, criterion8},
        {9, "gap bounds of the breakpoint partition", kC9Seconds, criterion9},
    };
    int failed = 0;
    for (const auto& c : all) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < c.seconds;
        if (!in_time) o.detail += "; over the " + fmtd("%.0f", c.seconds) + " s budget";
        const bool pass = o.pass && in_time;
        failed += !pass;
        std::printf("criterion %d %s  %s | %s [%.2f s]\n", c.id, pass ? "PASS" : "FAIL", c.title, o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria pass\n", static_cast<int>(all.size()) - failed, all.size());
    return failed == 0 ? 0 : 1;
}
