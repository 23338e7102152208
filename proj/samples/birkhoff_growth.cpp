// Deviation of Birkhoff sums for a piecewise-linear cocycle, before and after correction.
#include <cstdio>

#include <ietlab/ietlab.hpp>

using namespace ietlab;

int main() {
    PeriodicIet p0 = seven_letter_iet();
    auto r = [](long v, mpfr_prec_t b) { return RealVector{Real(v, b)}; };
    auto make = [&](const PeriodicIet& p) {
        const mpfr_prec_t b = p.ctx.bits;
        return Cocycle::piecewise_linear(r(1, b), {r(0, b), r(1, b), r(-1, b), r(2, b), r(0, b), r(-2, b), r(1, b)})
            .with_zero_mean(p.iet());
    };

    CorrectionPlan plan = plan_correction(make(p0), p0, 64);
    PeriodicIet p = seven_letter_iet(PrecisionContext(plan.bits));
    Cocycle phi = make(p);
    CorrectionResult res = correct_bv(phi, p, splitting(p.tower_matrix, p.ctx, singularity_data(p.pair).kappa), plan.depth);
    std::printf("depth %zu at %ld bits, tail bound %s\n", res.depth, static_cast<long>(plan.bits), res.tail_bound.str(3).c_str());

    DeviationProfile before = deviation_profile(phi, p.iet(), 1000000, 16);
    DeviationProfile after = deviation_profile(res.corrected, p.iet(), 1000000, 16);
    std::printf("%10s %14s %14s\n", "n", "sup before", "sup after");
    for (std::size_t i = 0; i < before.n.size(); i += 8)
        std::printf("%10llu %14.6Lf %14.6Lf\n", static_cast<unsigned long long>(before.n[i]), before.sup[i], after.sup[i]);
    std::printf("fitted exponents: %.4Lf before, %.4Lf after\n", before.exponent, after.exponent);
}
