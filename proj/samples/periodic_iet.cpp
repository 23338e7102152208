// Builds a periodic-type IET from a Rauzy loop and prints its spectrum.
#include <cstdio>

#include <ietlab/ietlab.hpp>

using namespace ietlab;

int main() {
    PrecisionContext ctx(128);
    PeriodicIet p = build_periodic_from_loop(seven_letter_pair(), seven_letter_loop(), ctx);
    std::printf("period %zu, multiplier %zu, rho = %s\n", p.base_period, p.multiplier, p.rho.str(25).c_str());
    std::printf("lengths:");
    for (const auto& x : p.lambda) std::printf(" %s", x.str(12).c_str());
    std::printf("\n");

    LyapunovSpectrum spec = lyapunov_spectrum(p.tower_matrix, ctx);
    std::printf("exponents:");
    for (const auto& th : spec.exponents) std::printf(" %s", th.str(8).c_str());
    std::printf("\ntheta2/theta1 = %s\n", spec.ratio().str(8).c_str());

    Splitting sp = splitting(p.tower_matrix, ctx, singularity_data(p.pair).kappa);
    std::printf("dim stable/central/unstable = %zu/%zu/%zu\n", sp.stable.size(), sp.central.size(), sp.unstable.size());
}
