// Continued fraction of the golden rotation and the Denjoy-Koksma inequality.
#include <cstdio>

#include <ietlab/ietlab.hpp>

using namespace ietlab;

int main() {
    PrecisionContext ctx(128);
    Real alpha = (sqrt(ctx.num(5)) - 1L) / 2L;
    ContinuedFraction cf = continued_fraction(alpha, 20);
    std::printf("q_n:");
    for (const auto& q : cf.q) std::printf(" %s", q.get_str().c_str());
    std::printf("\nbounded partial quotients: %s\n", cf.bpq ? "yes" : "no");

    CircleStep phi = CircleStep::make({ctx.num(0), ctx.num(1) / 2L}, {ctx.num(1) / 2L, -ctx.num(1) / 2L});
    DenjoyKoksmaReport dk = denjoy_koksma_check(phi, alpha, 100000, 200, ctx);
    for (std::size_t i = 0; i < dk.q.size(); ++i)
        std::printf("q = %6llu  max |phi^(q)| = %.3Lf\n", static_cast<unsigned long long>(dk.q[i]), dk.max_abs[i]);
    std::printf("variation %s, violations %zu\n", dk.variation.str(4).c_str(), dk.violations);
}
