#pragma once

#include <cstddef>

#include "cocycle.hpp"
#include "errors.hpp"
#include "iet.hpp"
#include "real.hpp"

namespace ietlab {

/// Point (x, s) of the special flow space {(x, s) : 0 ≤ s < f(x)}.
struct FlowState {
    Real x, s;
};

/// Infimum of a scalar step/PL roof over I (attained at piece ends).
inline Real roof_min(const Cocycle& roof, const Iet& t) {
    if (roof.dim != 1) fail(ErrorKind::DimensionError, "roof must be scalar");
    Real best = roof.eval_in(t, 0, t.left(0))[0];
    for (std::size_t a = 0; a < roof.d(); ++a) {
        const int ai = static_cast<int>(a);
        const Real l = t.left(ai), r = t.right(ai);
        std::vector<Real> cuts{l};
        for (const auto& e : roof.extras)
            if (e.gamma > l && e.gamma < r) cuts.push_back(e.gamma);
        cuts.push_back(r);
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            Real v = roof.eval_in(t, ai, cuts[k])[0];
            best = min(best, min(v, v + roof.slopes[a][0] * (cuts[k + 1] - cuts[k])));
        }
    }
    return best;
}

/// Advances (x, s) by time t under the special flow over T with roof f:
/// finds n with f^(n)(x) ≤ s+t < f^(n+1)(x), negative times included.
inline FlowState special_flow_step(const Iet& t, const Cocycle& roof, const FlowState& st, const Real& time) {
    if (!(roof_min(roof, t) > 0L)) fail(ErrorKind::DomainError, "roof must be bounded away from zero");
    Real x = st.x, s = st.s;
    Real fx = roof.eval(t, x)[0];
    if (s < 0L || s >= fx) fail(ErrorKind::DomainError, "state is outside the flow space");
    s += time;
    std::size_t k = 0;
    while (s >= fx) {
        s -= fx;
        int a = t.locate(x, k++);
        x += t.translations()[a];
        fx = roof.eval(t, x)[0];
    }
    while (s < 0L) {
        x = t.apply_inverse(x);
        ++k;
        fx = roof.eval(t, x)[0];
        s += fx;
    }
    return {x, s};
}

} // namespace ietlab
