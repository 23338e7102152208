#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <set>
#include <vector>

#include "birkhoff.hpp"
#include "cocycle.hpp"
#include "errors.hpp"
#include "fast_iet.hpp"
#include "iet.hpp"
#include "permutation.hpp"
#include "real.hpp"

namespace ietlab {

struct ContinuedFraction {
    Real alpha;
    std::vector<long> a;          ///< a₁..a_K
    std::vector<mpz_class> p, q;  ///< convergents p_n/q_n, n = 0..K
    long max_quotient = 0;
    long bound = 0;
    bool bpq = false;  ///< max aₙ ≤ bound
};

/// Expansion α = [0; a₁, a₂, …] to depth K. A remainder that vanishes to
/// working precision raises RationalInput; running out of precision before
/// depth K raises DomainError.
inline ContinuedFraction continued_fraction(const Real& alpha, std::size_t depth, long bound = 1000) {
    if (alpha <= 0L || alpha >= 1L) fail(ErrorKind::DomainError, "alpha must lie in (0,1)");
    const mpfr_prec_t b = alpha.bits();
    ContinuedFraction cf;
    cf.alpha = alpha;
    cf.bound = bound;
    cf.p = {1, 0};
    cf.q = {0, 1};
    Real x = alpha;
    Real err = Real::pow2(-static_cast<long>(b), b);
    for (std::size_t n = 0; n < depth; ++n) {
        if (x <= err * Real::pow2(32, b)) fail(ErrorKind::RationalInput, "expansion terminates: input is rational", n);
        err = err / (x * x) + Real::pow2(-static_cast<long>(b), b) / x;
        if (err > Real::pow2(-20, b)) fail(ErrorKind::DomainError, "precision exhausted before the requested depth", n);
        Real inv = Real(1L, b) / x;
        Real fl = floor(inv);
        long an = fl.round_to_integer().get_si();
        x = inv - fl;
        cf.a.push_back(an);
        cf.max_quotient = std::max(cf.max_quotient, an);
        const std::size_t m = cf.q.size();
        cf.p.push_back(an * cf.p[m - 1] + cf.p[m - 2]);
        cf.q.push_back(an * cf.q[m - 1] + cf.q[m - 2]);
    }
    // drop the seeds so that p[n], q[n] are the n-th convergent
    cf.p.erase(cf.p.begin());
    cf.q.erase(cf.q.begin());
    cf.bpq = cf.max_quotient <= bound;
    return cf;
}

/// |q_n α − p_n| < 1/q_{n+1} for every stored n.
inline bool convergent_bounds_hold(const ContinuedFraction& cf) {
    const mpfr_prec_t b = cf.alpha.bits();
    for (std::size_t n = 0; n + 1 < cf.q.size(); ++n) {
        Real lhs = abs(cf.alpha * cf.q[n] - Real(cf.p[n], b));
        if (!(lhs < Real(1L, b) / Real(cf.q[n + 1], b))) return false;
    }
    return true;
}

/// Rotation x ↦ x + α mod 1 as the 2-IET with λ = (1−α, α).
inline Iet rotation_iet(const Real& alpha, const PrecisionContext& ctx = PrecisionContext()) {
    Real a = alpha.with_bits(ctx.bits);
    return Iet(make_symmetric_pair(2), {Real(1L, ctx.bits) - a, a}, ctx);
}

/// Piecewise-constant function on the circle [0,1): values[i] on [cuts[i], cuts[i+1]).
struct CircleStep {
    std::vector<Real> cuts;  ///< sorted, cuts[0] = 0
    std::vector<Real> values;

    static CircleStep make(std::vector<Real> cuts, std::vector<Real> values) {
        if (cuts.empty() || cuts.size() != values.size()) fail(ErrorKind::DimensionError, "one value per cut expected");
        if (!cuts[0].is_zero()) fail(ErrorKind::DomainError, "first cut must be 0");
        for (std::size_t i = 1; i < cuts.size(); ++i)
            if (!(cuts[i - 1] < cuts[i]) || cuts[i] >= 1L) fail(ErrorKind::DomainError, "cuts must increase inside [0,1)");
        return CircleStep{std::move(cuts), std::move(values)};
    }

    /// Total variation on the circle, including the wrap-around jump.
    Real variation() const {
        Real v = Real::zero(values[0].bits());
        for (std::size_t i = 0; i < values.size(); ++i) v += abs(values[(i + 1) % values.size()] - values[i]);
        return v;
    }
    Real mean() const {
        Real m = Real::zero(values[0].bits());
        for (std::size_t i = 0; i < cuts.size(); ++i) {
            Real hi = i + 1 < cuts.size() ? cuts[i + 1] : Real(1L, cuts[i].bits());
            m += values[i] * (hi - cuts[i]);
        }
        return m;
    }
    const Real& at(const Real& x) const {
        auto it = std::upper_bound(cuts.begin(), cuts.end(), x);
        return values[static_cast<std::size_t>(std::distance(cuts.begin(), it)) - 1];
    }

    /// Same function as a step cocycle over the exchanged intervals of t.
    Cocycle to_cocycle(const Iet& t) const {
        std::vector<RealVector> vals;
        for (std::size_t a = 0; a < t.d(); ++a) vals.push_back({at(t.left(static_cast<int>(a)))});
        std::vector<Jump> extras;
        for (std::size_t i = 1; i < cuts.size(); ++i) {
            bool endpoint = false;
            for (std::size_t a = 0; a < t.d(); ++a)
                if (cuts[i] == t.left(static_cast<int>(a))) endpoint = true;
            if (!endpoint) extras.push_back({cuts[i], {values[i] - values[i - 1]}});
        }
        return Cocycle::step(vals, std::move(extras));
    }
};

struct DenjoyKoksmaReport {
    ContinuedFraction cf;
    Real variation;
    std::vector<std::uint64_t> q;       ///< tested denominators
    std::vector<long double> max_abs;   ///< max over samples of |φ^(q)(x)|
    std::size_t samples = 0, aborted = 0;
    std::size_t violations = 0;
};

inline DenjoyKoksmaReport denjoy_koksma_check(const CircleStep& phi, const Real& alpha, std::uint64_t q_max,
                                              std::size_t samples, const PrecisionContext& ctx = PrecisionContext()) {
    DenjoyKoksmaReport rep;
    std::size_t depth = 1;
    for (;; ++depth) {
        rep.cf = continued_fraction(alpha, depth);
        if (rep.cf.q.back() > q_max) break;
    }
    for (const auto& qq : rep.cf.q)
        if (qq <= q_max && qq >= 1 && (rep.q.empty() || rep.q.back() != qq.get_ui())) rep.q.push_back(qq.get_ui());
    rep.max_abs.assign(rep.q.size(), 0);
    rep.variation = phi.variation();
    const long double var = rep.variation.to_long_double() * (1 + 1e-15L);
    const Iet t = rotation_iet(alpha, ctx);
    const Cocycle c = phi.to_cocycle(t);
    const FastIet f(t);
    const FastCocycle fc(c, t, f);
    for (const auto& x : sample_points(t, samples)) {
        try {
            auto acc = fc.make_accumulator();
            u128 y = f.to_fixed(x, t.length());
            std::size_t next = 0;
            for (std::uint64_t k = 0; next < rep.q.size(); ++k) {
                u128 here = y;
                fc.add(acc, f.step_checked(y, k), here);
                if (k + 1 == rep.q[next]) {
                    long double v = std::fabs(fc.value(acc)[0]);
                    rep.max_abs[next] = std::max(rep.max_abs[next], v);
                    if (v > var) ++rep.violations;
                    ++next;
                }
            }
            ++rep.samples;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NearBreakpoint) throw;
            ++rep.aborted;
        }
    }
    return rep;
}

/// Slope b of the fit sup ≈ a + b·log n over the tail of a profile.
inline long double log_growth_slope(const DeviationProfile& prof) {
    long double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t k = 0;
    const long double lmax = std::log(static_cast<long double>(prof.n.back()));
    for (std::size_t i = 0; i < prof.n.size(); ++i) {
        long double lx = std::log(static_cast<long double>(prof.n[i]));
        if (lx < lmax / 2) continue;
        sx += lx;
        sy += prof.sup[i];
        sxx += lx * lx;
        sxy += lx * prof.sup[i];
        ++k;
    }
    if (k < 2) return 0;
    return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

/// Gaps between the discontinuities {c − kα mod 1 : c a cut, 0 ≤ k < n}.
struct SpacingReport {
    std::vector<std::size_t> n;
    std::vector<Real> min_gap, max_gap;
    Real sup_ratio;  ///< sup over n of max_gap / min_gap
};

inline SpacingReport discontinuity_spacing(const CircleStep& phi, const Real& alpha, std::size_t n_max,
                                           std::vector<std::size_t> checkpoints) {
    const mpfr_prec_t b = alpha.bits();
    const Real one(1L, b);
    std::set<Real> pts;
    std::multiset<Real> gaps;
    auto insert = [&](Real x) {
        if (pts.empty()) {
            pts.insert(x);
            gaps.insert(one);
            return;
        }
        auto hi = pts.lower_bound(x);
        Real nxt = hi == pts.end() ? *pts.begin() + one : *hi;
        Real prv = hi == pts.begin() ? *pts.rbegin() - one : *std::prev(hi);
        gaps.erase(gaps.find(nxt - prv));
        gaps.insert(x - prv);
        gaps.insert(nxt - x);
        pts.insert(x);
    };
    std::sort(checkpoints.begin(), checkpoints.end());
    SpacingReport rep;
    rep.sup_ratio = Real::zero(b);
    std::size_t next = 0;
    std::vector<Real> cur(phi.cuts.begin(), phi.cuts.end());
    for (std::size_t k = 0; k < n_max; ++k) {
        for (auto& c : cur) {
            if (k > 0) {
                c -= alpha;
                if (c < 0L) c += one;
            }
            insert(c);
        }
        while (next < checkpoints.size() && checkpoints[next] == k + 1) {
            rep.n.push_back(k + 1);
            rep.min_gap.push_back(*gaps.begin());
            rep.max_gap.push_back(*gaps.rbegin());
            rep.sup_ratio = max(rep.sup_ratio, *gaps.rbegin() / *gaps.begin());
            ++next;
        }
    }
    return rep;
}

/// ℤ²-valued cocycle (φ₁(x), φ₂(y)) over (x,y) ↦ (x+α₁, y+α₂).
struct ProductRotationReport {
    std::size_t samples = 0;
    std::uint64_t steps = 0;
    std::uint64_t origin_returns = 0;  ///< (sample, n) pairs with φ^(n) = (0,0)
    long double frequency = 0;
    std::vector<std::uint64_t> returns_per_sample;
    SpacingReport spacing1, spacing2;
};

inline ProductRotationReport product_rotation_simulate(const Real& alpha1, const Real& alpha2, const CircleStep& phi1,
                                                       const CircleStep& phi2, std::uint64_t n_max, std::size_t samples,
                                                       std::size_t spacing_n = 10000,
                                                       const PrecisionContext& ctx = PrecisionContext()) {
    for (const auto* ph : {&phi1, &phi2})
        for (const auto& v : ph->values)
            if (v != Real(v.round_to_integer(), v.bits())) fail(ErrorKind::DomainError, "cocycle values must be integers");
    const Iet t1 = rotation_iet(alpha1, ctx), t2 = rotation_iet(alpha2, ctx);
    const FastIet f1(t1), f2(t2);
    const Cocycle c1 = phi1.to_cocycle(t1), c2 = phi2.to_cocycle(t2);
    const FastCocycle fc1(c1, t1, f1), fc2(c2, t2, f2);
    ProductRotationReport rep;
    const auto xs = sample_points(t1, samples, 0);
    const auto ys = sample_points(t2, samples, 7);
    for (std::size_t s = 0; s < samples; ++s) {
        u128 x = f1.to_fixed(xs[s], t1.length()), y = f2.to_fixed(ys[s], t2.length());
        auto a1 = fc1.make_accumulator();
        auto a2 = fc2.make_accumulator();
        std::uint64_t hits = 0;
        for (std::uint64_t k = 0; k < n_max; ++k) {
            u128 hx = x, hy = y;
            fc1.add(a1, f1.step(x), hx);
            fc2.add(a2, f2.step(y), hy);
            if (std::fabs(fc1.value(a1)[0]) < 0.5L && std::fabs(fc2.value(a2)[0]) < 0.5L) ++hits;
        }
        rep.returns_per_sample.push_back(hits);
        rep.origin_returns += hits;
        rep.steps += n_max;
        ++rep.samples;
    }
    rep.frequency = rep.steps ? static_cast<long double>(rep.origin_returns) / static_cast<long double>(rep.steps) : 0;
    std::vector<std::size_t> cps;
    for (std::size_t n = 10; n <= spacing_n; n *= 10) cps.push_back(n);
    if (cps.empty() || cps.back() != spacing_n) cps.push_back(spacing_n);
    rep.spacing1 = discontinuity_spacing(phi1, alpha1.with_bits(ctx.bits), spacing_n, cps);
    rep.spacing2 = discontinuity_spacing(phi2, alpha2.with_bits(ctx.bits), spacing_n, cps);
    return rep;
}

} // namespace ietlab
