#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iterator>
#include <limits>
#include <set>
#include <vector>

#include "cocycle.hpp"
#include "errors.hpp"
#include "fast_iet.hpp"
#include "iet.hpp"
#include "periodic.hpp"
#include "real.hpp"
#include "towers.hpp"

namespace ietlab {

/// Gap statistics of 𝒫_n(T) at one n.
struct PartitionStats {
    std::size_t n = 0;
    Real min_gap, max_gap;
    std::size_t points = 0;
    std::size_t distinct_gaps = 0;  ///< gap lengths distinct up to tolerance
};

struct PartitionReport {
    std::vector<Real> points;  ///< sorted breakpoints of 𝒫_n at the final n
    std::vector<PartitionStats> profile;
    bool translation_ok = true;  ///< Tⁿ is a translation on sampled gaps
    /// sup over the profile of n·max_gap and of 1/(n·min_gap).
    Real sup_n_max, sup_inv_n_min;
};

namespace detail {

/// Clusters of a sorted multiset whose consecutive members differ by more than tol.
inline std::size_t count_distinct(const std::multiset<Real>& gaps, const Real& tol) {
    std::size_t k = 0;
    const Real* prev = nullptr;
    for (const auto& g : gaps) {
        if (!prev || g - *prev > tol) ++k;
        prev = &g;
    }
    return k;
}

} // namespace detail

/// Breakpoints {T^(−k) l_α : 0 ≤ k < n} (plus 0), built incrementally so
/// the gap extremes are available at every n in `checkpoints`.
inline PartitionReport partition_Pn(const Iet& t, std::size_t n, std::vector<std::size_t> checkpoints = {},
                                    std::size_t translation_samples = 16) {
    if (n == 0) fail(ErrorKind::DomainError, "partition_Pn needs n >= 1");
    if (checkpoints.empty() || checkpoints.back() != n) checkpoints.push_back(n);
    std::sort(checkpoints.begin(), checkpoints.end());
    const Real tol = t.tolerance();
    std::set<Real> pts;
    std::multiset<Real> gaps;
    pts.insert(Real::zero(t.bits()));
    pts.insert(t.length());
    gaps.insert(t.length());

    auto insert = [&](const Real& x, std::size_t k) {
        auto hi = pts.lower_bound(x);
        if (hi != pts.end() && *hi - x <= tol) fail(ErrorKind::KeaneViolation, "breakpoint orbits collide", k);
        auto lo = std::prev(hi);
        if (x - *lo <= tol) fail(ErrorKind::KeaneViolation, "breakpoint orbits collide", k);
        gaps.erase(gaps.find(*hi - *lo));
        gaps.insert(x - *lo);
        gaps.insert(*hi - x);
        pts.insert(hi, x);
    };

    std::vector<int> movers;
    for (std::size_t a = 0; a < t.d(); ++a)
        if (t.pair().pi0()[a] != 1) movers.push_back(static_cast<int>(a));
    std::vector<Real> cur;
    for (int a : movers) cur.push_back(t.left(a));

    PartitionReport rep;
    rep.sup_n_max = Real::zero(t.bits());
    rep.sup_inv_n_min = Real::zero(t.bits());
    std::size_t next = 0;
    for (std::size_t k = 0; k < n; ++k) {
        for (auto& x : cur) {
            if (k > 0) x = t.apply_inverse(x);
            insert(x, k);
        }
        while (next < checkpoints.size() && checkpoints[next] == k + 1) {
            PartitionStats st;
            st.n = k + 1;
            st.min_gap = *gaps.begin();
            st.max_gap = *gaps.rbegin();
            st.points = pts.size() - 1;
            st.distinct_gaps = detail::count_distinct(gaps, tol * 1024L);
            Real nn(static_cast<long>(st.n), t.bits());
            rep.sup_n_max = max(rep.sup_n_max, nn * st.max_gap);
            rep.sup_inv_n_min = max(rep.sup_inv_n_min, Real(1L, t.bits()) / (nn * st.min_gap));
            rep.profile.push_back(std::move(st));
            ++next;
        }
    }
    rep.points.assign(pts.begin(), std::prev(pts.end()));

    // Tⁿ on a gap [a,b) moves both ends of a shrunken copy by the same amount.
    std::vector<Real> ends(pts.begin(), pts.end());
    const std::size_t stride = std::max<std::size_t>(1, (ends.size() - 1) / std::max<std::size_t>(1, translation_samples));
    for (std::size_t i = 0; i + 1 < ends.size(); i += stride) {
        Real g = ends[i + 1] - ends[i];
        Real u = ends[i] + g / 64L, v = ends[i + 1] - g / 64L;
        Real u0 = u, v0 = v;
        for (std::size_t k = 0; k < n; ++k) {
            u = t.apply(u);
            v = t.apply(v);
        }
        if (abs((u - u0) - (v - v0)) > tol * static_cast<long>(n + 1)) rep.translation_ok = false;
    }
    return rep;
}

/// m(x,n,T) for a periodic-type IET with levels I^(l) = [0, r^l).
struct MIndex {
    std::size_t m = 0;
    long double second_min = 0;  ///< second smallest point of {x, …, Tⁿx}, |I| = 1
    mpz_class q_min;             ///< min_α Q_α(m)
    mpz_class q_bound;           ///< d·‖Q(m+1)‖
    bool sandwich_ok = false;
};

namespace detail {

inline std::vector<u128> level_thresholds(const PeriodicIet& p, const FastIet& f, const Iet& t) {
    std::vector<u128> th;
    const Real r = level_ratio(p);
    Real cur(1L, p.ctx.bits);
    for (int l = 0; l < 1000; ++l) {
        cur *= r;
        if (cur < Real::pow2(-FastIet::kShift + 8, p.ctx.bits)) break;
        th.push_back(f.to_fixed(cur * t.length(), t.length()));
    }
    return th;  // th[l-1] = fixed(r^l)
}

} // namespace detail

inline MIndex m_index(const PeriodicIet& p, const Real& x, std::uint64_t n) {
    if (n == 0) fail(ErrorKind::DomainError, "m_index needs n >= 1");
    const Iet t = p.iet();
    const FastIet f(t);
    u128 y = f.to_fixed(x, t.length());
    u128 m1 = y, m2 = ~u128(0);
    for (std::uint64_t k = 0; k < n; ++k) {
        f.step_checked(y, k);
        if (y < m1) {
            m2 = m1;
            m1 = y;
        } else if (y < m2) {
            m2 = y;
        }
    }
    const auto th = detail::level_thresholds(p, f, t);
    MIndex out;
    out.second_min = FastIet::to_unit(m2);
    while (out.m < th.size() && m2 < th[out.m]) ++out.m;
    out.q_min = return_time_matrix(p, 0, out.m).column_sums()[0];
    for (const auto& q : return_time_matrix(p, 0, out.m).column_sums()) out.q_min = std::min(out.q_min, q);
    out.q_bound = return_time_matrix(p, 0, out.m + 1).norm() * static_cast<unsigned long>(p.d());
    out.sandwich_ok = out.q_min <= n && mpz_class(static_cast<unsigned long>(n)) <= out.q_bound;
    return out;
}

/// m by definition: scan the orbit and count visits to each I^(l).
inline std::size_t m_index_bruteforce(const PeriodicIet& p, const Real& x, std::size_t n) {
    const Iet t = p.iet();
    std::vector<Real> orb = t.orbit(x, n + 1);
    const Real r = level_ratio(p);
    std::size_t m = 0;
    Real edge = r;
    for (;; edge *= r) {
        std::size_t visits = 0;
        for (const auto& y : orb)
            if (y < edge) ++visits;
        if (visits < 2) break;
        ++m;
    }
    return m;
}

/// Sup-norm growth of Birkhoff sums at geometrically spaced times.
struct DeviationProfile {
    std::vector<std::uint64_t> n;
    std::vector<long double> sup;
    long double exponent = 0;            ///< least-squares slope of log sup vs log n on the tail
    long double corrected_exponent = 0;  ///< same after dividing sup by log^{power} n
    long double log_power = 0;
    std::size_t samples = 0;
    std::size_t aborted = 0;
};

inline std::vector<std::uint64_t> geometric_times(std::uint64_t nmax, long double factor = 1.25L) {
    std::vector<std::uint64_t> ns;
    long double v = 1;
    while (static_cast<std::uint64_t>(v) <= nmax) {
        auto k = static_cast<std::uint64_t>(v);
        if (ns.empty() || ns.back() != k) ns.push_back(k);
        v *= factor;
    }
    if (ns.back() != nmax) ns.push_back(nmax);
    return ns;
}

inline long double loglog_slope(const std::vector<std::uint64_t>& n, const std::vector<long double>& y,
                                std::size_t from, long double log_power = 0) {
    long double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t k = 0;
    for (std::size_t i = from; i < n.size(); ++i) {
        if (y[i] <= 0 || n[i] < 3) continue;
        long double lx = std::log(static_cast<long double>(n[i]));
        long double ly = std::log(y[i]) - log_power * std::log(lx);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++k;
    }
    if (k < 2) return 0;
    return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

/// Low-discrepancy sample points in [0, |λ|): fractional parts of (s + ½ + seed)·g.
inline std::vector<Real> sample_points(const Iet& t, std::size_t count, std::uint64_t seed = 0) {
    const mpfr_prec_t b = t.bits();
    const Real g = (sqrt(Real(5L, b)) - 1L) / 2L;
    std::vector<Real> out;
    for (std::size_t s = 0; s < count; ++s) {
        Real v = Real(static_cast<long>(s + seed), b) * g + Real(1L, b) / 7L;
        v = v - floor(v);
        out.push_back(v * t.length());
    }
    return out;
}

/// Sup over sample points of ‖φ^(n)(x)‖ for n on a geometric grid up to nmax.
/// The exponent is fitted on the upper half (in log n) of the grid; the
/// corrected exponent divides by log^{log_power} n first.
inline DeviationProfile deviation_profile(const Cocycle& phi, const Iet& t, std::uint64_t nmax, std::size_t samples,
                                          long double log_power = 0, std::uint64_t seed = 0) {
    const FastIet f(t);
    const FastCocycle fc(phi, t, f);
    DeviationProfile out;
    out.n = geometric_times(nmax);
    out.sup.assign(out.n.size(), 0);
    out.log_power = log_power;
    for (const auto& x : sample_points(t, samples, seed)) {
        std::vector<long double> local(out.n.size(), 0);
        try {
            auto acc = fc.make_accumulator();
            u128 y = f.to_fixed(x, t.length());
            std::size_t next = 0;
            for (std::uint64_t k = 0; k < nmax; ++k) {
                u128 here = y;
                int a = f.step_checked(y, k);
                fc.add(acc, a, here);
                if (next < out.n.size() && k + 1 == out.n[next]) local[next++] = sup_abs(fc.value(acc));
            }
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NearBreakpoint) throw;
            ++out.aborted;
            continue;
        }
        ++out.samples;
        for (std::size_t i = 0; i < local.size(); ++i) out.sup[i] = std::max(out.sup[i], local[i]);
    }
    const long double lmax = std::log(static_cast<long double>(nmax));
    std::size_t from = 0;
    while (from < out.n.size() && std::log(static_cast<long double>(out.n[from])) < lmax / 2) ++from;
    out.exponent = loglog_slope(out.n, out.sup, from);
    out.corrected_exponent = loglog_slope(out.n, out.sup, from, log_power);
    return out;
}

/// Sampled-evaluation variant for general BV observables: f is called at
/// each orbit point (as a fraction of |λ|) and its values are summed.
inline DeviationProfile deviation_profile(const std::function<std::vector<long double>(long double)>& f_eval,
                                          const Iet& t, std::uint64_t nmax, std::size_t samples,
                                          long double log_power = 0, std::uint64_t seed = 0) {
    const FastIet f(t);
    DeviationProfile out;
    out.n = geometric_times(nmax);
    out.sup.assign(out.n.size(), 0);
    out.log_power = log_power;
    for (const auto& x : sample_points(t, samples, seed)) {
        std::vector<long double> local(out.n.size(), 0), acc;
        try {
            u128 y = f.to_fixed(x, t.length());
            std::size_t next = 0;
            for (std::uint64_t k = 0; k < nmax; ++k) {
                auto v = f_eval(FastIet::to_unit(y));
                if (acc.empty()) acc.assign(v.size(), 0);
                for (std::size_t i = 0; i < v.size(); ++i) acc[i] += v[i];
                f.step_checked(y, k);
                if (next < out.n.size() && k + 1 == out.n[next]) local[next++] = sup_abs(acc);
            }
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NearBreakpoint) throw;
            ++out.aborted;
            continue;
        }
        ++out.samples;
        for (std::size_t i = 0; i < local.size(); ++i) out.sup[i] = std::max(out.sup[i], local[i]);
    }
    const long double lmax = std::log(static_cast<long double>(nmax));
    std::size_t from = 0;
    while (from < out.n.size() && std::log(static_cast<long double>(out.n[from])) < lmax / 2) ++from;
    out.exponent = loglog_slope(out.n, out.sup, from);
    out.corrected_exponent = loglog_slope(out.n, out.sup, from, log_power);
    return out;
}

} // namespace ietlab
