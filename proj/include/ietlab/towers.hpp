#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "cocycle.hpp"
#include "errors.hpp"
#include "fast_iet.hpp"
#include "iet.hpp"
#include "int_matrix.hpp"
#include "periodic.hpp"
#include "real.hpp"

namespace ietlab {

/// Q(k,l): visits of I^(l)_β orbits to I^(k)_α before the first return to I^(l).
inline IntMatrix return_time_matrix(const PeriodicIet& p, std::size_t k, std::size_t l) {
    if (k > l) fail(ErrorKind::DomainError, "return_time_matrix needs k <= l");
    return matpow(p.tower_matrix, l - k);
}

/// Scale factor between consecutive levels, |I^(k+1)| / |I^(k)|.
inline Real level_ratio(const PeriodicIet& p) { return Real(1L, p.ctx.bits) / p.tower_rho(); }

/// The induced map on I^(k) = [0, r^k), which is T rescaled.
inline Iet level_iet(const PeriodicIet& p, std::size_t k) {
    Real s = pow(level_ratio(p), static_cast<long>(k));
    return Iet(p.pair, vec_scale(p.lambda, s), p.ctx);
}

/// First-return itinerary of I^(1)_β to I^(1): the letters visited and the
/// translation accumulated before each visit. By self-similarity the same
/// itinerary, with offsets scaled by r^k, describes level k → k+1.
struct Itinerary {
    std::vector<std::vector<int>> letters;
    std::vector<RealVector> offsets;
    Real ratio;
};

inline Itinerary period_itinerary(const PeriodicIet& p) {
    const Iet t = p.iet();
    Itinerary it;
    it.ratio = level_ratio(p);
    const IntVector heights = p.tower_matrix.column_sums();
    for (std::size_t b = 0; b < p.d(); ++b) {
        const int beta = static_cast<int>(b);
        Real x = it.ratio * (t.left(beta) + t.lambda()[b] / 2L);
        Real y = x;
        std::vector<int> letters;
        RealVector offsets;
        IntVector counts(p.d());
        const unsigned long h = heights[b].get_ui();
        for (unsigned long j = 0; j < h; ++j) {
            int a = t.locate(y, j);
            letters.push_back(a);
            offsets.push_back(y - x);
            counts[a] += 1;
            y += t.translations()[a];
        }
        if (y >= it.ratio || counts != p.tower_matrix.col(b))
            fail(ErrorKind::NotNormalized, "orbit of the induced interval does not follow the return matrix");
        it.letters.push_back(std::move(letters));
        it.offsets.push_back(std::move(offsets));
    }
    return it;
}

namespace detail {

inline Cocycle renormalize_once(const Cocycle& phi, const PeriodicIet& p, const Itinerary& it, std::size_t k) {
    const Iet lk = level_iet(p, k);
    const Iet lk1 = level_iet(p, k + 1);
    const Real scale = pow(it.ratio, static_cast<long>(k));
    const mpfr_prec_t b = std::max(phi.bits(), p.ctx.bits);
    Cocycle out;
    out.kind = phi.kind;
    out.dim = phi.dim;
    for (std::size_t beta = 0; beta < p.d(); ++beta) {
        RealVector slope(phi.dim, Real::zero(b)), cst(phi.dim, Real::zero(b));
        const Real lo = lk1.left(static_cast<int>(beta));
        const Real hi = lk1.right(static_cast<int>(beta));
        for (std::size_t j = 0; j < it.letters[beta].size(); ++j) {
            const int a = it.letters[beta][j];
            const Real shift = it.offsets[beta][j] * scale;
            const Real level_lo = lo + shift, level_hi = hi + shift;
            const Real la = lk.left(a);
            for (std::size_t i = 0; i < phi.dim; ++i) {
                slope[i] += phi.slopes[a][i];
                cst[i] += phi.slopes[a][i] * shift + phi.constants[a][i];
            }
            for (const auto& e : phi.extras) {
                if (e.gamma >= la && e.gamma <= level_lo) {
                    for (std::size_t i = 0; i < phi.dim; ++i) cst[i] += e.jump[i];
                } else if (e.gamma > level_lo && e.gamma < level_hi) {
                    out.extras.push_back({e.gamma - shift, e.jump});
                }
            }
        }
        out.slopes.push_back(std::move(slope));
        out.constants.push_back(std::move(cst));
    }
    out.sort_extras();
    return out;
}

} // namespace detail

/// S(k,l)φ on I^(l) for a cocycle given on I^(k) in level-k coordinates.
inline Cocycle renormalize(const Cocycle& phi, const PeriodicIet& p, std::size_t k, std::size_t l,
                           const Itinerary* itinerary = nullptr) {
    if (k > l) fail(ErrorKind::DomainError, "renormalize needs k <= l");
    if (phi.d() != p.d()) fail(ErrorKind::DimensionError, "cocycle and IET alphabets differ");
    Itinerary local;
    if (!itinerary) {
        local = period_itinerary(p);
        itinerary = &local;
    }
    Cocycle cur = phi;
    for (std::size_t m = k; m < l; ++m) cur = detail::renormalize_once(cur, p, *itinerary, m);
    return cur;
}

/// S(k)φ for k = 0..kmax, sharing one itinerary.
inline std::vector<Cocycle> renormalization_sequence(const Cocycle& phi, const PeriodicIet& p, std::size_t kmax) {
    Itinerary it = period_itinerary(p);
    std::vector<Cocycle> seq{phi};
    for (std::size_t m = 0; m < kmax; ++m) seq.push_back(detail::renormalize_once(seq.back(), p, it, m));
    return seq;
}

/// Rohlin tower C^(n)_α = {T^i I^(n+1)_α : 0 ≤ i < h^(n)_{α₁}}.
struct Tower {
    int letter = 0;
    Real base_left, base_length;
    mpz_class height;
    Real measure;
};

struct TowerStructure {
    std::size_t n = 0;
    int alpha1 = 0;
    IntVector heights;  ///< h^(n)_α, column sums of A^n
    std::vector<Tower> towers;
    Real total_measure;
    /// h^(n)_min / ρⁿ and h^(n)_max / ρⁿ.
    Real min_ratio, max_ratio;
};

inline TowerStructure towers(const PeriodicIet& p, std::size_t n) {
    const Iet t = p.iet();
    const Real r = level_ratio(p);
    if (r > t.lambda()[p.pair.letter_at(0, 1)])
        fail(ErrorKind::NotNormalized, "I^(n+1) is not contained in I^(n)_{α₁}");
    TowerStructure ts;
    ts.n = n;
    ts.alpha1 = p.pair.letter_at(0, 1);
    ts.heights = matpow(p.tower_matrix, n).column_sums();
    const Real rn1 = pow(r, static_cast<long>(n + 1));
    ts.total_measure = Real::zero(p.ctx.bits);
    for (std::size_t a = 0; a < p.d(); ++a) {
        Tower tw;
        tw.letter = static_cast<int>(a);
        tw.base_left = rn1 * t.left(static_cast<int>(a));
        tw.base_length = rn1 * t.lambda()[a];
        tw.height = ts.heights[ts.alpha1];
        tw.measure = tw.base_length * tw.height;
        ts.total_measure += tw.measure;
        ts.towers.push_back(std::move(tw));
    }
    const Real rho_n = pow(p.tower_rho(), static_cast<long>(n));
    ts.min_ratio = Real(ts.heights[0], p.ctx.bits) / rho_n;
    ts.max_ratio = ts.min_ratio;
    for (const auto& h : ts.heights) {
        Real q = Real(h, p.ctx.bits) / rho_n;
        ts.min_ratio = min(ts.min_ratio, q);
        ts.max_ratio = max(ts.max_ratio, q);
    }
    return ts;
}

/// Orbit checks on the level-n towers, run on the fixed-point engine.
struct TowerCheck {
    bool counts_match = true;      ///< climb of I^(n+1)_α visits I_β exactly A^(n+1)_{βα} times
    bool returns_inside = true;    ///< the climb ends in I^(n+1)
    bool window_match = true;      ///< sliding-window counts equal the same column on all of C^(n)_α
    bool shrinking = true;         ///< |T^{h_α^(n+1)}x − x| ≤ |I^(n)_{α₁}| on C^(n)_α
    long double max_displacement = 0;
    long double displacement_bound = 0;
    bool disjoint_checked = false;
    bool disjoint = true;
    std::uint64_t steps = 0;
};

inline TowerCheck check_towers(const PeriodicIet& p, std::size_t n, std::size_t samples = 1,
                               std::uint64_t disjoint_limit = 20000) {
    const Iet t = p.iet();
    const FastIet f(t);
    const TowerStructure ts = towers(p, n);
    const IntMatrix an1 = matpow(p.tower_matrix, n + 1);
    const IntVector climb = an1.column_sums();
    const Real r = level_ratio(p);
    const u128 in_top = f.to_fixed(pow(r, static_cast<long>(n + 1)), t.length());
    const u128 bound = f.to_fixed(pow(r, static_cast<long>(n)) * t.lambda()[ts.alpha1], t.length());
    TowerCheck out;
    out.displacement_bound = FastIet::to_unit(bound);
    const std::uint64_t levels = ts.heights[ts.alpha1].get_ui();
    for (std::size_t a = 0; a < p.d(); ++a) {
        const Tower& tw = ts.towers[a];
        const std::uint64_t h = climb[a].get_ui();
        for (std::size_t s = 0; s < samples; ++s) {
            Real frac = Real(static_cast<long>(2 * s + 1), p.ctx.bits) / Real(static_cast<long>(2 * samples), p.ctx.bits);
            u128 x = f.to_fixed(tw.base_left + tw.base_length * frac, t.length());
            std::vector<std::uint64_t> cnt(p.d(), 0);
            u128 y = x;
            for (std::uint64_t j = 0; j < h; ++j) ++cnt[f.step(y)];
            out.steps += h;
            if (y >= in_top) out.returns_inside = false;
            for (std::size_t b = 0; b < p.d(); ++b)
                if (cnt[b] != an1(b, a).get_ui()) out.counts_match = false;
            u128 lead = y, tail = x;
            for (std::uint64_t i = 0; i < levels; ++i) {
                u128 disp = lead > tail ? lead - tail : tail - lead;
                out.max_displacement = std::max(out.max_displacement, FastIet::to_unit(disp));
                if (disp > bound) out.shrinking = false;
                for (std::size_t b = 0; b < p.d(); ++b)
                    if (cnt[b] != an1(b, a).get_ui()) out.window_match = false;
                if (i + 1 == levels) break;
                --cnt[f.step(tail)];
                ++cnt[f.step(lead)];
            }
            out.steps += 2 * levels;
        }
    }
    if (levels * p.d() <= disjoint_limit) {
        out.disjoint_checked = true;
        struct Level { Real lo, hi; };
        std::vector<Level> all;
        for (const auto& tw : ts.towers) {
            Real half = tw.base_length / 2L;
            Real c = tw.base_left + half;
            for (std::uint64_t i = 0; i < levels; ++i) {
                all.push_back({c - half, c + half});
                c = t.apply(c);
            }
        }
        std::sort(all.begin(), all.end(), [](const Level& u, const Level& v) { return u.lo < v.lo; });
        for (std::size_t i = 0; i + 1 < all.size(); ++i)
            if (all[i].hi > all[i + 1].lo + t.tolerance()) out.disjoint = false;
        if (ts.total_measure > t.length() + t.tolerance()) out.disjoint = false;
    }
    return out;
}

struct ValueIdentityCheck {
    std::uint64_t points = 0;
    std::uint64_t mismatches = 0;
    std::uint64_t steps = 0;
};

/// Checks φ^(h_α^(n+1))(x) = ((Aᵗ)^(n+1)v)_α in exact integer arithmetic for
/// the step cocycle of an integer vector v, at every level point of C^(n)_α
/// above enough base points to reach `min_points` per tower.
inline ValueIdentityCheck tower_value_identity(const PeriodicIet& p, std::size_t n, const IntVector& v,
                                               std::size_t min_points = 100) {
    if (v.size() != p.d()) fail(ErrorKind::DimensionError, "one value per letter expected");
    const Iet t = p.iet();
    const FastIet f(t);
    const TowerStructure ts = towers(p, n);
    const IntMatrix an1 = matpow(p.tower_matrix, n + 1);
    const IntVector want = matvec(mat_transpose(an1), v);
    const IntVector climb = an1.column_sums();
    // |v| < 2^31 and h < 2^32 keep every window sum inside a long
    std::vector<long> vv;
    for (const auto& x : v) {
        if (abs(x) >= mpz_class(1L << 31)) fail(ErrorKind::DomainError, "values must be below 2^31 in magnitude");
        vv.push_back(x.get_si());
    }
    for (const auto& h : climb)
        if (h >= mpz_class(1L << 32)) fail(ErrorKind::Unsupported, "tower too tall for the integer window check");
    const std::uint64_t levels = ts.heights[ts.alpha1].get_ui();
    const std::size_t bases = std::max<std::size_t>(1, (min_points + levels - 1) / levels);
    ValueIdentityCheck out;
    for (std::size_t a = 0; a < p.d(); ++a) {
        const Tower& tw = ts.towers[a];
        const std::uint64_t h = climb[a].get_ui();
        for (std::size_t s = 0; s < bases; ++s) {
            Real frac = Real(static_cast<long>(2 * s + 1), p.ctx.bits) / Real(static_cast<long>(2 * bases), p.ctx.bits);
            u128 tail = f.to_fixed(tw.base_left + tw.base_length * frac, t.length());
            u128 lead = tail;
            const long target = want[a].get_si();
            long sum = 0;
            for (std::uint64_t j = 0; j < h; ++j) sum += vv[f.step(lead)];
            for (std::uint64_t i = 0; i < levels; ++i) {
                ++out.points;
                if (sum != target) ++out.mismatches;
                if (i + 1 == levels) break;
                sum -= vv[f.step(tail)];
                sum += vv[f.step(lead)];
            }
            out.steps += h + 2 * levels;
        }
    }
    return out;
}

} // namespace ietlab
