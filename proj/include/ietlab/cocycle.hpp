#pragma once

#include <algorithm>
#include <cstddef>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "fast_iet.hpp"
#include "iet.hpp"
#include "linalg.hpp"
#include "real.hpp"

namespace ietlab {

enum class CocycleKind { Step, PiecewiseLinear };

/// Discontinuity at gamma in the interior of an exchanged interval, with
/// jump φ₊(γ) − φ₋(γ).
struct Jump {
    Real gamma;
    RealVector jump;
};

/// ℝ^ℓ-valued cocycle given on I_α by φ(x) = s_α·x + c_α + Σ_{γᵢ ∈ [l_α, x]} d̄ᵢ.
///
/// Step cocycles have every s_α = 0. Piecewise-linear cocycles as input
/// share one slope; renormalization produces per-interval slopes.
struct Cocycle {
    CocycleKind kind = CocycleKind::Step;
    std::size_t dim = 1;
    std::vector<RealVector> slopes;     ///< per letter, length dim
    std::vector<RealVector> constants;  ///< per letter, length dim
    std::vector<Jump> extras;           ///< sorted by gamma

    std::size_t d() const { return constants.size(); }

    static Cocycle step(const std::vector<RealVector>& values, std::vector<Jump> extras = {}) {
        if (values.empty()) fail(ErrorKind::DimensionError, "step cocycle needs one value per letter");
        Cocycle c;
        c.kind = CocycleKind::Step;
        c.dim = values[0].size();
        const mpfr_prec_t b = values[0][0].bits();
        c.constants = values;
        c.slopes.assign(values.size(), RealVector(c.dim, Real::zero(b)));
        c.extras = std::move(extras);
        c.sort_extras();
        c.validate();
        return c;
    }
    /// Scalar step cocycle from a value vector.
    static Cocycle step_scalar(const RealVector& v, std::vector<Jump> extras = {}) {
        std::vector<RealVector> vals;
        for (const auto& x : v) vals.push_back({x});
        return step(vals, std::move(extras));
    }
    static Cocycle piecewise_linear(const RealVector& slope, const std::vector<RealVector>& constants,
                                    std::vector<Jump> extras = {}) {
        if (constants.empty()) fail(ErrorKind::DimensionError, "PL cocycle needs one constant per letter");
        Cocycle c;
        c.kind = CocycleKind::PiecewiseLinear;
        c.dim = slope.size();
        c.constants = constants;
        c.slopes.assign(constants.size(), slope);
        c.extras = std::move(extras);
        c.sort_extras();
        c.validate();
        return c;
    }
    static Cocycle zero(std::size_t d, std::size_t dim, mpfr_prec_t bits) {
        return step(std::vector<RealVector>(d, RealVector(dim, Real::zero(bits))));
    }

    void sort_extras() {
        std::sort(extras.begin(), extras.end(), [](const Jump& a, const Jump& b) { return a.gamma < b.gamma; });
    }
    void validate() const {
        for (std::size_t a = 0; a < d(); ++a)
            if (constants[a].size() != dim || slopes[a].size() != dim)
                fail(ErrorKind::DimensionError, "cocycle entries have inconsistent dimension");
        for (std::size_t i = 0; i < extras.size(); ++i) {
            if (extras[i].jump.size() != dim) fail(ErrorKind::DimensionError, "jump has wrong dimension");
            if (i && extras[i].gamma == extras[i - 1].gamma) fail(ErrorKind::DomainError, "extra discontinuities must be distinct");
        }
    }
    /// Rejects extras sitting on an endpoint of an exchanged interval.
    void validate_on(const Iet& t) const {
        if (d() != t.d()) fail(ErrorKind::DimensionError, "cocycle and IET alphabets differ");
        for (const auto& j : extras) {
            if (j.gamma <= 0L || j.gamma >= t.length()) fail(ErrorKind::DomainError, "extra discontinuity outside the interval");
            for (std::size_t a = 0; a < t.d(); ++a)
                if (j.gamma == t.left(static_cast<int>(a)))
                    fail(ErrorKind::DomainError, "extra discontinuity coincides with an endpoint");
        }
    }

    mpfr_prec_t bits() const { return constants[0][0].bits(); }

    /// φ(x), with x located among the intervals of t.
    RealVector eval(const Iet& t, const Real& x, std::optional<std::size_t> step = std::nullopt) const {
        return eval_in(t, t.locate(x, step), x);
    }
    RealVector eval_in(const Iet& t, int a, const Real& x) const {
        RealVector v(dim, Real::zero(std::max(bits(), x.bits())));
        for (std::size_t i = 0; i < dim; ++i) v[i] = slopes[a][i] * x + constants[a][i];
        const Real& l = t.left(a);
        for (const auto& j : extras) {
            if (j.gamma > x) break;
            if (j.gamma >= l)
                for (std::size_t i = 0; i < dim; ++i) v[i] += j.jump[i];
        }
        return v;
    }

    /// ∫ over I_α, per coordinate.
    RealVector integral(const Iet& t, int a) const {
        const mpfr_prec_t b = std::max(bits(), t.bits());
        const Real l = t.left(a), r = t.right(a);
        RealVector out(dim, Real::zero(b));
        for (std::size_t i = 0; i < dim; ++i) out[i] = slopes[a][i] * (r * r - l * l) / 2L + constants[a][i] * (r - l);
        for (const auto& j : extras)
            if (j.gamma >= l && j.gamma < r)
                for (std::size_t i = 0; i < dim; ++i) out[i] += j.jump[i] * (r - j.gamma);
        return out;
    }
    RealVector integral(const Iet& t) const {
        RealVector s(dim, Real::zero(std::max(bits(), t.bits())));
        for (std::size_t a = 0; a < t.d(); ++a) s = vec_add(s, integral(t, static_cast<int>(a)));
        return s;
    }
    RealVector mean(const Iet& t) const { return vec_scale(integral(t), Real(1L, t.bits()) / t.length()); }

    /// Interval averages (1/|I_α|)∫_{I_α} φ for one coordinate.
    RealVector averages(const Iet& t, std::size_t coord = 0) const {
        RealVector out;
        for (std::size_t a = 0; a < t.d(); ++a) out.push_back(integral(t, static_cast<int>(a))[coord] / t.lambda()[a]);
        return out;
    }

    /// Σ_α var(φ|I_α), maximized over coordinates.
    Real variation(const Iet& t) const {
        Real best = Real::zero(bits());
        for (std::size_t i = 0; i < dim; ++i) {
            Real v = Real::zero(bits());
            for (std::size_t a = 0; a < d(); ++a) v += abs(slopes[a][i]) * t.lambda()[a];
            for (const auto& j : extras) v += abs(j.jump[i]);
            best = max(best, v);
        }
        return best;
    }

    /// sup |φ| over I, maximized over coordinates (attained at piece ends).
    Real sup_norm(const Iet& t) const {
        Real best = Real::zero(bits());
        for (std::size_t a = 0; a < d(); ++a) {
            const Real l = t.left(static_cast<int>(a)), r = t.right(static_cast<int>(a));
            std::vector<Real> cuts{l};
            for (const auto& j : extras)
                if (j.gamma > l && j.gamma < r) cuts.push_back(j.gamma);
            cuts.push_back(r);
            for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
                RealVector at_left = eval_in(t, static_cast<int>(a), cuts[k]);
                for (std::size_t i = 0; i < dim; ++i) {
                    Real right_val = at_left[i] + slopes[a][i] * (cuts[k + 1] - cuts[k]);
                    best = max(best, max(abs(at_left[i]), abs(right_val)));
                }
            }
        }
        return best;
    }

    /// Shifts every constant so that ∫φ = 0.
    Cocycle with_zero_mean(const Iet& t) const {
        Cocycle c = *this;
        RealVector m = mean(t);
        for (auto& k : c.constants)
            for (std::size_t i = 0; i < dim; ++i) k[i] -= m[i];
        return c;
    }

    /// φ + h where h is constant on each interval (one scalar per letter per coordinate).
    Cocycle plus_step(const std::vector<RealVector>& h) const {
        Cocycle c = *this;
        for (std::size_t a = 0; a < d(); ++a)
            for (std::size_t i = 0; i < dim; ++i) c.constants[a][i] += h[a][i];
        return c;
    }
    Cocycle plus_step_scalar(const RealVector& h) const {
        std::vector<RealVector> hv;
        for (const auto& x : h) hv.push_back({x});
        return plus_step(hv);
    }

    /// Coordinate i as a scalar cocycle.
    Cocycle component(std::size_t i) const {
        Cocycle c;
        c.kind = kind;
        c.dim = 1;
        for (std::size_t a = 0; a < d(); ++a) {
            c.slopes.push_back({slopes[a][i]});
            c.constants.push_back({constants[a][i]});
        }
        for (const auto& j : extras) c.extras.push_back({j.gamma, {j.jump[i]}});
        return c;
    }
};

/// φ^(n)(x): n > 0 sums φ(x..T^{n-1}x), n < 0 gives −(φ(T^n x)+…+φ(T^{-1}x)).
inline RealVector birkhoff_sum(const Cocycle& phi, const Iet& t, const Real& x, long n) {
    RealVector s(phi.dim, Real::zero(std::max(phi.bits(), t.bits())));
    Real y = x;
    if (n >= 0) {
        for (long k = 0; k < n; ++k) {
            int a = t.locate(y, static_cast<std::size_t>(k));
            s = vec_add(s, phi.eval_in(t, a, y));
            y += t.translations()[a];
        }
    } else {
        for (long k = 0; k < -n; ++k) {
            y = t.apply_inverse(y);
            int a = t.locate(y, static_cast<std::size_t>(k));
            s = vec_sub(s, phi.eval_in(t, a, y));
        }
    }
    return s;
}

/// Cocycle data converted for the fixed-point engine. Birkhoff sums are
/// accumulated as per-letter visit counts, per-letter position sums and
/// per-extra hit counts, then combined in long double.
class FastCocycle {
public:
    FastCocycle(const Cocycle& phi, const Iet& t, const FastIet& f) : dim_(phi.dim), d_(phi.d()) {
        total_ = t.length().to_long_double();
        slope_.assign(d_ * dim_, 0.0L);
        const_.assign(d_ * dim_, 0.0L);
        for (std::size_t a = 0; a < d_; ++a)
            for (std::size_t i = 0; i < dim_; ++i) {
                slope_[a * dim_ + i] = phi.slopes[a][i].to_long_double();
                const_[a * dim_ + i] = phi.constants[a][i].to_long_double();
            }
        per_letter_.assign(d_, {});
        for (const auto& j : phi.extras) {
            int a = t.locate_unchecked(j.gamma);
            ExtraFx e{f.to_fixed(j.gamma, t.length()), {}};
            for (std::size_t i = 0; i < dim_; ++i) e.jump.push_back(j.jump[i].to_long_double());
            per_letter_[a].push_back(extras_.size());
            extras_.push_back(std::move(e));
        }
    }

    struct Accumulator {
        std::vector<std::uint64_t> count;
        std::vector<u128> possum;  ///< Σ x >> kPosShift
        std::vector<std::uint64_t> extra_hits;
    };
    static constexpr int kPosShift = 28;

    Accumulator make_accumulator() const {
        return Accumulator{std::vector<std::uint64_t>(d_, 0), std::vector<u128>(d_, 0), std::vector<std::uint64_t>(extras_.size(), 0)};
    }

    void add(Accumulator& acc, int a, u128 x) const {
        ++acc.count[a];
        acc.possum[a] += x >> kPosShift;
        for (std::size_t e : per_letter_[a])
            if (x >= extras_[e].gamma) ++acc.extra_hits[e];
    }
    void subtract(Accumulator& acc, int a, u128 x) const {
        --acc.count[a];
        acc.possum[a] -= x >> kPosShift;
        for (std::size_t e : per_letter_[a])
            if (x >= extras_[e].gamma) --acc.extra_hits[e];
    }

    std::vector<long double> value(const Accumulator& acc) const {
        std::vector<long double> out(dim_, 0.0L);
        const long double unit = total_ * std::ldexp(1.0L, kPosShift - FastIet::kShift);
        for (std::size_t a = 0; a < d_; ++a) {
            long double pos = static_cast<long double>(acc.possum[a]) * unit;
            long double cnt = static_cast<long double>(acc.count[a]);
            for (std::size_t i = 0; i < dim_; ++i) out[i] += slope_[a * dim_ + i] * pos + const_[a * dim_ + i] * cnt;
        }
        for (std::size_t e = 0; e < extras_.size(); ++e)
            for (std::size_t i = 0; i < dim_; ++i) out[i] += extras_[e].jump[i] * static_cast<long double>(acc.extra_hits[e]);
        return out;
    }

    std::size_t dim() const { return dim_; }

private:
    struct ExtraFx {
        u128 gamma;
        std::vector<long double> jump;
    };
    std::size_t dim_, d_;
    long double total_;
    std::vector<long double> slope_, const_;
    std::vector<ExtraFx> extras_;
    std::vector<std::vector<std::size_t>> per_letter_;
};

inline long double sup_abs(const std::vector<long double>& v) {
    long double m = 0;
    for (auto x : v) m = std::max(m, std::fabs(x));
    return m;
}

} // namespace ietlab
