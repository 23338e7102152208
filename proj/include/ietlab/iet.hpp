#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "permutation.hpp"
#include "real.hpp"

namespace ietlab {

/// Interval exchange T_(π,λ) on [0,|λ|): I_α = [l_α, r_α) is translated by w_α.
class Iet {
public:
    Iet() = default;

    Iet(PermutationPair pair, RealVector lambda, const PrecisionContext& ctx = PrecisionContext())
        : pair_(std::move(pair)), lambda_(to_bits(lambda, ctx.bits)), ctx_(ctx) {
        const std::size_t d = pair_.d();
        if (lambda_.size() != d) fail(ErrorKind::DimensionError, "lambda length does not match the alphabet");
        for (const auto& x : lambda_)
            if (!x.is_finite() || x <= 0L) fail(ErrorKind::DomainError, "lengths must be positive and finite");
        total_ = sum(lambda_, ctx.bits);
        left_.assign(d, Real::zero(ctx.bits));
        bottom_left_.assign(d, Real::zero(ctx.bits));
        Real acc = Real::zero(ctx.bits), acc1 = Real::zero(ctx.bits);
        for (int pos = 1; pos <= static_cast<int>(d); ++pos) {
            int a = pair_.letter_at(0, pos);
            left_[a] = acc;
            acc += lambda_[a];
            int b = pair_.letter_at(1, pos);
            bottom_left_[b] = acc1;
            acc1 += lambda_[b];
        }
        w_.clear();
        for (std::size_t a = 0; a < d; ++a) w_.push_back(bottom_left_[a] - left_[a]);
        tol_ = ctx.eps() * total_;
    }

    const PermutationPair& pair() const { return pair_; }
    const RealVector& lambda() const { return lambda_; }
    const Real& length() const { return total_; }
    const Real& left(int a) const { return left_[a]; }
    Real right(int a) const { return left_[a] + lambda_[a]; }
    const RealVector& lefts() const { return left_; }
    /// Left endpoint of T(I_α).
    const Real& image_left(int a) const { return bottom_left_[a]; }
    /// Translation vector w = Ω_π λ.
    const RealVector& translations() const { return w_; }
    const PrecisionContext& context() const { return ctx_; }
    mpfr_prec_t bits() const { return ctx_.bits; }
    std::size_t d() const { return pair_.d(); }
    /// Absolute breakpoint tolerance ε_cmp·|λ|.
    const Real& tolerance() const { return tol_; }

    /// Letter whose interval contains x, without the breakpoint check.
    int locate_unchecked(const Real& x) const {
        const int d = static_cast<int>(pair_.d());
        int lo = 1, hi = d;
        while (lo < hi) {
            int mid = (lo + hi + 1) / 2;
            if (left_[pair_.letter_at(0, mid)] <= x) lo = mid;
            else hi = mid - 1;
        }
        return pair_.letter_at(0, lo);
    }

    /// Letter whose interval contains x. A point exactly on a left endpoint
    /// belongs to that interval; a point within ε_cmp of a breakpoint but not
    /// on it raises NearBreakpoint.
    int locate(const Real& x, std::optional<std::size_t> step = std::nullopt) const {
        if (x < 0L || x >= total_) fail(ErrorKind::DomainError, "point " + x.str(12) + " outside [0,|λ|)", step);
        int a = locate_unchecked(x);
        Real from_left = x - left_[a];
        Real to_right = right(a) - x;
        if ((!from_left.is_zero() && from_left < tol_ && pair_.pi0()[a] != 1) ||
            (to_right < tol_ && pair_.pi0()[a] != static_cast<int>(pair_.d())))
            fail(ErrorKind::NearBreakpoint, "orbit point within tolerance of a breakpoint", step);
        return a;
    }

    /// Letter whose image interval T(I_α) contains x (inverse branch).
    int locate_image(const Real& x, std::optional<std::size_t> step = std::nullopt) const {
        if (x < 0L || x >= total_) fail(ErrorKind::DomainError, "point " + x.str(12) + " outside [0,|λ|)", step);
        const int d = static_cast<int>(pair_.d());
        int lo = 1, hi = d;
        while (lo < hi) {
            int mid = (lo + hi + 1) / 2;
            if (bottom_left_[pair_.letter_at(1, mid)] <= x) lo = mid;
            else hi = mid - 1;
        }
        int a = pair_.letter_at(1, lo);
        Real from_left = x - bottom_left_[a];
        Real to_right = bottom_left_[a] + lambda_[a] - x;
        if ((!from_left.is_zero() && from_left < tol_ && pair_.pi1()[a] != 1) ||
            (to_right < tol_ && pair_.pi1()[a] != d))
            fail(ErrorKind::NearBreakpoint, "inverse orbit point within tolerance of a breakpoint", step);
        return a;
    }

    Real apply(const Real& x) const { return x + w_[locate(x)]; }
    Real apply_inverse(const Real& x) const { return x - w_[locate_image(x)]; }

    /// x, Tx, ..., T^(n-1)x.
    std::vector<Real> orbit(const Real& x, std::size_t n) const {
        std::vector<Real> pts;
        pts.reserve(n);
        Real y = x;
        for (std::size_t k = 0; k < n; ++k) {
            pts.push_back(y);
            if (k + 1 < n) y += w_[locate(y, k)];
        }
        return pts;
    }

private:
    PermutationPair pair_;
    RealVector lambda_;
    PrecisionContext ctx_;
    Real total_;
    Real tol_;
    RealVector left_, bottom_left_, w_;
};

/// Free-function forms of the orbit operations.
inline Real iet_apply(const Iet& t, const Real& x) { return t.apply(x); }
inline std::vector<Real> iet_orbit(const Iet& t, const Real& x, std::size_t n) { return t.orbit(x, n); }

/// The lengths normalized to |λ| = 1.
inline RealVector normalized(const RealVector& v) {
    const mpfr_prec_t b = v.empty() ? kDefaultBits : v[0].bits();
    Real s = sum(v, b);
    RealVector out;
    for (const auto& x : v) out.push_back(x / s);
    return out;
}

} // namespace ietlab
