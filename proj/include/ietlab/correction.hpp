#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "birkhoff.hpp"
#include "cocycle.hpp"
#include "errors.hpp"
#include "int_matrix.hpp"
#include "linalg.hpp"
#include "periodic.hpp"
#include "real.hpp"
#include "singularity.hpp"
#include "spectral.hpp"
#include "towers.hpp"

namespace ietlab {

struct CorrectionResult {
    std::vector<RealVector> h;  ///< per letter, one entry per coordinate
    Cocycle corrected;
    std::size_t depth = 0;      ///< truncation depth K, 0 for the exact step route
    Real tail_bound;            ///< truncation error of the pulled-back series
    Real rounding_bound;        ///< 2^(−usable bits) left after depth-K renormalization
    std::vector<Real> growth;   ///< ‖S(k)φ̂‖_sup, k = 0..K
};

/// Restriction of Aᵗ to Γ_u in the splitting's unstable basis, and the
/// left PF vector used to pin the mean.
struct UnstableRestriction {
    RealMatrix r;          ///< Aᵗ U = U r
    RealVector left_pf;    ///< PF eigenvector of Aᵗ
    Real inverse_norm;     ///< sup-norm of v ↦ U r⁻¹ coords(Π_u v)
};

inline UnstableRestriction unstable_restriction(const IntMatrix& a, const Splitting& sp) {
    const std::size_t m = sp.unstable.size();
    const mpfr_prec_t b = sp.bits;
    const Real tiny = Real::pow2(-static_cast<long>(b) + 8, b);
    const IntMatrix at = mat_transpose(a);
    UnstableRestriction ur;
    ur.r = RealMatrix(m, m, b);
    for (std::size_t j = 0; j < m; ++j) {
        RealVector c = coordinates(sp.unstable, matvec(at, sp.unstable[j]), tiny);
        for (std::size_t i = 0; i < m; ++i) ur.r(i, j) = c[i];
    }
    ur.left_pf = pf_eigen(at, PrecisionContext(b)).vector;
    ur.inverse_norm = Real::zero(b);
    std::vector<RealVector> cols;
    for (std::size_t i = 0; i < sp.d; ++i) {
        RealVector e(sp.d, Real::zero(b));
        e[i] = Real(1L, b);
        RealVector u = sp.unstable_part(e);
        RealVector c = m ? solve(ur.r, coordinates(sp.unstable, u, tiny), tiny) : RealVector{};
        RealVector back(sp.d, Real::zero(b));
        for (std::size_t j = 0; j < m; ++j) back = vec_add(back, vec_scale(sp.unstable[j], c[j]));
        cols.push_back(back);
    }
    for (std::size_t row = 0; row < sp.d; ++row) {
        Real s = Real::zero(b);
        for (const auto& c : cols) s += abs(c[row]);
        ur.inverse_norm = max(ur.inverse_norm, s);
    }
    return ur;
}

namespace detail {

/// −(Aᵗ|Γ_u)^{−k} applied to u ∈ Γ_u, with the PF component removed so the
/// result has zero mean against λ.
inline RealVector pull_back_unstable(const Splitting& sp, const UnstableRestriction& ur, const RealVector& u,
                                     std::size_t k, const RealVector& lambda) {
    const mpfr_prec_t b = sp.bits;
    const Real tiny = Real::pow2(-static_cast<long>(b) + 8, b);
    RealVector h(sp.d, Real::zero(b));
    if (sp.unstable.empty()) return h;
    RealVector c = coordinates(sp.unstable, to_bits(u, b), tiny);
    for (std::size_t i = 0; i < k; ++i) c = solve(ur.r, c, tiny);
    for (std::size_t j = 0; j < c.size(); ++j) h = vec_sub(h, vec_scale(sp.unstable[j], c[j]));
    Real num = dot(h, lambda), den = dot(ur.left_pf, lambda);
    return vec_sub(h, vec_scale(ur.left_pf, num / den));
}

inline void require_zero_mean(const RealVector& v, const RealVector& lambda, const Real& tol) {
    if (abs(dot(v, lambda)) > tol) fail(ErrorKind::NotZeroMean, "value vector has nonzero mean");
}

} // namespace detail

/// Sup norms of S(k)φ on I^(k) for k = 0..kmax.
inline std::vector<Real> renormalized_sup_norms(const Cocycle& phi, const PeriodicIet& p, std::size_t kmax) {
    std::vector<Real> out;
    auto seq = renormalization_sequence(phi, p, kmax);
    for (std::size_t k = 0; k < seq.size(); ++k) out.push_back(seq[k].sup_norm(level_iet(p, k)));
    return out;
}

/// Exact route for a step cocycle with value vector v: h = −Π_u v.
inline CorrectionResult correct_step(const RealVector& v, const Splitting& sp, const RealVector& lambda) {
    if (v.size() != sp.d) fail(ErrorKind::DimensionError, "value vector has wrong length");
    const mpfr_prec_t b = sp.bits;
    detail::require_zero_mean(to_bits(v, b), lambda, Real::pow2(-static_cast<long>(b) / 4, b));
    RealVector h(sp.d, Real::zero(b));
    h = vec_sub(h, sp.unstable_part(v));
    CorrectionResult res;
    for (const auto& x : h) res.h.push_back({x});
    res.corrected = Cocycle::step_scalar(vec_add(to_bits(v, b), h));
    res.tail_bound = Real::zero(b);
    res.rounding_bound = Real::pow2(-static_cast<long>(b) / 2, b);
    return res;
}

/// Bits needed so that depth-K renormalization keeps `target` bits in h.
inline mpfr_prec_t correction_bits(const PeriodicIet& p, mpfr_prec_t target, std::size_t k) {
    double per = std::log2(p.tower_rho().to_double());
    return target + static_cast<mpfr_prec_t>(std::ceil(per * static_cast<double>(k))) + 64;
}

/// Bits left after depth-K renormalization at the precision of `sp`.
inline long usable_bits(const PeriodicIet& p, const Splitting& sp, std::size_t k) {
    double per = std::log2(p.tower_rho().to_double());
    return static_cast<long>(sp.bits) - static_cast<long>(std::ceil(per * static_cast<double>(k))) - 64;
}

/// Smallest K with C′·exp(−Kθ₊)·var φ < 2^(−target_bits).
inline std::size_t depth_for_target(const Splitting& sp, const UnstableRestriction& ur, const Real& var,
                                    double target_bits) {
    if (sp.unstable.empty() || var.is_zero()) return 1;
    const double lhs = std::log(ur.inverse_norm.to_double()) + std::log(var.to_double());
    const double k = (lhs + target_bits * std::log(2.0)) / sp.theta_plus.to_double();
    return k < 1 ? 1 : static_cast<std::size_t>(std::ceil(k));
}

/// Smallest K whose tail bound is below the rounding left at that depth,
/// i.e. the K that maximizes the certified bits at the current precision.
inline std::size_t default_depth(const PeriodicIet& p, const Splitting& sp, const UnstableRestriction& ur,
                                 const Real& var) {
    if (sp.unstable.empty() || var.is_zero()) return 1;
    const double lhs = std::log(ur.inverse_norm.to_double()) + std::log(var.to_double());
    const double rate = sp.theta_plus.to_double() + std::log(p.tower_rho().to_double());
    const double k = (lhs + static_cast<double>(static_cast<long>(sp.bits) - 64) * std::log(2.0)) / rate;
    return k < 1 ? 1 : static_cast<std::size_t>(std::ceil(k));
}

/// Depth and working precision that certify `target_bits` for φ on p.
struct CorrectionPlan {
    std::size_t depth = 1;
    mpfr_prec_t bits = 0;
};

inline CorrectionPlan plan_correction(const Cocycle& phi, const PeriodicIet& p, mpfr_prec_t target_bits) {
    const Splitting sp = splitting(p.tower_matrix, p.ctx, singularity_data(p.pair).kappa);
    const UnstableRestriction ur = unstable_restriction(p.tower_matrix, sp);
    CorrectionPlan plan;
    plan.depth = depth_for_target(sp, ur, phi.variation(p.iet()), static_cast<double>(target_bits));
    plan.bits = correction_bits(p, target_bits, plan.depth);
    return plan;
}

/// Pulled-back series route for step-with-extras and PL cocycles. `sp` must
/// be the splitting of p.tower_matrix. Precision is that of `p`; use
/// plan_correction() to size it.
inline CorrectionResult correct_bv(const Cocycle& phi, const PeriodicIet& p, const Splitting& sp,
                                   std::optional<std::size_t> depth = std::nullopt, std::size_t growth_levels = 0) {
    if (phi.d() != p.d()) fail(ErrorKind::DimensionError, "cocycle and IET alphabets differ");
    const Iet t = p.iet();
    phi.validate_on(t);
    const mpfr_prec_t b = sp.bits;
    {
        RealVector m = phi.mean(t);
        for (const auto& x : m)
            if (abs(x) > Real::pow2(-static_cast<long>(b) / 4, b)) fail(ErrorKind::NotZeroMean, "cocycle has nonzero mean");
    }
    const UnstableRestriction ur = unstable_restriction(p.tower_matrix, sp);
    const Real var = phi.variation(t);
    const std::size_t k = depth ? *depth : default_depth(p, sp, ur, var);
    if (k == 0) fail(ErrorKind::DomainError, "correction depth must be at least 1");

    auto seq = renormalization_sequence(phi, p, std::max(k, growth_levels));
    const Iet lk = level_iet(p, k);
    CorrectionResult res;
    res.depth = k;
    res.h.assign(p.d(), RealVector(phi.dim, Real::zero(b)));
    for (std::size_t i = 0; i < phi.dim; ++i) {
        RealVector avg = to_bits(seq[k].averages(lk, i), b);
        RealVector h = detail::pull_back_unstable(sp, ur, sp.unstable_part(avg), k, to_bits(p.lambda, b));
        for (std::size_t a = 0; a < p.d(); ++a) res.h[a][i] = h[a];
    }
    res.corrected = phi.plus_step(res.h);
    res.tail_bound = ur.inverse_norm * exp(-sp.theta_plus * static_cast<long>(k)) * var;
    res.rounding_bound = Real::pow2(-usable_bits(p, sp, k), b);
    if (growth_levels) res.growth = renormalized_sup_norms(res.corrected, p, growth_levels);
    return res;
}

/// ‖S(k)φ̂‖_sup for k ≤ k_max and a growth summary.
struct GrowthReport {
    std::vector<Real> sup;
    double late_over_early = 0;   ///< max over the second half / max over the first half
    double per_step_growth = 0;   ///< (sup_kmax / sup_{kmax/2})^(1/(kmax − kmax/2))
    double degree = 0;             ///< slope of log sup vs log k over the second half
    bool bounded = false;          ///< late_over_early ≤ 2
};

inline GrowthReport growth_check(const Cocycle& phi, const PeriodicIet& p, std::size_t kmax) {
    GrowthReport g;
    g.sup = renormalized_sup_norms(phi, p, kmax);
    const std::size_t half = kmax / 2;
    double early = 0, late = 0;
    for (std::size_t k = 0; k <= kmax; ++k) {
        double& slot = k <= half ? early : late;
        slot = std::max(slot, g.sup[k].to_double());
    }
    g.late_over_early = early > 0 ? late / early : (late > 0 ? INFINITY : 0);
    const double a = g.sup[half].to_double(), z = g.sup[kmax].to_double();
    g.per_step_growth = a > 0 && kmax > half ? std::pow(z / a, 1.0 / static_cast<double>(kmax - half)) : 0;
    std::vector<std::uint64_t> ks;
    std::vector<long double> ys;
    for (std::size_t k = std::max<std::size_t>(half, 1); k <= kmax; ++k) {
        ks.push_back(k);
        ys.push_back(g.sup[k].to_double());
    }
    g.degree = static_cast<double>(loglog_slope(ks, ys, 0));
    g.bounded = g.late_over_early <= 2.0;
    return g;
}

} // namespace ietlab
