#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "errors.hpp"
#include "iet.hpp"
#include "int_matrix.hpp"
#include "linalg.hpp"
#include "permutation.hpp"
#include "rauzy.hpp"
#include "real.hpp"
#include "singularity.hpp"

namespace ietlab {

/// Perron–Frobenius data with a Collatz–Wielandt enclosure lo ≤ ρ ≤ hi.
struct PfEigen {
    Real rho, lo, hi;
    RealVector vector;  ///< positive, normalized to sum 1
};

/// PF eigenpair of a primitive non-negative matrix, by repeated squaring
/// followed by power-iteration polishing.
inline PfEigen pf_eigen(const IntMatrix& a, const PrecisionContext& ctx) {
    const std::size_t d = a.rows();
    if (!a.is_nonnegative()) fail(ErrorKind::NotPrimitive, "matrix has negative entries");
    const unsigned np = positivity_power(a, wielandt_bound(d));
    if (np == 0) fail(ErrorKind::NotPrimitive, "no power of the matrix is strictly positive");
    const mpfr_prec_t wb = ctx.bits + 64;
    RealMatrix am = RealMatrix::from_int(a, wb);
    RealMatrix s = am;
    const Real target = Real::pow2(-static_cast<long>(ctx.bits) - 16, wb);

    auto bracket = [&](const RealVector& v, Real& lo, Real& hi) {
        RealVector av = am * v;
        lo = av[0] / v[0];
        hi = lo;
        for (std::size_t i = 1; i < d; ++i) {
            Real r = av[i] / v[i];
            lo = min(lo, r);
            hi = max(hi, r);
        }
        return av;
    };

    RealVector v(d, Real(1L, wb));
    Real lo(Bits{wb}), hi(Bits{wb});
    for (int it = 0; it < 64; ++it) {
        s = s * s;
        Real m = Real::zero(wb);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) m = max(m, s(i, j));
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) s(i, j) /= m;
        RealVector cand = s * RealVector(d, Real(1L, wb));
        bool positive = true;
        for (const auto& x : cand)
            if (x.sign() <= 0) positive = false;
        if (!positive) continue;
        v = cand;
        bracket(v, lo, hi);
        if (hi - lo <= target * hi) break;
    }
    for (int it = 0; it < 200 && hi - lo > target * hi; ++it) {
        RealVector av = bracket(v, lo, hi);
        Real t = sum(av, wb);
        for (std::size_t i = 0; i < d; ++i) v[i] = av[i] / t;
    }
    bracket(v, lo, hi);
    Real t = sum(v, wb);
    PfEigen out;
    for (auto& x : v) out.vector.push_back((x / t).with_bits(ctx.bits));
    out.lo = lo.with_bits(ctx.bits);
    out.hi = hi.with_bits(ctx.bits);
    out.rho = ((lo + hi) / 2L).with_bits(ctx.bits);
    return out;
}

/// An IET of periodic type together with its period data.
///
/// `loop_matrix` is the product over one base period of the loop (or the
/// user-supplied matrix). `matrix` = loop_matrix^multiplier is strictly
/// positive, fixes every b(𝒪) and satisfies the nesting condition.
/// `tower_matrix` = loop_matrix^tower_multiplier drops the positivity
/// requirement and is used for towers and return times.
struct PeriodicIet {
    PermutationPair pair;
    IntMatrix loop_matrix;
    IntMatrix matrix;
    IntMatrix tower_matrix;
    std::size_t base_period = 0;
    std::size_t multiplier = 1;
    std::size_t tower_multiplier = 1;
    std::size_t positivity_power = 1;
    std::size_t xi_order = 1;
    std::size_t nesting_power = 1;
    Real rho;            ///< PF eigenvalue of `matrix`
    Real rho_lo, rho_hi; ///< Collatz–Wielandt enclosure of rho
    Real loop_rho;       ///< PF eigenvalue of `loop_matrix`
    RealVector lambda;   ///< |λ| = 1
    std::vector<int> loop_word;
    bool loop_verified = false;
    PrecisionContext ctx;

    std::size_t d() const { return pair.d(); }
    Iet iet() const { return Iet(pair, lambda, ctx); }
    /// PF eigenvalue of `tower_matrix`.
    Real tower_rho() const { return pow(loop_rho, static_cast<long>(tower_multiplier)); }
};

namespace detail {

/// Order of the permutation ξ of Σ(π) induced by B b(𝒪) = b(ξ𝒪).
inline std::size_t xi_order(const PermutationPair& pair, const IntMatrix& b) {
    SingularityData s = singularity_data(pair);
    const std::size_t k = s.b_vectors.size();
    std::vector<std::size_t> xi(k, k);
    for (std::size_t o = 0; o < k; ++o) {
        IntVector img = matvec(b, s.b_vectors[o]);
        for (std::size_t q = 0; q < k; ++q)
            if (img == s.b_vectors[q]) { xi[o] = q; break; }
        if (xi[o] == k) fail(ErrorKind::NotALoop, "matrix does not permute the singularity vectors b(O)");
    }
    std::size_t order = 1;
    std::vector<bool> seen(k, false);
    for (std::size_t o = 0; o < k; ++o) {
        if (seen[o]) continue;
        std::size_t len = 0;
        for (std::size_t q = o; !seen[q]; q = xi[q]) { seen[q] = true; ++len; }
        order = std::lcm(order, len);
    }
    return order;
}

inline std::size_t round_up_multiple(std::size_t x, std::size_t m) { return ((x + m - 1) / m) * m; }

inline PeriodicIet finish_periodic(const PermutationPair& pair, const IntMatrix& b, std::size_t period,
                                   std::vector<int> loop, bool verified, const PrecisionContext& ctx) {
    require_irreducible(pair);
    if (b.rows() != pair.d() || b.cols() != pair.d()) fail(ErrorKind::DimensionError, "matrix size does not match the pair");
    PeriodicIet p;
    p.pair = pair;
    p.loop_matrix = b;
    p.base_period = period;
    p.loop_word = std::move(loop);
    p.loop_verified = verified;
    p.ctx = ctx;
    if (!b.is_nonnegative()) fail(ErrorKind::NotPrimitive, "matrix has negative entries");
    p.positivity_power = positivity_power(b, wielandt_bound(pair.d()));
    if (p.positivity_power == 0) fail(ErrorKind::NotPrimitive, "no power of the matrix is strictly positive");
    p.xi_order = xi_order(pair, b);

    PfEigen base = pf_eigen(b, ctx);
    p.lambda = base.vector;
    p.loop_rho = base.rho;
    // nesting: ρ_B^(-n) ≤ λ_{α1}
    const Real& first = p.lambda[pair.letter_at(0, 1)];
    std::size_t n2 = 1;
    Real shrink = Real(1L, ctx.bits) / base.rho;
    for (Real len = shrink; len > first; len *= shrink) ++n2;
    p.nesting_power = n2;

    p.tower_multiplier = round_up_multiple(n2, p.xi_order);
    p.multiplier = round_up_multiple(std::max<std::size_t>(p.positivity_power, n2), p.xi_order);
    p.matrix = matpow(b, p.multiplier);
    p.tower_matrix = matpow(b, p.tower_multiplier);
    PfEigen full = pf_eigen(p.matrix, ctx);
    p.rho = full.rho;
    p.rho_lo = full.lo;
    p.rho_hi = full.hi;
    return p;
}

} // namespace detail

/// Builds the periodic-type IET whose induction follows `loop` forever.
inline PeriodicIet build_periodic_from_loop(const PermutationPair& start, const std::vector<int>& loop,
                                            const PrecisionContext& ctx = PrecisionContext()) {
    if (loop.empty()) fail(ErrorKind::NotALoop, "empty loop");
    LoopReplay r = replay_loop(start, loop);
    if (r.end != start) fail(ErrorKind::NotALoop, "loop does not return to its starting pair");
    return detail::finish_periodic(start, r.product, loop.size(), loop, true, ctx);
}

/// Builds a periodic-type IET from an asserted periodic matrix. The loop is
/// not known, so `loop_verified` is false and `base_period` is 0.
inline PeriodicIet build_periodic_from_matrix(const PermutationPair& pair, const IntMatrix& a,
                                              const PrecisionContext& ctx = PrecisionContext()) {
    return detail::finish_periodic(pair, a, 0, {}, false, ctx);
}

/// Maximum relative residual ‖Aλ − ρλ‖/ρ.
inline Real eigen_residual(const IntMatrix& a, const RealVector& v, const Real& rho) {
    RealVector av = matvec(a, v);
    Real worst = Real::zero(rho.bits());
    for (std::size_t i = 0; i < v.size(); ++i) worst = max(worst, abs(av[i] - rho * v[i]));
    return worst / rho;
}

} // namespace ietlab
