#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cocycle.hpp"
#include "errors.hpp"
#include "fast_iet.hpp"
#include "int_matrix.hpp"
#include "linalg.hpp"
#include "periodic.hpp"
#include "real.hpp"
#include "smith.hpp"
#include "spectral.hpp"
#include "towers.hpp"

namespace ietlab {

/// Integer basis of ℤ^𝒜 ∩ F(T), F(T) = {v : Aᵗv = v}, with A the tower matrix.
struct FixedSpaceBasis {
    std::size_t k = 0;
    std::vector<IntVector> vectors;  ///< v₁..v_k
    std::vector<IntVector> w;        ///< w_α = (v_{iα})ᵢ, one per letter
    bool fixed_exact = false;        ///< Aᵗvᵢ = vᵢ
    bool zero_mean = false;          ///< ⟨vᵢ, λ⟩ ≈ 0
    bool generates = false;          ///< the w_α generate ℤ^k
};

inline FixedSpaceBasis fixed_space_basis(const PeriodicIet& p) {
    const std::size_t d = p.d();
    const IntMatrix at = mat_transpose(p.tower_matrix);
    FixedSpaceBasis fb;
    fb.vectors = integer_kernel(at - IntMatrix::identity(d));
    fb.k = fb.vectors.size();
    if (fb.k == 0) fail(ErrorKind::EmptyFixedSpace, "Aᵗ has no integer fixed vectors");
    fb.fixed_exact = true;
    fb.zero_mean = true;
    for (const auto& v : fb.vectors) {
        if (matvec(at, v) != v) fb.fixed_exact = false;
        if (abs(dot(to_real(v, p.ctx.bits), p.lambda)) > p.ctx.eps()) fb.zero_mean = false;
    }
    IntMatrix wm(fb.k, d);
    for (std::size_t a = 0; a < d; ++a) {
        IntVector w(fb.k);
        for (std::size_t i = 0; i < fb.k; ++i) {
            w[i] = fb.vectors[i][a];
            wm(i, a) = w[i];
        }
        fb.w.push_back(std::move(w));
    }
    SmithForm s = smith_normal_form(wm);
    fb.generates = s.rank == fb.k;
    for (const auto& f : s.invariant_factors())
        if (abs(f) != 1) fb.generates = false;
    return fb;
}

/// ℤ^k-valued step cocycle φ = Σ_α w_α·χ_{I_α}.
inline Cocycle build_fixed_cocycle(const FixedSpaceBasis& fb, mpfr_prec_t bits = kDefaultBits) {
    if (fb.k == 0) fail(ErrorKind::EmptyFixedSpace, "fixed space is trivial");
    std::vector<RealVector> vals;
    for (const auto& w : fb.w) vals.push_back(to_real(w, bits));
    return Cocycle::step(vals);
}

/// R·φ for a real ℓ′×ℓ matrix R.
inline Cocycle apply_linear(const RealMatrix& r, const Cocycle& phi) {
    if (r.cols() != phi.dim) fail(ErrorKind::DimensionError, "matrix width does not match the cocycle dimension");
    Cocycle out;
    out.kind = phi.kind;
    out.dim = r.rows();
    for (std::size_t a = 0; a < phi.d(); ++a) {
        out.slopes.push_back(r * phi.slopes[a]);
        out.constants.push_back(r * phi.constants[a]);
    }
    for (const auto& e : phi.extras) out.extras.push_back({e.gamma, r * e.jump});
    return out;
}

/// Values of φ^(h_α^(n+1)) on the levels of C^(n)_α.
struct TowerValue {
    std::size_t n = 0;
    std::vector<long double> base_value;  ///< at the midpoint of the tower base
    long double spread = 0;               ///< max deviation from base_value over all levels
    long double measure = 0;              ///< μ(C^(n)_α)
    bool constant = false;
};

struct EssentialCandidate {
    int letter = 0;
    std::vector<TowerValue> levels;  ///< n = 0..n_max
    std::vector<long double> limit;  ///< last base value
    bool converged = false;          ///< last two base values agree to tolerance
    bool constant = false;           ///< every tower level carries the same value at n_max
};

struct EssentialReport {
    std::vector<EssentialCandidate> candidates;
    long double tolerance = 0;
};

inline EssentialReport essential_value_probe(const Cocycle& phi, const PeriodicIet& p, std::size_t n_max,
                                             long double tol = 1e-9L) {
    const Iet t = p.iet();
    phi.validate_on(t);
    const FastIet f(t);
    const FastCocycle fc(phi, t, f);
    EssentialReport rep;
    rep.tolerance = tol;
    for (std::size_t a = 0; a < p.d(); ++a) {
        EssentialCandidate cand;
        cand.letter = static_cast<int>(a);
        for (std::size_t n = 0; n <= n_max; ++n) {
            const TowerStructure ts = towers(p, n);
            const Tower& tw = ts.towers[a];
            const std::uint64_t h = matpow(p.tower_matrix, n + 1).column_sums()[a].get_ui();
            const std::uint64_t levels = ts.heights[ts.alpha1].get_ui();
            u128 tail = f.to_fixed(tw.base_left + tw.base_length / 2L, t.length());
            u128 lead = tail;
            auto acc = fc.make_accumulator();
            for (std::uint64_t j = 0; j < h; ++j) {
                u128 here = lead;
                fc.add(acc, f.step(lead), here);
            }
            TowerValue tv;
            tv.n = n;
            tv.base_value = fc.value(acc);
            tv.measure = tw.measure.to_long_double();
            for (std::uint64_t i = 1; i < levels; ++i) {
                u128 here = tail;
                fc.subtract(acc, f.step(tail), here);
                here = lead;
                fc.add(acc, f.step(lead), here);
                auto v = fc.value(acc);
                for (std::size_t c = 0; c < v.size(); ++c) tv.spread = std::max(tv.spread, std::fabs(v[c] - tv.base_value[c]));
            }
            long double scale = std::max<long double>(1, sup_abs(tv.base_value));
            tv.constant = tv.spread <= tol * scale;
            cand.levels.push_back(std::move(tv));
        }
        const auto& last = cand.levels.back();
        cand.limit = last.base_value;
        cand.constant = last.constant;
        if (cand.levels.size() >= 2) {
            const auto& prev = cand.levels[cand.levels.size() - 2].base_value;
            long double diff = 0;
            for (std::size_t c = 0; c < prev.size(); ++c) diff = std::max(diff, std::fabs(prev[c] - last.base_value[c]));
            cand.converged = diff <= tol * std::max<long double>(1, sup_abs(last.base_value));
        }
        rep.candidates.push_back(std::move(cand));
    }
    return rep;
}

enum class CoboundaryClass { Coboundary, NotCoboundary, CentralUndetermined };

inline const char* to_string(CoboundaryClass c) {
    switch (c) {
    case CoboundaryClass::Coboundary: return "Coboundary";
    case CoboundaryClass::NotCoboundary: return "NotCoboundary";
    case CoboundaryClass::CentralUndetermined: return "CentralUndetermined";
    }
    return "Unknown";
}

struct CoboundaryVerdict {
    CoboundaryClass cls = CoboundaryClass::CentralUndetermined;
    Real unstable_norm, central_norm, stable_norm;
};

/// Decides a zero-mean step vector by its Γ_u and Γ_c components.
inline CoboundaryVerdict coboundary_classify(const RealVector& v, const Splitting& sp, const RealVector& lambda) {
    const mpfr_prec_t b = sp.bits;
    const Real tol = Real::pow2(-static_cast<long>(b) / 2, b) * max(Real(1L, b), sup_norm(v));
    if (abs(dot(to_bits(v, b), to_bits(lambda, b))) > tol) fail(ErrorKind::NotZeroMean, "step vector has nonzero mean");
    auto parts = sp.decompose(v);
    CoboundaryVerdict out;
    out.unstable_norm = sup_norm(parts.u);
    out.central_norm = sup_norm(parts.c);
    out.stable_norm = sup_norm(parts.s);
    if (out.unstable_norm > tol)
        out.cls = CoboundaryClass::NotCoboundary;
    else if (out.central_norm <= tol)
        out.cls = CoboundaryClass::Coboundary;
    return out;
}

/// A cocycle cohomologous to the one under study, with a lattice c·ℤ that
/// should contain all its values and jumps.
struct LatticeQuery {
    std::string label;
    Cocycle cocycle;
    Real scale;
};

struct LatticeCheck {
    std::string label;
    Real scale;
    bool contained = false;
    Real max_deviation;  ///< max distance of value/c to the nearest integer
};

struct LatticeReport {
    std::vector<LatticeCheck> checks;
    /// All containments hold and the scales are pairwise incommensurable,
    /// so the lattices meet only in 0.
    bool trivial_intersection = false;
    std::string conclusion;
};

inline LatticeReport lattice_containment(const std::vector<LatticeQuery>& queries, const Real& tol) {
    LatticeReport rep;
    for (const auto& qy : queries) {
        const Cocycle& phi = qy.cocycle;
        for (const auto& s : phi.slopes)
            for (const auto& x : s)
                if (!x.is_zero()) fail(ErrorKind::Unsupported, "lattice containment needs a step cocycle");
        std::vector<Real> values;
        for (const auto& c : phi.constants) values.insert(values.end(), c.begin(), c.end());
        for (const auto& e : phi.extras) values.insert(values.end(), e.jump.begin(), e.jump.end());
        LatticeCheck lc;
        lc.label = qy.label;
        lc.scale = qy.scale;
        lc.max_deviation = Real::zero(qy.scale.bits());
        for (const auto& v : values) {
            Real q = v / qy.scale;
            lc.max_deviation = max(lc.max_deviation, abs(q - Real(q.round_to_integer(), q.bits())));
        }
        lc.contained = lc.max_deviation <= tol;
        rep.checks.push_back(std::move(lc));
    }
    bool all = !rep.checks.empty();
    for (const auto& c : rep.checks) all = all && c.contained;
    bool incommensurable = true;
    for (std::size_t i = 0; i < queries.size(); ++i)
        for (std::size_t j = i + 1; j < queries.size(); ++j) {
            Real q = queries[i].scale / queries[j].scale;
            for (long den = 1; den <= 64; ++den) {
                Real x = q * den;
                if (abs(x - Real(x.round_to_integer(), x.bits())) <= tol) incommensurable = false;
            }
        }
    rep.trivial_intersection = all && incommensurable && queries.size() >= 2;
    rep.conclusion = rep.trivial_intersection ? "essential values contained in {0}" : "no conclusion";
    return rep;
}

/// Orbit statistics of the skew product (x, g) ↦ (Tx, g + φ(x)).
struct RecurrenceStats {
    std::size_t samples = 0;
    std::size_t aborted = 0;
    std::vector<long double> eps;
    std::vector<std::uint64_t> checkpoints;
    /// hits[e][c]: number of (sample, n) pairs with 1 ≤ n ≤ checkpoints[c] and ‖φ^(n)‖ < eps[e]
    std::vector<std::vector<std::uint64_t>> hits;
    std::vector<long double> min_norm;  ///< per sample, over 1 ≤ n ≤ N
    std::vector<long double> final_norm;
    /// histogram of log10 ‖φ^(N)‖ over samples, bins [k, k+1) for k = −4..8
    std::vector<std::uint64_t> histogram;
    std::uint64_t seed = 0;
};

inline RecurrenceStats skew_simulate(const Iet& t, const Cocycle& phi, const std::vector<Real>& x0, std::uint64_t n_max,
                                     std::vector<long double> eps, std::uint64_t seed = 0) {
    phi.validate_on(t);
    const FastIet f(t);
    const FastCocycle fc(phi, t, f);
    std::sort(eps.begin(), eps.end());
    RecurrenceStats st;
    st.eps = eps;
    st.seed = seed;
    for (std::uint64_t c = 1; c < n_max; c *= 10) st.checkpoints.push_back(c);
    st.checkpoints.push_back(n_max);
    st.hits.assign(eps.size(), std::vector<std::uint64_t>(st.checkpoints.size(), 0));
    st.histogram.assign(13, 0);
    for (const auto& x : x0) {
        std::vector<std::vector<std::uint64_t>> local(eps.size(), std::vector<std::uint64_t>(st.checkpoints.size(), 0));
        std::vector<std::uint64_t> running(eps.size(), 0);
        long double mn = INFINITY, last = 0;
        try {
            auto acc = fc.make_accumulator();
            u128 y = f.to_fixed(x, t.length());
            std::size_t next = 0;
            for (std::uint64_t k = 0; k < n_max; ++k) {
                u128 here = y;
                fc.add(acc, f.step_checked(y, k), here);
                last = sup_abs(fc.value(acc));
                mn = std::min(mn, last);
                for (std::size_t e = 0; e < eps.size(); ++e)
                    if (last < eps[e]) ++running[e];
                if (next < st.checkpoints.size() && k + 1 == st.checkpoints[next]) {
                    for (std::size_t e = 0; e < eps.size(); ++e) local[e][next] = running[e];
                    ++next;
                }
            }
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NearBreakpoint) throw;
            ++st.aborted;
            continue;
        }
        ++st.samples;
        for (std::size_t e = 0; e < eps.size(); ++e)
            for (std::size_t c = 0; c < st.checkpoints.size(); ++c) st.hits[e][c] += local[e][c];
        st.min_norm.push_back(mn);
        st.final_norm.push_back(last);
        int bin = last > 0 ? static_cast<int>(std::floor(std::log10(last))) + 4 : 0;
        st.histogram[std::clamp(bin, 0, 12)] += 1;
    }
    return st;
}

} // namespace ietlab
