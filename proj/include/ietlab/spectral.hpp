#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <numeric>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "int_matrix.hpp"
#include "linalg.hpp"
#include "polynomial.hpp"
#include "real.hpp"
#include "roots.hpp"

namespace ietlab {

/// Modulus class of an eigenvalue.
enum class ModulusClass { Stable = -1, Central = 0, Unstable = 1 };

struct Eigenvalue {
    Complex z;
    Real radius;            ///< |z_true − z| ≤ radius
    int multiplicity = 1;   ///< algebraic
    ModulusClass cls = ModulusClass::Central;
    bool exact_unit = false;  ///< root of unity, certified by a cyclotomic factor
    bool real = false;
};

struct LyapunovSpectrum {
    std::vector<Real> exponents;  ///< log|eigenvalue|, with multiplicity, descending
    std::vector<Real> radii;      ///< enclosure half-widths of each exponent
    std::vector<Eigenvalue> eigenvalues;
    std::size_t zero_multiplicity = 0;
    int jordan_max = 1;  ///< M, the largest Jordan block of A
    Poly charpoly;
    mpfr_prec_t bits_used = 0;

    /// θ₂/θ₁.
    Real ratio() const { return exponents.size() > 1 ? exponents[1] / exponents[0] : Real::zero(exponents[0].bits()); }
};

namespace detail {

/// Largest Jordan block among the roots of the square-free integer polynomial g.
inline int jordan_block_size(const IntMatrix& a, const Poly& g) {
    IntMatrix gm = eval_matrix(g.primitive(), a);
    IntMatrix p = IntMatrix::identity(a.rows());
    std::size_t prev = a.rows();
    for (int k = 1; k <= static_cast<int>(a.rows()) + 1; ++k) {
        p = p * gm;
        std::size_t r = rank_q(p);
        if (r == prev) return k - 1;
        prev = r;
    }
    return static_cast<int>(a.rows());
}

struct SpectralFactors {
    std::vector<CyclotomicFactor> cyclotomic;
    std::vector<std::pair<Poly, int>> squarefree;  ///< non-cyclotomic part, by multiplicity
    Poly charpoly;
};

inline SpectralFactors factor_charpoly(const IntMatrix& a) {
    SpectralFactors f;
    f.charpoly = charpoly(a);
    auto [cyc, rest] = split_cyclotomic(f.charpoly);
    f.cyclotomic = std::move(cyc);
    if (rest.degree() > 0) f.squarefree = squarefree_decomposition(rest);
    return f;
}

/// Certified eigenvalues, raising precision until every modulus is resolved
/// against 1. Roots of cyclotomic factors are placed on the unit circle exactly.
inline std::vector<Eigenvalue> classified_eigenvalues(const SpectralFactors& f, mpfr_prec_t bits, mpfr_prec_t& used) {
    std::vector<Eigenvalue> out;
    for (const auto& c : f.cyclotomic) {
        const Real twopi = Real::pi(bits) * 2L;
        for (int k = 1; k <= c.index; ++k) {
            if (std::gcd(k, c.index) != 1) continue;
            Real ang = twopi * Real(static_cast<long>(k), bits) / Real(static_cast<long>(c.index), bits);
            Eigenvalue e;
            e.z = Complex(cos(ang), sin(ang));
            if (c.index <= 2) e.z.im = Real::zero(bits);
            e.radius = Real::zero(bits);
            e.multiplicity = c.multiplicity;
            e.cls = ModulusClass::Central;
            e.exact_unit = true;
            e.real = c.index <= 2;
            out.push_back(std::move(e));
        }
    }
    for (const auto& [g, mult] : f.squarefree) {
        std::string last;
        bool done = false;
        for (mpfr_prec_t b = bits; b <= 4 * bits; b *= 2) {
            auto roots = isolate_roots(g, b);
            std::vector<Eigenvalue> part;
            bool ok = true;
            for (auto& r : roots) {
                Real m = r.z.abs();
                Eigenvalue e{r.z, r.radius, mult, ModulusClass::Central, false, r.real};
                if (m - r.radius > 1L) e.cls = ModulusClass::Unstable;
                else if (m + r.radius < 1L) e.cls = ModulusClass::Stable;
                else {
                    ok = false;
                    last = "eigenvalue near " + r.z.re.str(10) + (r.real ? "" : " + " + r.z.im.str(10) + "i") +
                           " with radius " + r.radius.str(4) + " straddles |z| = 1";
                    break;
                }
                part.push_back(std::move(e));
            }
            used = std::max(used, b);
            if (ok) {
                for (auto& e : part) out.push_back(std::move(e));
                done = true;
                break;
            }
        }
        if (!done) fail(ErrorKind::SpectralAmbiguity, last);
    }
    return out;
}

} // namespace detail

/// Lyapunov exponents of a primitive integer matrix with certified enclosures.
inline LyapunovSpectrum lyapunov_spectrum(const IntMatrix& a, const PrecisionContext& ctx = PrecisionContext()) {
    if (!a.is_nonnegative() || positivity_power(a, wielandt_bound(a.rows())) == 0)
        fail(ErrorKind::NotPrimitive, "matrix is not primitive");
    LyapunovSpectrum s;
    auto f = detail::factor_charpoly(a);
    s.charpoly = f.charpoly;
    s.bits_used = ctx.bits;
    s.eigenvalues = detail::classified_eigenvalues(f, ctx.bits, s.bits_used);

    std::vector<std::pair<Real, Real>> ex;
    for (const auto& e : s.eigenvalues) {
        Real m = e.z.abs().with_bits(ctx.bits);
        Real l = e.exact_unit ? Real::zero(ctx.bits) : log(m);
        Real r = e.exact_unit ? Real::zero(ctx.bits) : (e.radius / (m - e.radius)).with_bits(ctx.bits);
        for (int k = 0; k < e.multiplicity; ++k) ex.emplace_back(l, r);
        if (e.cls == ModulusClass::Central) s.zero_multiplicity += e.multiplicity;
    }
    std::sort(ex.begin(), ex.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
    for (auto& [l, r] : ex) {
        s.exponents.push_back(l);
        s.radii.push_back(r);
    }
    s.jordan_max = 1;
    for (const auto& c : f.cyclotomic) s.jordan_max = std::max(s.jordan_max, detail::jordan_block_size(a, c.poly));
    for (const auto& [g, mult] : f.squarefree)
        if (mult > 1) s.jordan_max = std::max(s.jordan_max, detail::jordan_block_size(a, g));
    return s;
}

/// Generalized eigenspaces of Aᵗ grouped by |eigenvalue| against 1.
struct Splitting {
    std::vector<RealVector> stable, central, unstable;
    std::vector<IntVector> central_exact;  ///< integer basis of Γ_c
    Real theta_plus;                       ///< min log|z| over unstable eigenvalues
    bool non_degenerate = false;
    std::size_t d = 0;
    mpfr_prec_t bits = kDefaultBits;
    RealMatrix basis;  ///< columns: stable, central, unstable

    struct Parts {
        RealVector s, c, u;
    };

    /// v = s + c + u with s ∈ Γ_s, c ∈ Γ_c, u ∈ Γ_u.
    Parts decompose(const RealVector& v) const {
        const Real tiny = Real::pow2(-static_cast<long>(bits) + 8, bits);
        RealVector coef = solve(basis, to_bits(v, bits), tiny);
        Parts p{RealVector(d, Real::zero(bits)), RealVector(d, Real::zero(bits)), RealVector(d, Real::zero(bits))};
        std::size_t j = 0;
        auto acc = [&](const std::vector<RealVector>& b, RealVector& out) {
            for (const auto& bv : b) {
                for (std::size_t i = 0; i < d; ++i) out[i] += coef[j] * bv[i];
                ++j;
            }
        };
        acc(stable, p.s);
        acc(central, p.c);
        acc(unstable, p.u);
        return p;
    }
    RealVector unstable_part(const RealVector& v) const { return decompose(v).u; }
    RealVector center_stable_part(const RealVector& v) const {
        auto p = decompose(v);
        return vec_add(p.s, p.c);
    }
};

namespace detail {

/// Real coefficients (low degree first) of Π (x − z_j)^{m_j}.
inline RealVector real_poly_from_roots(const std::vector<const Eigenvalue*>& roots, mpfr_prec_t b) {
    std::vector<Complex> c{Complex(Real(1L, b), Real::zero(b))};
    for (const Eigenvalue* e : roots)
        for (int k = 0; k < e->multiplicity; ++k) {
            Complex z(e->z.re.with_bits(b), e->z.im.with_bits(b));
            std::vector<Complex> next(c.size() + 1, Complex(b));
            for (std::size_t i = 0; i < c.size(); ++i) {
                next[i + 1] = next[i + 1] + c[i];
                next[i] = next[i] - c[i] * z;
            }
            c = std::move(next);
        }
    RealVector out;
    for (auto& x : c) out.push_back(x.re);
    return out;
}

inline void normalize_max(RealVector& v) {
    Real m = Real::zero(v[0].bits());
    std::size_t at = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (abs(v[i]) > m) { m = abs(v[i]); at = i; }
    if (v[at].sign() < 0) m = -m;
    for (auto& x : v) x /= m;
}

} // namespace detail

/// Invariant splitting of ℝ^d = Γ_s ⊕ Γ_c ⊕ Γ_u for Aᵗ. When `kappa` is
/// given, non_degenerate means dim Γ_c = κ − 1; otherwise dim Γ_c = 0.
inline Splitting splitting(const IntMatrix& a, const PrecisionContext& ctx = PrecisionContext(),
                           std::optional<int> kappa = std::nullopt) {
    if (!a.is_nonnegative() || positivity_power(a, wielandt_bound(a.rows())) == 0)
        fail(ErrorKind::NotPrimitive, "matrix is not primitive");
    const std::size_t d = a.rows();
    const IntMatrix at = mat_transpose(a);
    auto f = detail::factor_charpoly(a);
    mpfr_prec_t used = ctx.bits;
    auto eig = detail::classified_eigenvalues(f, ctx.bits, used);

    Splitting sp;
    sp.d = d;
    sp.bits = ctx.bits;

    if (!f.cyclotomic.empty()) {
        Poly c = Poly::from_ints({1});
        for (const auto& cf : f.cyclotomic)
            for (int k = 0; k < cf.multiplicity; ++k) c = c * cf.poly;
        sp.central_exact = nullspace_q(to_q(eval_matrix(c, at)), d);
        for (const auto& v : sp.central_exact) sp.central.push_back(to_real(v, ctx.bits));
    }

    const mpfr_prec_t wb = 2 * used + 64;
    RealMatrix atr = RealMatrix::from_int(at, wb);
    auto numeric_space = [&](ModulusClass cls) {
        std::vector<const Eigenvalue*> roots;
        std::size_t dim = 0;
        for (const auto& e : eig)
            if (e.cls == cls) {
                roots.push_back(&e);
                dim += e.multiplicity;
            }
        std::vector<RealVector> out;
        if (dim == 0) return out;
        RealVector coeffs = detail::real_poly_from_roots(roots, wb);
        RealMatrix m = eval_matrix(coeffs, atr);
        for (auto& v : nullspace_with_dim(m, dim)) {
            detail::normalize_max(v);
            out.push_back(to_bits(v, ctx.bits));
        }
        return out;
    };
    sp.stable = numeric_space(ModulusClass::Stable);
    sp.unstable = numeric_space(ModulusClass::Unstable);

    bool first = true;
    for (const auto& e : eig)
        if (e.cls == ModulusClass::Unstable) {
            Real l = log(e.z.abs()).with_bits(ctx.bits);
            if (first || l < sp.theta_plus) sp.theta_plus = l;
            first = false;
        }
    sp.non_degenerate = sp.central.size() == static_cast<std::size_t>(kappa ? *kappa - 1 : 0);

    std::vector<RealVector> all = sp.stable;
    all.insert(all.end(), sp.central.begin(), sp.central.end());
    all.insert(all.end(), sp.unstable.begin(), sp.unstable.end());
    if (all.size() != d) fail(ErrorKind::SpectralAmbiguity, "subspace dimensions do not add up to d");
    sp.basis = RealMatrix::from_columns(all, d, ctx.bits);
    return sp;
}

/// Distance from Aᵗv to span(basis), relative to ‖v‖ (invariance check).
inline Real invariance_defect(const IntMatrix& a, const std::vector<RealVector>& basis, const RealVector& v) {
    const mpfr_prec_t b = v[0].bits();
    RealVector w = matvec(mat_transpose(a), v);
    if (basis.empty()) return sup_norm(w);
    RealVector c = coordinates(basis, w, Real::pow2(-static_cast<long>(b) + 8, b));
    RealVector proj(v.size(), Real::zero(b));
    for (std::size_t j = 0; j < basis.size(); ++j)
        for (std::size_t i = 0; i < v.size(); ++i) proj[i] += c[j] * basis[j][i];
    return sup_norm(vec_sub(w, proj)) / max(sup_norm(w), Real(1L, b));
}

/// ν(B) = max B_{αβ}/B_{αγ} over a strictly positive matrix.
inline mpq_class nu_ratio(const IntMatrix& b) {
    if (!b.is_positive()) fail(ErrorKind::NotPositive, "ν(B) needs a strictly positive matrix");
    mpq_class best = 0;
    for (std::size_t i = 0; i < b.rows(); ++i) {
        mpz_class lo = b(i, 0), hi = b(i, 0);
        for (std::size_t j = 1; j < b.cols(); ++j) {
            lo = std::min(lo, b(i, j));
            hi = std::max(hi, b(i, j));
        }
        mpq_class r(hi, lo);
        r.canonicalize();
        best = std::max(best, r);
    }
    return best;
}

} // namespace ietlab
