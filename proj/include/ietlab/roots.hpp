#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "errors.hpp"
#include "polynomial.hpp"
#include "real.hpp"

namespace ietlab {

/// A polynomial root with an inclusion disk: exactly one root of the
/// square-free factor lies within `radius` of `z`.
struct RootEnclosure {
    Complex z;
    Real radius;
    bool real = false;
};

namespace detail {

inline Complex complex_from(const Real& re, const Real& im) { return Complex(re, im); }

inline bool aberth_pass(const Poly& f, const Poly& df, std::vector<Complex>& z, mpfr_prec_t bits, int max_iter) {
    const std::size_t m = z.size();
    const Real stop = Real::pow2(-static_cast<long>(bits) + 8, bits);
    Real one(1L, bits);
    for (int it = 0; it < max_iter; ++it) {
        Real worst = Real::zero(bits);
        for (std::size_t k = 0; k < m; ++k) {
            Complex fz = f.eval(z[k]);
            Complex dz = df.eval(z[k]);
            if (fz.re.is_zero() && fz.im.is_zero()) continue;
            Complex n = fz / dz;
            Complex s(bits);
            for (std::size_t j = 0; j < m; ++j) {
                if (j == k) continue;
                s = s + Complex(one, Real::zero(bits)) / (z[k] - z[j]);
            }
            Complex denom = Complex(one, Real::zero(bits)) - n * s;
            Complex w = n / denom;
            z[k] = z[k] - w;
            Real mag = z[k].abs();
            Real rel = w.abs() / (mag > 1 ? mag : one);
            if (rel > worst) worst = rel;
        }
        if (worst < stop) return true;
    }
    return false;
}

} // namespace detail

/// Isolates every root of a square-free polynomial with rational
/// coefficients. Inclusion radii are deg·|Weierstrass correction|; the
/// returned disks are pairwise disjoint, so each holds exactly one root.
inline std::vector<RootEnclosure> isolate_roots(const Poly& f_in, mpfr_prec_t bits) {
    const Poly f = f_in.primitive();
    const int m = f.degree();
    if (m < 1) return {};
    mpfr_prec_t wb = bits + 48;
    for (int attempt = 0; attempt < 4; ++attempt, wb *= 2) {
        Real lc(f.lead(), wb);
        Real bound = Real::zero(wb);
        for (int i = 0; i < m; ++i) bound = max(bound, abs(Real(f.coeff(i), wb) / lc));
        bound += 1L;
        Real r0 = pow(abs(Real(f.coeff(0), wb) / lc), Real(1L, wb) / Real(static_cast<long>(m), wb));
        if (r0.is_zero() || r0 > bound) r0 = bound / 2L;
        std::vector<Complex> z;
        const Real twopi = Real::pi(wb) * 2L;
        for (int k = 0; k < m; ++k) {
            Real ang = twopi * Real(static_cast<long>(k), wb) / Real(static_cast<long>(m), wb) + Real(0.4, wb);
            z.emplace_back(r0 * cos(ang), r0 * sin(ang));
        }
        Poly df = f.derivative();
        detail::aberth_pass(f, df, z, wb, 2000);

        std::vector<RootEnclosure> out;
        for (int k = 0; k < m; ++k) {
            Complex prod(Real(1L, wb), Real::zero(wb));
            for (int j = 0; j < m; ++j)
                if (j != k) prod = prod * (z[k] - z[j]);
            Complex w = f.eval(z[k]) / (prod * lc);
            Real r = w.abs() * Real(static_cast<long>(m), wb);
            r += Real::pow2(-static_cast<long>(wb) + 4, wb) * (z[k].abs() + 1L);
            out.push_back({z[k], r, false});
        }
        bool disjoint = true;
        for (int i = 0; i < m && disjoint; ++i)
            for (int j = i + 1; j < m; ++j)
                if ((out[i].z - out[j].z).abs() <= out[i].radius + out[j].radius) { disjoint = false; break; }
        if (!disjoint) continue;
        for (int i = 0; i < m; ++i) {
            if (abs(out[i].z.im) > out[i].radius) continue;
            Complex c = out[i].z.conj();
            bool alone = true;
            for (int j = 0; j < m; ++j)
                if (j != i && (c - out[j].z).abs() <= out[i].radius + out[j].radius) alone = false;
            if (alone) {
                out[i].real = true;
                out[i].z.im = Real::zero(wb);
            }
        }
        return out;
    }
    fail(ErrorKind::SpectralAmbiguity, "could not isolate the roots of a degree-" + std::to_string(m) + " factor");
}

} // namespace ietlab
