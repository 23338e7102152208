#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "int_matrix.hpp"
#include "real.hpp"

namespace ietlab {

/// Polynomial with rational coefficients, stored lowest degree first.
/// Integer polynomials are the special case of unit denominators.
class Poly {
public:
    Poly() = default;
    explicit Poly(std::vector<mpq_class> c) : c_(std::move(c)) { trim(); }
    static Poly from_ints(const std::vector<long>& c) {
        std::vector<mpq_class> q;
        for (long v : c) q.emplace_back(v);
        return Poly(std::move(q));
    }
    static Poly from_mpz(const std::vector<mpz_class>& c) {
        std::vector<mpq_class> q;
        for (const auto& v : c) q.emplace_back(v);
        return Poly(std::move(q));
    }
    static Poly monomial(std::size_t k, const mpq_class& a = 1) {
        std::vector<mpq_class> q(k + 1);
        q[k] = a;
        return Poly(std::move(q));
    }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    const std::vector<mpq_class>& coeffs() const { return c_; }
    mpq_class coeff(std::size_t k) const { return k < c_.size() ? c_[k] : mpq_class(0); }
    const mpq_class& lead() const { return c_.back(); }

    friend Poly operator+(const Poly& a, const Poly& b) {
        std::vector<mpq_class> r(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = a.coeff(i) + b.coeff(i);
        return Poly(std::move(r));
    }
    friend Poly operator-(const Poly& a, const Poly& b) {
        std::vector<mpq_class> r(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = a.coeff(i) - b.coeff(i);
        return Poly(std::move(r));
    }
    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.is_zero() || b.is_zero()) return Poly();
        std::vector<mpq_class> r(a.c_.size() + b.c_.size() - 1);
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
        return Poly(std::move(r));
    }
    friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    /// Euclidean division over ℚ.
    std::pair<Poly, Poly> divmod(const Poly& d) const {
        if (d.is_zero()) fail(ErrorKind::DomainError, "polynomial division by zero");
        std::vector<mpq_class> r = c_;
        if (degree() < d.degree()) return {Poly(), *this};
        std::vector<mpq_class> q(degree() - d.degree() + 1);
        for (int k = degree() - d.degree(); k >= 0; --k) {
            mpq_class f = r[k + d.degree()] / d.lead();
            q[k] = f;
            if (f == 0) continue;
            for (int j = 0; j <= d.degree(); ++j) r[k + j] -= f * d.c_[j];
        }
        r.resize(d.degree());
        return {Poly(std::move(q)), Poly(std::move(r))};
    }

    Poly derivative() const {
        if (c_.size() <= 1) return Poly();
        std::vector<mpq_class> r(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i) r[i - 1] = c_[i] * static_cast<long>(i);
        return Poly(std::move(r));
    }

    Poly monic() const {
        if (is_zero()) return *this;
        std::vector<mpq_class> r = c_;
        mpq_class l = lead();
        for (auto& x : r) x /= l;
        return Poly(std::move(r));
    }

    /// Scales to a primitive integer polynomial with positive leading coefficient.
    Poly primitive() const {
        if (is_zero()) return *this;
        mpz_class den = 1, g = 0;
        for (const auto& x : c_) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), x.get_den_mpz_t());
        std::vector<mpz_class> z;
        for (const auto& x : c_) {
            mpz_class v = x.get_num() * (den / x.get_den());
            z.push_back(v);
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
        }
        if (z.back() < 0) g = -g;
        for (auto& v : z) v /= g;
        return from_mpz(z);
    }

    bool is_integer() const {
        for (const auto& x : c_) if (x.get_den() != 1) return false;
        return true;
    }
    std::vector<mpz_class> integer_coeffs() const {
        std::vector<mpz_class> z;
        for (const auto& x : c_) {
            if (x.get_den() != 1) fail(ErrorKind::DomainError, "polynomial has non-integer coefficients");
            z.push_back(x.get_num());
        }
        return z;
    }

    mpq_class eval(const mpq_class& x) const {
        mpq_class r = 0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + *it;
        return r;
    }
    Real eval(const Real& x) const {
        Real r = Real::zero(x.bits());
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
            r *= x;
            r += Real(*it, x.bits());
        }
        return r;
    }
    Complex eval(const Complex& z) const {
        const mpfr_prec_t b = z.bits();
        Complex r(b);
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
            r = r * z;
            r.re += Real(*it, b);
        }
        return r;
    }

private:
    void trim() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }
    std::vector<mpq_class> c_;
};

inline Poly poly_gcd(Poly a, Poly b) {
    while (!b.is_zero()) {
        Poly r = a.divmod(b).second;
        a = std::move(b);
        b = r.is_zero() ? Poly() : r.primitive();
    }
    return a.is_zero() ? a : a.primitive();
}

/// Exact characteristic polynomial det(xI − A) by Faddeev–LeVerrier.
inline Poly charpoly(const IntMatrix& a) {
    if (!a.is_square()) fail(ErrorKind::DimensionError, "charpoly of a non-square matrix");
    const std::size_t n = a.rows();
    std::vector<mpz_class> c(n + 1);
    c[n] = 1;
    IntMatrix m(n, n);
    for (std::size_t k = 1; k <= n; ++k) {
        IntMatrix am = matmul(a, m);
        for (std::size_t i = 0; i < n; ++i) am(i, i) += c[n - k + 1];
        m = am;
        mpz_class t = trace(matmul(a, m));
        mpz_class q;
        mpz_divexact_ui(q.get_mpz_t(), t.get_mpz_t(), static_cast<unsigned long>(k));
        c[n - k] = -q;
    }
    return Poly::from_mpz(c);
}

/// Yun's square-free decomposition: f = lc · Π g_i^i with g_i square-free and
/// pairwise coprime. Returns (g_i, i) for the non-constant g_i.
inline std::vector<std::pair<Poly, int>> squarefree_decomposition(const Poly& f) {
    std::vector<std::pair<Poly, int>> out;
    if (f.degree() <= 0) return out;
    Poly fp = f.derivative();
    Poly a0 = poly_gcd(f, fp);
    Poly b = f.divmod(a0).first;
    Poly c = fp.divmod(a0).first;
    Poly d = c - b.derivative();
    for (int i = 1; b.degree() > 0; ++i) {
        Poly a = poly_gcd(b, d);
        if (a.degree() > 0) out.emplace_back(a.primitive(), i);
        b = b.divmod(a).first;
        c = d.divmod(a).first;
        d = c - b.derivative();
    }
    return out;
}

/// The n-th cyclotomic polynomial Φ_n.
inline Poly cyclotomic(int n) {
    if (n < 1) fail(ErrorKind::DomainError, "cyclotomic index must be positive");
    Poly p = Poly::monomial(n) - Poly::from_ints({1});
    for (int k = 1; k < n; ++k)
        if (n % k == 0) p = p.divmod(cyclotomic(k)).first;
    return p;
}

inline int euler_phi(int n) {
    int r = n;
    for (int p = 2; p * p <= n; ++p)
        if (n % p == 0) {
            while (n % p == 0) n /= p;
            r -= r / p;
        }
    if (n > 1) r -= r / n;
    return r;
}

struct CyclotomicFactor {
    int index;
    int multiplicity;
    Poly poly;
};

/// Splits f into its cyclotomic factors (with multiplicity) and the
/// remaining cofactor, which has no root of unity among its zeros.
inline std::pair<std::vector<CyclotomicFactor>, Poly> split_cyclotomic(const Poly& f) {
    std::vector<CyclotomicFactor> found;
    Poly rest = f;
    const int deg = f.degree();
    for (int n = 1; deg > 0 && n <= 2 * deg * deg + 2; ++n) {
        if (euler_phi(n) > rest.degree()) continue;
        Poly phi = cyclotomic(n);
        int mult = 0;
        for (;;) {
            auto [q, r] = rest.divmod(phi);
            if (!r.is_zero()) break;
            rest = q;
            ++mult;
        }
        if (mult) found.push_back({n, mult, phi});
    }
    return {found, rest};
}

/// p(M) for an integer matrix, by Horner's scheme over integer coefficients.
inline IntMatrix eval_matrix(const Poly& p, const IntMatrix& m) {
    const auto c = p.integer_coeffs();
    const std::size_t n = m.rows();
    IntMatrix r(n, n);
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        r = matmul(r, m);
        for (std::size_t i = 0; i < n; ++i) r(i, i) += *it;
    }
    return r;
}

} // namespace ietlab
