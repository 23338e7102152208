#pragma once

#include <mpfr.h>
#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace ietlab {

constexpr mpfr_prec_t kDefaultBits = 128;

/// Tag carrying a precision, so a bare integer is never mistaken for one.
struct Bits {
    mpfr_prec_t v;
};

/// Arbitrary-precision real backed by MPFR. Each value carries its own
/// precision; binary operations produce a result at the larger of the two
/// operand precisions, so there is no process-wide precision setting.
class Real {
public:
    Real() : Real(0L, kDefaultBits) {}

    explicit Real(Bits b) { mpfr_init2(v_, b.v); mpfr_set_zero(v_, 1); }
    static Real zero(mpfr_prec_t b) { return Real(Bits{b}); }

    Real(long value, mpfr_prec_t bits) { mpfr_init2(v_, bits); mpfr_set_si(v_, value, MPFR_RNDN); }
    Real(int value, mpfr_prec_t bits) : Real(static_cast<long>(value), bits) {}
    Real(double value, mpfr_prec_t bits) { mpfr_init2(v_, bits); mpfr_set_d(v_, value, MPFR_RNDN); }
    Real(const mpz_class& value, mpfr_prec_t bits) {
        mpfr_init2(v_, bits);
        mpfr_set_z(v_, value.get_mpz_t(), MPFR_RNDN);
    }
    Real(const mpq_class& value, mpfr_prec_t bits) {
        mpfr_init2(v_, bits);
        mpfr_set_q(v_, value.get_mpq_t(), MPFR_RNDN);
    }
    Real(const std::string& text, mpfr_prec_t bits) {
        mpfr_init2(v_, bits);
        char* end = nullptr;
        if (mpfr_strtofr(v_, text.c_str(), &end, 10, MPFR_RNDN) != 0 && end == text.c_str())
            fail(ErrorKind::DomainError, "not a decimal number: '" + text + "'");
        while (end && *end == ' ') ++end;
        if (end == text.c_str() || (end && *end != '\0'))
            fail(ErrorKind::DomainError, "not a decimal number: '" + text + "'");
    }

    Real(const Real& other) {
        mpfr_init2(v_, mpfr_get_prec(other.v_));
        mpfr_set(v_, other.v_, MPFR_RNDN);
    }
    Real(Real&& other) noexcept {
        mpfr_init2(v_, mpfr_get_prec(other.v_));
        mpfr_swap(v_, other.v_);
    }
    Real& operator=(const Real& other) {
        if (this != &other) {
            if (mpfr_get_prec(v_) != mpfr_get_prec(other.v_)) mpfr_set_prec(v_, mpfr_get_prec(other.v_));
            mpfr_set(v_, other.v_, MPFR_RNDN);
        }
        return *this;
    }
    Real& operator=(Real&& other) noexcept {
        mpfr_swap(v_, other.v_);
        return *this;
    }
    ~Real() { mpfr_clear(v_); }

    mpfr_prec_t bits() const { return mpfr_get_prec(v_); }
    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }

    /// Same value, rounded to (or widened to) `b` bits.
    Real with_bits(mpfr_prec_t b) const {
        Real r(Bits{b});
        mpfr_set(r.v_, v_, MPFR_RNDN);
        return r;
    }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    long double to_long_double() const { return mpfr_get_ld(v_, MPFR_RNDN); }
    bool is_finite() const { return mpfr_number_p(v_) != 0; }
    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }

    /// Scientific decimal with `digits` significant digits; 0 picks a digit
    /// count matching the precision.
    std::string str(int digits = 0) const {
        if (digits <= 0) digits = static_cast<int>(std::ceil(static_cast<double>(bits()) * 0.30103)) + 1;
        if (is_zero()) return "0";
        char* buf = nullptr;
        mpfr_asprintf(&buf, "%.*Re", digits - 1, v_);
        std::string out(buf);
        mpfr_free_str(buf);
        return out;
    }

    Real& operator+=(const Real& o) { widen(o); mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Real& operator-=(const Real& o) { widen(o); mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Real& operator*=(const Real& o) { widen(o); mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Real& operator/=(const Real& o) { widen(o); mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Real& operator*=(long o) { mpfr_mul_si(v_, v_, o, MPFR_RNDN); return *this; }
    Real& operator/=(long o) { mpfr_div_si(v_, v_, o, MPFR_RNDN); return *this; }
    Real& operator+=(long o) { mpfr_add_si(v_, v_, o, MPFR_RNDN); return *this; }
    Real& operator-=(long o) { mpfr_sub_si(v_, v_, o, MPFR_RNDN); return *this; }
    Real& operator*=(const mpz_class& o) { mpfr_mul_z(v_, v_, o.get_mpz_t(), MPFR_RNDN); return *this; }
    Real& operator+=(const mpz_class& o) { mpfr_add_z(v_, v_, o.get_mpz_t(), MPFR_RNDN); return *this; }

    Real operator-() const { Real r(Bits{bits()}); mpfr_neg(r.v_, v_, MPFR_RNDN); return r; }

    friend Real operator+(const Real& a, const Real& b) { Real r(Bits{std::max(a.bits(), b.bits())}); mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
    friend Real operator-(const Real& a, const Real& b) { Real r(Bits{std::max(a.bits(), b.bits())}); mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
    friend Real operator*(const Real& a, const Real& b) { Real r(Bits{std::max(a.bits(), b.bits())}); mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
    friend Real operator/(const Real& a, const Real& b) { Real r(Bits{std::max(a.bits(), b.bits())}); mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
    friend Real operator+(Real a, long b) { a += b; return a; }
    friend Real operator-(Real a, long b) { a -= b; return a; }
    friend Real operator*(Real a, long b) { a *= b; return a; }
    friend Real operator/(Real a, long b) { a /= b; return a; }
    friend Real operator*(long b, Real a) { a *= b; return a; }
    friend Real operator*(Real a, const mpz_class& b) { a *= b; return a; }
    friend Real operator*(const mpz_class& b, Real a) { a *= b; return a; }

    friend bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.v_, b.v_) != 0; }
    friend bool operator>(const Real& a, const Real& b) { return mpfr_greater_p(a.v_, b.v_) != 0; }
    friend bool operator<=(const Real& a, const Real& b) { return mpfr_lessequal_p(a.v_, b.v_) != 0; }
    friend bool operator>=(const Real& a, const Real& b) { return mpfr_greaterequal_p(a.v_, b.v_) != 0; }
    friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
    friend bool operator!=(const Real& a, const Real& b) { return !(a == b); }
    friend bool operator<(const Real& a, long b) { return mpfr_cmp_si(a.v_, b) < 0; }
    friend bool operator>(const Real& a, long b) { return mpfr_cmp_si(a.v_, b) > 0; }
    friend bool operator<=(const Real& a, long b) { return mpfr_cmp_si(a.v_, b) <= 0; }
    friend bool operator>=(const Real& a, long b) { return mpfr_cmp_si(a.v_, b) >= 0; }
    friend bool operator==(const Real& a, long b) { return mpfr_cmp_si(a.v_, b) == 0; }
    friend bool operator!=(const Real& a, long b) { return mpfr_cmp_si(a.v_, b) != 0; }

    friend std::ostream& operator<<(std::ostream& os, const Real& x) { return os << x.str(20); }

    friend Real sqrt(const Real& x) { Real r(Bits{x.bits()}); mpfr_sqrt(r.v_, x.v_, MPFR_RNDN); return r; }
    friend Real log(const Real& x) { Real r(Bits{x.bits()}); mpfr_log(r.v_, x.v_, MPFR_RNDN); return r; }
    friend Real log2(const Real& x) { Real r(Bits{x.bits()}); mpfr_log2(r.v_, x.v_, MPFR_RNDN); return r; }
    friend Real exp(const Real& x) { Real r(Bits{x.bits()}); mpfr_exp(r.v_, x.v_, MPFR_RNDN); return r; }
    friend Real abs(const Real& x) { Real r(Bits{x.bits()}); mpfr_abs(r.v_, x.v_, MPFR_RNDN); return r; }
    friend Real floor(const Real& x) { Real r(Bits{x.bits()}); mpfr_floor(r.v_, x.v_); return r; }
    friend Real atan2(const Real& y, const Real& x) { Real r(Bits{std::max(x.bits(), y.bits())}); mpfr_atan2(r.v_, y.v_, x.v_, MPFR_RNDN); return r; }
    friend Real cos(const Real& x) { Real r(Bits{x.bits()}); mpfr_cos(r.v_, x.v_, MPFR_RNDN); return r; }
    friend Real sin(const Real& x) { Real r(Bits{x.bits()}); mpfr_sin(r.v_, x.v_, MPFR_RNDN); return r; }
    friend Real pow(const Real& x, long n) { Real r(Bits{x.bits()}); mpfr_pow_si(r.v_, x.v_, n, MPFR_RNDN); return r; }
    friend Real pow(const Real& x, const Real& y) { Real r(Bits{std::max(x.bits(), y.bits())}); mpfr_pow(r.v_, x.v_, y.v_, MPFR_RNDN); return r; }

    /// 2^e at the given precision.
    static Real pow2(long e, mpfr_prec_t b) { Real r(1L, b); mpfr_mul_2si(r.v_, r.v_, e, MPFR_RNDN); return r; }
    static Real pi(mpfr_prec_t b) { Real r(Bits{b}); mpfr_const_pi(r.v_, MPFR_RNDN); return r; }

    /// Nearest integer, ties away from zero.
    mpz_class round_to_integer() const {
        mpz_class z;
        Real t(Bits{bits()});
        mpfr_round(t.v_, v_);
        mpfr_get_z(z.get_mpz_t(), t.v_, MPFR_RNDN);
        return z;
    }
    mpz_class floor_to_integer() const {
        mpz_class z;
        mpfr_get_z(z.get_mpz_t(), v_, MPFR_RNDD);
        return z;
    }

private:
    void widen(const Real& o) {
        if (o.bits() > bits()) mpfr_prec_round(v_, o.bits(), MPFR_RNDN);
    }
    mpfr_t v_;
};

inline Real min(const Real& a, const Real& b) { return a < b ? a : b; }
inline Real max(const Real& a, const Real& b) { return a < b ? b : a; }

using RealVector = std::vector<Real>;

/// Minimal complex number over Real, used by the polynomial root finder.
struct Complex {
    Real re, im;

    Complex() = default;
    explicit Complex(mpfr_prec_t b) : re(Real::zero(b)), im(Real::zero(b)) {}
    Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}

    mpfr_prec_t bits() const { return std::max(re.bits(), im.bits()); }

    friend Complex operator+(const Complex& a, const Complex& b) { return {a.re + b.re, a.im + b.im}; }
    friend Complex operator-(const Complex& a, const Complex& b) { return {a.re - b.re, a.im - b.im}; }
    friend Complex operator*(const Complex& a, const Complex& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend Complex operator*(const Complex& a, const Real& s) { return {a.re * s, a.im * s}; }
    friend Complex operator/(const Complex& a, const Complex& b) {
        Real den = b.re * b.re + b.im * b.im;
        return {(a.re * b.re + a.im * b.im) / den, (a.im * b.re - a.re * b.im) / den};
    }
    Complex conj() const { return {re, -im}; }
    Real norm2() const { return re * re + im * im; }
    Real abs() const { return sqrt(norm2()); }
};

/// Working precision and comparison tolerance used by every real-valued
/// routine. Never global: callers pass it explicitly.
struct PrecisionContext {
    mpfr_prec_t bits = kDefaultBits;

    PrecisionContext() = default;
    explicit PrecisionContext(mpfr_prec_t b) : bits(b) {
        if (b < 64) fail(ErrorKind::DomainError, "mantissa_bits must be at least 64");
    }

    /// ε_cmp = 2^(-bits/2).
    Real eps() const { return Real::pow2(-static_cast<long>(bits / 2), bits); }
    /// Looser tolerance for derived quantities, 2^(-bits/4).
    Real loose_eps() const { return Real::pow2(-static_cast<long>(bits / 4), bits); }

    Real zero() const { return Real::zero(bits); }
    Real num(long v) const { return Real(v, bits); }
    Real num(const std::string& s) const { return Real(s, bits); }
    Real num(const mpz_class& z) const { return Real(z, bits); }

    PrecisionContext widened(mpfr_prec_t extra) const { return PrecisionContext(bits + extra); }

    /// Reads IET_LAB_PRECISION_BITS when set, otherwise 128.
    static PrecisionContext from_env() {
        if (const char* env = std::getenv("IET_LAB_PRECISION_BITS")) {
            char* end = nullptr;
            long b = std::strtol(env, &end, 10);
            if (end == env || *end != '\0')
                fail(ErrorKind::DomainError, "IET_LAB_PRECISION_BITS is not an integer");
            return PrecisionContext(static_cast<mpfr_prec_t>(b));
        }
        return PrecisionContext();
    }
};

inline RealVector to_bits(const RealVector& v, mpfr_prec_t b) {
    RealVector out;
    out.reserve(v.size());
    for (const auto& x : v) out.push_back(x.with_bits(b));
    return out;
}

inline Real sum(const RealVector& v, mpfr_prec_t b) {
    Real s = Real::zero(b);
    for (const auto& x : v) s += x;
    return s;
}

inline Real dot(const RealVector& a, const RealVector& b) {
    if (a.size() != b.size()) fail(ErrorKind::DimensionError, "dot: length mismatch");
    Real s = Real::zero(a.empty() ? kDefaultBits : a[0].bits());
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline Real sup_norm(const RealVector& v) {
    Real m = Real::zero(v.empty() ? kDefaultBits : v[0].bits());
    for (const auto& x : v) {
        Real a = abs(x);
        if (a > m) m = a;
    }
    return m;
}

} // namespace ietlab
