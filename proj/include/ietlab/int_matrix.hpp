#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "errors.hpp"
#include "real.hpp"

namespace ietlab {

using IntVector = std::vector<mpz_class>;

/// Dense matrix of arbitrary-size integers, row-major.
class IntMatrix {
public:
    IntMatrix() = default;
    IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}
    IntMatrix(std::initializer_list<std::initializer_list<long>> rows) {
        rows_ = rows.size();
        cols_ = rows_ ? rows.begin()->size() : 0;
        a_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_) fail(ErrorKind::DimensionError, "ragged matrix literal");
            for (long v : r) a_.emplace_back(v);
        }
    }

    static IntMatrix identity(std::size_t d) {
        IntMatrix m(d, d);
        for (std::size_t i = 0; i < d; ++i) m(i, i) = 1;
        return m;
    }

    static IntMatrix from_rows(const std::vector<std::vector<mpz_class>>& rows) {
        IntMatrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
        for (std::size_t i = 0; i < m.rows_; ++i) {
            if (rows[i].size() != m.cols_) fail(ErrorKind::DimensionError, "ragged matrix rows");
            for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }

    mpz_class& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const mpz_class& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    IntVector row(std::size_t i) const { return IntVector(a_.begin() + i * cols_, a_.begin() + (i + 1) * cols_); }
    IntVector col(std::size_t j) const {
        IntVector c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    /// Column sums; for a Rauzy–Veech return matrix these are return times.
    IntVector column_sums() const {
        IntVector s(cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) s[j] += (*this)(i, j);
        return s;
    }

    /// Largest column sum, the norm used for return-time matrices.
    mpz_class norm() const {
        mpz_class m = 0;
        for (const auto& s : column_sums()) if (s > m) m = s;
        return m;
    }

    bool is_positive() const {
        for (const auto& x : a_) if (x <= 0) return false;
        return true;
    }
    bool is_nonnegative() const {
        for (const auto& x : a_) if (x < 0) return false;
        return true;
    }

    std::vector<std::vector<std::string>> to_strings() const {
        std::vector<std::vector<std::string>> out(rows_, std::vector<std::string>(cols_));
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out[i][j] = (*this)(i, j).get_str();
        return out;
    }

    friend bool operator==(const IntMatrix& x, const IntMatrix& y) {
        return x.rows_ == y.rows_ && x.cols_ == y.cols_ && x.a_ == y.a_;
    }
    friend bool operator!=(const IntMatrix& x, const IntMatrix& y) { return !(x == y); }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<mpz_class> a_;
};

inline IntMatrix matmul(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols() != b.rows())
        fail(ErrorKind::DimensionError, "matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                             " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    IntMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const mpz_class& aik = a(i, k);
            if (aik == 0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

inline IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) { return matmul(a, b); }

inline IntMatrix operator+(const IntMatrix& a, const IntMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) fail(ErrorKind::DimensionError, "matrix sum shape mismatch");
    IntMatrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
    return c;
}

inline IntMatrix operator-(const IntMatrix& a, const IntMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) fail(ErrorKind::DimensionError, "matrix difference shape mismatch");
    IntMatrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
    return c;
}

inline IntMatrix mat_transpose(const IntMatrix& a) {
    IntMatrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

inline IntMatrix matpow(const IntMatrix& a, unsigned long n) {
    if (!a.is_square()) fail(ErrorKind::DimensionError, "matpow of a non-square matrix");
    IntMatrix result = IntMatrix::identity(a.rows());
    IntMatrix base = a;
    while (n) {
        if (n & 1UL) result = matmul(result, base);
        n >>= 1;
        if (n) base = matmul(base, base);
    }
    return result;
}

inline IntVector matvec(const IntMatrix& a, const IntVector& v) {
    if (a.cols() != v.size()) fail(ErrorKind::DimensionError, "matvec: length mismatch");
    IntVector out(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out[i] += a(i, j) * v[j];
    return out;
}

inline RealVector matvec(const IntMatrix& a, const RealVector& v) {
    if (a.cols() != v.size()) fail(ErrorKind::DimensionError, "matvec: length mismatch");
    mpfr_prec_t b = v.empty() ? kDefaultBits : v[0].bits();
    RealVector out(a.rows(), Real::zero(b));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (a(i, j) != 0) out[i] += v[j] * a(i, j);
    return out;
}

/// Exact determinant by fraction-free (Bareiss) elimination.
inline mpz_class determinant(const IntMatrix& m) {
    if (!m.is_square()) fail(ErrorKind::DimensionError, "determinant of a non-square matrix");
    const std::size_t n = m.rows();
    if (n == 0) return 1;
    IntMatrix a = m;
    mpz_class prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a(k, k) == 0) {
            std::size_t p = k + 1;
            while (p < n && a(p, k) == 0) ++p;
            if (p == n) return 0;
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                a(i, j) = a(i, j) * a(k, k) - a(i, k) * a(k, j);
                mpz_divexact(a(i, j).get_mpz_t(), a(i, j).get_mpz_t(), prev.get_mpz_t());
            }
        prev = a(k, k);
    }
    return sign * a(n - 1, n - 1);
}

inline mpz_class trace(const IntMatrix& m) {
    mpz_class t = 0;
    for (std::size_t i = 0; i < std::min(m.rows(), m.cols()); ++i) t += m(i, i);
    return t;
}

/// Least N ≤ limit with a^N strictly positive, or 0 when none exists.
inline unsigned positivity_power(const IntMatrix& a, unsigned limit) {
    if (!a.is_nonnegative()) return 0;
    const std::size_t d = a.rows();
    std::vector<char> base(d * d), p(d * d), q(d * d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) base[i * d + j] = p[i * d + j] = a(i, j) > 0;
    for (unsigned n = 1; n <= limit; ++n) {
        if (std::all_of(p.begin(), p.end(), [](char c) { return c != 0; })) return n;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) {
                char v = 0;
                for (std::size_t k = 0; k < d && !v; ++k) v = p[i * d + k] && base[k * d + j];
                q[i * d + j] = v;
            }
        std::swap(p, q);
    }
    return 0;
}

/// Wielandt's bound: a primitive d×d matrix has A^N > 0 for N = (d-1)^2 + 1.
inline unsigned wielandt_bound(std::size_t d) { return static_cast<unsigned>((d - 1) * (d - 1) + 1); }

} // namespace ietlab
