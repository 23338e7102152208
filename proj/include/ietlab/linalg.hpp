#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "int_matrix.hpp"
#include "polynomial.hpp"
#include "real.hpp"

namespace ietlab {

/// Dense matrix of Real entries, row-major.
class RealMatrix {
public:
    RealMatrix() = default;
    RealMatrix(std::size_t r, std::size_t c, mpfr_prec_t bits) : rows_(r), cols_(c), a_(r * c, Real::zero(bits)) {}

    static RealMatrix identity(std::size_t d, mpfr_prec_t bits) {
        RealMatrix m(d, d, bits);
        for (std::size_t i = 0; i < d; ++i) m(i, i) = Real(1L, bits);
        return m;
    }
    static RealMatrix from_int(const IntMatrix& a, mpfr_prec_t bits) {
        RealMatrix m(a.rows(), a.cols(), bits);
        for (std::size_t i = 0; i < a.rows(); ++i)
            for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = Real(a(i, j), bits);
        return m;
    }
    /// Matrix whose columns are the given vectors.
    static RealMatrix from_columns(const std::vector<RealVector>& cols, std::size_t rows, mpfr_prec_t bits) {
        RealMatrix m(rows, cols.size(), bits);
        for (std::size_t j = 0; j < cols.size(); ++j)
            for (std::size_t i = 0; i < rows; ++i) m(i, j) = cols[j][i];
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Real& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const Real& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
    mpfr_prec_t bits() const { return a_.empty() ? kDefaultBits : a_[0].bits(); }

    RealVector column(std::size_t j) const {
        RealVector v;
        for (std::size_t i = 0; i < rows_; ++i) v.push_back((*this)(i, j));
        return v;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Real> a_;
};

inline RealMatrix operator*(const RealMatrix& a, const RealMatrix& b) {
    if (a.cols() != b.rows()) fail(ErrorKind::DimensionError, "real matmul shape mismatch");
    RealMatrix c(a.rows(), b.cols(), std::max(a.bits(), b.bits()));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            if (a(i, k).is_zero()) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
        }
    return c;
}

inline RealVector operator*(const RealMatrix& a, const RealVector& v) {
    if (a.cols() != v.size()) fail(ErrorKind::DimensionError, "real matvec shape mismatch");
    RealVector out(a.rows(), Real::zero(a.bits()));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out[i] += a(i, j) * v[j];
    return out;
}

inline RealMatrix transpose(const RealMatrix& a) {
    RealMatrix t(a.cols(), a.rows(), a.bits());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

/// p(M) by Horner's scheme, for a real-coefficient polynomial given low degree first.
inline RealMatrix eval_matrix(const RealVector& coeffs, const RealMatrix& m) {
    const std::size_t n = m.rows();
    RealMatrix r(n, n, m.bits());
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
        r = r * m;
        for (std::size_t i = 0; i < n; ++i) r(i, i) += *it;
    }
    return r;
}

inline RealVector vec_add(const RealVector& a, const RealVector& b) {
    RealVector r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
}
inline RealVector vec_sub(const RealVector& a, const RealVector& b) {
    RealVector r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    return r;
}
inline RealVector vec_scale(const RealVector& a, const Real& s) {
    RealVector r = a;
    for (auto& x : r) x *= s;
    return r;
}

/// Solves M x = b by Gaussian elimination with partial pivoting. Throws
/// DomainError when a pivot falls below `tiny`.
inline RealVector solve(RealMatrix m, RealVector b, const Real& tiny) {
    const std::size_t n = m.rows();
    if (m.cols() != n || b.size() != n) fail(ErrorKind::DimensionError, "solve: shape mismatch");
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (abs(m(i, k)) > abs(m(p, k))) p = i;
        if (abs(m(p, k)) <= tiny) fail(ErrorKind::DomainError, "solve: matrix is numerically singular");
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
            std::swap(b[k], b[p]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            if (m(i, k).is_zero()) continue;
            Real f = m(i, k) / m(k, k);
            for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
            b[i] -= f * b[k];
        }
    }
    RealVector x(n, Real::zero(m.bits()));
    for (std::size_t k = n; k-- > 0;) {
        Real s = b[k];
        for (std::size_t j = k + 1; j < n; ++j) s -= m(k, j) * x[j];
        x[k] = s / m(k, k);
    }
    return x;
}

/// Least-squares coefficients c minimising ‖Σ c_j basis_j − v‖ (normal equations).
inline RealVector coordinates(const std::vector<RealVector>& basis, const RealVector& v, const Real& tiny) {
    const std::size_t k = basis.size();
    const mpfr_prec_t b = v.empty() ? kDefaultBits : v[0].bits();
    RealMatrix g(k, k, b);
    RealVector rhs(k, Real::zero(b));
    for (std::size_t i = 0; i < k; ++i) {
        rhs[i] = dot(basis[i], v);
        for (std::size_t j = 0; j < k; ++j) g(i, j) = dot(basis[i], basis[j]);
    }
    return solve(g, rhs, tiny);
}

/// Basis of the null space of `m`, assuming its nullity is `nullity`.
/// Uses complete pivoting and stops after rows − nullity pivots.
inline std::vector<RealVector> nullspace_with_dim(RealMatrix m, std::size_t nullity) {
    const std::size_t r = m.rows(), n = m.cols();
    if (nullity > n) fail(ErrorKind::DimensionError, "nullity exceeds column count");
    const std::size_t rank = n - nullity;
    std::vector<std::size_t> colperm(n);
    for (std::size_t j = 0; j < n; ++j) colperm[j] = j;
    for (std::size_t k = 0; k < rank; ++k) {
        std::size_t pi = k, pj = k;
        for (std::size_t i = k; i < r; ++i)
            for (std::size_t j = k; j < n; ++j)
                if (abs(m(i, j)) > abs(m(pi, pj))) { pi = i; pj = j; }
        if (m(pi, pj).is_zero()) fail(ErrorKind::SpectralAmbiguity, "rank lower than expected in null-space solve");
        for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(pi, j));
        for (std::size_t i = 0; i < r; ++i) std::swap(m(i, k), m(i, pj));
        std::swap(colperm[k], colperm[pj]);
        for (std::size_t i = 0; i < r; ++i) {
            if (i == k || m(i, k).is_zero()) continue;
            Real f = m(i, k) / m(k, k);
            for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
        }
    }
    std::vector<RealVector> basis;
    for (std::size_t f = rank; f < n; ++f) {
        RealVector v(n, Real::zero(m.bits()));
        v[colperm[f]] = Real(1L, m.bits());
        for (std::size_t k = 0; k < rank; ++k) v[colperm[k]] = -m(k, f) / m(k, k);
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Numerical rank: number of complete-pivoting pivots above `tol` times the largest entry.
inline std::size_t numeric_rank(RealMatrix m, const Real& tol) {
    const std::size_t r = m.rows(), n = m.cols();
    Real scale = Real::zero(m.bits());
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < n; ++j) scale = max(scale, abs(m(i, j)));
    if (scale.is_zero()) return 0;
    std::size_t rank = 0;
    for (std::size_t k = 0; k < std::min(r, n); ++k) {
        std::size_t pi = k, pj = k;
        for (std::size_t i = k; i < r; ++i)
            for (std::size_t j = k; j < n; ++j)
                if (abs(m(i, j)) > abs(m(pi, pj))) { pi = i; pj = j; }
        if (abs(m(pi, pj)) <= tol * scale) break;
        for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(pi, j));
        for (std::size_t i = 0; i < r; ++i) std::swap(m(i, k), m(i, pj));
        for (std::size_t i = k + 1; i < r; ++i) {
            Real f = m(i, k) / m(k, k);
            for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
        }
        ++rank;
    }
    return rank;
}

/// Rational matrix, used for exact ranks and null spaces.
using QMatrix = std::vector<std::vector<mpq_class>>;

inline QMatrix to_q(const IntMatrix& a) {
    QMatrix q(a.rows(), std::vector<mpq_class>(a.cols()));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) q[i][j] = a(i, j);
    return q;
}

/// Reduced row echelon form in place; returns pivot columns.
inline std::vector<std::size_t> rref(QMatrix& m) {
    std::vector<std::size_t> pivots;
    const std::size_t r = m.size(), n = r ? m[0].size() : 0;
    std::size_t row = 0;
    for (std::size_t col = 0; col < n && row < r; ++col) {
        std::size_t p = row;
        while (p < r && m[p][col] == 0) ++p;
        if (p == r) continue;
        std::swap(m[p], m[row]);
        mpq_class inv = 1 / m[row][col];
        for (auto& x : m[row]) x *= inv;
        for (std::size_t i = 0; i < r; ++i) {
            if (i == row || m[i][col] == 0) continue;
            mpq_class f = m[i][col];
            for (std::size_t j = col; j < n; ++j) m[i][j] -= f * m[row][j];
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

inline std::size_t rank_q(QMatrix m) { return rref(m).size(); }
inline std::size_t rank_q(const IntMatrix& a) { return rank_q(to_q(a)); }

/// Exact null-space basis over ℚ, each vector scaled to a primitive integer vector.
inline std::vector<IntVector> nullspace_q(QMatrix m, std::size_t ncols) {
    auto piv = rref(m);
    std::vector<char> is_pivot(ncols, 0);
    for (auto p : piv) is_pivot[p] = 1;
    std::vector<IntVector> basis;
    for (std::size_t f = 0; f < ncols; ++f) {
        if (is_pivot[f]) continue;
        std::vector<mpq_class> v(ncols);
        v[f] = 1;
        for (std::size_t k = 0; k < piv.size(); ++k) v[piv[k]] = -m[k][f];
        mpz_class den = 1, g = 0;
        for (const auto& x : v) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), x.get_den_mpz_t());
        IntVector z;
        for (const auto& x : v) {
            z.push_back(x.get_num() * (den / x.get_den()));
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), z.back().get_mpz_t());
        }
        for (auto& x : z) x /= g;
        basis.push_back(z);
    }
    return basis;
}

inline RealVector to_real(const IntVector& v, mpfr_prec_t bits) {
    RealVector r;
    for (const auto& x : v) r.emplace_back(x, bits);
    return r;
}

} // namespace ietlab
