#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <vector>

#include "int_matrix.hpp"

namespace ietlab {

struct SmithForm {
    IntMatrix d;  ///< diagonal, d_11 | d_22 | ...
    IntMatrix u;  ///< unimodular, rows × rows
    IntMatrix v;  ///< unimodular, cols × cols, with u·a·v = d
    std::size_t rank = 0;

    std::vector<mpz_class> invariant_factors() const {
        std::vector<mpz_class> f;
        for (std::size_t i = 0; i < rank; ++i) f.push_back(d(i, i));
        return f;
    }
};

namespace detail {

inline void swap_rows(IntMatrix& m, std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t c = 0; c < m.cols(); ++c) std::swap(m(i, c), m(j, c));
}
inline void swap_cols(IntMatrix& m, std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t r = 0; r < m.rows(); ++r) std::swap(m(r, i), m(r, j));
}
// row_i += f * row_j
inline void add_row(IntMatrix& m, std::size_t i, std::size_t j, const mpz_class& f) {
    for (std::size_t c = 0; c < m.cols(); ++c) m(i, c) += f * m(j, c);
}
inline void add_col(IntMatrix& m, std::size_t i, std::size_t j, const mpz_class& f) {
    for (std::size_t r = 0; r < m.rows(); ++r) m(r, i) += f * m(r, j);
}
inline mpz_class floor_div(const mpz_class& a, const mpz_class& b) {
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

} // namespace detail

/// Smith normal form over ℤ with unimodular transforms.
inline SmithForm smith_normal_form(const IntMatrix& a) {
    using namespace detail;
    const std::size_t m = a.rows(), n = a.cols();
    SmithForm s{a, IntMatrix::identity(m), IntMatrix::identity(n), 0};
    IntMatrix& d = s.d;
    for (std::size_t t = 0; t < std::min(m, n); ++t) {
        for (;;) {
            std::size_t pi = m, pj = n;
            for (std::size_t i = t; i < m; ++i)
                for (std::size_t j = t; j < n; ++j)
                    if (d(i, j) != 0 && (pi == m || abs(d(i, j)) < abs(d(pi, pj)))) { pi = i; pj = j; }
            if (pi == m) return s;
            swap_rows(d, t, pi); swap_rows(s.u, t, pi);
            swap_cols(d, t, pj); swap_cols(s.v, t, pj);

            bool clean = true;
            for (std::size_t i = t + 1; i < m; ++i) {
                if (d(i, t) == 0) continue;
                mpz_class q = floor_div(d(i, t), d(t, t));
                add_row(d, i, t, -q); add_row(s.u, i, t, -q);
                if (d(i, t) != 0) clean = false;
            }
            for (std::size_t j = t + 1; j < n; ++j) {
                if (d(t, j) == 0) continue;
                mpz_class q = floor_div(d(t, j), d(t, t));
                add_col(d, j, t, -q); add_col(s.v, j, t, -q);
                if (d(t, j) != 0) clean = false;
            }
            if (!clean) continue;

            bool divides = true;
            for (std::size_t i = t + 1; i < m && divides; ++i)
                for (std::size_t j = t + 1; j < n; ++j)
                    if (d(i, j) % d(t, t) != 0) {
                        add_row(d, t, i, 1); add_row(s.u, t, i, 1);
                        divides = false;
                        break;
                    }
            if (divides) break;
        }
        if (d(t, t) < 0) {
            for (std::size_t c = 0; c < n; ++c) d(t, c) = -d(t, c);
            for (std::size_t c = 0; c < m; ++c) s.u(t, c) = -s.u(t, c);
        }
        s.rank = t + 1;
    }
    return s;
}

/// Row-style Hermite normal form of the lattice spanned by `rows`, with
/// pivots taken from the last coordinate backwards so each basis vector's
/// last nonzero entry is positive. Zero rows are dropped.
inline std::vector<IntVector> hermite_basis(std::vector<IntVector> rows) {
    using detail::floor_div;
    if (rows.empty()) return rows;
    const std::size_t n = rows[0].size();
    std::size_t r = 0;
    for (std::size_t col = n; col-- > 0 && r < rows.size();) {
        for (;;) {
            std::size_t p = rows.size();
            for (std::size_t i = r; i < rows.size(); ++i)
                if (rows[i][col] != 0 && (p == rows.size() || abs(rows[i][col]) < abs(rows[p][col]))) p = i;
            if (p == rows.size()) break;
            std::swap(rows[r], rows[p]);
            bool done = true;
            for (std::size_t i = r + 1; i < rows.size(); ++i) {
                if (rows[i][col] == 0) continue;
                mpz_class q = floor_div(rows[i][col], rows[r][col]);
                for (std::size_t c = 0; c < n; ++c) rows[i][c] -= q * rows[r][c];
                if (rows[i][col] != 0) done = false;
            }
            if (done) break;
        }
        if (rows[r][col] == 0) continue;
        if (rows[r][col] < 0)
            for (auto& x : rows[r]) x = -x;
        for (std::size_t i = 0; i < r; ++i) {
            mpz_class q = floor_div(rows[i][col], rows[r][col]);
            for (std::size_t c = 0; c < n; ++c) rows[i][c] -= q * rows[r][c];
        }
        ++r;
    }
    rows.resize(r);
    return rows;
}

/// Basis of the integer kernel {v ∈ ℤⁿ : a v = 0}, in Hermite form.
inline std::vector<IntVector> integer_kernel(const IntMatrix& a) {
    SmithForm s = smith_normal_form(a);
    std::vector<IntVector> basis;
    for (std::size_t j = s.rank; j < a.cols(); ++j) basis.push_back(s.v.col(j));
    return hermite_basis(basis);
}

} // namespace ietlab
