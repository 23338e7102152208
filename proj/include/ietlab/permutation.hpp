#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "errors.hpp"
#include "int_matrix.hpp"

namespace ietlab {

/// Combinatorial datum of a d-letter IET. Letters are 0..d-1; pi0 and pi1
/// send each letter to its position (1..d) in the top and bottom rows.
class PermutationPair {
public:
    PermutationPair() = default;

    PermutationPair(std::vector<int> pi0, std::vector<int> pi1) : pi0_(std::move(pi0)), pi1_(std::move(pi1)) {
        if (pi0_.size() != pi1_.size())
            fail(ErrorKind::InvalidPermutation, "pi0 and pi1 have different lengths");
        if (pi0_.empty()) fail(ErrorKind::DegenerateAlphabet, "empty alphabet");
        inv0_ = invert(pi0_, "pi0");
        inv1_ = invert(pi1_, "pi1");
        irreducible_ = compute_irreducible();
    }

    std::size_t d() const { return pi0_.size(); }
    const std::vector<int>& pi0() const { return pi0_; }
    const std::vector<int>& pi1() const { return pi1_; }
    int pi(int row, int letter) const { return row == 0 ? pi0_[letter] : pi1_[letter]; }
    /// Letter at position `pos` (1-based) in the given row.
    int letter_at(int row, int pos) const { return row == 0 ? inv0_[pos - 1] : inv1_[pos - 1]; }
    bool irreducible() const { return irreducible_; }

    /// p(j) = π1∘π0⁻¹(j) for 1 ≤ j ≤ d.
    int monodromy(int j) const { return pi1_[inv0_[j - 1]]; }

    friend bool operator==(const PermutationPair& a, const PermutationPair& b) {
        return a.pi0_ == b.pi0_ && a.pi1_ == b.pi1_;
    }
    friend bool operator!=(const PermutationPair& a, const PermutationPair& b) { return !(a == b); }

    std::string str() const {
        std::string s = "(";
        for (std::size_t i = 0; i < d(); ++i) s += (i ? "," : "") + std::to_string(pi0_[i]);
        s += "|";
        for (std::size_t i = 0; i < d(); ++i) s += (i ? "," : "") + std::to_string(pi1_[i]);
        return s + ")";
    }

private:
    static std::vector<int> invert(const std::vector<int>& p, const char* name) {
        const int d = static_cast<int>(p.size());
        std::vector<int> inv(p.size(), -1);
        for (int a = 0; a < d; ++a) {
            if (p[a] < 1 || p[a] > d || inv[p[a] - 1] != -1)
                fail(ErrorKind::InvalidPermutation, std::string(name) + " is not a bijection onto {1..d}");
            inv[p[a] - 1] = a;
        }
        return inv;
    }

    bool compute_irreducible() const {
        const int d = static_cast<int>(this->d());
        int running_max = 0;
        for (int k = 1; k < d; ++k) {
            running_max = std::max(running_max, monodromy(k));
            if (running_max == k) return false;
        }
        return true;
    }

    std::vector<int> pi0_, pi1_, inv0_, inv1_;
    bool irreducible_ = false;
};

/// Call as ietlab::make_pair; unqualified calls with std::vector arguments
/// also see std::make_pair through argument-dependent lookup.
inline PermutationPair make_pair(const std::vector<int>& pi0, const std::vector<int>& pi1) {
    return PermutationPair(pi0, pi1);
}

/// π^sym_d: identity top row, reversed bottom row.
inline PermutationPair make_symmetric_pair(int d) {
    if (d < 2) fail(ErrorKind::DegenerateAlphabet, "symmetric pair needs d >= 2");
    std::vector<int> p0(d), p1(d);
    for (int a = 0; a < d; ++a) {
        p0[a] = a + 1;
        p1[a] = d - a;
    }
    return PermutationPair(p0, p1);
}

inline void require_irreducible(const PermutationPair& p) {
    if (!p.irreducible()) fail(ErrorKind::ReduciblePair, "pair " + p.str() + " is reducible");
}

/// Ω_{αβ} = +1 if π1(α) > π1(β) and π0(α) < π0(β), −1 in the mirrored case, 0 otherwise.
inline IntMatrix omega_matrix(const PermutationPair& p) {
    require_irreducible(p);
    const std::size_t d = p.d();
    IntMatrix om(d, d);
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) {
            if (p.pi1()[a] > p.pi1()[b] && p.pi0()[a] < p.pi0()[b]) om(a, b) = 1;
            else if (p.pi1()[a] < p.pi1()[b] && p.pi0()[a] > p.pi0()[b]) om(a, b) = -1;
        }
    return om;
}

/// Outcome of one combinatorial Rauzy move.
struct RauzyMove {
    int eps = 0;
    int winner = 0;
    int loser = 0;
    PermutationPair next;
};

/// Applies the type-ε Rauzy move to the pair: the last letter of row ε
/// (winner) keeps its place, the last letter of the other row (loser) is
/// reinserted just after the winner in that row.
inline RauzyMove rauzy_move(const PermutationPair& p, int eps) {
    if (eps != 0 && eps != 1) fail(ErrorKind::DomainError, "Rauzy type must be 0 or 1");
    const int d = static_cast<int>(p.d());
    const int winner = p.letter_at(eps, d);
    const int loser = p.letter_at(1 - eps, d);
    std::vector<int> rows[2] = {p.pi0(), p.pi1()};
    std::vector<int>& moved = rows[1 - eps];
    const int pos = moved[winner];
    for (int a = 0; a < d; ++a) {
        const int v = moved[a];
        if (v <= pos) continue;
        moved[a] = (v == d) ? pos + 1 : v + 1;
    }
    return RauzyMove{eps, winner, loser, PermutationPair(rows[0], rows[1])};
}

/// Θ = I + E_{winner,loser}.
inline IntMatrix theta_matrix(std::size_t d, int winner, int loser) {
    IntMatrix t = IntMatrix::identity(d);
    t(winner, loser) += 1;
    return t;
}

} // namespace ietlab
