#pragma once

#include <cstddef>
#include <vector>

#include "int_matrix.hpp"
#include "linalg.hpp"
#include "permutation.hpp"

namespace ietlab {

/// Singularity combinatorics of an irreducible pair: the permutation σ of
/// {0..d}, its orbits Σ(π) and the marker vectors b(𝒪) spanning ker Ω_π.
struct SingularityData {
    std::vector<int> sigma;
    std::vector<std::vector<int>> orbits;
    std::vector<std::size_t> sigma0;  ///< indices of orbits not containing 0
    std::vector<IntVector> b_vectors;  ///< one per orbit, same order
    int kappa = 0;
    int genus = 0;
};

inline SingularityData singularity_data(const PermutationPair& pair) {
    require_irreducible(pair);
    const int d = static_cast<int>(pair.d());
    std::vector<int> p(d + 2), pinv(d + 2);
    p[0] = 0;
    p[d + 1] = d + 1;
    for (int j = 1; j <= d; ++j) p[j] = pair.monodromy(j);
    for (int j = 0; j <= d + 1; ++j) pinv[p[j]] = j;

    SingularityData s;
    s.sigma.resize(d + 1);
    for (int j = 0; j <= d; ++j) s.sigma[j] = pinv[p[j] + 1] - 1;

    std::vector<int> orbit_of(d + 1, -1);
    for (int j = 0; j <= d; ++j) {
        if (orbit_of[j] >= 0) continue;
        std::vector<int> orb;
        for (int k = j; orbit_of[k] < 0; k = s.sigma[k]) {
            orbit_of[k] = static_cast<int>(s.orbits.size());
            orb.push_back(k);
        }
        s.orbits.push_back(std::move(orb));
    }
    for (std::size_t o = 0; o < s.orbits.size(); ++o) {
        IntVector b(d);
        for (int a = 0; a < d; ++a) {
            const int pos = pair.pi0()[a];
            b[a] = (orbit_of[pos] == static_cast<int>(o) ? 1 : 0) - (orbit_of[pos - 1] == static_cast<int>(o) ? 1 : 0);
        }
        s.b_vectors.push_back(std::move(b));
        if (orbit_of[0] != static_cast<int>(o)) s.sigma0.push_back(o);
    }
    s.kappa = static_cast<int>(s.orbits.size());
    s.genus = (d - s.kappa + 1) / 2;
    return s;
}

/// Checks Σ b(𝒪) = 0, Ω b(𝒪) = 0, and that the Σ₀ vectors are a basis of ker Ω.
inline bool verify_singularity_data(const PermutationPair& pair, const SingularityData& s) {
    const std::size_t d = pair.d();
    IntMatrix om = omega_matrix(pair);
    IntVector total(d);
    for (const auto& b : s.b_vectors) {
        for (std::size_t a = 0; a < d; ++a) total[a] += b[a];
        for (const auto& x : matvec(om, b))
            if (x != 0) return false;
    }
    for (const auto& x : total)
        if (x != 0) return false;
    IntMatrix m(s.sigma0.size(), d);
    for (std::size_t i = 0; i < s.sigma0.size(); ++i)
        for (std::size_t a = 0; a < d; ++a) m(i, a) = s.b_vectors[s.sigma0[i]][a];
    const std::size_t kernel_dim = d - rank_q(om);
    return (s.sigma0.empty() ? 0 : rank_q(m)) == s.sigma0.size() && s.sigma0.size() == kernel_dim &&
           static_cast<int>(d) == 2 * s.genus + s.kappa - 1;
}

} // namespace ietlab
