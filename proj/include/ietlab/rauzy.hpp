#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "iet.hpp"
#include "int_matrix.hpp"
#include "permutation.hpp"

namespace ietlab {

struct RauzyStep {
    int eps = 0;
    int winner = 0;
    int loser = 0;
    IntMatrix theta;
    PermutationPair new_pair;
};

/// One step of Rauzy–Veech induction: the first-return map of T to
/// [0, |λ| − min(λ_{π0⁻¹(d)}, λ_{π1⁻¹(d)})).
inline std::pair<RauzyStep, Iet> rauzy_step(const Iet& t) {
    const PermutationPair& p = t.pair();
    const int d = static_cast<int>(p.d());
    const int top = p.letter_at(0, d), bottom = p.letter_at(1, d);
    const Real& lt = t.lambda()[top];
    const Real& lb = t.lambda()[bottom];
    if (lt == lb) fail(ErrorKind::KeaneViolation, "critical lengths are equal");
    if (abs(lt - lb) < t.tolerance()) fail(ErrorKind::NearBreakpoint, "critical lengths agree to within tolerance");
    const int eps = lt > lb ? 0 : 1;
    RauzyMove mv = rauzy_move(p, eps);
    RealVector lam = t.lambda();
    lam[mv.winner] -= lam[mv.loser];
    RauzyStep step{eps, mv.winner, mv.loser, theta_matrix(p.d(), mv.winner, mv.loser), mv.next};
    return {std::move(step), Iet(mv.next, std::move(lam), t.context())};
}

struct InductionResult {
    std::vector<RauzyStep> steps;
    Iet iet;
    IntMatrix theta;  ///< Θ^(n) = Θ(T)·Θ(T^(1))·…·Θ(T^(n−1))
};

/// Right-multiplies m by Θ = I + E_{winner,loser} in place.
inline void apply_theta_right(IntMatrix& m, int winner, int loser) {
    for (std::size_t i = 0; i < m.rows(); ++i) m(i, loser) += m(i, winner);
}

inline InductionResult iterate_induction(const Iet& t, std::size_t n_steps) {
    InductionResult r{{}, t, IntMatrix::identity(t.d())};
    r.steps.reserve(n_steps);
    for (std::size_t k = 0; k < n_steps; ++k) {
        try {
            auto [step, next] = rauzy_step(r.iet);
            apply_theta_right(r.theta, step.winner, step.loser);
            r.steps.push_back(std::move(step));
            r.iet = std::move(next);
        } catch (const Error& e) {
            fail(e.kind(), e.message() + " at induction step " + std::to_string(k), k);
        }
    }
    return r;
}

struct KeaneReport {
    bool collision = false;
    std::size_t m = 0;  ///< iterate at which T^m l_α met l_β
    int alpha = -1;
    int beta = -1;
    std::size_t horizon = 0;
};

/// Bounded-horizon scan for T^m l_α = l_β (π0(β) ≠ 1) with ε_cmp resolution.
inline KeaneReport keane_check(const Iet& t, std::size_t horizon) {
    KeaneReport rep;
    rep.horizon = horizon;
    const int d = static_cast<int>(t.d());
    std::vector<int> targets;
    for (int b = 0; b < d; ++b)
        if (t.pair().pi0()[b] != 1) targets.push_back(b);
    std::size_t best_m = horizon + 1;
    for (int a = 0; a < d; ++a) {
        Real x = t.left(a);
        for (std::size_t m = 1; m <= horizon && m < best_m; ++m) {
            x += t.translations()[t.locate_unchecked(x)];
            bool hit = false;
            for (int b : targets)
                if (abs(x - t.left(b)) <= t.tolerance()) {
                    rep = KeaneReport{true, m, a, b, horizon};
                    best_m = m;
                    hit = true;
                    break;
                }
            if (hit) break;
        }
    }
    return rep;
}

struct LoopReplay {
    PermutationPair end;
    IntMatrix product;
    std::vector<int> winners, losers;
};

/// Applies the combinatorial moves of a loop word starting from `start`.
inline LoopReplay replay_loop(const PermutationPair& start, const std::vector<int>& loop) {
    LoopReplay r{start, IntMatrix::identity(start.d()), {}, {}};
    for (int e : loop) {
        RauzyMove mv = rauzy_move(r.end, e);
        apply_theta_right(r.product, mv.winner, mv.loser);
        r.winners.push_back(mv.winner);
        r.losers.push_back(mv.loser);
        r.end = mv.next;
    }
    return r;
}

struct PeriodInfo {
    std::size_t steps = 0;
    std::vector<int> loop;
    IntMatrix matrix;
    Real ratio;  ///< |λ| / |λ^(p)|
};

/// Runs induction until the pair returns to its start with the same
/// normalized lengths (up to `tol`), returning the first such period.
inline std::optional<PeriodInfo> detect_period(const Iet& t, std::size_t max_steps, const Real& tol) {
    const RealVector start = normalized(t.lambda());
    Iet cur = t;
    IntMatrix theta = IntMatrix::identity(t.d());
    std::vector<int> loop;
    for (std::size_t n = 1; n <= max_steps; ++n) {
        auto [step, next] = rauzy_step(cur);
        apply_theta_right(theta, step.winner, step.loser);
        loop.push_back(step.eps);
        cur = std::move(next);
        if (cur.pair() != t.pair()) continue;
        RealVector now = normalized(cur.lambda());
        bool same = true;
        for (std::size_t a = 0; a < now.size() && same; ++a)
            if (abs(now[a] - start[a]) > tol) same = false;
        if (same) return PeriodInfo{n, loop, theta, t.length() / cur.length()};
    }
    return std::nullopt;
}

} // namespace ietlab
