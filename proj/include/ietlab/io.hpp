#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cocycle.hpp"
#include "errors.hpp"
#include "int_matrix.hpp"
#include "iet.hpp"
#include "periodic.hpp"
#include "permutation.hpp"
#include "real.hpp"

namespace ietlab::io {

using json = nlohmann::ordered_json;

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::DomainError, "cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::DomainError, "'" + path + "' is not valid JSON: " + e.what());
    }
}

/// Decimal string at `digits` significant digits (0: full precision).
inline json to_json(const Real& x, int digits = 0) { return x.str(digits); }

inline json to_json(const RealVector& v, int digits = 0) {
    json out = json::array();
    for (const auto& x : v) out.push_back(x.str(digits));
    return out;
}

inline json to_json(const IntMatrix& m) {
    json out = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j).get_str());
        out.push_back(row);
    }
    return out;
}

inline json to_json(const IntVector& v) {
    json out = json::array();
    for (const auto& x : v) out.push_back(x.get_str());
    return out;
}

inline json to_json(const PermutationPair& p) { return {{"d", p.d()}, {"pi0", p.pi0()}, {"pi1", p.pi1()}}; }

inline Real real_from_json(const json& j, mpfr_prec_t bits) {
    if (j.is_string()) return Real(j.get<std::string>(), bits);
    if (j.is_number_integer()) return Real(j.get<long>(), bits);
    fail(ErrorKind::DomainError, "decimals must be given as strings or integers");
}

inline RealVector real_vector_from_json(const json& j, mpfr_prec_t bits) {
    if (!j.is_array()) fail(ErrorKind::DomainError, "expected an array of decimals");
    RealVector out;
    for (const auto& x : j) out.push_back(real_from_json(x, bits));
    return out;
}

inline mpz_class integer_from_json(const json& j) {
    if (j.is_number_integer()) return mpz_class(j.get<long>());
    if (j.is_string()) {
        mpz_class z;
        if (z.set_str(j.get<std::string>(), 10) != 0) fail(ErrorKind::DomainError, "not an integer: " + j.dump());
        return z;
    }
    fail(ErrorKind::DomainError, "not an integer: " + j.dump());
}

inline IntMatrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) fail(ErrorKind::DomainError, "matrix must be a non-empty array of rows");
    std::vector<std::vector<mpz_class>> rows;
    for (const auto& r : j) {
        if (!r.is_array()) fail(ErrorKind::DomainError, "matrix rows must be arrays");
        std::vector<mpz_class> row;
        for (const auto& x : r) row.push_back(integer_from_json(x));
        rows.push_back(std::move(row));
    }
    return IntMatrix::from_rows(rows);
}

inline PermutationPair pair_from_json(const json& j) {
    if (!j.contains("pi0") || !j.contains("pi1")) fail(ErrorKind::InvalidPermutation, "pair needs pi0 and pi1");
    auto p = PermutationPair(j.at("pi0").get<std::vector<int>>(), j.at("pi1").get<std::vector<int>>());
    if (j.contains("d") && j.at("d").get<std::size_t>() != p.d())
        fail(ErrorKind::InvalidPermutation, "d does not match the permutation length");
    return p;
}

/// IET spec: either explicit lengths or a periodic matrix with optional loop.
struct IetSpec {
    PermutationPair pair;
    std::optional<RealVector> lambda;
    std::optional<IntMatrix> matrix;
    std::optional<std::vector<int>> loop;

    bool periodic() const { return matrix.has_value() || (loop.has_value() && !lambda); }
};

inline IetSpec iet_spec_from_json(const json& j, mpfr_prec_t bits) {
    IetSpec s;
    s.pair = pair_from_json(j.at("pair"));
    if (j.contains("lambda")) s.lambda = real_vector_from_json(j.at("lambda"), bits);
    if (j.contains("periodic_matrix")) s.matrix = matrix_from_json(j.at("periodic_matrix"));
    if (j.contains("loop")) s.loop = j.at("loop").get<std::vector<int>>();
    if (!s.lambda && !s.matrix && !s.loop)
        fail(ErrorKind::DomainError, "IET spec needs lambda, periodic_matrix or loop");
    return s;
}

inline PeriodicIet periodic_from_spec(const IetSpec& s, const PrecisionContext& ctx) {
    if (s.loop) {
        PeriodicIet p = build_periodic_from_loop(s.pair, *s.loop, ctx);
        if (s.matrix && !(p.loop_matrix == *s.matrix))
            fail(ErrorKind::NotALoop, "loop product differs from periodic_matrix");
        return p;
    }
    if (s.matrix) return build_periodic_from_matrix(s.pair, *s.matrix, ctx);
    fail(ErrorKind::DomainError, "IET spec is not of periodic type");
}

inline Iet iet_from_spec(const IetSpec& s, const PrecisionContext& ctx) {
    if (s.lambda) return Iet(s.pair, *s.lambda, ctx);
    return periodic_from_spec(s, ctx).iet();
}

inline std::vector<Jump> extras_from_json(const json& j, std::size_t dim, mpfr_prec_t bits) {
    std::vector<Jump> out;
    if (!j.contains("extra_discontinuities")) return out;
    for (const auto& e : j.at("extra_discontinuities")) {
        Jump jp;
        jp.gamma = real_from_json(e.at("gamma"), bits);
        const json& v = e.at("jump");
        jp.jump = v.is_array() ? real_vector_from_json(v, bits) : RealVector{real_from_json(v, bits)};
        if (jp.jump.size() != dim) fail(ErrorKind::DimensionError, "jump has wrong dimension");
        out.push_back(std::move(jp));
    }
    return out;
}

/// Per-letter values; scalars are accepted when dim = 1.
inline std::vector<RealVector> per_letter_from_json(const json& j, std::size_t dim, mpfr_prec_t bits) {
    std::vector<RealVector> out;
    for (const auto& v : j) {
        RealVector row = v.is_array() ? real_vector_from_json(v, bits) : RealVector{real_from_json(v, bits)};
        if (row.size() != dim) fail(ErrorKind::DimensionError, "cocycle entry has wrong dimension");
        out.push_back(std::move(row));
    }
    return out;
}

inline Cocycle cocycle_from_json(const json& j, mpfr_prec_t bits) {
    const std::string kind = j.value("kind", "step");
    const std::size_t dim = j.value("dim", std::size_t{1});
    auto extras = extras_from_json(j, dim, bits);
    if (kind == "step") return Cocycle::step(per_letter_from_json(j.at("values"), dim, bits), std::move(extras));
    if (kind == "pl") {
        const json& s = j.contains("slopes") ? j.at("slopes") : j.at("slope");
        auto constants = per_letter_from_json(j.at("constants"), dim, bits);
        // a single slope for every letter, or one slope per letter
        const bool shared = !s.is_array() || (s.size() == dim && !s[0].is_array() && (dim > 1 || s.size() != constants.size()));
        if (shared) {
            RealVector slope = s.is_array() ? real_vector_from_json(s, bits) : RealVector{real_from_json(s, bits)};
            return Cocycle::piecewise_linear(slope, constants, std::move(extras));
        }
        Cocycle c = Cocycle::piecewise_linear(RealVector(dim, Real::zero(bits)), constants, std::move(extras));
        c.slopes = per_letter_from_json(s, dim, bits);
        if (c.slopes.size() != c.d()) fail(ErrorKind::DimensionError, "need one slope per letter");
        return c;
    }
    fail(ErrorKind::DomainError, "unknown cocycle kind '" + kind + "'");
}

inline json to_json(const Cocycle& c, int digits = 0) {
    json out;
    out["kind"] = c.kind == CocycleKind::Step ? "step" : "pl";
    out["dim"] = c.dim;
    if (c.kind == CocycleKind::Step) {
        json v = json::array();
        for (const auto& x : c.constants) v.push_back(to_json(x, digits));
        out["values"] = v;
    } else {
        json s = json::array(), k = json::array();
        for (const auto& x : c.slopes) s.push_back(to_json(x, digits));
        for (const auto& x : c.constants) k.push_back(to_json(x, digits));
        out["slopes"] = s;
        out["constants"] = k;
    }
    json ex = json::array();
    for (const auto& e : c.extras) ex.push_back({{"gamma", e.gamma.str(digits)}, {"jump", to_json(e.jump, digits)}});
    out["extra_discontinuities"] = ex;
    return out;
}

} // namespace ietlab::io
