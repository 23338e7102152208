#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace ietlab {

enum class ErrorKind {
    DegenerateAlphabet,
    InvalidPermutation,
    DimensionError,
    ReduciblePair,
    KeaneViolation,
    NearBreakpoint,
    NotALoop,
    NotPrimitive,
    NotPositive,
    SpectralAmbiguity,
    DomainError,
    NotNormalized,
    Unsupported,
    EmptyFixedSpace,
    NotZeroMean,
    RationalInput,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::DegenerateAlphabet: return "DegenerateAlphabet";
    case ErrorKind::InvalidPermutation: return "InvalidPermutation";
    case ErrorKind::DimensionError: return "DimensionError";
    case ErrorKind::ReduciblePair: return "ReduciblePair";
    case ErrorKind::KeaneViolation: return "KeaneViolation";
    case ErrorKind::NearBreakpoint: return "NearBreakpoint";
    case ErrorKind::NotALoop: return "NotALoop";
    case ErrorKind::NotPrimitive: return "NotPrimitive";
    case ErrorKind::NotPositive: return "NotPositive";
    case ErrorKind::SpectralAmbiguity: return "SpectralAmbiguity";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::Unsupported: return "Unsupported";
    case ErrorKind::EmptyFixedSpace: return "EmptyFixedSpace";
    case ErrorKind::NotZeroMean: return "NotZeroMean";
    case ErrorKind::RationalInput: return "RationalInput";
    }
    return "Unknown";
}

/// Every domain failure in the library is reported through this type. `step`
/// carries the orbit or induction step index when the failure happened
/// mid-stream.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what, std::optional<std::size_t> step = std::nullopt)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), step_(step), message_(what) {}

    ErrorKind kind() const noexcept { return kind_; }
    /// what() without the kind prefix.
    const std::string& message() const noexcept { return message_; }
    std::optional<std::size_t> step() const noexcept { return step_; }

private:
    ErrorKind kind_;
    std::optional<std::size_t> step_;
    std::string message_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what,
                              std::optional<std::size_t> step = std::nullopt) {
    throw Error(kind, what, step);
}

} // namespace ietlab
