#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "errors.hpp"
#include "iet.hpp"
#include "real.hpp"

namespace ietlab {

using u128 = unsigned __int128;

/// Fixed-point copy of an IET for long orbit runs. Lengths are scaled so
/// that |λ| = 2^124; translations are exact in this representation, so the
/// engine iterates an IET whose lengths differ from the source by at most
/// one unit in 2^124 each.
class FastIet {
public:
    static constexpr int kShift = 124;

    explicit FastIet(const Iet& t) : d_(static_cast<int>(t.d())) {
        if (d_ > 32) fail(ErrorKind::Unsupported, "fixed-point engine supports at most 32 letters");
        const mpfr_prec_t b = t.bits() + 64;
        const Real scale = Real::pow2(kShift, b) / t.length().with_bits(b);
        len_.assign(d_, 0);
        u128 acc = 0;
        for (int pos = 1; pos <= d_; ++pos) {
            int a = t.pair().letter_at(0, pos);
            u128 l = pos == d_ ? total() - acc : to_u128((t.lambda()[a].with_bits(b) * scale).round_to_integer());
            len_[a] = l;
            acc += l;
        }
        left_.assign(d_, 0);
        image_left_.assign(d_, 0);
        u128 top = 0, bottom = 0;
        for (int pos = 1; pos <= d_; ++pos) {
            int a = t.pair().letter_at(0, pos);
            left_[a] = top;
            top += len_[a];
            by_pos_[pos - 1] = a;
            starts_[pos - 1] = left_[a];
            int c = t.pair().letter_at(1, pos);
            image_left_[c] = bottom;
            bottom += len_[c];
            by_image_pos_[pos - 1] = c;
            image_starts_[pos - 1] = bottom - len_[c];
        }
        first_top_ = t.pair().letter_at(0, 1);
        last_top_ = t.pair().letter_at(0, d_);
        first_bottom_ = t.pair().letter_at(1, 1);
        last_bottom_ = t.pair().letter_at(1, d_);
        for (int a = 0; a < d_; ++a) w_[a] = image_left_[a] - left_[a];
        eps_ = to_u128((t.context().eps() * Real::pow2(kShift, b)).round_to_integer());
    }

    static constexpr u128 total() { return u128(1) << kShift; }
    int d() const { return d_; }
    u128 left(int a) const { return left_[a]; }
    u128 length(int a) const { return len_[a]; }
    u128 image_left(int a) const { return image_left_[a]; }
    u128 eps() const { return eps_; }

    u128 to_fixed(const Real& x, const Real& total_len) const {
        const mpfr_prec_t b = x.bits() + 64;
        Real v = (x.with_bits(b) / total_len.with_bits(b)) * Real::pow2(kShift, b);
        if (v < 0L || v >= Real::pow2(kShift, b)) fail(ErrorKind::DomainError, "point outside [0,|λ|)");
        return to_u128(v.round_to_integer());
    }
    static long double to_unit(u128 x) { return static_cast<long double>(x) / static_cast<long double>(total()); }
    static Real to_real(u128 x, mpfr_prec_t bits) {
        mpz_class z = from_u128(x);
        return Real(z, bits + kShift) / Real::pow2(kShift, bits + kShift);
    }

    int locate(u128 x) const {
        int pos = d_ - 1;
        while (starts_[pos] > x) --pos;
        return by_pos_[pos];
    }
    int locate_image(u128 x) const {
        int pos = d_ - 1;
        while (image_starts_[pos] > x) --pos;
        return by_image_pos_[pos];
    }

    /// True when x is within eps of a breakpoint without sitting on it.
    bool near_breakpoint(u128 x, int a) const {
        u128 from_left = x - left_[a];
        u128 to_right = left_[a] + len_[a] - x;
        return (from_left != 0 && from_left < eps_ && a != first_top_) || (to_right < eps_ && a != last_top_);
    }

    /// Advances x by one step and returns the letter it was in.
    int step(u128& x) const {
        int a = locate(x);
        x += w_[a];
        return a;
    }
    int step_checked(u128& x, std::size_t k) const {
        int a = locate(x);
        if (near_breakpoint(x, a)) fail(ErrorKind::NearBreakpoint, "orbit point within tolerance of a breakpoint", k);
        x += w_[a];
        return a;
    }
    /// Moves x one step backwards and returns the letter of T⁻¹x.
    int step_back(u128& x) const {
        int c = locate_image(x);
        x -= w_[c];
        return c;
    }
    int step_back_checked(u128& x, std::size_t k) const {
        int c = locate_image(x);
        u128 from_left = x - image_left_[c];
        u128 to_right = image_left_[c] + len_[c] - x;
        if ((from_left != 0 && from_left < eps_ && c != first_bottom_) || (to_right < eps_ && c != last_bottom_))
            fail(ErrorKind::NearBreakpoint, "inverse orbit point within tolerance of a breakpoint", k);
        x -= w_[c];
        return c;
    }

    static u128 to_u128(const mpz_class& z) {
        if (z < 0) fail(ErrorKind::DomainError, "negative fixed-point value");
        mpz_class hi = z >> 64;
        mpz_class lo = z - (hi << 64);
        return (static_cast<u128>(mpz_get_ui_full(hi)) << 64) | mpz_get_ui_full(lo);
    }
    static mpz_class from_u128(u128 x) {
        mpz_class hi = static_cast<unsigned long>(static_cast<std::uint64_t>(x >> 64));
        mpz_class lo = static_cast<unsigned long>(static_cast<std::uint64_t>(x));
        return (hi << 64) + lo;
    }

private:
    static std::uint64_t mpz_get_ui_full(const mpz_class& z) { return static_cast<std::uint64_t>(mpz_get_ui(z.get_mpz_t())); }

    int d_;
    std::vector<u128> len_, left_, image_left_;
    std::array<u128, 32> w_{}, starts_{}, image_starts_{};
    std::array<int, 32> by_pos_{}, by_image_pos_{};
    int first_top_ = 0, last_top_ = 0, first_bottom_ = 0, last_bottom_ = 0;
    u128 eps_ = 0;
};

} // namespace ietlab
