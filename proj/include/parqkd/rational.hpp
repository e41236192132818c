#pragma once

#include <cstdint>
#include <compare>
#include <concepts>
#include <limits>
#include <numeric>
#include <string>
#include <string_view>

#include "parqkd/errors.hpp"

namespace parqkd {

/// Exact rational number, always stored normalized (gcd 1, positive
/// denominator). Intermediate products are carried in __int128 so that
/// desk-scale game values never overflow silently.
template <std::signed_integral I = std::int64_t>
class basic_rational {
public:
    using int_type = I;

    constexpr basic_rational() : num_(0), den_(1) {}
    constexpr basic_rational(I value) : num_(value), den_(1) {}

    constexpr basic_rational(I num, I den) {
        if (den == 0) throw domain_error("rational: zero denominator");
        if (den < 0) { num = -num; den = -den; }
        const I g = std::gcd(num, den);
        num_ = g ? num / g : num;
        den_ = g ? den / g : den;
    }

    constexpr I num() const { return num_; }
    constexpr I den() const { return den_; }

    constexpr double to_double() const {
        return static_cast<double>(num_) / static_cast<double>(den_);
    }

    friend constexpr basic_rational operator+(basic_rational a, basic_rational b) {
        return from_wide(wide(a.num_) * b.den_ + wide(b.num_) * a.den_,
                         wide(a.den_) * b.den_);
    }
    friend constexpr basic_rational operator-(basic_rational a, basic_rational b) {
        return from_wide(wide(a.num_) * b.den_ - wide(b.num_) * a.den_,
                         wide(a.den_) * b.den_);
    }
    friend constexpr basic_rational operator*(basic_rational a, basic_rational b) {
        return from_wide(wide(a.num_) * b.num_, wide(a.den_) * b.den_);
    }
    friend constexpr basic_rational operator/(basic_rational a, basic_rational b) {
        if (b.num_ == 0) throw domain_error("rational: division by zero");
        return from_wide(wide(a.num_) * b.den_, wide(a.den_) * b.num_);
    }
    constexpr basic_rational operator-() const { return basic_rational(-num_, den_); }

    basic_rational& operator+=(basic_rational o) { return *this = *this + o; }
    basic_rational& operator-=(basic_rational o) { return *this = *this - o; }
    basic_rational& operator*=(basic_rational o) { return *this = *this * o; }
    basic_rational& operator/=(basic_rational o) { return *this = *this / o; }

    friend constexpr bool operator==(basic_rational a, basic_rational b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend constexpr std::strong_ordering operator<=>(basic_rational a, basic_rational b) {
        return wide(a.num_) * b.den_ <=> wide(b.num_) * a.den_;
    }

    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    /// Builds a rational directly from wide intermediates, reducing first.
    static constexpr basic_rational from_wide(__int128 num, __int128 den) {
        if (den == 0) throw domain_error("rational: zero denominator");
        if (den < 0) { num = -num; den = -den; }
        const __int128 g = gcd_wide(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
        constexpr __int128 lo = std::numeric_limits<I>::min();
        constexpr __int128 hi = std::numeric_limits<I>::max();
        if (num < lo || num > hi || den > hi)
            throw std::overflow_error("rational: value does not fit the storage type");
        basic_rational r;
        r.num_ = static_cast<I>(num);
        r.den_ = static_cast<I>(den);
        return r;
    }

private:
    static constexpr __int128 wide(I v) { return static_cast<__int128>(v); }

    static constexpr __int128 gcd_wide(__int128 a, __int128 b) {
        while (b != 0) { const __int128 t = a % b; a = b; b = t; }
        return a;
    }

    I num_;
    I den_;
};

using rational = basic_rational<std::int64_t>;

/// Parses "p/q", a plain integer, or a terminating decimal ("0.125") into an
/// exact rational. Decimal digits are taken literally, never through a float.
inline rational parse_rational(std::string_view text) {
    const auto bad = [&] { return domain_error("cannot parse rational from '" + std::string(text) + "'"); };
    if (text.empty()) throw bad();

    const auto parse_int = [&](std::string_view s) -> std::int64_t {
        if (s.empty()) throw bad();
        std::size_t i = 0;
        bool neg = false;
        if (s[0] == '+' || s[0] == '-') { neg = s[0] == '-'; i = 1; }
        if (i == s.size()) throw bad();
        __int128 v = 0;
        for (; i < s.size(); ++i) {
            if (s[i] < '0' || s[i] > '9') throw bad();
            v = v * 10 + (s[i] - '0');
            if (v > std::numeric_limits<std::int64_t>::max()) throw bad();
        }
        return static_cast<std::int64_t>(neg ? -v : v);
    };

    if (const auto slash = text.find('/'); slash != std::string_view::npos) {
        const std::int64_t p = parse_int(text.substr(0, slash));
        const std::int64_t q = parse_int(text.substr(slash + 1));
        if (q == 0) throw bad();
        return rational(p, q);
    }
    if (const auto dot = text.find('.'); dot != std::string_view::npos) {
        const std::string_view whole = text.substr(0, dot);
        const std::string_view frac = text.substr(dot + 1);
        if (frac.empty() || frac.size() > 18) throw bad();
        const std::int64_t w = whole.empty() || whole == "-" || whole == "+"
                                   ? 0
                                   : parse_int(whole);
        std::int64_t scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
        const std::int64_t f = parse_int(frac);
        if (f < 0) throw bad();
        const bool neg = !whole.empty() && whole[0] == '-';
        const rational mag = rational(w < 0 ? -w : w) + rational(f, scale);
        return neg || w < 0 ? -mag : mag;
    }
    return rational(parse_int(text));
}

} // namespace parqkd
