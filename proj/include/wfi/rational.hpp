#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wfi {

using BigNat = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
    if (den == 0) {
        throw std::invalid_argument("rational with zero denominator");
    }
    return Rational(BigNat(num), BigNat(den));
}

/// Renders as `p/q`, or `p` when the denominator is 1.
inline std::string to_string(const Rational& q) {
    const auto num = boost::multiprecision::numerator(q);
    const auto den = boost::multiprecision::denominator(q);
    if (den == 1) {
        return num.str();
    }
    return num.str() + "/" + den.str();
}

inline Rational parse_rational(std::string_view text) {
    auto slash = text.find('/');
    try {
        if (slash == std::string_view::npos) {
            return Rational(BigNat(std::string(text)));
        }
        BigNat num(std::string(text.substr(0, slash)));
        BigNat den(std::string(text.substr(slash + 1)));
        if (den == 0) {
            throw std::invalid_argument("zero denominator");
        }
        return Rational(num, den);
    } catch (const std::runtime_error&) {
        throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
    }
}

/// 2^e for any integer exponent e.
inline Rational pow2(long e) {
    BigNat one = 1;
    if (e >= 0) {
        return Rational(one << e);
    }
    return Rational(BigNat(1), one << (-e));
}

/// A value in Q>=0 ∪ {+∞}; +∞ absorbs addition and exceeds every rational.
class ExtRational {
public:
    ExtRational() = default;
    ExtRational(Rational value) : value_(std::move(value)) {}  // NOLINT(google-explicit-constructor)
    ExtRational(std::int64_t value) : value_(value) {}          // NOLINT(google-explicit-constructor)

    static ExtRational infinity() {
        ExtRational r;
        r.infinite_ = true;
        return r;
    }

    bool is_infinite() const { return infinite_; }
    const Rational& value() const {
        if (infinite_) {
            throw std::logic_error("value() of infinite ExtRational");
        }
        return value_;
    }

    friend ExtRational operator+(const ExtRational& a, const ExtRational& b) {
        if (a.infinite_ || b.infinite_) {
            return infinity();
        }
        return ExtRational(a.value_ + b.value_);
    }
    ExtRational& operator+=(const ExtRational& other) { return *this = *this + other; }

    friend bool operator==(const ExtRational& a, const ExtRational& b) {
        if (a.infinite_ || b.infinite_) {
            return a.infinite_ == b.infinite_;
        }
        return a.value_ == b.value_;
    }
    friend std::strong_ordering operator<=>(const ExtRational& a, const ExtRational& b) {
        if (a.infinite_ || b.infinite_) {
            return static_cast<int>(a.infinite_) <=> static_cast<int>(b.infinite_);
        }
        if (a.value_ < b.value_) {
            return std::strong_ordering::less;
        }
        if (b.value_ < a.value_) {
            return std::strong_ordering::greater;
        }
        return std::strong_ordering::equal;
    }

    friend std::string to_string(const ExtRational& q) {
        return q.infinite_ ? std::string("inf") : wfi::to_string(q.value_);
    }
    friend std::ostream& operator<<(std::ostream& os, const ExtRational& q) { return os << to_string(q); }

private:
    Rational value_{0};
    bool infinite_ = false;
};

inline ExtRational parse_ext_rational(std::string_view text) {
    if (text == "inf" || text == "+inf") {
        return ExtRational::infinity();
    }
    return ExtRational(parse_rational(text));
}

}  // namespace wfi
