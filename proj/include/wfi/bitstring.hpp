#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wfi {

/// A finite binary string. Stored as a std::string of '0'/'1'.
class BitString {
public:
    BitString() = default;
    explicit BitString(std::string_view bits) : bits_(bits) {
        for (char c : bits_) {
            if (c != '0' && c != '1') {
                throw std::invalid_argument("bit string may only contain 0 and 1: '" + bits_ + "'");
            }
        }
    }
    static BitString repeat(char bit, std::size_t n) { return BitString(std::string(n, bit)); }

    std::size_t size() const { return bits_.size(); }
    bool empty() const { return bits_.empty(); }
    char operator[](std::size_t i) const { return bits_[i]; }
    const std::string& str() const { return bits_; }

    BitString prefix(std::size_t n) const { return BitString(bits_.substr(0, std::min(n, bits_.size())), Raw{}); }
    BitString suffix_from(std::size_t n) const { return BitString(bits_.substr(std::min(n, bits_.size())), Raw{}); }

    BitString operator+(const BitString& rhs) const { return BitString(bits_ + rhs.bits_, Raw{}); }
    BitString operator+(char bit) const { return BitString(bits_ + bit, Raw{}); }

    /// s ⪯ t
    bool is_prefix_of(const BitString& t) const { return t.bits_.compare(0, bits_.size(), bits_) == 0 && bits_.size() <= t.bits_.size(); }
    /// s ≺ t
    bool is_strict_prefix_of(const BitString& t) const { return bits_.size() < t.bits_.size() && is_prefix_of(t); }

    /// Shortlex order: shorter strings first, then lexicographic. Matches the enumeration index.
    friend std::strong_ordering operator<=>(const BitString& a, const BitString& b) {
        if (auto c = a.bits_.size() <=> b.bits_.size(); c != 0) {
            return c;
        }
        return a.bits_.compare(b.bits_) <=> 0;
    }
    friend bool operator==(const BitString& a, const BitString& b) = default;

    friend std::ostream& operator<<(std::ostream& os, const BitString& s) { return os << '"' << s.bits_ << '"'; }

private:
    struct Raw {};
    BitString(std::string bits, Raw) : bits_(std::move(bits)) {}

    std::string bits_;
};

/// Neither is a prefix of the other.
inline bool incomparable(const BitString& s, const BitString& t) { return !s.is_prefix_of(t) && !t.is_prefix_of(s); }

/// Index in the shortlex enumeration t_0 = "", t_1 = "0", t_2 = "1", t_3 = "00", ...
inline std::uint64_t enumeration_index(const BitString& s) {
    if (s.size() >= 63) {
        throw std::overflow_error("string too long for a 64-bit enumeration index");
    }
    std::uint64_t value = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        value = (value << 1) | static_cast<std::uint64_t>(s[i] == '1');
    }
    return ((std::uint64_t{1} << s.size()) - 1) + value;
}

inline BitString string_at_index(std::uint64_t index) {
    std::size_t len = 0;
    while (index >= (std::uint64_t{1} << (len + 1)) - 1) {
        ++len;
    }
    std::uint64_t value = index - ((std::uint64_t{1} << len) - 1);
    std::string bits(len, '0');
    for (std::size_t i = 0; i < len; ++i) {
        if ((value >> (len - 1 - i)) & 1U) {
            bits[i] = '1';
        }
    }
    return BitString(bits);
}

/// An infinite 0/1 sequence supplied bit by bit.
class InfiniteSequence {
public:
    using BitFn = std::function<bool(std::uint64_t)>;

    InfiniteSequence(BitFn bit, std::string description) : bit_(std::move(bit)), description_(std::move(description)) {}

    /// `prefix(cycle)`, e.g. `(0)` is 000..., `1(01)` is 10101...
    static InfiniteSequence parse(std::string_view spec) {
        auto open = spec.find('(');
        auto close = spec.rfind(')');
        if (open == std::string_view::npos || close != spec.size() - 1 || close == open + 1) {
            throw std::invalid_argument("sequence spec must look like PREFIX(CYCLE): '" + std::string(spec) + "'");
        }
        BitString head(spec.substr(0, open));
        BitString cycle(spec.substr(open + 1, close - open - 1));
        return eventually_periodic(head, cycle);
    }

    static InfiniteSequence eventually_periodic(const BitString& head, const BitString& cycle) {
        if (cycle.empty()) {
            throw std::invalid_argument("empty cycle");
        }
        return InfiniteSequence(
            [head, cycle](std::uint64_t i) {
                if (i < head.size()) {
                    return head[i] == '1';
                }
                return cycle[(i - head.size()) % cycle.size()] == '1';
            },
            head.str() + "(" + cycle.str() + ")");
    }

    bool operator()(std::uint64_t i) const { return bit_(i); }

    BitString prefix(std::size_t n) const {
        std::string bits(n, '0');
        for (std::size_t i = 0; i < n; ++i) {
            if (bit_(i)) {
                bits[i] = '1';
            }
        }
        return BitString(bits);
    }

    const std::string& description() const { return description_; }

private:
    BitFn bit_;
    std::string description_;
};

}  // namespace wfi

template <>
struct std::hash<wfi::BitString> {
    std::size_t operator()(const wfi::BitString& s) const noexcept { return std::hash<std::string>{}(s.str()); }
};
