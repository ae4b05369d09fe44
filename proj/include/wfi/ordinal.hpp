#pragma once

// Ordinals below epsilon_0 in Cantor normal form.

#include <cctype>
#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wfi {

class Ordinal {
public:
    struct Term;

    Ordinal() = default;  // zero
    Ordinal(std::uint64_t n);  // NOLINT(google-explicit-constructor)

    static Ordinal omega();
    /// Builds from terms; throws if exponents are not strictly decreasing or a coefficient is 0.
    static Ordinal from_terms(std::vector<Term> terms);

    const std::vector<Term>& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }
    bool is_finite() const;
    bool is_successor() const;
    bool is_limit() const { return !is_zero() && !is_successor(); }
    /// Value of a finite ordinal; throws otherwise.
    std::uint64_t finite_value() const;

    friend std::strong_ordering operator<=>(const Ordinal& a, const Ordinal& b);
    friend bool operator==(const Ordinal& a, const Ordinal& b) { return (a <=> b) == 0; }

private:
    std::vector<Term> terms_;
};

struct Ordinal::Term {
    Ordinal exponent;
    std::uint64_t coefficient = 1;
};

inline Ordinal::Ordinal(std::uint64_t n) {
    if (n != 0) {
        terms_.push_back(Term{Ordinal{}, n});
    }
}

inline Ordinal Ordinal::omega() { return from_terms({Term{Ordinal(1), 1}}); }

inline Ordinal Ordinal::from_terms(std::vector<Term> terms) {
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (terms[i].coefficient == 0) {
            throw std::invalid_argument("CNF coefficient must be positive");
        }
        if (i > 0 && !(terms[i].exponent < terms[i - 1].exponent)) {
            throw std::invalid_argument("CNF exponents must be strictly decreasing");
        }
    }
    Ordinal o;
    o.terms_ = std::move(terms);
    return o;
}

inline bool Ordinal::is_finite() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].exponent.is_zero()); }

inline bool Ordinal::is_successor() const { return !terms_.empty() && terms_.back().exponent.is_zero(); }

inline std::uint64_t Ordinal::finite_value() const {
    if (!is_finite()) {
        throw std::domain_error("ordinal is infinite");
    }
    return terms_.empty() ? 0 : terms_[0].coefficient;
}

inline std::strong_ordering operator<=>(const Ordinal& a, const Ordinal& b) {
    const auto n = std::min(a.terms_.size(), b.terms_.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (auto c = a.terms_[i].exponent <=> b.terms_[i].exponent; c != 0) {
            return c;
        }
        if (auto c = a.terms_[i].coefficient <=> b.terms_[i].coefficient; c != 0) {
            return c;
        }
    }
    return a.terms_.size() <=> b.terms_.size();
}

enum class Cmp { LT, EQ, GT };

inline Cmp ord_compare(const Ordinal& a, const Ordinal& b) {
    auto c = a <=> b;
    return c < 0 ? Cmp::LT : (c > 0 ? Cmp::GT : Cmp::EQ);
}

namespace detail {
inline std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
    if (a > std::numeric_limits<std::uint64_t>::max() - b) {
        throw std::overflow_error("ordinal coefficient overflow");
    }
    return a + b;
}
inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
        throw std::overflow_error("ordinal coefficient overflow");
    }
    return a * b;
}
}  // namespace detail

/// Ordinal sum. Terms of `a` below the leading exponent of `b` are absorbed.
inline Ordinal ord_add(const Ordinal& a, const Ordinal& b) {
    if (b.is_zero()) {
        return a;
    }
    const auto& lead = b.terms().front();
    std::vector<Ordinal::Term> out;
    for (const auto& t : a.terms()) {
        if (t.exponent > lead.exponent) {
            out.push_back(t);
        } else {
            if (t.exponent == lead.exponent) {
                out.push_back(Ordinal::Term{lead.exponent, detail::checked_add(t.coefficient, lead.coefficient)});
            }
            break;
        }
    }
    if (out.empty() || out.back().exponent != lead.exponent) {
        out.push_back(lead);
    }
    for (std::size_t i = 1; i < b.terms().size(); ++i) {
        out.push_back(b.terms()[i]);
    }
    return Ordinal::from_terms(std::move(out));
}

inline Ordinal omega_pow(const Ordinal& a) { return Ordinal::from_terms({Ordinal::Term{a, 1}}); }

/// a * n for a natural n: scales the leading coefficient.
inline Ordinal ord_mul_nat(const Ordinal& a, std::uint64_t n) {
    if (n == 0 || a.is_zero()) {
        return Ordinal{};
    }
    auto terms = a.terms();
    terms.front().coefficient = detail::checked_mul(terms.front().coefficient, n);
    return Ordinal::from_terms(std::move(terms));
}

/// True exactly for 0 and the powers of omega.
inline bool is_additively_closed(const Ordinal& a) {
    return a.is_zero() || (a.terms().size() == 1 && a.terms()[0].coefficient == 1);
}

inline Ordinal successor(const Ordinal& a) { return ord_add(a, Ordinal(1)); }

/// Wainer-style canonical sequence. Writing a = g + w^e:
/// e = d+1 gives g + w^d * n, e a limit gives g + w^(e[n]).
inline Ordinal fundamental_sequence(const Ordinal& a, std::uint64_t n) {
    if (!a.is_limit()) {
        throw std::domain_error("fundamental_sequence requires a limit ordinal");
    }
    auto terms = a.terms();
    Ordinal e = terms.back().exponent;
    if (--terms.back().coefficient == 0) {
        terms.pop_back();
    }
    Ordinal base = Ordinal::from_terms(std::move(terms));
    if (e.is_successor()) {
        auto pred_terms = e.terms();
        if (--pred_terms.back().coefficient == 0) {
            pred_terms.pop_back();
        }
        Ordinal d = Ordinal::from_terms(std::move(pred_terms));
        return ord_add(base, ord_mul_nat(omega_pow(d), n));
    }
    return ord_add(base, omega_pow(fundamental_sequence(e, n)));
}

/// `w^<exp>*<coef> + ...`; `w^0*k` prints as `k`; non-finite exponents are parenthesised.
inline std::string to_string(const Ordinal& a) {
    if (a.is_zero()) {
        return "0";
    }
    std::string out;
    for (const auto& t : a.terms()) {
        if (!out.empty()) {
            out += " + ";
        }
        if (t.exponent.is_zero()) {
            out += std::to_string(t.coefficient);
            continue;
        }
        out += "w^";
        if (t.exponent.is_finite()) {
            out += std::to_string(t.exponent.finite_value());
        } else {
            out += "(" + to_string(t.exponent) + ")";
        }
        out += "*" + std::to_string(t.coefficient);
    }
    return out;
}

inline std::ostream& operator<<(std::ostream& os, const Ordinal& a) { return os << to_string(a); }

namespace detail {

class OrdinalParser {
public:
    explicit OrdinalParser(std::string_view text) : text_(text) {}

    Ordinal parse_all() {
        Ordinal r = parse_sum();
        skip_ws();
        if (pos_ != text_.size()) {
            fail("trailing input");
        }
        return r;
    }

private:
    // Sums are folded with ord_add, so non-normal input such as `1 + w` is accepted and normalised.
    Ordinal parse_sum() {
        Ordinal acc = parse_term();
        while (true) {
            skip_ws();
            if (pos_ < text_.size() && text_[pos_] == '+') {
                ++pos_;
                acc = ord_add(acc, parse_term());
            } else {
                return acc;
            }
        }
    }

    Ordinal parse_term() {
        skip_ws();
        if (pos_ >= text_.size()) {
            fail("expected term");
        }
        if (std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            return Ordinal(parse_nat());
        }
        if (text_[pos_] != 'w') {
            fail("expected 'w' or a number");
        }
        ++pos_;
        Ordinal exponent(1);
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == '^') {
            ++pos_;
            skip_ws();
            if (pos_ < text_.size() && text_[pos_] == '(') {
                ++pos_;
                exponent = parse_sum();
                skip_ws();
                expect(')');
            } else if (pos_ < text_.size() && text_[pos_] == 'w') {
                ++pos_;  // bare `w^w`; deeper towers need parentheses
                exponent = Ordinal::omega();
            } else {
                exponent = Ordinal(parse_nat());
            }
        }
        std::uint64_t coef = 1;
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == '*') {
            ++pos_;
            skip_ws();
            coef = parse_nat();
        }
        return ord_mul_nat(omega_pow(exponent), coef);
    }

    std::uint64_t parse_nat() {
        skip_ws();
        std::size_t start = pos_;
        std::uint64_t v = 0;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            v = checked_add(checked_mul(v, 10), static_cast<std::uint64_t>(text_[pos_] - '0'));
            ++pos_;
        }
        if (start == pos_) {
            fail("expected number");
        }
        return v;
    }

    void expect(char c) {
        if (pos_ >= text_.size() || text_[pos_] != c) {
            fail(std::string("expected '") + c + "'");
        }
        ++pos_;
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw std::invalid_argument("ordinal parse error at position " + std::to_string(pos_) + ": " + what);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline Ordinal parse_ordinal(std::string_view text) { return detail::OrdinalParser(text).parse_all(); }

}  // namespace wfi
