#pragma once

// A coding of all rational submeasures on finite intervals by sequences in w^<w, the submeasure
// phi_max it induces on w^<w, and the reduction of Exh(pi) to Exh(phi_max) along a branch alpha.
//
// For s of length n, phi_s lives on R_s = { s|1, ..., s|n } identified with {0..n-1}. The last entry i
// of s codes the 2^(n-1) values phi_s takes on the sets containing the new point n-1: the bits of i
// are dealt round-robin to 2^(n-1) naturals, and each natural x splits the same way into (p, d) for
// the value p/(d+1). Codes that break the submeasure axioms decode to the null extension.

#include "wfi/reductions.hpp"
#include "wfi/submeasure.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace wfi {

using OmegaString = std::vector<BigNat>;

inline std::string to_string(const OmegaString& s) {
    std::string out = "<";
    for (std::size_t i = 0; i < s.size(); ++i) {
        out += (i ? "," : "") + s[i].str();
    }
    return out + ">";
}

inline OmegaString parse_omega_string(const std::string& text) {
    OmegaString s;
    std::string cur;
    for (char c : text + ",") {
        if (c == ',') {
            if (cur.empty()) {
                throw std::invalid_argument("empty entry in sequence '" + text + "'");
            }
            s.emplace_back(cur);
            cur.clear();
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            cur.push_back(c);
        } else if (c != ' ' && c != '<' && c != '>') {
            throw std::invalid_argument("sequences are comma-separated naturals: '" + text + "'");
        }
    }
    return s;
}

inline bool is_prefix(const OmegaString& s, const OmegaString& t) {
    return s.size() <= t.size() && std::equal(s.begin(), s.end(), t.begin());
}

/// Bit j of x goes to bit j / m of part j mod m.
inline std::vector<BigNat> interleave_split(const BigNat& x, std::size_t m) {
    std::vector<BigNat> parts(m);
    if (x == 0) {
        return parts;
    }
    const std::size_t bits = boost::multiprecision::msb(x) + 1;
    for (std::size_t j = 0; j < bits; ++j) {
        if (boost::multiprecision::bit_test(x, j)) {
            boost::multiprecision::bit_set(parts[j % m], j / m);
        }
    }
    return parts;
}

inline BigNat interleave_join(const std::vector<BigNat>& parts) {
    BigNat x = 0;
    const std::size_t m = parts.size();
    for (std::size_t i = 0; i < m; ++i) {
        if (parts[i] == 0) {
            continue;
        }
        const std::size_t bits = boost::multiprecision::msb(parts[i]) + 1;
        for (std::size_t b = 0; b < bits; ++b) {
            if (boost::multiprecision::bit_test(parts[i], b)) {
                boost::multiprecision::bit_set(x, b * m + i);
            }
        }
    }
    return x;
}

inline Rational rational_from_code(const BigNat& x) {
    auto pd = interleave_split(x, 2);
    return Rational(pd[0], pd[1] + 1);
}

inline BigNat code_of_rational(const Rational& q) {
    if (q < 0) {
        throw std::invalid_argument("submeasure values are nonnegative");
    }
    return interleave_join({boost::multiprecision::numerator(q), boost::multiprecision::denominator(q) - 1});
}

struct DecodedExtension {
    Submeasure phi;
    bool fallback = false;  // the code was not a valid extension
};

/// The extension of `prev` (on n-1 points) coded by i.
inline DecodedExtension decode_extension(const Submeasure& prev, const BigNat& i) {
    const std::size_t n = prev.carrier_size() + 1;
    const Mask fresh = Mask{1} << (n - 1);
    auto parts = interleave_split(i, std::size_t{1} << (n - 1));
    auto table = SetFunction::tabulate(n, [&](Mask m) {
        return (m & fresh) ? ExtRational(rational_from_code(parts[m & ~fresh])) : prev(m);
    });
    if (table.validate()) {
        return {Submeasure(SetFunction::tabulate(n, [&](Mask m) { return prev(m & ~fresh); })), true};
    }
    return {Submeasure(std::move(table)), false};
}

/// A code i with decode_extension(prev, i) = rho, where rho extends prev by one point.
inline BigNat encode_extension(const Submeasure& prev, const Submeasure& rho) {
    const std::size_t n = prev.carrier_size() + 1;
    if (rho.carrier_size() != n) {
        throw std::invalid_argument("encode_extension: carrier sizes differ by more than one point");
    }
    const Mask fresh = Mask{1} << (n - 1);
    std::vector<BigNat> parts(std::size_t{1} << (n - 1));
    for (Mask m = 0; m < fresh; ++m) {
        if (rho(m) != prev(m)) {
            throw std::invalid_argument("encode_extension: rho does not agree with the previous submeasure on " + mask_text(m));
        }
        if (rho(m | fresh).is_infinite()) {
            throw std::invalid_argument("encode_extension: values must be rational");
        }
        parts[m] = code_of_rational(rho(m | fresh).value());
    }
    return interleave_join(parts);
}

/// Memoised phi_s. Safe to share between threads: concurrent writes store the same value.
class UniversalCoding {
public:
    std::shared_ptr<const Submeasure> phi(const OmegaString& s) const {
        if (s.empty()) {
            throw std::invalid_argument("phi_s needs a nonempty sequence");
        }
        {
            std::lock_guard lock(mutex_);
            if (auto it = memo_.find(s); it != memo_.end()) {
                return it->second;
            }
        }
        std::shared_ptr<const Submeasure> prev;
        Submeasure empty;
        if (s.size() > 1) {
            prev = phi(OmegaString(s.begin(), s.end() - 1));
        }
        auto decoded = decode_extension(prev ? *prev : empty, s.back());
        auto value = std::make_shared<const Submeasure>(std::move(decoded.phi));
        std::lock_guard lock(mutex_);
        return memo_.emplace(s, value).first->second;
    }

    /// Whether the last entry of s is a valid code (not the null fallback).
    bool valid_code(const OmegaString& s) const {
        Submeasure empty;
        auto prev = s.size() > 1 ? phi(OmegaString(s.begin(), s.end() - 1)) : nullptr;
        return !decode_extension(prev ? *prev : empty, s.back()).fallback;
    }

    /// phi_s(F cap R_s).
    ExtRational value_on(const OmegaString& s, const std::set<OmegaString>& f) const {
        Mask m = 0;
        for (const auto& t : f) {
            if (!t.empty() && is_prefix(t, s)) {
                m |= Mask{1} << (t.size() - 1);
            }
        }
        return (*phi(s))(m);
    }

    std::size_t memo_size() const {
        std::lock_guard lock(mutex_);
        return memo_.size();
    }

private:
    mutable std::mutex mutex_;
    mutable std::map<OmegaString, std::shared_ptr<const Submeasure>> memo_;
};

inline UniversalCoding& default_coding() {
    static UniversalCoding coding;
    return coding;
}

struct TildeValue {
    ExtRational value;
    std::optional<OmegaString> witness;  // an s attaining the maximum
};

/// phi~(F) = max over nonempty s below some element of F of phi_s(F cap R_s).
inline TildeValue phi_tilde(const std::set<OmegaString>& f, const UniversalCoding& coding = default_coding()) {
    TildeValue out{0, std::nullopt};
    std::set<OmegaString> candidates;
    for (const auto& t : f) {
        for (std::size_t k = 1; k <= t.size(); ++k) {
            candidates.emplace(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(k));
        }
    }
    for (const auto& s : candidates) {
        auto v = coding.value_on(s, f);
        if (!out.witness || v > out.value) {
            out = {v, s};
        }
    }
    return out;
}

/// The reduction of Exh(pi) to Exh(phi_max): alpha codes pi on {0..length-1}, and f(alpha|(n+1)) = n.
class UniversalReduction {
public:
    UniversalReduction(LscSubmeasure pi, std::size_t length, const UniversalCoding& coding = default_coding())
        : pi_(std::move(pi)), coding_(&coding) {
        if (length == 0 || length > 13) {
            throw std::invalid_argument("universal_reduction: branch length must be between 1 and 13");
        }
        Submeasure prev;
        for (std::size_t n = 0; n < length; ++n) {
            // rho = pi on P({0..n}); its restriction to {0..n-1} is phi_{alpha|n} by construction
            auto rho_table = SetFunction::tabulate(n + 1, [&](Mask m) {
                std::set<std::uint64_t> f;
                for (std::size_t k = 0; k <= n; ++k) {
                    if (m >> k & 1u) {
                        f.insert(k);
                    }
                }
                return pi_(f);
            });
            if (auto v = rho_table.validate()) {
                throw SubmeasureError(*v);
            }
            Submeasure rho(std::move(rho_table));
            alpha_.push_back(encode_extension(prev, rho));
            prev = std::move(rho);
        }
    }

    const OmegaString& alpha() const { return alpha_; }
    std::size_t length() const { return alpha_.size(); }
    const LscSubmeasure& pi() const { return pi_; }

    OmegaString prefix(std::size_t n) const {
        if (n > alpha_.size()) {
            throw std::out_of_range("prefix beyond the computed branch");
        }
        return OmegaString(alpha_.begin(), alpha_.begin() + static_cast<std::ptrdiff_t>(n));
    }

    /// f(alpha|(n+1)) = n; undefined elsewhere.
    std::optional<std::uint64_t> apply(const OmegaString& t) const {
        if (t.empty() || t.size() > alpha_.size() || !is_prefix(t, alpha_)) {
            return std::nullopt;
        }
        return t.size() - 1;
    }

    /// f^-1[X] = { alpha|(n+1) : n in X }, for X below the computed length.
    std::set<OmegaString> preimage(const std::set<std::uint64_t>& x) const {
        std::set<OmegaString> out;
        for (auto n : x) {
            out.insert(prefix(checked(n) + 1));
        }
        return out;
    }

    /// phi_max on a finite set: by monotonicity the supremum is phi~ itself.
    TildeValue phi_max(const std::set<OmegaString>& f) const { return phi_tilde(f, *coding_); }

    /// phi_{alpha|n}({alpha|(k+1) : k in F}), the value (double dagger) takes along alpha.
    ExtRational along_branch(const std::set<std::uint64_t>& f, std::size_t n) const {
        return coding_->value_on(prefix(n), preimage(f));
    }

    /// phi_max on sets { alpha|(k+1) : k in X } as a submeasure of X. Finite sets are evaluated
    /// through the codes; infinite ones by the limit along alpha, i.e. through pi's own analysis.
    LscSubmeasure phi_max_on_branch() const {
        LscSubmeasure out;
        out.label = "phi_max along alpha";
        out.finite = [alpha = alpha_, coding = coding_](const std::set<std::uint64_t>& f) {
            std::set<OmegaString> pre;
            for (auto n : f) {
                if (n + 1 > alpha.size()) {
                    throw std::out_of_range("point " + std::to_string(n) + " lies beyond the computed branch");
                }
                pre.emplace(alpha.begin(), alpha.begin() + static_cast<std::ptrdiff_t>(n + 1));
            }
            return phi_tilde(pre, *coding).value;
        };
        out.analyse = pi_.analyse;
        out.uniform_tail_lower = pi_.uniform_tail_lower;
        out.tails_vanish = pi_.tails_vanish;
        return out;
    }

private:
    std::uint64_t checked(std::uint64_t n) const {
        if (n + 1 > alpha_.size()) {
            throw std::out_of_range("point " + std::to_string(n) + " lies beyond the computed branch");
        }
        return n;
    }

    LscSubmeasure pi_;
    const UniversalCoding* coding_;
    OmegaString alpha_;
};

/// The branch alpha laid along 1^w: 1^(n+1) -> n. The prefix order is preserved, so tree properties
/// of preimages carry over to the binary setting the refuters work in.
inline StringMap<std::uint64_t> branch_adapter(const UniversalReduction& f) {
    StringMap<std::uint64_t> out;
    out.id = "universal";
    const std::size_t length = f.length();
    auto ones = [](const BitString& s) { return s.str().find('0') == std::string::npos; };
    out.apply = [length, ones](const BitString& s) -> std::optional<std::uint64_t> {
        if (s.empty() || s.size() > length || !ones(s)) {
            return std::nullopt;
        }
        return s.size() - 1;
    };
    out.domain_alive = [length, ones](const BitString& s) { return s.size() <= length && ones(s); };
    return out;
}

inline UniversalReduction universal_reduction(LscSubmeasure pi, std::size_t length,
                                              const UniversalCoding& coding = default_coding()) {
    return UniversalReduction(std::move(pi), length, coding);
}

}  // namespace wfi
