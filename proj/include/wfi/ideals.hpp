#pragma once

// Membership oracles for the ideals on w, w x w and 2^<w, and the closed-set probes for NWD.

#include "wfi/finite_tree.hpp"
#include "wfi/lazy_tree.hpp"
#include "wfi/ordinal.hpp"
#include "wfi/rational.hpp"
#include "wfi/structured_set.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <mutex>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

namespace wfi {

enum class Verdict { In, Out, Unknown };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::In:
            return "IN";
        case Verdict::Out:
            return "OUT";
        case Verdict::Unknown:
            return "UNKNOWN";
    }
    return "?";
}

/// An oracle answer with its evidence as named fields (rationals rendered as `p/q`).
struct Decision {
    Verdict verdict = Verdict::Unknown;
    std::map<std::string, std::string> certificate;

    bool in() const { return verdict == Verdict::In; }
    bool out() const { return verdict == Verdict::Out; }
    bool decided() const { return verdict != Verdict::Unknown; }
};

namespace detail {

/// sum of 1/(v[i] + 1) over [lo, hi) as an unreduced fraction, by binary splitting
inline std::pair<BigNat, BigNat> harmonic_split(const std::vector<std::uint64_t>& v, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) {
        return {BigNat(1), BigNat(v[lo]) + 1};
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    auto [a, b] = harmonic_split(v, lo, mid);
    auto [c, d] = harmonic_split(v, mid, hi);
    return {a * d + c * b, b * d};
}

}  // namespace detail

inline Rational ell1_weight(const std::set<std::uint64_t>& f) {
    if (f.empty()) {
        return 0;
    }
    std::vector<std::uint64_t> v(f.begin(), f.end());
    auto [num, den] = detail::harmonic_split(v, 0, v.size());
    return Rational(num, den);
}

/// Sign of ell1_weight(f) - c. Long double first, exact only when the sum lands within rounding distance of c.
inline int ell1_weight_compare(const std::set<std::uint64_t>& f, const Rational& c) {
    long double sum = 0;
    for (auto n : f) {
        sum += 1.0L / (static_cast<long double>(n) + 1);
    }
    const long double target = static_cast<long double>(c);
    const long double margin = 1e-9L * (1 + sum + std::abs(target));
    if (sum > target + margin) {
        return 1;
    }
    if (sum < target - margin) {
        return -1;
    }
    if (f.empty()) {
        return c == 0 ? 0 : (c > 0 ? -1 : 1);
    }
    std::vector<std::uint64_t> v(f.begin(), f.end());
    auto [num, den] = detail::harmonic_split(v, 0, v.size());
    const BigNat lhs = num * boost::multiprecision::denominator(c);
    const BigNat rhs = boost::multiprecision::numerator(c) * den;
    return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

template <class It>
Rational ell1_weight(It first, It last) {
    return ell1_weight(std::set<std::uint64_t>(first, last));
}

inline Decision ell1_member(const SetShape& x) {
    Decision d;
    if (auto sum = x.weight_sum(SetShape::Weight::Harmonic)) {
        d.verdict = Verdict::In;
        d.certificate["weight_upper_bound"] = to_string(sum->upper);
        d.certificate["weight_lower_bound"] = to_string(sum->lower);
        d.certificate["exact"] = sum->exact() ? "true" : "false";
    } else {
        auto [first, step] = *x.periodic_witness();
        d.verdict = Verdict::Out;
        d.certificate["divergent_progression"] = "ap(" + std::to_string(first) + "," + std::to_string(step) + ")";
        d.certificate["note"] = "contained in X apart from a density-zero set of exceptions";
    }
    return d;
}

inline Decision density_zero_member(const SetShape& x) {
    Decision d;
    Rational density = x.density();
    d.certificate["density"] = to_string(density);
    d.certificate["period"] = std::to_string(x.period());
    d.verdict = density == 0 ? Verdict::In : Verdict::Out;
    return d;
}

/// J_A = { X : X intersect A is finite }
inline Decision finite_on_member(const SetShape& a, const SetShape& x) {
    Decision d;
    auto meet = x & a;
    if (meet.is_finite()) {
        d.verdict = Verdict::In;
        auto elems = meet.elements_below(meet.threshold());
        d.certificate["intersection_size"] = std::to_string(elems.size());
    } else {
        d.verdict = Verdict::Out;
        auto first = meet.first_elements(3);
        std::string sample;
        for (auto n : first) {
            sample += (sample.empty() ? "" : ",") + std::to_string(n);
        }
        d.certificate["intersection_sample"] = sample;
    }
    return d;
}

/// The ideal of X in w x w with every column { n : (m, n) in X } finite.
inline Decision empty_times_fin_member(const PairSet& x) {
    Decision d;
    if (auto m = x.infinite_column()) {
        d.verdict = Verdict::Out;
        d.certificate["infinite_column"] = std::to_string(*m);
    } else {
        d.verdict = Verdict::In;
        d.certificate["columns"] = "all finite";
    }
    return d;
}

/// I_* = { X in 2^<w : X intersect B is finite }, B the strings ending in 1.
inline Decision lcp_member(const BranchSet& x) {
    Decision d;
    if (auto count = x.count_ends_in_one()) {
        d.verdict = Verdict::In;
        d.certificate["ends_in_one_count"] = std::to_string(*count);
    } else {
        d.verdict = Verdict::Out;
        d.certificate["ends_in_one"] = "infinite";
    }
    return d;
}

/// |(X xor Y) intersect B| + sum of 2^-index over X xor Y. Infinite when the first term is;
/// otherwise an enclosing interval, which is a single point unless sparse parts contribute.
struct MetricValue {
    bool infinite = false;
    Rational lower = 0, upper = 0;
    bool exact() const { return !infinite && lower == upper; }
    std::string describe() const {
        if (infinite) {
            return "inf";
        }
        return exact() ? to_string(lower) : "[" + to_string(lower) + ", " + to_string(upper) + "]";
    }
};

inline MetricValue lcp_metric(const BranchSet& x, const BranchSet& y) {
    BranchSet delta = (x - y) | (y - x);
    MetricValue m;
    auto count = delta.count_ends_in_one();
    if (!count) {
        m.infinite = true;
        return m;
    }
    auto w = delta.dyadic_weight();
    m.lower = Rational(*count) + w.lower;
    m.upper = Rational(*count) + w.upper;
    return m;
}

// ---------------------------------------------------------------------------------------------
// closed subsets of 2^w

/// A closed set given by the tree of its alive nodes.
struct ClosedSetOracle {
    std::function<bool(const BitString&)> alive;
    std::string label;
};

struct NwdProbeResult {
    bool certified = false;
    std::map<BitString, BitString> escapes;  // alive s -> t extending s with nothing alive above t
    std::optional<BitString> failure;        // alive s without an escape by the escape depth
    std::vector<BitString> closure_violations;  // alive nodes whose parent is not alive
    std::size_t dense_depth = 0, escape_depth = 0;
};

/// For every alive s with |s| <= d, searches breadth-first for t extending s, |t| <= D, that is not alive.
inline NwdProbeResult nwd_probe(const ClosedSetOracle& c, std::size_t d, std::size_t big_d) {
    if (big_d < d) {
        throw std::invalid_argument("nwd_probe: escape depth must be at least the dense depth");
    }
    NwdProbeResult r;
    r.dense_depth = d;
    r.escape_depth = big_d;
    std::vector<BitString> frontier;
    if (c.alive(BitString())) {
        frontier.emplace_back();
    }
    auto escape_from = [&](const BitString& s) -> std::optional<BitString> {
        std::deque<BitString> queue{s};
        while (!queue.empty()) {
            BitString u = queue.front();
            queue.pop_front();
            for (char bit : {'0', '1'}) {
                BitString v = u + bit;
                if (!c.alive(v)) {
                    return v;
                }
                if (v.size() < big_d) {
                    queue.push_back(v);
                }
            }
        }
        return std::nullopt;
    };
    for (std::size_t len = 0; !frontier.empty(); ++len) {
        std::vector<BitString> next;
        for (const auto& s : frontier) {
            if (s.size() >= big_d) {
                r.failure = s;
                return r;
            }
            auto t = escape_from(s);
            if (!t) {
                r.failure = s;
                return r;
            }
            r.escapes.emplace(s, *t);
            if (len < d) {
                for (char bit : {'0', '1'}) {
                    BitString v = s + bit;
                    if (c.alive(v)) {
                        next.push_back(v);
                    }
                }
            }
        }
        frontier = std::move(next);
    }
    // alive nodes reached only through dead parents break prefix closure
    std::function<void(const BitString&, bool)> scan = [&](const BitString& u, bool parent_alive) {
        bool here = c.alive(u);
        if (here && !parent_alive) {
            r.closure_violations.push_back(u);
        }
        if (u.size() < d) {
            scan(u + '0', here);
            scan(u + '1', here);
        }
    };
    scan(BitString(), true);
    r.certified = r.closure_violations.empty();
    return r;
}

/// Re-checks every escape: t extends s, |t| <= D, and no node of length <= D extending t is alive.
inline bool verify_nwd_certificate(const ClosedSetOracle& c, const NwdProbeResult& r) {
    if (!r.certified) {
        return false;
    }
    for (const auto& [s, t] : r.escapes) {
        if (!s.is_prefix_of(t) || t.size() > r.escape_depth || !c.alive(s)) {
            return false;
        }
        std::function<bool(const BitString&)> none_alive = [&](const BitString& u) {
            if (c.alive(u)) {
                return false;
            }
            return u.size() >= r.escape_depth || (none_alive(u + '0') && none_alive(u + '1'));
        };
        if (!none_alive(t)) {
            return false;
        }
    }
    return true;
}

/// The closed set of branches 0^m 1 s_i 0 0 ... for i <= n with (m, n) in X, plus 0 0 0 ...
/// (s_i the i-th string of the shortlex enumeration).
inline ClosedSetOracle image_in_nwd(const PairSet& x) {
    auto columns = std::make_shared<std::map<std::uint64_t, SetShape>>();
    auto mutex = std::make_shared<std::mutex>();
    auto column = [x, columns, mutex](std::uint64_t m) {
        std::lock_guard lock(*mutex);
        auto it = columns->find(m);
        if (it == columns->end()) {
            it = columns->emplace(m, x.column(m)).first;
        }
        return it->second;
    };
    ClosedSetOracle c;
    c.label = "image_in_nwd";
    c.alive = [column](const BitString& t) {
        std::size_t m = 0;
        while (m < t.size() && t[m] == '0') {
            ++m;
        }
        if (m == t.size()) {
            return true;
        }
        // t = 0^m 1 r; the least index i with r a prefix of s_i 0 0 ... is that of r without trailing zeros
        std::string r = t.suffix_from(m + 1).str();
        while (!r.empty() && r.back() == '0') {
            r.pop_back();
        }
        SetShape col = column(m);
        if (col.is_empty()) {
            return false;
        }
        if (!col.is_finite()) {
            return true;
        }
        if (r.size() >= 62) {
            return false;
        }
        return enumeration_index(BitString(r)) <= *col.max_element();
    };
    return c;
}

// ---------------------------------------------------------------------------------------------
// I_alpha

/// I_alpha for a finite set: exact.
inline Decision I_alpha_member(const FiniteTree& x, const Ordinal& alpha) {
    Decision d;
    auto rank = rank_finite(x);
    d.certificate["rank"] = std::to_string(rank);
    if (!is_additively_closed(alpha)) {
        d.certificate["warning"] = "alpha is not additively closed; I_alpha is not an ideal";
    }
    d.verdict = Ordinal(rank) < alpha ? Verdict::In : Verdict::Out;
    return d;
}

/// I_alpha for a lazy set: IN from a construction rank claim below alpha, OUT from a truncation of rank
/// at least alpha, otherwise UNKNOWN with the truncation rank as evidence.
inline Decision I_alpha_member(const LazyTree& x, const Ordinal& alpha, std::size_t depth) {
    Decision d;
    if (!is_additively_closed(alpha)) {
        d.certificate["warning"] = "alpha is not additively closed; I_alpha is not an ideal";
    }
    const auto& claim = x.rank_claim();
    if (claim) {
        d.certificate["rank_claim"] = to_string(*claim);
        d.certificate["rank_claim_checked"] = x.claim_checked() ? "true" : "false";
    }
    if (claim && x.claim_checked() && *claim < alpha) {
        d.verdict = Verdict::In;
        return d;
    }
    auto trunc = truncate(x, depth);
    auto rank = rank_finite(trunc);
    d.certificate["truncation_depth"] = std::to_string(depth);
    d.certificate["truncation_rank"] = std::to_string(rank);
    if (!trunc.empty() && Ordinal(rank) >= alpha) {
        d.verdict = Verdict::Out;
        return d;
    }
    if (claim && x.claim_checked()) {
        d.certificate["flag"] = "not in I_alpha by construction (rank claim " + to_string(*claim) + ")";
    }
    if (x.user_supplied()) {
        d.certificate["note"] = "user-supplied membership oracle; truncation is exhaustive, rank claims unchecked";
    }
    d.verdict = Verdict::Unknown;
    return d;
}

// ---------------------------------------------------------------------------------------------
// oracles on structured sets

struct IdealOracle {
    std::string name;
    Carrier carrier;
    std::function<Decision(const StructuredSet&)> decide;
};

namespace detail {
template <class T>
const T& expect_carrier(const StructuredSet& s, const std::string& oracle) {
    if (const T* p = std::get_if<T>(&s)) {
        return *p;
    }
    throw std::invalid_argument(oracle + ": set lives on a different carrier");
}
}  // namespace detail

inline IdealOracle ell1_oracle() {
    return {"l1", Carrier::Omega, [](const StructuredSet& s) { return ell1_member(detail::expect_carrier<SetShape>(s, "l1")); }};
}

inline IdealOracle density_zero_oracle() {
    return {"Z0", Carrier::Omega,
            [](const StructuredSet& s) { return density_zero_member(detail::expect_carrier<SetShape>(s, "Z0")); }};
}

inline IdealOracle finite_on_oracle(const SetShape& a) {
    return {"J_A", Carrier::Omega,
            [a](const StructuredSet& s) { return finite_on_member(a, detail::expect_carrier<SetShape>(s, "J_A")); }};
}

inline IdealOracle fin_oracle() { return finite_on_oracle(SetShape::all()); }

inline IdealOracle lcp_oracle() {
    return {"I_*", Carrier::Strings, [](const StructuredSet& s) { return lcp_member(detail::expect_carrier<BranchSet>(s, "I_*")); }};
}

inline IdealOracle empty_times_fin_oracle() {
    return {"0xFin", Carrier::OmegaSquared,
            [](const StructuredSet& s) { return empty_times_fin_member(detail::expect_carrier<PairSet>(s, "0xFin")); }};
}

}  // namespace wfi
