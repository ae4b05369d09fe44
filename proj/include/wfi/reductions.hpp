#pragma once

// Reduction maps between countable carriers and the wRK / Tukey contract checkers.

#include "wfi/ideals.hpp"
#include "wfi/lazy_tree.hpp"
#include "wfi/structured_set.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace wfi {

/// A partial map from 2^<w into a codomain carrier (std::uint64_t for w, BitString for 2^<w).
template <class Cod>
struct StringMap {
    std::string id;
    std::function<std::optional<Cod>(const BitString&)> apply;  // nullopt off the domain
    /// Some domain element extends s. Defaults to "always" (no pruning).
    std::function<bool(const BitString&)> domain_alive = [](const BitString&) { return true; };
    /// Exact structured preimage, when the map supports it.
    std::function<std::optional<StructuredSet>(const StructuredSet&)> preimage_exact;
    /// Every value lies below this bound (a declared finite range).
    std::optional<std::uint64_t> range_bound;

    bool in_domain(const BitString& s) const { return apply(s).has_value(); }
};

using StringToOmegaMap = StringMap<std::uint64_t>;
using StringToStringMap = StringMap<BitString>;

/// { s in domain : |s| <= depth, f(s) satisfies pred }, by a walk pruned with domain_alive.
template <class Cod>
FiniteTree preimage_truncated(const StringMap<Cod>& f, const std::function<bool(const Cod&)>& pred, std::size_t depth) {
    FiniteTree out;
    std::string cur;
    std::function<void()> walk = [&] {
        BitString s(cur);
        if (!f.domain_alive(s)) {
            return;
        }
        if (auto v = f.apply(s); v && pred(*v)) {
            out.insert(s);
        }
        if (cur.size() == depth) {
            return;
        }
        for (char bit : {'0', '1'}) {
            cur.push_back(bit);
            walk();
            cur.pop_back();
        }
    };
    walk();
    return out;
}

template <class Cod>
FiniteTree preimage_truncated(const StringMap<Cod>& f, const std::set<Cod>& targets, std::size_t depth) {
    return preimage_truncated<Cod>(f, [&](const Cod& v) { return targets.count(v) != 0; }, depth);
}

struct BoundedPreimage {
    FiniteTree tree;
    std::size_t depth = 0;  // every level up to here is complete
    bool cut = false;       // stopped early on the node budget
};

/// Level-by-level preimage that stops before a level would push the live frontier past `budget` nodes.
template <class Cod>
BoundedPreimage preimage_levels(const StringMap<Cod>& f, const std::function<bool(const Cod&)>& pred, std::size_t depth,
                                std::size_t budget) {
    BoundedPreimage out;
    std::vector<BitString> frontier;
    if (f.domain_alive(BitString())) {
        frontier.push_back(BitString());
    }
    for (std::size_t level = 0; !frontier.empty(); ++level) {
        for (const auto& s : frontier) {
            if (auto v = f.apply(s); v && pred(*v)) {
                out.tree.insert(s);
            }
        }
        out.depth = level;
        if (level == depth) {
            break;
        }
        std::vector<BitString> next;
        for (const auto& s : frontier) {
            for (char bit : {'0', '1'}) {
                BitString c = s + bit;
                if (f.domain_alive(c)) {
                    next.push_back(std::move(c));
                }
            }
        }
        if (next.size() > budget) {
            out.cut = true;
            break;
        }
        frontier = std::move(next);
    }
    if (frontier.empty() || !out.cut) {
        out.depth = std::max(out.depth, depth);
    }
    return out;
}

/// Every element of a truncated preimage maps into the target predicate.
template <class Cod>
bool verify_preimage(const StringMap<Cod>& f, const FiniteTree& pre, const std::function<bool(const Cod&)>& pred) {
    for (const auto& s : pre) {
        auto v = f.apply(s);
        if (!v || !pred(*v)) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------------------------
// the string embedding and the rank-boosting map

/// b0 1 b1 1 ... b(k-1) 1 0 0: distinct inputs give incomparable outputs.
inline BitString phi_embed(const BitString& s) {
    std::string out;
    out.reserve(2 * s.size() + 2);
    for (std::size_t i = 0; i < s.size(); ++i) {
        out.push_back(s[i]);
        out.push_back('1');
    }
    out += "00";
    return BitString(out);
}

/// Inverse of phi_embed on a prefix of s: the decoded string and the length consumed, or nullopt when s
/// does not start with a complete code. `partial` reports whether s is a proper prefix of some code.
struct PhiDecode {
    std::optional<std::pair<BitString, std::size_t>> code;
    bool partial = false;
};

inline PhiDecode phi_decode(const BitString& s) {
    PhiDecode r;
    std::string bits;
    std::size_t i = 0;
    while (true) {
        if (i + 2 > s.size()) {
            // an unfinished pair: "", "0", "1" can all be continued
            r.partial = true;
            return r;
        }
        char a = s[i], b = s[i + 1];
        i += 2;
        if (b == '1') {
            bits.push_back(a);
        } else if (a == '0') {
            r.code = std::make_pair(BitString(bits), i);
            return r;
        } else {
            return r;  // "10" is not a code pair
        }
    }
}

/// 1^n 0
inline BitString lambda_marker(std::uint64_t n) { return BitString(std::string(n, '1') + "0"); }

namespace detail {

/// (T_alpha)^m as a lazy set, with T^0 = {""}.
inline LazyTree rank_boosting_power(const Ordinal& alpha, std::uint64_t m) {
    if (m == 0) {
        return lazy_finite(FiniteTree{""});
    }
    return tree_pow(canonical_tree(omega_pow(alpha)), m);
}

}  // namespace detail

/// Decomposition s = phi(t') 1^n 0 u with u in (T_alpha)^m, m <= |t'|, n >= m.
struct RankBoostingDecomposition {
    BitString t_prime;
    std::uint64_t n = 0;
    std::uint64_t m = 0;
    BitString u;
    BitString image() const { return t_prime.prefix(m); }
};

class RankBoostingMap {
public:
    explicit RankBoostingMap(Ordinal alpha) : alpha_(std::move(alpha)), base_(canonical_tree(omega_pow(alpha_))) {}

    const Ordinal& alpha() const { return alpha_; }
    const LazyTree& base() const { return base_; }

    const LazyTree& power(std::uint64_t m) const {
        std::lock_guard lock(mutex_);
        while (powers_.size() <= m) {
            powers_.push_back(detail::rank_boosting_power(alpha_, powers_.size()));
        }
        return powers_[m];
    }

    std::optional<RankBoostingDecomposition> decompose(const BitString& s) const {
        auto dec = phi_decode(s);
        if (!dec.code) {
            return std::nullopt;
        }
        auto [t_prime, pos] = *dec.code;
        std::uint64_t n = 0;
        while (pos < s.size() && s[pos] == '1') {
            ++n;
            ++pos;
        }
        if (pos == s.size()) {
            return std::nullopt;
        }
        ++pos;  // the 0 closing lambda_n
        BitString u = s.suffix_from(pos);
        const std::uint64_t m_max = std::min<std::uint64_t>(t_prime.size(), n);
        for (std::uint64_t m = 0; m <= m_max; ++m) {
            if (power(m).contains(u)) {
                return RankBoostingDecomposition{t_prime, n, m, u};
            }
        }
        return std::nullopt;
    }

    std::optional<BitString> apply(const BitString& s) const {
        auto d = decompose(s);
        if (!d) {
            return std::nullopt;
        }
        return d->image();
    }

    /// Some domain element extends s.
    bool domain_alive(const BitString& s) const {
        auto dec = phi_decode(s);
        if (dec.partial) {
            return true;
        }
        if (!dec.code) {
            return false;
        }
        auto [t_prime, pos] = *dec.code;
        std::uint64_t n = 0;
        while (pos < s.size() && s[pos] == '1') {
            ++n;
            ++pos;
        }
        if (pos == s.size()) {
            return true;  // lambda can still be closed with any n' >= n
        }
        ++pos;
        BitString u = s.suffix_from(pos);
        const std::uint64_t m_max = std::min<std::uint64_t>(t_prime.size(), n);
        for (std::uint64_t m = 0; m <= m_max; ++m) {
            if (power(m).alive(u)) {
                return true;
            }
        }
        return false;
    }

    /// phi(t') lambda_n u for every generating tuple with |s| <= depth.
    std::vector<std::pair<BitString, RankBoostingDecomposition>> generate(std::size_t depth) const {
        std::vector<std::pair<BitString, RankBoostingDecomposition>> out;
        for (std::size_t len = 0; 2 * len + 2 + 1 <= depth; ++len) {
            for (std::uint64_t v = 0; v < (std::uint64_t{1} << len); ++v) {
                std::string bits(len, '0');
                for (std::size_t i = 0; i < len; ++i) {
                    bits[i] = ((v >> (len - 1 - i)) & 1U) ? '1' : '0';
                }
                BitString t_prime(bits);
                BitString code = phi_embed(t_prime);
                for (std::uint64_t n = 0; code.size() + n + 1 <= depth; ++n) {
                    BitString head = code + lambda_marker(n);
                    for (std::uint64_t m = 0; m <= std::min<std::uint64_t>(len, n); ++m) {
                        for (const auto& u : truncate(power(m), depth - head.size())) {
                            out.push_back({head + u, RankBoostingDecomposition{t_prime, n, m, u}});
                        }
                    }
                }
            }
        }
        return out;
    }

    /// The truncated preimage of a finite set of strings, generated structurally.
    FiniteTree preimage(const std::set<BitString>& targets, std::size_t depth) const {
        FiniteTree out;
        for (const auto& t : targets) {
            const std::uint64_t m = t.size();
            // t' ranges over extensions of t short enough to fit
            std::function<void(const BitString&)> extend = [&](const BitString& t_prime) {
                BitString code = phi_embed(t_prime);
                if (code.size() + m + 1 > depth) {
                    return;
                }
                for (std::uint64_t n = m; code.size() + n + 1 <= depth; ++n) {
                    BitString head = code + lambda_marker(n);
                    for (const auto& u : truncate(power(m), depth - head.size())) {
                        out.insert(head + u);
                    }
                }
                extend(t_prime + '0');
                extend(t_prime + '1');
            };
            extend(t);
        }
        return out;
    }

    StringToStringMap as_map() const {
        auto self = std::make_shared<RankBoostingMap>(*this);
        StringToStringMap f;
        f.id = "rank-boosting(" + to_string(alpha_) + ")";
        f.apply = [self](const BitString& s) { return self->apply(s); };
        f.domain_alive = [self](const BitString& s) { return self->domain_alive(s); };
        return f;
    }

    RankBoostingMap(const RankBoostingMap& other) : alpha_(other.alpha_), base_(other.base_) {}

private:
    Ordinal alpha_;
    LazyTree base_;
    mutable std::mutex mutex_;
    mutable std::vector<LazyTree> powers_;
};

inline RankBoostingMap rank_boosting_map(const Ordinal& alpha) { return RankBoostingMap(alpha); }

// ---------------------------------------------------------------------------------------------
// the locally compact coding map

/// f(alpha|(n+1)) = n on the nonempty prefixes of the characteristic sequence of A.
/// Preimages are {alpha|(n+1) : n in X}, so X meets A finitely iff f^-1[X] meets B finitely.
inline StringToOmegaMap lcp_reduction(const SetShape& a) {
    auto shape = std::make_shared<SetShape>(a);
    StringToOmegaMap f;
    f.id = "lcp";
    auto on_path = [shape](const BitString& s) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            if ((s[i] == '1') != shape->contains(i)) {
                return false;
            }
        }
        return true;
    };
    f.apply = [on_path](const BitString& s) -> std::optional<std::uint64_t> {
        if (s.size() == 0 || !on_path(s)) {
            return std::nullopt;
        }
        return s.size() - 1;
    };
    f.domain_alive = on_path;
    f.preimage_exact = [shape](const StructuredSet& x) -> std::optional<StructuredSet> {
        const auto* levels = std::get_if<SetShape>(&x);
        if (!levels) {
            return std::nullopt;
        }
        return StructuredSet(BranchSet::chain(*shape, *levels));
    };
    return f;
}

/// f(alpha|n) = n on all prefixes including the empty one. Its preimages meet B in {alpha|n : n in X,
/// n - 1 in A}, one position off from A.
inline StringToOmegaMap lcp_reduction_unshifted(const SetShape& a) {
    auto shape = std::make_shared<SetShape>(a);
    StringToOmegaMap f = lcp_reduction(a);
    f.id = "lcp-unshifted";
    f.apply = [shape](const BitString& s) -> std::optional<std::uint64_t> {
        for (std::size_t i = 0; i < s.size(); ++i) {
            if ((s[i] == '1') != shape->contains(i)) {
                return std::nullopt;
            }
        }
        return s.size();
    };
    f.preimage_exact = [shape](const StructuredSet& x) -> std::optional<StructuredSet> {
        const auto* levels = std::get_if<SetShape>(&x);
        if (!levels) {
            return std::nullopt;
        }
        BranchSet pre = BranchSet::chain(*shape, levels->shifted_down(1));
        if (levels->contains(0)) {
            pre = pre | BranchSet::of_strings({BitString()});
        }
        return StructuredSet(pre);
    };
    return f;
}

/// A map w -> w with exact preimages of DSL sets.
struct OmegaMap {
    std::string id;
    std::function<std::uint64_t(std::uint64_t)> apply;
    std::function<SetShape(const SetShape&)> preimage;
};

inline OmegaMap identity_map() {
    return {"identity", [](std::uint64_t n) { return n; }, [](const SetShape& x) { return x; }};
}

inline OmegaMap constant_map(std::uint64_t value) {
    return {"constant(" + std::to_string(value) + ")", [value](std::uint64_t) { return value; },
            [value](const SetShape& x) { return x.contains(value) ? SetShape::all() : SetShape::empty(); }};
}

// ---------------------------------------------------------------------------------------------
// contract checkers

enum class SampleStatus { Consistent, Violation, Inconclusive };

inline std::string to_string(SampleStatus s) {
    switch (s) {
        case SampleStatus::Consistent:
            return "CONSISTENT";
        case SampleStatus::Violation:
            return "VIOLATION";
        case SampleStatus::Inconclusive:
            return "INCONCLUSIVE";
    }
    return "?";
}

struct SampleVerdict {
    std::string sample;
    Decision codomain_side;  // X in I
    Decision domain_side;    // f^-1[X] in J
    SampleStatus status = SampleStatus::Inconclusive;
    std::string note;
};

struct WrkReport {
    std::string map_id, codomain_ideal, domain_ideal;
    std::vector<SampleVerdict> samples;
    std::size_t count(SampleStatus s) const {
        return static_cast<std::size_t>(std::count_if(samples.begin(), samples.end(), [s](const auto& v) { return v.status == s; }));
    }
    bool all_consistent() const { return count(SampleStatus::Consistent) == samples.size(); }
};

namespace detail {
inline SampleVerdict judge(std::string text, Decision left, std::optional<Decision> right) {
    SampleVerdict v;
    v.sample = std::move(text);
    v.codomain_side = std::move(left);
    if (right) {
        v.domain_side = std::move(*right);
    }
    if (!v.codomain_side.decided() || !right || !v.domain_side.decided()) {
        v.status = SampleStatus::Inconclusive;
    } else {
        v.status = v.codomain_side.verdict == v.domain_side.verdict ? SampleStatus::Consistent : SampleStatus::Violation;
    }
    return v;
}
}  // namespace detail

/// Checks X in I <=> f^-1[X] in J on each sample (I on the codomain, J on the domain).
template <class Cod>
WrkReport wrk_verify(const StringMap<Cod>& f, const IdealOracle& i, const IdealOracle& j,
                     const std::vector<std::pair<std::string, StructuredSet>>& samples) {
    WrkReport report{f.id, i.name, j.name, {}};
    for (const auto& [text, x] : samples) {
        Decision left = i.decide(x);
        std::optional<Decision> right;
        std::string note;
        if (f.preimage_exact) {
            try {
                if (auto pre = f.preimage_exact(x)) {
                    right = j.decide(*pre);
                } else {
                    note = "no exact preimage for this sample";
                }
            } catch (const std::invalid_argument& e) {
                note = e.what();
            }
        } else {
            note = "map has no exact preimages";
        }
        auto v = detail::judge(text, std::move(left), std::move(right));
        v.note = note;
        report.samples.push_back(std::move(v));
    }
    return report;
}

inline WrkReport wrk_verify(const OmegaMap& f, const IdealOracle& i, const IdealOracle& j,
                            const std::vector<std::pair<std::string, StructuredSet>>& samples) {
    WrkReport report{f.id, i.name, j.name, {}};
    for (const auto& [text, x] : samples) {
        Decision left = i.decide(x);
        const auto* shape = std::get_if<SetShape>(&x);
        std::optional<Decision> right;
        if (shape) {
            right = j.decide(f.preimage(*shape));
        }
        report.samples.push_back(detail::judge(text, std::move(left), std::move(right)));
    }
    return report;
}

struct TukeyReport {
    bool family_unbounded = false;  // union not in I
    bool image_unbounded = false;   // union of images not in J
    bool skipped = false;
    std::string notice;
    bool violation() const { return !skipped && family_unbounded && !image_unbounded; }
};

/// A family is bounded iff its union is in the ideal; flags an unbounded family whose image is bounded.
template <class Dom, class Cod>
TukeyReport tukey_check(const std::function<Cod(const Dom&)>& g, const std::function<Decision(const Dom&)>& in_i,
                        const std::function<Decision(const Cod&)>& in_j, const std::vector<Dom>& family,
                        const std::function<Dom(const Dom&, const Dom&)>& union_dom,
                        const std::function<Cod(const Cod&, const Cod&)>& union_cod) {
    TukeyReport r;
    if (family.empty()) {
        r.notice = "empty family";
        return r;
    }
    try {
        Dom u = family.front();
        Cod v = g(family.front());
        for (std::size_t k = 1; k < family.size(); ++k) {
            u = union_dom(u, family[k]);
            v = union_cod(v, g(family[k]));
        }
        Decision du = in_i(u), dv = in_j(v);
        if (!du.decided() || !dv.decided()) {
            r.skipped = true;
            r.notice = "union could not be classified";
            return r;
        }
        r.family_unbounded = du.out();
        r.image_unbounded = dv.out();
    } catch (const std::invalid_argument& e) {
        r.skipped = true;
        r.notice = e.what();
    }
    return r;
}

inline ClosedSetOracle closed_union(const ClosedSetOracle& a, const ClosedSetOracle& b) {
    return {[a, b](const BitString& t) { return a.alive(t) || b.alive(t); }, "union(" + a.label + "," + b.label + ")"};
}

/// NWD membership of a closed set as a decision: IN on a re-verified probe certificate, UNKNOWN otherwise.
inline Decision nwd_decision(const ClosedSetOracle& c, std::size_t d, std::size_t big_d) {
    Decision dec;
    auto probe = nwd_probe(c, d, big_d);
    if (probe.certified && verify_nwd_certificate(c, probe)) {
        dec.verdict = Verdict::In;
        dec.certificate["escapes"] = std::to_string(probe.escapes.size());
    } else {
        dec.verdict = Verdict::Unknown;
        if (probe.failure) {
            dec.certificate["no_escape_from"] = "\"" + probe.failure->str() + "\"";
        }
    }
    dec.certificate["dense_depth"] = std::to_string(d);
    dec.certificate["escape_depth"] = std::to_string(big_d);
    return dec;
}

}  // namespace wfi
