#pragma once

// Depth-bounded adversaries that look for witnesses against claimed wRK reductions
//   (a) l1 -> I_w,  (b) l1 -> I_wf,  (c) I_w -> I_wf.
// A WITNESS carries enough evidence to be re-checked with the ideal and tree modules; EXHAUSTED only
// means the search bounds were too small, never that the map is a reduction.

#include "wfi/finite_tree.hpp"
#include "wfi/ideals.hpp"
#include "wfi/reductions.hpp"

#include <algorithm>
#include <bit>
#include <memory>
#include <set>
#include <unordered_map>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wfi {

/// Widest level of the domain a refuter will expand.
inline constexpr std::size_t kRefuterBudget = std::size_t{1} << 20;

enum class RefuteOutcome { Witness, Exhausted };

inline std::string to_string(RefuteOutcome o) { return o == RefuteOutcome::Witness ? "WITNESS" : "EXHAUSTED"; }

// ---------------------------------------------------------------------------------------------
// (a) l1 -> I_w

/// A_n = { k : k + 1 >= 2^n (n + 1) }: each element weighs at most 2^-n / (n + 1).
inline std::uint64_t tail_start(std::uint64_t n) { return (std::uint64_t{1} << n) * (n + 1) - 1; }

struct Ell1IomegaRound {
    std::uint64_t n = 0;
    std::vector<std::uint64_t> values;  // at most n + 1 elements of A_n
    FiniteTree preimage;                // their truncated preimage
    std::uint64_t rank = 0;
};

struct Ell1IomegaResult {
    RefuteOutcome outcome = RefuteOutcome::Exhausted;
    std::string kind;  // "rank_growth" or "empty_tail"
    std::vector<Ell1IomegaRound> rounds;
    std::set<std::uint64_t> witness;  // X
    Rational weight = 0;
    std::optional<std::uint64_t> stalled_at;  // first n without enough rank
    std::size_t depth = 0;

    /// Shortest DSL text for X.
    std::string witness_text() const {
        if (kind == "empty_tail") {
            return "cofin{" + [&] {
                std::string s;
                for (std::uint64_t k = 0; k < *witness.begin(); ++k) {
                    s += (k ? "," : "") + std::to_string(k);
                }
                return s;
            }() + "}";
        }
        std::string s = "fin{";
        bool first = true;
        for (auto k : witness) {
            s += (first ? "" : ",") + std::to_string(k);
            first = false;
        }
        return s + "}";
    }
};

/// For n = 0..n_max, picks n + 1 values from A_n whose preimage (at the given depth) has rank >= n.
/// X = the union of the picks has l1 weight <= 2 while its preimage has unbounded rank.
/// A map with a declared finite range is refuted directly: some A_n misses the range, so the
/// co-finite set A_n (not in l1) has empty preimage.
inline Ell1IomegaResult refute_ell1_to_Iomega(const StringToOmegaMap& f, std::uint64_t n_max, std::size_t depth,
                                              std::size_t budget = kRefuterBudget) {
    Ell1IomegaResult r;
    r.depth = depth;
    if (f.range_bound) {
        std::uint64_t n = 0;
        while (tail_start(n) < *f.range_bound) {
            ++n;
        }
        r.kind = "empty_tail";
        r.outcome = RefuteOutcome::Witness;
        r.witness = {tail_start(n)};
        Ell1IomegaRound round;
        round.n = n;
        r.rounds.push_back(round);
        return r;
    }
    r.kind = "rank_growth";
    // fibers of the depth-d domain truncation
    std::map<std::uint64_t, FiniteTree> fibers;
    {
        auto all = preimage_levels<std::uint64_t>(f, [](const std::uint64_t&) { return true; }, depth, budget);
        r.depth = all.depth;
        for (const auto& s : all.tree) {
            fibers[*f.apply(s)].insert(s);
        }
    }
    auto union_rank = [](const FiniteTree& a, const FiniteTree& b) { return rank_finite(tree_union(a, b)); };
    for (std::uint64_t n = 0; n <= n_max; ++n) {
        Ell1IomegaRound round;
        round.n = n;
        std::vector<std::uint64_t> pool;
        const std::uint64_t floor = std::max(tail_start(n), r.witness.empty() ? 0 : *r.witness.rbegin() + 1);
        for (auto it = fibers.lower_bound(floor); it != fibers.end(); ++it) {
            pool.push_back(it->first);
        }
        // greedy: the least value that reaches rank n, else the one that raises the rank most
        while (round.values.size() < n + 1 && !pool.empty()) {
            std::size_t best = 0;
            std::uint64_t best_rank = 0;
            bool found = false;
            for (std::size_t i = 0; i < pool.size(); ++i) {
                auto rk = union_rank(round.preimage, fibers[pool[i]]);
                if (!found || rk > best_rank) {
                    best = i;
                    best_rank = rk;
                    found = true;
                }
                if (rk >= n) {
                    break;
                }
            }
            round.values.push_back(pool[best]);
            round.preimage = tree_union(round.preimage, fibers[pool[best]]);
            round.rank = best_rank;
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best));
            if (round.rank >= n) {
                break;
            }
        }
        if (round.values.empty() || round.rank < n) {
            r.stalled_at = n;
            r.rounds.push_back(std::move(round));
            return r;
        }
        r.witness.insert(round.values.begin(), round.values.end());
        r.rounds.push_back(std::move(round));
    }
    r.weight = ell1_weight(r.witness);
    r.outcome = RefuteOutcome::Witness;
    return r;
}

/// Re-checks a witness with rank_finite, ell1_weight and the map's own values.
inline bool verify_ell1_to_Iomega(const StringToOmegaMap& f, const Ell1IomegaResult& r) {
    if (r.outcome != RefuteOutcome::Witness) {
        return false;
    }
    if (r.kind == "empty_tail") {
        // X = A_n is co-finite, hence outside l1; every value of f lies below the first element of A_n
        return f.range_bound && *f.range_bound <= *r.witness.begin() && ell1_member(SetShape::cofinite([&] {
                                                                              std::set<std::uint64_t> below;
                                                                              for (std::uint64_t k = 0; k < *r.witness.begin(); ++k) {
                                                                                  below.insert(k);
                                                                              }
                                                                              return below;
                                                                          }()))
                                                             .out();
    }
    if (ell1_weight(r.witness) > 2) {
        return false;
    }
    std::set<std::uint64_t> picked;
    for (const auto& round : r.rounds) {
        picked.insert(round.values.begin(), round.values.end());
    }
    if (picked != r.witness) {
        return false;
    }
    for (const auto& round : r.rounds) {
        if (round.values.size() > round.n + 1 || rank_finite(round.preimage) < round.n) {
            return false;
        }
        std::set<std::uint64_t> vals(round.values.begin(), round.values.end());
        for (auto v : vals) {
            if (v < tail_start(round.n)) {
                return false;
            }
        }
        for (const auto& s : round.preimage) {
            auto v = f.apply(s);
            if (!v || !vals.count(*v)) {
                return false;
            }
        }
    }
    return true;
}

// ---------------------------------------------------------------------------------------------
// (b) l1 -> I_wf

struct Ell1IwfResult {
    RefuteOutcome outcome = RefuteOutcome::Exhausted;
    std::vector<std::uint64_t> k;  // k_0 < k_1 < ..., k_n >= 2^n
    std::vector<BitString> t;      // t_0 < t_1 < ... along y, f(t_n) = k_n
    BitString path_prefix;         // y restricted to the depth
    Rational weight = 0;
    std::size_t depth = 0;

    std::string witness_text() const {
        std::string s = "fin{";
        for (std::size_t i = 0; i < k.size(); ++i) {
            s += (i ? "," : "") + std::to_string(k[i]);
        }
        return s + "}";
    }
};

/// Longest sequence of domain prefixes t_0 < t_1 < ... of y with strictly increasing values k_n >= 2^n.
/// Without a path, y is taken along a longest chain in the domain truncation.
inline Ell1IwfResult refute_ell1_to_Iwf(const StringToOmegaMap& f, std::optional<InfiniteSequence> y, std::size_t depth,
                                        std::size_t min_terms, std::size_t budget = kRefuterBudget) {
    Ell1IwfResult r;
    r.depth = depth;
    if (y) {
        r.path_prefix = y->prefix(depth);
    } else {
        auto dom = preimage_levels<std::uint64_t>(f, [](const std::uint64_t&) { return true; }, depth, budget);
        r.depth = dom.depth;
        auto chain = longest_chain(dom.tree);
        r.path_prefix = chain.empty() ? BitString() : chain.back();
    }
    // best[n] = (smallest possible k_{n-1}, prefix length) over sequences of length n
    struct Entry {
        std::uint64_t last_k;
        std::size_t len;
        int parent;  // index into history
    };
    std::vector<Entry> history;
    std::vector<int> best;  // best[n] -> history index of a length-n sequence with least last_k
    for (std::size_t len = 0; len <= r.path_prefix.size(); ++len) {
        auto v = f.apply(r.path_prefix.prefix(len));
        if (!v) {
            continue;
        }
        const std::uint64_t k = *v;
        for (std::size_t n = best.size() + 1; n-- > 0;) {
            // extend a length-n sequence to length n + 1 with k as k_n
            if (n >= 64 || k < (std::uint64_t{1} << n)) {
                continue;
            }
            if (n > 0 && history[best[n - 1]].last_k >= k) {
                continue;
            }
            if (n > 0 && history[best[n - 1]].len >= len) {
                continue;
            }
            int parent = n > 0 ? best[n - 1] : -1;
            history.push_back({k, len, parent});
            int idx = static_cast<int>(history.size()) - 1;
            if (best.size() <= n) {
                best.push_back(idx);
            } else if (history[best[n]].last_k > k) {
                best[n] = idx;
            }
        }
    }
    if (!best.empty()) {
        for (int i = best.back(); i >= 0; i = history[i].parent) {
            r.k.push_back(history[i].last_k);
            r.t.push_back(r.path_prefix.prefix(history[i].len));
        }
        std::reverse(r.k.begin(), r.k.end());
        std::reverse(r.t.begin(), r.t.end());
    }
    r.weight = ell1_weight(r.k.begin(), r.k.end());
    r.outcome = r.k.size() >= min_terms ? RefuteOutcome::Witness : RefuteOutcome::Exhausted;
    return r;
}

inline bool verify_ell1_to_Iwf(const StringToOmegaMap& f, const Ell1IwfResult& r) {
    if (r.outcome != RefuteOutcome::Witness || r.k.size() != r.t.size()) {
        return false;
    }
    if (ell1_weight(r.k.begin(), r.k.end()) > 2) {
        return false;
    }
    for (std::size_t n = 0; n < r.k.size(); ++n) {
        if (r.k[n] < (std::uint64_t{1} << n) || (n > 0 && (r.k[n] <= r.k[n - 1] || !r.t[n - 1].is_strict_prefix_of(r.t[n])))) {
            return false;
        }
        if (!r.t[n].is_prefix_of(r.path_prefix) || f.apply(r.t[n]) != std::optional<std::uint64_t>(r.k[n])) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------------------------
// (c) I_w -> I_wf

/// s_{k,i} = 1^k 0^(i+1)
inline BitString staircase_string(std::uint64_t k, std::uint64_t i) { return BitString(std::string(k, '1') + std::string(i + 1, '0')); }

/// (k, i) with s = s_{k,i} and i <= k, if any.
inline std::optional<std::pair<std::uint64_t, std::uint64_t>> staircase_coordinates(const BitString& s) {
    std::size_t k = 0;
    while (k < s.size() && s[k] == '1') {
        ++k;
    }
    std::size_t zeros = s.size() - k;
    if (zeros == 0 || zeros > k + 1) {
        return std::nullopt;
    }
    for (std::size_t i = k; i < s.size(); ++i) {
        if (s[i] != '0') {
            return std::nullopt;
        }
    }
    return std::pair<std::uint64_t, std::uint64_t>{k, zeros - 1};
}

struct IomegaIwfResult {
    RefuteOutcome outcome = RefuteOutcome::Exhausted;
    std::vector<BitString> t;                                  // t_0 < t_1 < ...
    std::vector<std::pair<std::uint64_t, std::uint64_t>> ki;  // (k_n, i_n), k strictly increasing
    std::size_t depth = 0;

    std::vector<BitString> antichain() const {
        std::vector<BitString> z;
        for (auto [k, i] : ki) {
            z.push_back(staircase_string(k, i));
        }
        return z;
    }
    std::string witness_text() const {
        std::string s = "fin{";
        bool first = true;
        for (const auto& z : antichain()) {
            s += (first ? "\"" : ",\"") + z.str() + "\"";
            first = false;
        }
        return s + "}";
    }
};

/// Longest chain t_0 < t_1 < ... in the truncated preimage of {s_{k,i}} along which k strictly increases.
inline IomegaIwfResult refute_Iomega_to_Iwf(const StringToStringMap& f, std::size_t depth, std::size_t min_terms,
                                            std::size_t budget = kRefuterBudget) {
    IomegaIwfResult r;
    auto pre = preimage_levels<BitString>(
        f, [](const BitString& v) { return staircase_coordinates(v).has_value(); }, depth, budget);
    r.depth = pre.depth;
    std::vector<BitString> nodes(pre.tree.begin(), pre.tree.end());
    std::sort(nodes.begin(), nodes.end(), [](const BitString& a, const BitString& b) {
        return a.size() != b.size() ? a.size() < b.size() : a < b;
    });
    std::unordered_map<BitString, std::size_t> pos;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        pos[nodes[i]] = i;
    }
    std::vector<std::uint64_t> kval(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        kval[i] = staircase_coordinates(*f.apply(nodes[i]))->first;
    }
    std::vector<std::size_t> len(nodes.size(), 1);
    std::vector<long> parent(nodes.size(), -1);
    std::size_t best = nodes.size();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (std::size_t l = 0; l < nodes[i].size(); ++l) {
            auto it = pos.find(nodes[i].prefix(l));
            if (it == pos.end()) {
                continue;
            }
            std::size_t j = it->second;
            if (kval[j] < kval[i] && len[j] + 1 > len[i]) {
                len[i] = len[j] + 1;
                parent[i] = static_cast<long>(j);
            }
        }
        if (best == nodes.size() || len[i] > len[best]) {
            best = i;
        }
    }
    if (best != nodes.size()) {
        for (long i = static_cast<long>(best); i >= 0; i = parent[static_cast<std::size_t>(i)]) {
            r.t.push_back(nodes[static_cast<std::size_t>(i)]);
            r.ki.push_back(*staircase_coordinates(*f.apply(nodes[static_cast<std::size_t>(i)])));
        }
        std::reverse(r.t.begin(), r.t.end());
        std::reverse(r.ki.begin(), r.ki.end());
    }
    r.outcome = r.t.size() >= min_terms ? RefuteOutcome::Witness : RefuteOutcome::Exhausted;
    return r;
}

inline bool verify_Iomega_to_Iwf(const StringToStringMap& f, const IomegaIwfResult& r) {
    if (r.outcome != RefuteOutcome::Witness) {
        return false;
    }
    auto z = r.antichain();
    for (std::size_t a = 0; a < z.size(); ++a) {
        for (std::size_t b = a + 1; b < z.size(); ++b) {
            if (!incomparable(z[a], z[b])) {
                return false;
            }
        }
    }
    for (std::size_t n = 0; n < r.t.size(); ++n) {
        if (n > 0 && (!r.t[n - 1].is_strict_prefix_of(r.t[n]) || r.ki[n].first <= r.ki[n - 1].first)) {
            return false;
        }
        if (r.ki[n].second > r.ki[n].first || f.apply(r.t[n]) != std::optional<BitString>(z[n])) {
            return false;
        }
    }
    // the chain of preimages has length |Z| while Z is an antichain (rank 0)
    return rank_finite(FiniteTree::from_range(z)) == 0 && rank_finite(FiniteTree::from_range(r.t)) + 1 == r.t.size();
}

// ---------------------------------------------------------------------------------------------
// faulty-map fixtures

namespace fixtures {

inline BitString binary(std::uint64_t k) {
    std::string s;
    do {
        s.insert(s.begin(), static_cast<char>('0' + (k & 1)));
        k >>= 1;
    } while (k > 0);
    return BitString(s);
}

inline std::uint64_t from_binary(const BitString& s) {
    std::uint64_t k = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        k = (k << 1) | static_cast<std::uint64_t>(s[i] == '1');
    }
    return k;
}

inline std::uint64_t floor_log2_plus_one(std::uint64_t k) { return static_cast<std::uint64_t>(std::bit_width(k + 1)); }

/// f(phi(bin k) 0^j) = k for 1 <= j <= floor(log2(k+1)) + 1: the fiber of k is a chain whose length
/// grows with k, so a sparse set of values can have preimages of every finite rank.
inline StringToOmegaMap fixture1() {
    StringToOmegaMap f;
    f.id = "fixture1";
    auto parse = [](const BitString& s) -> std::optional<std::pair<std::uint64_t, std::size_t>> {
        auto dec = phi_decode(s);
        if (!dec.code) {
            return std::nullopt;
        }
        auto [bits, pos] = *dec.code;
        if (bits.size() == 0 || bits.size() > 62 || (bits.size() > 1 && bits[0] == '0')) {
            return std::nullopt;
        }
        for (std::size_t i = pos; i < s.size(); ++i) {
            if (s[i] != '0') {
                return std::nullopt;
            }
        }
        return std::make_pair(from_binary(bits), s.size() - pos);
    };
    f.apply = [parse](const BitString& s) -> std::optional<std::uint64_t> {
        auto p = parse(s);
        if (!p || p->second < 1 || p->second > floor_log2_plus_one(p->first)) {
            return std::nullopt;
        }
        return p->first;
    };
    f.domain_alive = [parse](const BitString& s) {
        auto dec = phi_decode(s);
        if (dec.partial) {
            return true;
        }
        auto p = parse(s);
        return p && p->second <= floor_log2_plus_one(p->first);
    };
    return f;
}

/// f(0^L) = 2^L for L >= 1: an infinite path whose values are l1-summable.
inline StringToOmegaMap fixture2() {
    StringToOmegaMap f;
    f.id = "fixture2";
    f.apply = [](const BitString& s) -> std::optional<std::uint64_t> {
        if (s.size() == 0 || s.size() >= 63) {
            return std::nullopt;
        }
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] != '0') {
                return std::nullopt;
            }
        }
        return std::uint64_t{1} << s.size();
    };
    f.domain_alive = [](const BitString& s) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] != '0') {
                return false;
            }
        }
        return true;
    };
    return f;
}

/// The j-th element (j >= 1) of s_{0,0}, s_{1,0}, s_{1,1}, s_{2,0}, ...
inline BitString staircase_at(std::uint64_t j) {
    std::uint64_t k = 0;
    --j;
    while (j > k) {
        j -= k + 1;
        ++k;
    }
    return staircase_string(k, j);
}

/// f(0^j) = the j-th string of the staircase family: the whole family sits on one branch.
inline StringToStringMap fixture3() {
    StringToStringMap f;
    f.id = "fixture3";
    f.apply = [](const BitString& s) -> std::optional<BitString> {
        if (s.size() == 0) {
            return std::nullopt;
        }
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] != '0') {
                return std::nullopt;
            }
        }
        return staircase_at(s.size());
    };
    f.domain_alive = [](const BitString& s) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] != '0') {
                return false;
            }
        }
        return true;
    };
    return f;
}

/// The constant map s -> value on all of 2^<w.
inline StringToOmegaMap constant_string_map(std::uint64_t value) {
    StringToOmegaMap f;
    f.id = "constant(" + std::to_string(value) + ")";
    f.apply = [value](const BitString&) -> std::optional<std::uint64_t> { return value; };
    f.range_bound = value + 1;
    return f;
}

/// Domain X_y (an antichain): f(s) = |s|. No path runs through the domain.
inline StringToOmegaMap antichain_length_map(const InfiniteSequence& y) {
    auto tree = std::make_shared<LazyTree>(antichain_of_path(y));
    StringToOmegaMap f;
    f.id = "antichain-length";
    f.apply = [tree](const BitString& s) -> std::optional<std::uint64_t> {
        if (!tree->contains(s)) {
            return std::nullopt;
        }
        return s.size();
    };
    f.domain_alive = [tree](const BitString& s) { return tree->alive(s); };
    return f;
}

}  // namespace fixtures

}  // namespace wfi
