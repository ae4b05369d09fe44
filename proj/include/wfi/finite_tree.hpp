#pragma once

// Finite subsets of 2^<w (not necessarily prefix-closed) and their rank.

#include "wfi/bitstring.hpp"

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace wfi {

class FiniteTree {
public:
    using Container = std::set<BitString>;

    FiniteTree() = default;
    FiniteTree(std::initializer_list<const char*> bits) {
        for (const char* b : bits) {
            elements_.insert(BitString(b));
        }
    }
    explicit FiniteTree(Container elements) : elements_(std::move(elements)) {}
    template <class Range>
    static FiniteTree from_range(const Range& r) {
        return FiniteTree(Container(r.begin(), r.end()));
    }

    const Container& elements() const { return elements_; }
    std::size_t size() const { return elements_.size(); }
    bool empty() const { return elements_.empty(); }
    bool contains(const BitString& s) const { return elements_.count(s) != 0; }
    void insert(BitString s) { elements_.insert(std::move(s)); }

    auto begin() const { return elements_.begin(); }
    auto end() const { return elements_.end(); }

    friend bool operator==(const FiniteTree&, const FiniteTree&) = default;

private:
    Container elements_;
};

/// Node rank map: rho(u) = 0 at terminals, sup{rho(t)+1 : t in X, u strict prefix of t} otherwise.
struct RankResult {
    std::uint64_t rank = 0;
    std::map<BitString, std::uint64_t> node_rank;
};

inline RankResult rank_with_nodes(const FiniteTree& x) {
    std::vector<const BitString*> by_length;
    by_length.reserve(x.size());
    for (const auto& s : x) {
        by_length.push_back(&s);
    }
    std::stable_sort(by_length.begin(), by_length.end(), [](auto* a, auto* b) { return a->size() > b->size(); });

    // best[p] = max rho(t)+1 over processed members t with p a strict prefix of t
    std::unordered_map<std::string, std::uint64_t> best;
    RankResult out;
    for (const BitString* t : by_length) {
        auto it = best.find(t->str());
        std::uint64_t rho = it == best.end() ? 0 : it->second;
        out.node_rank.emplace(*t, rho);
        out.rank = std::max(out.rank, rho);
        for (std::size_t len = 0; len < t->size(); ++len) {
            auto& slot = best[t->str().substr(0, len)];
            slot = std::max(slot, rho + 1);
        }
    }
    return out;
}

/// rank(X) = sup of node ranks; 0 for the empty set.
inline std::uint64_t rank_finite(const FiniteTree& x) { return rank_with_nodes(x).rank; }

/// Length of the longest prefix chain, 0 for the empty set.
inline std::uint64_t longest_chain_length(const FiniteTree& x) { return x.empty() ? 0 : rank_finite(x) + 1; }

/// One longest chain, listed from its shortest element upward.
inline std::vector<BitString> longest_chain(const FiniteTree& x) {
    if (x.empty()) {
        return {};
    }
    auto ranks = rank_with_nodes(x);
    std::vector<BitString> chain;
    const BitString* current = nullptr;
    for (const auto& [s, r] : ranks.node_rank) {
        if (r == ranks.rank) {
            current = &s;
            break;
        }
    }
    chain.push_back(*current);
    while (ranks.node_rank.at(*current) > 0) {
        const auto want = ranks.node_rank.at(*current) - 1;
        for (const auto& [s, r] : ranks.node_rank) {
            if (r == want && current->is_strict_prefix_of(s)) {
                current = &s;
                break;
            }
        }
        chain.push_back(*current);
    }
    return chain;
}

/// Elements with no proper extension in the set.
inline FiniteTree terminal_nodes(const FiniteTree& s) {
    std::unordered_map<std::string, bool> strict_prefixes;
    for (const auto& t : s) {
        for (std::size_t len = 0; len < t.size(); ++len) {
            strict_prefixes.emplace(t.str().substr(0, len), true);
        }
    }
    FiniteTree out;
    for (const auto& u : s) {
        if (strict_prefixes.count(u.str()) == 0) {
            out.insert(u);
        }
    }
    return out;
}

inline FiniteTree graft(const BitString& stem, const FiniteTree& t) {
    FiniteTree out;
    for (const auto& u : t) {
        out.insert(stem + u);
    }
    return out;
}

inline FiniteTree tree_union(const FiniteTree& a, const FiniteTree& b) {
    auto elems = a.elements();
    elems.insert(b.begin(), b.end());
    return FiniteTree(std::move(elems));
}

/// A copy of T above every terminal node of S. T must not contain the empty string.
inline FiniteTree tree_sum(const FiniteTree& s, const FiniteTree& t) {
    if (t.contains(BitString{})) {
        throw std::invalid_argument("tree_sum: right operand contains the empty string");
    }
    FiniteTree out;
    for (const auto& p : terminal_nodes(s)) {
        for (const auto& u : t) {
            out.insert(p + u);
        }
    }
    return out;
}

/// { t u : t terminal in Y, u in X }. Unlike tree_sum, X may contain the empty string, in which case
/// the terminals of Y become the roots of the copies.
inline FiniteTree graft_on_terminals(const FiniteTree& y, const FiniteTree& x) {
    FiniteTree out;
    for (const auto& p : terminal_nodes(y)) {
        for (const auto& u : x) {
            out.insert(p + u);
        }
    }
    return out;
}

/// n-fold tree_sum T^T^...^T, n >= 1.
inline FiniteTree tree_pow(const FiniteTree& t, std::uint64_t n) {
    if (n == 0) {
        throw std::invalid_argument("tree_pow: exponent must be at least 1");
    }
    FiniteTree out = t;
    for (std::uint64_t i = 1; i < n; ++i) {
        out = tree_sum(out, t);
    }
    return out;
}

inline FiniteTree truncate(const FiniteTree& x, std::size_t depth) {
    FiniteTree out;
    for (const auto& s : x) {
        if (s.size() <= depth) {
            out.insert(s);
        }
    }
    return out;
}

/// {0, 00, ..., 0^n}: a chain with n nodes.
inline FiniteTree chain_tree(std::uint64_t n) {
    FiniteTree out;
    for (std::uint64_t i = 1; i <= n; ++i) {
        out.insert(BitString::repeat('0', i));
    }
    return out;
}

/// Splits A by a 2-colouring and returns the colour class of larger rank.
struct MonochromaticPart {
    int colour = 0;
    FiniteTree part;
    std::uint64_t rank = 0;
};

template <class Colouring>
MonochromaticPart monochromatic_split(const FiniteTree& a, Colouring&& colour_of) {
    FiniteTree classes[2];
    for (const auto& u : a) {
        classes[colour_of(u) ? 1 : 0].insert(u);
    }
    MonochromaticPart best;
    for (int c = 0; c < 2; ++c) {
        auto r = rank_finite(classes[c]);
        if (c == 0 || r > best.rank) {
            best = MonochromaticPart{c, classes[c], r};
        }
    }
    return best;
}

inline std::string serialize(const FiniteTree& x) {
    std::string out;
    for (const auto& s : x) {
        out += s.empty() ? std::string("\"\"") : s.str();
        out += '\n';
    }
    return out;
}

/// Newline-separated bit strings; a line containing only `""` or `e` denotes the empty string.
inline FiniteTree parse_finite_tree(const std::string& text) {
    FiniteTree out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string::npos) {
            end = text.size();
        }
        std::string line = text.substr(start, end - start);
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
            line.pop_back();
        }
        if (line == "\"\"" || line == "e") {
            out.insert(BitString{});
        } else if (!line.empty()) {
            out.insert(BitString(line));
        }
        start = end + 1;
    }
    return out;
}

}  // namespace wfi
