#pragma once

// Infinite subsets of 2^<w described structurally. Every node answers
//   member(v): v is in the set
//   alive(v):  some member extends or equals v
// and library-built nodes carry a rank claim that holds by construction.

#include "wfi/bitstring.hpp"
#include "wfi/finite_tree.hpp"
#include "wfi/ordinal.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wfi {

namespace lazy {

class Node {
public:
    virtual ~Node() = default;
    virtual bool member(std::string_view v) const = 0;
    virtual bool alive(std::string_view v) const = 0;
    virtual std::string describe() const = 0;
    /// Well-founded by construction (all library nodes except path and user oracles).
    virtual bool well_founded() const { return true; }
    virtual bool user_supplied() const { return false; }

    bool terminal(std::string_view v) const {
        if (!member(v)) {
            return false;
        }
        std::string ext(v);
        ext.push_back('0');
        if (alive(ext)) {
            return false;
        }
        ext.back() = '1';
        return !alive(ext);
    }
    bool nonempty() const { return alive(""); }
};

using NodePtr = std::shared_ptr<const Node>;

inline bool all_of_bit(std::string_view v, char bit) {
    for (char c : v) {
        if (c != bit) {
            return false;
        }
    }
    return true;
}

class FiniteNode final : public Node {
public:
    explicit FiniteNode(const FiniteTree& t) : tree_(t) {
        for (const auto& s : t) {
            lex_.insert(s.str());
        }
    }
    bool member(std::string_view v) const override { return lex_.count(std::string(v)) != 0; }
    bool alive(std::string_view v) const override {
        auto it = lex_.lower_bound(std::string(v));
        return it != lex_.end() && std::string_view(*it).substr(0, v.size()) == v;
    }
    std::string describe() const override {
        std::string out = "fin{";
        bool first = true;
        for (const auto& s : lex_) {
            out += (first ? "\"" : ",\"") + s + "\"";
            first = false;
        }
        return out + "}";
    }

private:
    FiniteTree tree_;
    std::set<std::string> lex_;
};

/// {0, 00, ..., 0^n}
class ChainNode final : public Node {
public:
    explicit ChainNode(std::uint64_t n) : n_(n) {}
    bool member(std::string_view v) const override { return !v.empty() && v.size() <= n_ && all_of_bit(v, '0'); }
    bool alive(std::string_view v) const override { return n_ > 0 && v.size() <= n_ && all_of_bit(v, '0'); }
    std::string describe() const override { return "chain(" + std::to_string(n_) + ")"; }

private:
    std::uint64_t n_;
};

/// Nonempty prefixes of an infinite sequence: an infinite chain.
class PathNode final : public Node {
public:
    explicit PathNode(InfiniteSequence y) : y_(std::move(y)) {}
    bool member(std::string_view v) const override { return !v.empty() && alive(v); }
    bool alive(std::string_view v) const override {
        for (std::size_t i = 0; i < v.size(); ++i) {
            if ((v[i] == '1') != y_(i)) {
                return false;
            }
        }
        return true;
    }
    std::string describe() const override { return "path(" + y_.description() + ")"; }
    bool well_founded() const override { return false; }

private:
    InfiniteSequence y_;
};

/// X_y: strings that leave y exactly at their last bit.
class AntichainNode final : public Node {
public:
    explicit AntichainNode(InfiniteSequence y) : y_(std::move(y)) {}
    bool member(std::string_view v) const override {
        if (v.empty()) {
            return false;
        }
        return first_mismatch(v) == v.size() - 1;
    }
    bool alive(std::string_view v) const override {
        auto i = first_mismatch(v);
        return i == v.size() || i == v.size() - 1;
    }
    std::string describe() const override { return "antichain_of(" + y_.description() + ")"; }
    const InfiniteSequence& sequence() const { return y_; }

private:
    std::size_t first_mismatch(std::string_view v) const {
        for (std::size_t i = 0; i < v.size(); ++i) {
            if ((v[i] == '1') != y_(i)) {
                return i;
            }
        }
        return v.size();
    }
    InfiniteSequence y_;
};

/// {1^k 0^(i+1) : i <= k}: infinite rank, every chain finite.
class StaircaseNode final : public Node {
public:
    bool member(std::string_view v) const override {
        auto [ones, zeros, ok] = split(v);
        return ok && zeros >= 1 && zeros <= ones + 1;
    }
    bool alive(std::string_view v) const override {
        auto [ones, zeros, ok] = split(v);
        return ok && zeros <= ones + 1;
    }
    std::string describe() const override { return "staircase"; }

private:
    struct Split {
        std::size_t ones, zeros;
        bool ok;
    };
    static Split split(std::string_view v) {
        std::size_t k = 0;
        while (k < v.size() && v[k] == '1') {
            ++k;
        }
        return {k, v.size() - k, all_of_bit(v.substr(k), '0')};
    }
};

class GraftNode final : public Node {
public:
    GraftNode(BitString stem, NodePtr child) : stem_(std::move(stem)), child_(std::move(child)) {}
    bool member(std::string_view v) const override {
        return v.size() >= stem_.size() && v.substr(0, stem_.size()) == stem_.str() && child_->member(v.substr(stem_.size()));
    }
    bool alive(std::string_view v) const override {
        if (v.size() <= stem_.size()) {
            return std::string_view(stem_.str()).substr(0, v.size()) == v && child_->nonempty();
        }
        return v.substr(0, stem_.size()) == stem_.str() && child_->alive(v.substr(stem_.size()));
    }
    std::string describe() const override { return "graft(\"" + stem_.str() + "\"," + child_->describe() + ")"; }
    bool well_founded() const override { return child_->well_founded(); }
    bool user_supplied() const override { return child_->user_supplied(); }

private:
    BitString stem_;
    NodePtr child_;
};

class UnionNode final : public Node {
public:
    UnionNode(NodePtr a, NodePtr b, std::string label = {}) : a_(std::move(a)), b_(std::move(b)), label_(std::move(label)) {}
    bool member(std::string_view v) const override { return a_->member(v) || b_->member(v); }
    bool alive(std::string_view v) const override { return a_->alive(v) || b_->alive(v); }
    std::string describe() const override {
        return label_.empty() ? "union(" + a_->describe() + "," + b_->describe() + ")" : label_;
    }
    bool well_founded() const override { return a_->well_founded() && b_->well_founded(); }
    bool user_supplied() const override { return a_->user_supplied() || b_->user_supplied(); }

private:
    NodePtr a_, b_;
    std::string label_;
};

/// Levels S, T, T, ..., T (levels.size() - 1 copies of T above S): a copy of the next level sits
/// above every terminal node of the previous one. tree_sum is two levels, tree_pow repeats one tree.
/// Lower levels must be well-founded so that alive prefixes reach a terminal node.
class StackNode final : public Node {
public:
    StackNode(std::vector<NodePtr> levels, std::string label) : levels_(std::move(levels)), label_(std::move(label)) {
        for (std::size_t i = 1; i < levels_.size(); ++i) {
            if (levels_[i]->member("")) {
                throw std::invalid_argument("tree sum: upper operand contains the empty string");
            }
        }
    }

    bool member(std::string_view v) const override {
        auto starts = level_starts(v);
        const auto top = levels_.size() - 1;
        for (std::size_t a : starts[top]) {
            if (levels_[top]->member(v.substr(a))) {
                return true;
            }
        }
        return false;
    }

    bool alive(std::string_view v) const override {
        auto starts = level_starts(v);
        for (std::size_t j = 0; j < levels_.size(); ++j) {
            for (std::size_t a : starts[j]) {
                if (!alive_from_level(j, v.substr(a))) {
                    continue;
                }
                return true;
            }
        }
        return false;
    }

    std::string describe() const override { return label_; }
    bool user_supplied() const override {
        for (const auto& l : levels_) {
            if (l->user_supplied()) {
                return true;
            }
        }
        return false;
    }

private:
    // The rest of v (read from level j on) can still be completed to a member of the whole stack.
    bool alive_from_level(std::size_t j, std::string_view rest) const {
        if (!levels_[j]->alive(rest)) {
            return false;
        }
        for (std::size_t k = j + 1; k < levels_.size(); ++k) {
            if (!levels_[k]->nonempty()) {
                return false;
            }
        }
        return true;
    }

    // starts[j] = positions where level j may begin (level 0 begins at 0).
    std::vector<std::vector<std::size_t>> level_starts(std::string_view v) const {
        std::vector<std::vector<std::size_t>> starts(levels_.size());
        starts[0].push_back(0);
        for (std::size_t j = 1; j < levels_.size(); ++j) {
            std::vector<bool> seen(v.size() + 1, false);
            for (std::size_t a : starts[j - 1]) {
                for (std::size_t b = a; b <= v.size(); ++b) {
                    if (!seen[b] && levels_[j - 1]->terminal(v.substr(a, b - a))) {
                        seen[b] = true;
                    }
                }
            }
            for (std::size_t b = 0; b <= v.size(); ++b) {
                if (seen[b]) {
                    starts[j].push_back(b);
                }
            }
        }
        return starts;
    }

    std::vector<NodePtr> levels_;
    std::string label_;
};

class OracleNode final : public Node {
public:
    OracleNode(std::function<bool(const BitString&)> fn, std::string label) : fn_(std::move(fn)), label_(std::move(label)) {}
    bool member(std::string_view v) const override { return fn_(BitString(v)); }
    bool alive(std::string_view) const override { return true; }
    std::string describe() const override { return label_; }
    bool well_founded() const override { return false; }
    bool user_supplied() const override { return true; }

private:
    std::function<bool(const BitString&)> fn_;
    std::string label_;
};

NodePtr canonical_node(const Ordinal& r);

/// Rank w^e with e > 0: disjoint copies of the canonical trees for the fundamental sequence,
/// the n-th grafted under the anchor 1^n 0.
class LimitNode final : public Node {
public:
    explicit LimitNode(Ordinal r) : r_(std::move(r)) {}
    bool member(std::string_view v) const override {
        auto [n, ok] = anchor(v);
        return ok && child(n)->member(v.substr(n + 1));
    }
    bool alive(std::string_view v) const override {
        auto [n, ok] = anchor(v);
        if (!ok) {
            return all_of_bit(v, '1');
        }
        return child(n)->alive(v.substr(n + 1));
    }
    std::string describe() const override { return "canonical(" + to_string(r_) + ")"; }

private:
    struct Anchor {
        std::size_t n;
        bool ok;
    };
    static Anchor anchor(std::string_view v) {
        std::size_t n = 0;
        while (n < v.size() && v[n] == '1') {
            ++n;
        }
        return {n, n < v.size()};
    }
    NodePtr child(std::size_t n) const { return canonical_node(fundamental_sequence(r_, n)); }

    Ordinal r_;
};

inline NodePtr canonical_node(const Ordinal& r) {
    static std::mutex mutex;
    static std::map<Ordinal, NodePtr> cache;
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(r); it != cache.end()) {
            return it->second;
        }
    }
    NodePtr built;
    const std::string label = "canonical(" + to_string(r) + ")";
    if (r.is_finite()) {
        built = std::make_shared<ChainNode>(r.finite_value() + 1);
    } else if (is_additively_closed(r)) {
        built = std::make_shared<LimitNode>(r);
    } else {
        // r = A + w^e with w^e the last unit term: S u S^T with rank(S) = w^e, rank(T) = A.
        auto terms = r.terms();
        Ordinal unit = omega_pow(terms.back().exponent);
        if (--terms.back().coefficient == 0) {
            terms.pop_back();
        }
        Ordinal rest = Ordinal::from_terms(std::move(terms));
        NodePtr s = canonical_node(unit);
        NodePtr t = canonical_node(rest);
        auto sum = std::make_shared<StackNode>(std::vector<NodePtr>{s, t}, "sum");
        built = std::make_shared<UnionNode>(s, sum, label);
    }
    std::lock_guard lock(mutex);
    return cache.emplace(r, built).first->second;
}

}  // namespace lazy

/// A possibly infinite set of strings with decidable membership.
class LazyTree {
public:
    explicit LazyTree(lazy::NodePtr node, std::optional<Ordinal> rank_claim = std::nullopt, bool claim_checked = true)
        : node_(std::move(node)), rank_claim_(std::move(rank_claim)), claim_checked_(claim_checked) {}

    bool contains(const BitString& s) const { return node_->member(s.str()); }
    bool alive(const BitString& s) const { return node_->alive(s.str()); }
    bool is_terminal(const BitString& s) const { return node_->terminal(s.str()); }

    const std::optional<Ordinal>& rank_claim() const { return rank_claim_; }
    /// False for claims attached by a caller rather than derived from the construction.
    bool claim_checked() const { return claim_checked_; }
    bool user_supplied() const { return node_->user_supplied(); }
    bool well_founded_by_construction() const { return node_->well_founded(); }
    std::string describe() const { return node_->describe(); }
    const lazy::NodePtr& node() const { return node_; }

private:
    lazy::NodePtr node_;
    std::optional<Ordinal> rank_claim_;
    bool claim_checked_ = true;
};

inline LazyTree lazy_finite(const FiniteTree& t) { return LazyTree(std::make_shared<lazy::FiniteNode>(t), Ordinal(rank_finite(t))); }

/// n nodes 0, 00, ..., 0^n; rank n-1.
inline LazyTree lazy_chain(std::uint64_t n) {
    return LazyTree(std::make_shared<lazy::ChainNode>(n), Ordinal(n == 0 ? 0 : n - 1));
}

inline LazyTree canonical_tree(const Ordinal& r) { return LazyTree(lazy::canonical_node(r), r); }

inline LazyTree antichain_of_path(InfiniteSequence y) { return LazyTree(std::make_shared<lazy::AntichainNode>(std::move(y)), Ordinal(0)); }

/// All nonempty prefixes of y; ill-founded.
inline LazyTree path_tree(InfiniteSequence y) { return LazyTree(std::make_shared<lazy::PathNode>(std::move(y))); }

/// {1^k 0^(i+1) : i <= k}, of rank w (not attained).
inline LazyTree staircase_tree() { return LazyTree(std::make_shared<lazy::StaircaseNode>(), Ordinal::omega()); }

/// User membership oracle; a rank claim given here is recorded as unchecked.
inline LazyTree oracle_tree(std::function<bool(const BitString&)> fn, std::string label, std::optional<Ordinal> claim = std::nullopt) {
    return LazyTree(std::make_shared<lazy::OracleNode>(std::move(fn), std::move(label)), std::move(claim), false);
}

inline LazyTree graft(const BitString& stem, const LazyTree& t) {
    return LazyTree(std::make_shared<lazy::GraftNode>(stem, t.node()), t.rank_claim(), t.claim_checked());
}

inline LazyTree tree_union(const LazyTree& a, const LazyTree& b) { return LazyTree(std::make_shared<lazy::UnionNode>(a.node(), b.node())); }

inline LazyTree tree_sum(const LazyTree& s, const LazyTree& t) {
    std::optional<Ordinal> claim;
    if (s.node()->nonempty()) {
        claim = t.rank_claim();
    } else {
        claim = Ordinal(0);
    }
    auto label = "sum(" + s.describe() + "," + t.describe() + ")";
    return LazyTree(std::make_shared<lazy::StackNode>(std::vector<lazy::NodePtr>{s.node(), t.node()}, label), claim,
                    s.claim_checked() && t.claim_checked());
}

inline LazyTree tree_pow(const LazyTree& t, std::uint64_t n) {
    if (n == 0) {
        throw std::invalid_argument("tree_pow: exponent must be at least 1");
    }
    if (n == 1) {
        return t;
    }
    std::vector<lazy::NodePtr> levels(n, t.node());
    auto label = "pow(" + t.describe() + "," + std::to_string(n) + ")";
    return LazyTree(std::make_shared<lazy::StackNode>(std::move(levels), label), t.rank_claim(), t.claim_checked());
}

/// { s in T : |s| <= depth }, enumerated by a depth-first walk pruned by liveness.
inline FiniteTree truncate(const LazyTree& t, std::size_t depth) {
    FiniteTree out;
    std::string cur;
    std::function<void()> walk = [&] {
        if (!t.node()->alive(cur)) {
            return;
        }
        if (t.node()->member(cur)) {
            out.insert(BitString(cur));
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

struct ProbeResult {
    std::uint64_t max_chain_length = 0;
    std::vector<BitString> chain;  // shortest element first
    bool path_suspect = false;     // chain length reached the threshold
    std::size_t depth = 0;
};

/// Longest prefix chain inside the depth-d truncation. With no threshold, the depth is used.
inline ProbeResult wf_probe(const LazyTree& x, std::size_t depth, std::optional<std::uint64_t> threshold = std::nullopt) {
    if (depth < 1) {
        throw std::invalid_argument("wf_probe: depth must be at least 1");
    }
    auto trunc = truncate(x, depth);
    ProbeResult r;
    r.depth = depth;
    r.chain = longest_chain(trunc);
    r.max_chain_length = r.chain.size();
    r.path_suspect = r.max_chain_length >= threshold.value_or(depth);
    return r;
}

}  // namespace wfi
