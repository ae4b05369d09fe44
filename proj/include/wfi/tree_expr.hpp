#pragma once

// Tree descriptors:
//   chain(n) | fin{"0","10",...} | graft(s, e) | sum(e, e) | pow(e, n) | union(e, ...)
//   canonical(r) | antichain_of(y) | path(y) | staircase
// where r is an ordinal such as w^2+1 and y a sequence spec such as (0) or 1(01).

#include "wfi/dsl.hpp"
#include "wfi/lazy_tree.hpp"

#include <optional>
#include <string>

namespace wfi {

struct TreeValue {
    LazyTree lazy;
    std::optional<FiniteTree> finite;  // present when every part is finite
};

namespace detail {

inline TreeValue finite_value(FiniteTree t) { return {lazy_finite(t), std::move(t)}; }

inline TreeValue eval_tree(const dsl::Expr& e) {
    using K = dsl::Expr::Kind;
    if (e.kind == K::Name && e.text == "staircase") {
        return {staircase_tree(), std::nullopt};
    }
    if (e.kind == K::Braces && (e.text == "fin" || e.text == "strs")) {
        FiniteTree t;
        for (const auto& a : e.args) {
            t.insert(BitString(a.bits()));
        }
        return finite_value(std::move(t));
    }
    if (e.kind != K::Call) {
        throw dsl::ParseError("expected a tree expression, got '" + dsl::render(e) + "'", e.position);
    }
    const auto& f = e.text;
    if (f == "chain") {
        e.expect_args(1);
        return finite_value(chain_tree(e.args[0].number()));
    }
    if (f == "graft") {
        e.expect_args(2);
        BitString stem(e.args[0].bits());
        auto t = eval_tree(e.args[1]);
        return {graft(stem, t.lazy), t.finite ? std::optional<FiniteTree>(graft(stem, *t.finite)) : std::nullopt};
    }
    if (f == "sum") {
        e.expect_args(2);
        auto s = eval_tree(e.args[0]);
        auto t = eval_tree(e.args[1]);
        if (t.lazy.contains(BitString())) {
            throw dsl::ParseError("sum: the right operand contains the empty string", e.args[1].position);
        }
        if (s.finite && t.finite) {
            return {tree_sum(s.lazy, t.lazy), tree_sum(*s.finite, *t.finite)};
        }
        return {tree_sum(s.lazy, t.lazy), std::nullopt};
    }
    if (f == "pow") {
        e.expect_args(2);
        auto t = eval_tree(e.args[0]);
        const auto n = e.args[1].number();
        if (n == 0) {
            throw dsl::ParseError("pow: exponent must be at least 1", e.args[1].position);
        }
        if (t.lazy.contains(BitString())) {
            throw dsl::ParseError("pow: the tree contains the empty string", e.args[0].position);
        }
        return {tree_pow(t.lazy, n), t.finite ? std::optional<FiniteTree>(tree_pow(*t.finite, n)) : std::nullopt};
    }
    if (f == "union") {
        if (e.args.empty()) {
            return finite_value(FiniteTree{});
        }
        auto acc = eval_tree(e.args[0]);
        for (std::size_t i = 1; i < e.args.size(); ++i) {
            auto next = eval_tree(e.args[i]);
            std::optional<FiniteTree> fin;
            if (acc.finite && next.finite) {
                fin = tree_union(*acc.finite, *next.finite);
            }
            acc = {tree_union(acc.lazy, next.lazy), std::move(fin)};
        }
        return acc;
    }
    if (f == "canonical") {
        e.expect_args(1);
        auto r = parse_ordinal(dsl::render(e.args[0]));
        return {canonical_tree(r), std::nullopt};
    }
    if (f == "antichain_of") {
        e.expect_args(1);
        return {antichain_of_path(InfiniteSequence::parse(dsl::sequence_spec(e.args[0]))), std::nullopt};
    }
    if (f == "path") {
        e.expect_args(1);
        return {path_tree(InfiniteSequence::parse(dsl::sequence_spec(e.args[0]))), std::nullopt};
    }
    throw dsl::ParseError("unknown tree constructor '" + f + "'", e.position);
}

}  // namespace detail

inline TreeValue parse_tree_expr(std::string_view text) { return detail::eval_tree(dsl::parse(text)); }

}  // namespace wfi
