#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>
#include <thread>

using namespace wfi;

namespace {

std::set<std::string> members_up_to(const LazyTree& t, std::size_t depth) { return oracle::as_strings(truncate(t, depth)); }

/// Every string of length <= depth, tested one by one: the reference for the pruned truncation walk.
std::set<std::string> brute_members(const LazyTree& t, std::size_t depth) {
    std::set<std::string> out;
    for (std::size_t len = 0; len <= depth; ++len) {
        for (std::uint64_t v = 0; v < (std::uint64_t{1} << len); ++v) {
            std::string s(len, '0');
            for (std::size_t i = 0; i < len; ++i) {
                s[i] = (v >> (len - 1 - i) & 1u) ? '1' : '0';
            }
            if (t.contains(BitString(s))) {
                out.insert(s);
            }
        }
    }
    return out;
}

}  // namespace

TEST(CanonicalTree, Examples) {
    EXPECT_EQ(truncate(canonical_tree(Ordinal(0)), 8).size(), 1u);
    EXPECT_EQ(rank_finite(truncate(canonical_tree(Ordinal(0)), 8)), 0u);
    auto three = truncate(canonical_tree(Ordinal(3)), 10);
    EXPECT_EQ(three.size(), 4u);
    EXPECT_EQ(rank_finite(three), 3u);
    std::uint64_t prev = 0;
    for (std::size_t d : {4, 8, 16}) {
        auto r = rank_finite(truncate(canonical_tree(Ordinal::omega()), d));
        EXPECT_GT(r, prev) << "depth " << d;
        prev = r;
    }
}

TEST(CanonicalTree, TruncationRanks) {
    const std::vector<Ordinal> ranks{Ordinal(0), Ordinal(1), Ordinal(5), Ordinal::omega(), ord_add(Ordinal::omega(), Ordinal(2)),
                                     ord_mul_nat(Ordinal::omega(), 2), omega_pow(Ordinal(2))};
    for (const auto& r : ranks) {
        auto t = canonical_tree(r);
        EXPECT_FALSE(t.contains(BitString()));
        EXPECT_EQ(t.rank_claim(), r);
        std::uint64_t prev = 0;
        for (std::size_t d = 1; d <= 14; ++d) {
            auto trunc = truncate(t, d);
            auto rank = rank_finite(trunc);
            ASSERT_GE(rank, prev) << to_string(r) << " depth " << d;
            if (r.is_finite()) {
                ASSERT_LE(rank, r.finite_value());
            }
            prev = rank;
        }
        if (r.is_finite()) {
            EXPECT_EQ(prev, r.finite_value());
        }
    }
}

TEST(CanonicalTree, PrunedTruncationMatchesBruteForce) {
    for (const auto& r : {Ordinal(4), Ordinal::omega(), ord_add(Ordinal::omega(), Ordinal(1)), ord_mul_nat(Ordinal::omega(), 2)}) {
        EXPECT_EQ(members_up_to(canonical_tree(r), 12), brute_members(canonical_tree(r), 12)) << to_string(r);
    }
}

TEST(LazyAlgebra, AgreesWithFiniteOperations) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 100; ++i) {
        auto s = oracle::random_tree(rng, 10);
        auto t = oracle::random_tree(rng, 10, false);
        const std::size_t depth = 20;
        EXPECT_EQ(members_up_to(tree_sum(lazy_finite(s), lazy_finite(t)), depth), oracle::as_strings(tree_sum(s, t)));
        EXPECT_EQ(members_up_to(tree_union(lazy_finite(s), lazy_finite(t)), depth), oracle::as_strings(tree_union(s, t)));
        EXPECT_EQ(members_up_to(graft(BitString("10"), lazy_finite(s)), depth), oracle::as_strings(graft(BitString("10"), s)));
        EXPECT_EQ(members_up_to(tree_pow(lazy_finite(t), 3), 40), oracle::as_strings(tree_pow(t, 3)));
    }
    EXPECT_THROW(tree_pow(lazy_chain(2), 0), std::invalid_argument);
}

TEST(LazyAlgebra, RankClaimsOfSums) {
    auto s = tree_sum(lazy_chain(3), canonical_tree(Ordinal::omega()));
    EXPECT_EQ(s.rank_claim(), Ordinal::omega());
    EXPECT_TRUE(s.claim_checked());
    auto user = oracle_tree([](const BitString& b) { return b.size() == 2; }, "pairs", Ordinal(0));
    EXPECT_FALSE(user.claim_checked());
}

TEST(AntichainOfPath, Examples) {
    auto zeros = antichain_of_path(InfiniteSequence::parse("(0)"));
    EXPECT_EQ(members_up_to(zeros, 3), (std::set<std::string>{"1", "01", "001"}));
    auto alt = antichain_of_path(InfiniteSequence::parse("(01)"));
    EXPECT_TRUE(alt.contains(BitString("1")));
    EXPECT_FALSE(alt.contains(BitString("01")));
    EXPECT_FALSE(alt.contains(BitString("")));
}

TEST(AntichainOfPath, IsAnAntichain) {
    for (const char* spec : {"(0)", "(1)", "1(01)", "00(110)", "(0111)"}) {
        auto x = truncate(antichain_of_path(InfiniteSequence::parse(spec)), 14);
        for (const auto& s : x) {
            for (const auto& t : x) {
                if (s != t) {
                    ASSERT_TRUE(incomparable(s, t)) << spec << ": " << s.str() << " " << t.str();
                }
            }
        }
        EXPECT_EQ(members_up_to(antichain_of_path(InfiniteSequence::parse(spec)), 12),
                  brute_members(antichain_of_path(InfiniteSequence::parse(spec)), 12));
    }
}

TEST(AntichainOfPath, UnboundednessWitness) {
    // y_k agrees with y below k and differs at k, so n_k = k and y | (k + 1) lies in X_{y_k}
    const auto y = InfiniteSequence::parse("1(011)");
    for (std::uint64_t k = 0; k < 20; ++k) {
        auto yk = InfiniteSequence(
            [y, k](std::uint64_t i) { return i == k ? !y(i) : y(i); }, "y_" + std::to_string(k));
        std::uint64_t nk = 0;
        while (yk(nk) == y(nk)) {
            ++nk;
        }
        ASSERT_EQ(nk, k);
        EXPECT_TRUE(antichain_of_path(yk).contains(y.prefix(nk + 1)));
    }
}

TEST(WfProbe, Examples) {
    EXPECT_EQ(wf_probe(canonical_tree(Ordinal(2)), 10).max_chain_length, 3u);
    auto path = wf_probe(path_tree(InfiniteSequence::parse("(0)")), 5);
    EXPECT_EQ(path.max_chain_length, 5u);
    EXPECT_TRUE(path.path_suspect);
    for (std::size_t d : {1, 4, 9}) {
        EXPECT_EQ(wf_probe(antichain_of_path(InfiniteSequence::parse("(10)")), d).max_chain_length, 1u);
    }
    EXPECT_THROW(wf_probe(lazy_chain(2), 0), std::invalid_argument);
}

TEST(WfProbe, StaircaseHasFiniteChainsOnly) {
    auto st = staircase_tree();
    EXPECT_TRUE(st.well_founded_by_construction());
    for (std::size_t d = 2; d <= 16; d += 2) {
        auto probe = wf_probe(st, d);
        // the column 1^k 0^(i+1) has k + 1 elements and length up to 2k + 1
        EXPECT_EQ(probe.max_chain_length, (d + 1) / 2);
        EXPECT_FALSE(probe.path_suspect);
    }
}

TEST(LazyTree, ConcurrentTruncation) {
    auto t = canonical_tree(omega_pow(Ordinal(2)));
    auto expected = members_up_to(t, 14);
    std::vector<std::set<std::string>> results(8);
    std::vector<std::thread> threads;
    for (std::size_t i = 0; i < results.size(); ++i) {
        threads.emplace_back([&, i] { results[i] = members_up_to(canonical_tree(omega_pow(Ordinal(2))), 14); });
    }
    for (auto& th : threads) {
        th.join();
    }
    for (const auto& r : results) {
        EXPECT_EQ(r, expected);
    }
}

TEST(TreeExpression, Evaluates) {
    auto v = parse_tree_expr("union(chain(3),graft(1,chain(2)))");
    ASSERT_TRUE(v.finite.has_value());
    EXPECT_EQ(rank_finite(*v.finite), 2u);
    auto c = parse_tree_expr("canonical(w^2+1)");
    EXPECT_FALSE(c.finite.has_value());
    EXPECT_EQ(c.lazy.rank_claim(), ord_add(omega_pow(Ordinal(2)), Ordinal(1)));
    EXPECT_THROW(parse_tree_expr("chain("), std::exception);
}
