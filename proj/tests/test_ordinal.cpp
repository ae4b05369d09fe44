#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace wfi;

namespace {

Ordinal w() { return Ordinal::omega(); }

/// w*a + b
Ordinal wab(std::uint64_t a, std::uint64_t b) { return ord_add(ord_mul_nat(w(), a), Ordinal(b)); }

/// w^2*c + w*a + b
Ordinal below_w3(std::uint64_t c, std::uint64_t a, std::uint64_t b) { return ord_add(ord_mul_nat(omega_pow(Ordinal(2)), c), wab(a, b)); }

}  // namespace

TEST(OrdinalCompare, Examples) {
    EXPECT_EQ(ord_compare(Ordinal(0), Ordinal(0)), Cmp::EQ);
    EXPECT_EQ(ord_compare(w(), Ordinal(3)), Cmp::GT);
    EXPECT_EQ(ord_compare(wab(2, 1), wab(2, 0)), Cmp::GT);
    EXPECT_EQ(ord_compare(Ordinal(5), omega_pow(w())), Cmp::LT);
}

TEST(OrdinalAdd, Examples) {
    EXPECT_EQ(ord_add(Ordinal(1), w()), w());
    EXPECT_EQ(to_string(ord_add(w(), Ordinal(1))), "w^1*1 + 1");
    EXPECT_EQ(ord_add(wab(2, 3), wab(3, 0)), wab(5, 0));
    EXPECT_EQ(ord_add(Ordinal(0), wab(1, 4)), wab(1, 4));
    EXPECT_EQ(ord_add(wab(1, 4), Ordinal(0)), wab(1, 4));
}

TEST(OrdinalAdd, MatchesConcatenatedWellOrders) {
    for (std::uint64_t a1 = 0; a1 < 10; ++a1) {
        for (std::uint64_t b1 = 0; b1 < 6; ++b1) {
            for (std::uint64_t a2 = 0; a2 + a1 < 10; ++a2) {
                for (std::uint64_t b2 = 0; b2 < 6; ++b2) {
                    auto order = oracle::WellOrder::of(a1, b1).then(oracle::WellOrder::of(a2, b2));
                    ASSERT_EQ(ord_add(wab(a1, b1), wab(a2, b2)), order.type()) << a1 << " " << b1 << " " << a2 << " " << b2;
                }
            }
        }
    }
}

TEST(OrdinalAdd, AssociativeBelowOmegaCubed) {
    std::mt19937_64 rng(3);
    auto pick = [&] { return below_w3(rng() % 3, rng() % 4, rng() % 5); };
    for (int i = 0; i < 2000; ++i) {
        auto a = pick(), b = pick(), c = pick();
        ASSERT_EQ(ord_add(ord_add(a, b), c), ord_add(a, ord_add(b, c)));
    }
}

TEST(OrdinalMul, Examples) {
    EXPECT_EQ(omega_pow(Ordinal(0)), Ordinal(1));
    EXPECT_EQ(ord_mul_nat(wab(1, 1), 2), wab(2, 1));
    EXPECT_EQ(to_string(omega_pow(Ordinal(2))), "w^2*1");
    EXPECT_EQ(ord_mul_nat(wab(3, 2), 0), Ordinal(0));
}

TEST(OrdinalMul, MatchesRepeatedWellOrders) {
    for (std::uint64_t a = 0; a < 5; ++a) {
        for (std::uint64_t b = 0; b < 5; ++b) {
            for (std::uint64_t n = 1; n < 5; ++n) {
                oracle::WellOrder order;
                for (std::uint64_t i = 0; i < n; ++i) {
                    order = order.then(oracle::WellOrder::of(a, b));
                }
                ASSERT_EQ(ord_mul_nat(wab(a, b), n), order.type());
            }
        }
    }
}

TEST(AdditiveClosure, Examples) {
    EXPECT_TRUE(is_additively_closed(w()));
    EXPECT_FALSE(is_additively_closed(wab(2, 0)));
    EXPECT_TRUE(is_additively_closed(Ordinal(1)));
    EXPECT_TRUE(is_additively_closed(Ordinal(0)));
    EXPECT_FALSE(is_additively_closed(Ordinal(2)));
}

TEST(AdditiveClosure, AgreesWithExhaustiveGrid) {
    // a is closed iff b + c < a for all b, c < a drawn from a grid that reaches every CNF shape below a
    for (std::uint64_t c2 = 0; c2 < 3; ++c2) {
        for (std::uint64_t c1 = 0; c1 < 3; ++c1) {
            for (std::uint64_t c0 = 0; c0 < 3; ++c0) {
                const Ordinal a = below_w3(c2, c1, c0);
                std::vector<Ordinal> below;
                for (std::uint64_t x2 = 0; x2 < 4; ++x2) {
                    for (std::uint64_t x1 = 0; x1 < 4; ++x1) {
                        for (std::uint64_t x0 = 0; x0 < 4; ++x0) {
                            auto b = below_w3(x2, x1, x0);
                            if (b < a) {
                                below.push_back(b);
                            }
                        }
                    }
                }
                bool closed = true;
                for (const auto& b : below) {
                    for (const auto& c : below) {
                        closed = closed && ord_add(b, c) < a;
                    }
                }
                EXPECT_EQ(is_additively_closed(a), closed) << to_string(a);
            }
        }
    }
}

TEST(FundamentalSequence, Examples) {
    EXPECT_EQ(fundamental_sequence(w(), 3), Ordinal(3));
    EXPECT_EQ(fundamental_sequence(omega_pow(Ordinal(2)), 2), wab(2, 0));
    EXPECT_EQ(fundamental_sequence(wab(2, 0), 4), wab(1, 4));
    EXPECT_THROW(fundamental_sequence(Ordinal(0), 1), std::domain_error);
    EXPECT_THROW(fundamental_sequence(wab(1, 1), 1), std::domain_error);
}

TEST(FundamentalSequence, IncreasingAndCofinal) {
    const std::vector<Ordinal> limits{w(), wab(3, 0), omega_pow(Ordinal(2)), below_w3(1, 2, 0), omega_pow(w()), omega_pow(wab(1, 1)),
                                      omega_pow(omega_pow(Ordinal(2)))};
    for (const auto& a : limits) {
        Ordinal prev = fundamental_sequence(a, 0);
        EXPECT_LT(prev, a);
        for (std::uint64_t n = 1; n < 12; ++n) {
            auto next = fundamental_sequence(a, n);
            ASSERT_LT(prev, next) << to_string(a) << " at " << n;
            ASSERT_LT(next, a);
            prev = next;
        }
    }
    // cofinal below w^2: every w*k + j is passed by some element
    for (std::uint64_t k = 0; k < 6; ++k) {
        EXPECT_LT(wab(k, 9), fundamental_sequence(omega_pow(Ordinal(2)), k + 1));
    }
}

TEST(OrdinalText, RoundTrip) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 300; ++i) {
        auto a = below_w3(rng() % 3, rng() % 4, rng() % 5);
        if (rng() % 4 == 0) {
            a = ord_add(omega_pow(ord_add(w(), Ordinal(rng() % 3))), a);
        }
        ASSERT_EQ(parse_ordinal(to_string(a)), a) << to_string(a);
    }
    EXPECT_EQ(to_string(Ordinal(7)), "7");
    EXPECT_EQ(to_string(Ordinal(0)), "0");
}

TEST(OrdinalText, NormalizationIsIdempotent) {
    auto a = Ordinal::from_terms({{Ordinal(1), 2}, {Ordinal(0), 3}});
    EXPECT_EQ(Ordinal::from_terms(a.terms()), a);
    EXPECT_THROW(Ordinal::from_terms({{Ordinal(0), 1}, {Ordinal(1), 1}}), std::invalid_argument);
    EXPECT_THROW(Ordinal::from_terms({{Ordinal(1), 0}}), std::invalid_argument);
    EXPECT_EQ(parse_ordinal("1 + w"), w());
}
