#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace wfi;

namespace {

Rational q(std::int64_t p, std::int64_t d) { return make_rational(p, d); }

ExtRational x(std::int64_t p, std::int64_t d = 1) { return ExtRational(q(p, d)); }

}  // namespace

TEST(SetFunction, ValidateFindsEachAxiom) {
    auto bad_empty = SetFunction::tabulate(2, [](Mask) { return ExtRational(1); });
    EXPECT_EQ(bad_empty.validate()->axiom, "empty");
    auto bad_mono = SetFunction::tabulate(2, [](Mask m) { return m == 3 ? x(0) : x(m ? 1 : 0); });
    EXPECT_EQ(bad_mono.validate()->axiom, "monotone");
    auto bad_sub = SetFunction::tabulate(2, [](Mask m) { return x(std::popcount(m) * std::popcount(m)); });
    auto v = bad_sub.validate();
    ASSERT_TRUE(v);
    EXPECT_EQ(v->axiom, "subadditive");
    EXPECT_EQ(v->a | v->b, 3u);
    EXPECT_THROW(Submeasure{bad_sub}, SubmeasureError);
    EXPECT_THROW(SetFunction(21), std::invalid_argument);
}

TEST(SetFunction, ValidateAgreesWithDirectCheck) {
    std::mt19937_64 rng(51);
    for (int i = 0; i < 300; ++i) {
        const std::size_t n = rng() % 5 + 1;
        auto f = SetFunction::tabulate(n, [&](Mask m) { return m == 0 ? x(0) : x(static_cast<std::int64_t>(rng() % 4 + 1)); });
        ASSERT_EQ(f.is_submeasure(), oracle::is_submeasure(f));
    }
}

TEST(Pi1, Examples) {
    EXPECT_EQ(dyadic_ceiling(Rational(1)), 1);
    EXPECT_EQ(dyadic_ceiling(q(3, 10)), q(1, 2));
    EXPECT_EQ(dyadic_ceiling(Rational(0)), 0);
    EXPECT_EQ(dyadic_ceiling(q(1, 4)), q(1, 4));
    EXPECT_EQ(dyadic_ceiling(q(5, 1)), 8);
    EXPECT_TRUE(dyadic_ceiling(ExtRational::infinity()).is_infinite());
    std::mt19937_64 rng(52);
    for (int i = 0; i < 500; ++i) {
        auto v = q(static_cast<std::int64_t>(rng() % 1000), static_cast<std::int64_t>(rng() % 999 + 1));
        ASSERT_EQ(dyadic_ceiling(v), oracle::dyadic_ceiling(v));
    }
}

TEST(Pi2, SingletonCarrierEqualsPi1) {
    for (std::int64_t p : {0, 1, 3, 7, 12}) {
        auto psi = Submeasure::additive({q(p, 5)});
        auto p1 = pi1(psi);
        EXPECT_EQ(pi2(p1).table(), p1);
    }
}

TEST(Pi2, AdditiveExample) {
    auto psi = Submeasure::additive({q(3, 10), q(3, 10)});
    auto p1 = pi1(psi);
    EXPECT_EQ(p1[1], x(1, 2));
    EXPECT_EQ(p1[3], x(1));
    auto p2 = pi2(p1);
    EXPECT_EQ(p2(3), x(1));
    EXPECT_EQ(p2(1), x(1, 2));
}

TEST(Pi2, MatchesBruteForcePartitionsAndSandwich) {
    std::mt19937_64 rng(53);
    for (int i = 0; i < 60; ++i) {
        const std::size_t n = rng() % 6 + 1;
        Submeasure psi(oracle::random_submeasure(rng, n));
        auto p1 = pi1(psi);
        auto p2 = pi2(p1);
        for (Mask m = 0; m <= p1.full(); ++m) {
            const Rational brute = oracle::min_partition_cost(m, [&](Mask b) { return p1[b].value(); });
            ASSERT_EQ(p2(m), ExtRational(brute)) << mask_text(m);
            // psi <= pi2 <= pi1 <= 2 psi
            ASSERT_LE(psi(m), p2(m));
            ASSERT_LE(p2(m), p1[m]);
            ASSERT_LE(p1[m], psi(m) + psi(m));
        }
    }
}

TEST(Pi2, BranchAndBoundAgreesWithTable) {
    std::mt19937_64 rng(54);
    for (int i = 0; i < 40; ++i) {
        const std::size_t n = rng() % 7 + 2;
        Submeasure psi(oracle::random_submeasure(rng, n));
        auto p1 = pi1(psi);
        auto p2 = pi2(p1);
        for (int k = 0; k < 10; ++k) {
            const Mask m = static_cast<Mask>(rng()) & p1.full();
            auto cert = pi2_value(p1, m);
            ASSERT_EQ(cert.value, p2(m));
            ASSERT_TRUE(verify_pi2_certificate(p1, m, cert));
            if (cert.blocks.size() > 0) {
                auto bad = cert;
                bad.blocks.pop_back();
                EXPECT_FALSE(verify_pi2_certificate(p1, m, bad));
            }
        }
    }
    EXPECT_THROW(pi2(SetFunction(13)), std::invalid_argument);
    EXPECT_THROW(pi2(SetFunction::tabulate(1, [](Mask m) { return x(m, 3); })), std::invalid_argument);
}

TEST(LscSubmeasure, WeightValues) {
    auto l1 = weight_submeasure(SetShape::Weight::Harmonic);
    EXPECT_EQ(l1({0, 1}), x(3, 2));
    auto geo = l1.value(parse_omega_set("geo(0)"));
    EXPECT_TRUE(geo.exact());
    EXPECT_EQ(geo.upper, x(2));
    EXPECT_TRUE(l1.value(parse_omega_set("ap(0,3)")).lower.is_infinite());
    auto dyadic = weight_submeasure(SetShape::Weight::Dyadic);
    auto all = dyadic.value(SetShape::all());
    EXPECT_LE(all.lower, x(2));
    EXPECT_GE(all.upper, x(2));
    EXPECT_THROW(lsc_extend("square", [](const std::set<std::uint64_t>& f) { return x(static_cast<std::int64_t>(f.size() * f.size())); }),
                 SubmeasureError);
}

TEST(Exh, MembershipExamples) {
    auto l1 = weight_submeasure(SetShape::Weight::Harmonic);
    EXPECT_EQ(exh_member(l1, parse_omega_set("ap(0,2)")), ExhVerdict::Out);
    EXPECT_EQ(exh_member(l1, parse_omega_set("geo(0)")), ExhVerdict::In);
    EXPECT_EQ(exh_member(cardinality_submeasure(), parse_omega_set("geo(0)")), ExhVerdict::Out);
    EXPECT_EQ(exh_member(zero_submeasure(), SetShape::all()), ExhVerdict::In);
    EXPECT_EQ(exh_member(cardinality_submeasure(), parse_omega_set("fin{1,2}")), ExhVerdict::In);

    auto probe = exh_probe(l1, parse_omega_set("geo(0)"), q(1, 100), 4096);
    ASSERT_EQ(probe.verdict, ExhVerdict::In);
    ASSERT_TRUE(probe.tail_upper);
    EXPECT_LT(*probe.tail_upper, q(1, 100));
    std::set<std::uint64_t> rest;
    for (auto n : parse_omega_set("geo(0)").elements_below(1 << 16)) {
        if (!probe.f.count(n)) {
            rest.insert(n);
        }
    }
    EXPECT_LE(ExtRational(ell1_weight(rest)), ExtRational(*probe.tail_upper));
    EXPECT_THROW(exh_probe(l1, SetShape::all(), q(0, 1), 8), std::invalid_argument);
}

TEST(BlockSubmeasure, ConstantScale) {
    // psi0 on a block of 2: offset 0 weighs 1, offset 1 is null
    BlockSubmeasure b{Submeasure::additive({q(1, 1), q(0, 1)}), BlockSubmeasure::Scale::Constant};
    auto phi = lsc_block(b, "block");
    EXPECT_EQ(phi({0, 1, 2, 5}), x(2));
    EXPECT_EQ(exh_member(phi, parse_omega_set("ap(1,2)")), ExhVerdict::In);
    EXPECT_EQ(exh_member(phi, parse_omega_set("ap(0,4)")), ExhVerdict::Out);
    EXPECT_EQ(phi.value(parse_omega_set("union(ap(1,2),fin{0,4})")).upper, x(2));
}

TEST(BlockSubmeasure, DyadicScaleMakesEverythingExhaustive) {
    BlockSubmeasure b{Submeasure::additive({q(1, 1), q(1, 3)}), BlockSubmeasure::Scale::Dyadic};
    auto phi = lsc_block(b, "dyadic block");
    EXPECT_EQ(phi({0, 1, 2}), x(4, 3) + x(1, 2));
    EXPECT_EQ(exh_member(phi, SetShape::all()), ExhVerdict::In);
    auto v = phi.value(SetShape::all());
    EXPECT_LE(v.lower, x(8, 3));
    EXPECT_GE(v.upper, x(8, 3));
}

TEST(BlockSubmeasure, Pi2ExtensionOnOneBlock) {
    std::mt19937_64 rng(55);
    for (int i = 0; i < 20; ++i) {
        const std::size_t n = rng() % 4 + 2;
        BlockSubmeasure b{Submeasure(oracle::random_submeasure(rng, n)), BlockSubmeasure::Scale::Constant};
        auto phi = lsc_block_pi2(b, "pi2 block");
        auto table = pi2(pi1(b.base));
        for (Mask m = 0; m <= table.table().full(); ++m) {
            std::set<std::uint64_t> f;
            for (std::size_t k = 0; k < n; ++k) {
                if (m >> k & 1u) {
                    f.insert(k);
                }
            }
            ASSERT_EQ(phi(f), table(m));
        }
    }
}
