#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace wfi;

namespace {

Rational q(std::int64_t p, std::int64_t d) { return make_rational(p, d); }

Rational harmonic_prefix(const SetShape& x, std::uint64_t bound) {
    Rational s = 0;
    for (auto n : x.elements_below(bound)) {
        s += q(1, static_cast<std::int64_t>(n) + 1);
    }
    return s;
}

}  // namespace

TEST(Ell1Weight, Examples) {
    EXPECT_EQ(ell1_weight({}), 0);
    EXPECT_EQ(ell1_weight({0}), 1);
    EXPECT_EQ(ell1_weight({1, 3}), q(3, 4));
}

TEST(Ell1Weight, BinarySplittingMatchesRunningSum) {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 200; ++i) {
        std::set<std::uint64_t> f;
        for (auto k = rng() % 40; k > 0; --k) {
            f.insert(rng() % 500);
        }
        Rational running = 0;
        for (auto n : f) {
            running += q(1, static_cast<std::int64_t>(n) + 1);
        }
        ASSERT_EQ(ell1_weight(f), running);
        ASSERT_EQ(ell1_weight_compare(f, running), 0);
        ASSERT_EQ(ell1_weight_compare(f, running + q(1, 1000000007)), -1);
        ASSERT_EQ(ell1_weight_compare(f, running - q(1, 1000000007)), 1);
        ASSERT_EQ(oracle::harmonic_exceeds(f, running), false);
    }
}

TEST(Ell1Member, Examples) {
    EXPECT_TRUE(ell1_member(parse_omega_set("ap(0,1)")).out());
    auto geo = ell1_member(parse_omega_set("geo(0)"));
    ASSERT_TRUE(geo.in());
    EXPECT_EQ(geo.certificate.at("weight_upper_bound"), "2");
    EXPECT_TRUE(ell1_member(parse_omega_set("fin{3,17,400}")).in());
    auto ap = ell1_member(parse_omega_set("union(ap(5,7),geo(3))"));
    ASSERT_TRUE(ap.out());
    EXPECT_EQ(ap.certificate.at("divergent_progression").substr(0, 3), "ap(");
}

TEST(Ell1Member, BoundDominatesPartialSums) {
    SampleGenerator gen(32);
    int in = 0;
    for (int i = 0; i < 300; ++i) {
        auto [text, x] = gen.omega_set();
        auto d = ell1_member(x);
        if (!d.in()) {
            continue;
        }
        ++in;
        const Rational bound = parse_rational(d.certificate.at("weight_upper_bound"));
        for (std::uint64_t cut : {10, 100, 1000, 5000}) {
            ASSERT_LE(harmonic_prefix(x, cut), bound) << text;
        }
    }
    EXPECT_GT(in, 20);
}

TEST(DensityZero, Examples) {
    auto half = density_zero_member(parse_omega_set("ap(0,2)"));
    EXPECT_TRUE(half.out());
    EXPECT_EQ(half.certificate.at("density"), "1/2");
    EXPECT_TRUE(density_zero_member(parse_omega_set("geo(0)")).in());
    auto sixth = density_zero_member(parse_omega_set("diff(ap(0,3),ap(0,6))"));
    EXPECT_TRUE(sixth.out());
    EXPECT_EQ(sixth.certificate.at("density"), "1/6");
}

TEST(EmptyTimesFin, Examples) {
    EXPECT_TRUE(empty_times_fin_member(parse_pair_set("tri(1,0)")).in());
    EXPECT_TRUE(empty_times_fin_member(parse_pair_set("col(0)")).out());
    EXPECT_TRUE(empty_times_fin_member(parse_pair_set("fin{(0,0),(5,9)}")).in());
}

TEST(IdealAxioms, ClosedUnderSubsetAndFiniteUnion) {
    SampleGenerator gen(33);
    const std::vector<IdealOracle> oracles{ell1_oracle(), density_zero_oracle(), fin_oracle(), finite_on_oracle(parse_omega_set("ap(1,3)"))};
    for (int i = 0; i < 300; ++i) {
        auto [ta, a] = gen.omega_set();
        auto [tb, b] = gen.omega_set();
        for (const auto& o : oracles) {
            const bool ina = o.decide(a).in(), inb = o.decide(b).in();
            // union stays inside, and so does every subset, here a intersect b and a minus b
            ASSERT_EQ(o.decide(a | b).in(), ina && inb) << o.name << " " << ta << " " << tb;
            if (ina) {
                ASSERT_TRUE(o.decide(a & b).in()) << o.name << " " << ta << " " << tb;
                ASSERT_TRUE(o.decide(a - b).in()) << o.name << " " << ta << " " << tb;
            }
        }
    }
}

TEST(IdealOracles, RejectOtherCarriers) {
    EXPECT_THROW(ell1_oracle().decide(parse_pair_set("col(1)")), std::invalid_argument);
    EXPECT_THROW(lcp_oracle().decide(parse_omega_set("ap(0,1)")), std::invalid_argument);
}

TEST(LcpIdeal, Examples) {
    EXPECT_TRUE(lcp_member(parse_string_set("ends0")).in());
    EXPECT_TRUE(lcp_member(parse_string_set("ends1")).out());
    EXPECT_TRUE(lcp_member(parse_string_set("strs{1,01,0}")).in());
    EXPECT_EQ(lcp_member(parse_string_set("strs{1,01,0}")).certificate.at("ends_in_one_count"), "2");
}

TEST(LcpMetric, AxiomsOnFiniteDifferences) {
    std::mt19937_64 rng(34);
    auto random_strings = [&] {
        std::set<BitString> s;
        for (auto k = rng() % 6; k > 0; --k) {
            s.insert(string_at_index(rng() % 60));
        }
        return s;
    };
    const BranchSet base = parse_string_set("ends0");
    for (int i = 0; i < 200; ++i) {
        auto x = base | BranchSet::of_strings(random_strings());
        auto y = base - BranchSet::of_strings(random_strings());
        auto z = BranchSet::of_strings(random_strings()) | base;
        auto dxy = lcp_metric(x, y), dyx = lcp_metric(y, x), dxz = lcp_metric(x, z), dzy = lcp_metric(z, y);
        ASSERT_TRUE(dxy.exact() && dxz.exact() && dzy.exact());
        EXPECT_EQ(dxy.lower, dyx.lower);
        EXPECT_LE(dxy.lower, dxz.lower + dzy.lower);
        EXPECT_EQ(lcp_metric(x, x).lower, 0);
        // direct evaluation over the finitely many differing strings
        Rational direct = 0;
        for (std::uint64_t idx = 0; idx < 64; ++idx) {
            auto s = string_at_index(idx);
            if (x.contains(s) != y.contains(s)) {
                direct += (s.size() > 0 && s[s.size() - 1] == '1' ? 1 : 0) + pow2(-static_cast<long>(idx));
            }
        }
        EXPECT_EQ(dxy.lower, direct);
    }
    EXPECT_TRUE(lcp_metric(parse_string_set("ends1"), parse_string_set("empty")).infinite);
}

TEST(NwdProbe, Examples) {
    ClosedSetOracle zeros{[](const BitString& t) { return t.str().find('1') == std::string::npos; }, "0*"};
    auto r = nwd_probe(zeros, 3, 4);
    ASSERT_TRUE(r.certified);
    EXPECT_TRUE(verify_nwd_certificate(zeros, r));
    EXPECT_EQ(r.escapes.at(BitString("00")), BitString("001"));

    ClosedSetOracle full{[](const BitString&) { return true; }, "2^w"};
    auto f = nwd_probe(full, 2, 6);
    EXPECT_FALSE(f.certified);
    ASSERT_TRUE(f.failure);
    EXPECT_EQ(*f.failure, BitString(""));

    auto image = image_in_nwd(parse_pair_set("fin{(1,2)}"));
    auto ri = nwd_probe(image, 4, 10);
    EXPECT_TRUE(ri.certified);
    EXPECT_TRUE(verify_nwd_certificate(image, ri));

    auto single = image_in_nwd(parse_pair_set("fin{(0,0)}"));
    EXPECT_TRUE(single.alive(BitString("1000")));
    EXPECT_FALSE(single.alive(BitString("11")));
    EXPECT_TRUE(nwd_probe(single, 3, 8).certified);
    EXPECT_THROW(nwd_probe(single, 5, 4), std::invalid_argument);
}

TEST(NwdProbe, TamperedCertificateRejected) {
    auto image = image_in_nwd(parse_pair_set("tri(1,1)"));
    auto r = nwd_probe(image, 4, 12);
    ASSERT_TRUE(r.certified);
    ASSERT_TRUE(verify_nwd_certificate(image, r));
    auto bad = r;
    bad.escapes.begin()->second = bad.escapes.begin()->first;
    EXPECT_FALSE(verify_nwd_certificate(image, bad));
}

TEST(ImageInNwd, MonotoneInX) {
    const std::vector<std::string> chain{"empty", "fin{(0,1)}", "fin{(0,1),(2,3)}", "union(fin{(0,1),(2,3)},tri(0,2))"};
    for (std::size_t i = 1; i < chain.size(); ++i) {
        auto small = image_in_nwd(parse_pair_set(chain[i - 1]));
        auto large = image_in_nwd(parse_pair_set(chain[i]));
        for (std::uint64_t idx = 0; idx < (std::uint64_t{1} << 11); ++idx) {
            auto t = string_at_index(idx);
            if (small.alive(t)) {
                ASSERT_TRUE(large.alive(t)) << chain[i] << " " << t.str();
            }
        }
    }
    auto none = image_in_nwd(parse_pair_set("empty"));
    EXPECT_TRUE(none.alive(BitString("0000")));
    EXPECT_FALSE(none.alive(BitString("01")));
}

TEST(IAlpha, Examples) {
    EXPECT_TRUE(I_alpha_member(FiniteTree{"0", "00", "000"}, Ordinal::omega()).in());
    EXPECT_TRUE(I_alpha_member(FiniteTree{"0", "10", "110"}, Ordinal::omega()).in());
    EXPECT_TRUE(I_alpha_member(FiniteTree{"0", "00", "000"}, Ordinal(2)).out());
    std::uint64_t prev = 0;
    for (std::size_t d : {4, 8, 12, 16}) {
        auto st = I_alpha_member(staircase_tree(), Ordinal::omega(), d);
        EXPECT_EQ(st.verdict, Verdict::Unknown);
        auto r = std::stoull(st.certificate.at("truncation_rank"));
        EXPECT_GT(r, prev);
        prev = r;
        EXPECT_NE(st.certificate.at("flag").find("not in I_alpha"), std::string::npos);
    }
    auto anti = I_alpha_member(antichain_of_path(InfiniteSequence::parse("(0)")), Ordinal::omega(), 10);
    EXPECT_TRUE(anti.in());
    auto warn = I_alpha_member(FiniteTree{"0"}, ord_mul_nat(Ordinal::omega(), 2));
    EXPECT_EQ(warn.certificate.count("warning"), 1u);
}
