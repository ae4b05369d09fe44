#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>
#include <thread>

using namespace wfi;

namespace {

Rational q(std::int64_t p, std::int64_t d) { return make_rational(p, d); }

Submeasure restrict(const Submeasure& s, std::size_t k) { return Submeasure(s.table().restrict_to(k)); }

std::set<std::uint64_t> bits_of(Mask m, std::size_t n) {
    std::set<std::uint64_t> f;
    for (std::size_t i = 0; i < n; ++i) {
        if (m >> i & 1u) {
            f.insert(i);
        }
    }
    return f;
}

}  // namespace

TEST(Interleave, RoundTrip) {
    std::mt19937_64 rng(61);
    for (int i = 0; i < 500; ++i) {
        const std::size_t m = rng() % 8 + 1;
        std::vector<BigNat> parts(m);
        for (auto& p : parts) {
            p = BigNat(rng() % 5000) * BigNat(rng() % 3 ? 1 : rng());
        }
        ASSERT_EQ(interleave_split(interleave_join(parts), m), parts);
    }
    EXPECT_EQ(interleave_join({BigNat(1), BigNat(1)}), BigNat(3));
    EXPECT_EQ(interleave_join({BigNat(0), BigNat(2)}), BigNat(8));
    for (auto v : {q(0, 1), q(3, 10), q(7, 2), q(1, 1)}) {
        EXPECT_EQ(rational_from_code(code_of_rational(v)), v);
    }
}

TEST(Extension, EncodeDecodeRoundTrip) {
    std::mt19937_64 rng(62);
    for (int i = 0; i < 200; ++i) {
        const std::size_t n = rng() % 4 + 1;
        Submeasure rho(oracle::random_submeasure(rng, n));
        auto prev = restrict(rho, n - 1);
        auto code = encode_extension(prev, rho);
        auto back = decode_extension(prev, code);
        ASSERT_FALSE(back.fallback);
        ASSERT_EQ(back.phi, rho);
    }
}

TEST(Extension, InvalidCodeFallsBackToNullExtension) {
    auto prev = Submeasure::additive({q(1, 1)});
    // the code 0 gives value 0 on {0,1}, below prev({0}) = 1
    auto d = decode_extension(prev, BigNat(0));
    EXPECT_TRUE(d.fallback);
    EXPECT_EQ(d.phi(2), ExtRational(0));
    EXPECT_EQ(d.phi(3), ExtRational(1));
    EXPECT_THROW(encode_extension(prev, Submeasure::additive({q(2, 1), q(0, 1)})), std::invalid_argument);
}

TEST(UniversalCoding, EachPhiExtendsItsPredecessor) {
    std::mt19937_64 rng(63);
    UniversalCoding coding;
    for (int i = 0; i < 200; ++i) {
        OmegaString s;
        for (auto k = rng() % 4 + 1; k > 0; --k) {
            s.push_back(BigNat(rng() % 3 ? rng() % 64 : rng()));
        }
        auto phi = coding.phi(s);
        ASSERT_EQ(phi->carrier_size(), s.size());
        ASSERT_TRUE(oracle::is_submeasure(phi->table()));
        if (s.size() > 1) {
            auto prev = coding.phi(OmegaString(s.begin(), s.end() - 1));
            ASSERT_EQ(restrict(*phi, s.size() - 1), *prev) << to_string(s);
        }
    }
    EXPECT_THROW(coding.phi({}), std::invalid_argument);
}

TEST(UniversalCoding, EveryRationalSubmeasureIsCoded) {
    std::mt19937_64 rng(64);
    UniversalCoding coding;
    for (int i = 0; i < 50; ++i) {
        const std::size_t n = rng() % 4 + 1;
        Submeasure target(oracle::random_submeasure(rng, n));
        OmegaString s;
        Submeasure prev;
        for (std::size_t k = 1; k <= n; ++k) {
            auto rho = restrict(target, k);
            s.push_back(encode_extension(prev, rho));
            prev = rho;
        }
        ASSERT_EQ(*coding.phi(s), target);
        ASSERT_TRUE(coding.valid_code(s));
    }
}

TEST(UniversalCoding, ConcurrentAccess) {
    UniversalCoding coding;
    const OmegaString s = parse_omega_string("<5,17,300,9>");
    auto expected = *UniversalCoding().phi(s);
    std::vector<std::thread> threads;
    std::vector<Submeasure> got(8);
    for (std::size_t i = 0; i < got.size(); ++i) {
        threads.emplace_back([&, i] { got[i] = *coding.phi(s); });
    }
    for (auto& t : threads) {
        t.join();
    }
    for (const auto& g : got) {
        EXPECT_EQ(g, expected);
    }
    EXPECT_EQ(coding.memo_size(), 4u);
}

TEST(PhiTilde, IsASubmeasureOnFiniteSets) {
    std::mt19937_64 rng(65);
    // a small tree of sequences with entries below 40
    std::vector<OmegaString> pool;
    for (int i = 0; i < 30; ++i) {
        OmegaString s;
        for (auto k = rng() % 3 + 1; k > 0; --k) {
            s.push_back(BigNat(rng() % 40));
        }
        pool.push_back(s);
    }
    auto pick = [&] {
        std::set<OmegaString> f;
        for (auto k = rng() % 4; k > 0; --k) {
            f.insert(pool[rng() % pool.size()]);
        }
        return f;
    };
    EXPECT_EQ(phi_tilde({}).value, ExtRational(0));
    for (int i = 0; i < 300; ++i) {
        auto a = pick(), b = pick();
        std::set<OmegaString> u = a;
        u.insert(b.begin(), b.end());
        const auto va = phi_tilde(a).value, vb = phi_tilde(b).value, vu = phi_tilde(u).value;
        ASSERT_LE(va, vu);
        ASSERT_LE(vb, vu);
        ASSERT_LE(vu, va + vb);
        auto w = phi_tilde(u);
        if (w.witness) {
            ASSERT_EQ(default_coding().value_on(*w.witness, u), w.value);
        }
    }
}

TEST(UniversalReduction, PreimageIdentity) {
    auto f = universal_reduction(weight_submeasure(SetShape::Weight::Harmonic), 7);
    EXPECT_EQ(f.length(), 7u);
    std::mt19937_64 rng(66);
    for (int i = 0; i < 50; ++i) {
        auto x = bits_of(static_cast<Mask>(rng()) & 0x7f, 7);
        auto pre = f.preimage(x);
        ASSERT_EQ(pre.size(), x.size());
        for (const auto& t : pre) {
            ASSERT_TRUE(is_prefix(t, f.alpha()));
            ASSERT_TRUE(x.count(*f.apply(t)));
        }
    }
    EXPECT_FALSE(f.apply({}));
    EXPECT_FALSE(f.apply(OmegaString{f.alpha()[0] + 1}));
    EXPECT_THROW(f.preimage({7}), std::out_of_range);
    EXPECT_THROW(universal_reduction(weight_submeasure(SetShape::Weight::Harmonic), 14), std::invalid_argument);
}

TEST(UniversalReduction, PhiMaxOfPreimageIsPi) {
    BlockSubmeasure block{Submeasure::additive({q(1, 2), q(0, 1), q(1, 3)}), BlockSubmeasure::Scale::Constant};
    for (const auto& pi : {weight_submeasure(SetShape::Weight::Harmonic), weight_submeasure(SetShape::Weight::Dyadic),
                           lsc_block(block, "block")}) {
        const std::size_t len = 6;
        auto f = universal_reduction(pi, len);
        for (Mask m = 0; m < (Mask{1} << len); ++m) {
            auto x = bits_of(m, len);
            ASSERT_EQ(f.phi_max(f.preimage(x)).value, pi(x)) << pi.label << " " << mask_text(m);
            ASSERT_EQ(f.along_branch(x, len), pi(x));
            ASSERT_EQ(f.phi_max_on_branch()(x), pi(x));
        }
    }
}

TEST(UniversalReduction, ExhTransfersAlongTheBranch) {
    auto f = universal_reduction(weight_submeasure(SetShape::Weight::Harmonic), 8);
    auto along = f.phi_max_on_branch();
    EXPECT_EQ(exh_member(along, parse_omega_set("ap(0,2)")), ExhVerdict::Out);
    EXPECT_EQ(exh_member(along, parse_omega_set("geo(0)")), ExhVerdict::In);
    EXPECT_THROW(along({8}), std::out_of_range);
}

TEST(UniversalReduction, BranchAdapterKeepsThePrefixOrder) {
    auto f = universal_reduction(weight_submeasure(SetShape::Weight::Dyadic), 5);
    auto g = branch_adapter(f);
    EXPECT_EQ(g.apply(BitString("111")), std::optional<std::uint64_t>(2));
    EXPECT_FALSE(g.apply(BitString("")));
    EXPECT_FALSE(g.apply(BitString("101")));
    EXPECT_FALSE(g.apply(BitString("111111")));
    EXPECT_TRUE(g.domain_alive(BitString("11")));
    EXPECT_FALSE(g.domain_alive(BitString("10")));
}
