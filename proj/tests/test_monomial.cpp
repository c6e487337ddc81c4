#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include <germkit/monomial.hpp>

using namespace germkit;

namespace {

Monomial mono(std::int64_t e, std::optional<std::int64_t> q, std::int64_t d) { return {UnitScale(e, q), d}; }

constexpr std::optional<std::int64_t> kInfinite = std::nullopt;

} // namespace

TEST(MonoCompose, Examples)
{
    // omega of order 3 as the base
    auto z2 = Monomial::power(2, 3);
    auto wz2 = mono(1, 3, 2);
    EXPECT_EQ(mono_compose(z2, wz2), mono(2, 3, 4));
    EXPECT_EQ(mono_compose(wz2, z2), mono(1, 3, 4));
    EXPECT_EQ(mono_compose(Monomial::power(5, 7), Monomial::power(4, 7)), Monomial::power(20, 7));
}

TEST(MonoCompose, ExponentsReduceModuloBase)
{
    EXPECT_EQ(UnitScale(7, 3).exponent, 1);
    EXPECT_EQ(UnitScale(-1, 3).exponent, 2);
    EXPECT_EQ(UnitScale(-1, kInfinite).exponent, -1);
}

TEST(MonoCompose, BaseMismatch)
{
    try {
        (void)mono_compose(Monomial::power(2, 3), Monomial::power(2, 5));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::BaseMismatch);
    }
}

TEST(MonoCompose, AgreesWithSeriesComposition)
{
    // Approximate embedding for general roots of unity, agreement to 1e-12.
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> exp(0, 11), deg(1, 4);
    for (int t = 0; t < 100; ++t) {
        const std::int64_t q = 2 + t % 11;
        auto p = mono(exp(rng), q, deg(rng));
        auto r = mono(exp(rng), q, deg(rng));
        const int order = static_cast<int>(p.degree * r.degree);
        auto lhs = to_approx_series(mono_compose(p, r), order);
        auto rhs = compose(to_approx_series(p, order), to_approx_series(r, order));
        EXPECT_TRUE(agree_to_order(lhs, rhs, order, 1e-12));
    }
    // Exact embedding for Q(i) bases and the infinite-order unit.
    for (std::optional<std::int64_t> q : {std::optional<std::int64_t>(2), std::optional<std::int64_t>(4), kInfinite}) {
        auto p = mono(3, q, 3);
        auto r = mono(-2, q, 2);
        EXPECT_EQ(to_exact_series(mono_compose(p, r), 6), compose(to_exact_series(p, 6), to_exact_series(r, 6)));
    }
}

TEST(DeckAut, Examples)
{
    auto s = deck_aut_split(3, 2);
    EXPECT_EQ(s, (DeckAutSplit{1, 3, 0, 2, 0, 2}));
    auto t = deck_aut_split(6, 2);
    EXPECT_EQ(t.q_d, 2);
    EXPECT_EQ(t.q_a, 3);
    EXPECT_EQ(t.r, 1);
    EXPECT_EQ(t.s, 2);
    for (std::int64_t m : {2, 3, 10})
        EXPECT_EQ(deck_aut_split(1, m), (DeckAutSplit{1, 1, 0, 1, 0, 1}));
    try {
        (void)deck_aut_split(kInfinite, 2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InfiniteOrder);
    }
}

TEST(DeckAut, ExampleCommutes)
{
    // q=3, m=2: g o f^2 = f^2 o g for g = omega z^k
    auto f = Monomial::power(2, 3);
    for (std::int64_t k = 2; k <= 4; ++k) {
        auto g = mono(1, 3, k);
        auto f2 = mono_iterate(f, 2);
        EXPECT_EQ(mono_compose(g, f2), mono_compose(f2, g));
    }
}

TEST(DeckAut, OrderIdentityExhaustive)
{
    // q_d q_a = q, coprime, q_d | m^r, q_a | m^s - 1, for all q <= 10^4, m <= 100.
    for (std::int64_t q = 1; q <= 10000; ++q) {
        for (std::int64_t m = 2; m <= 100; ++m) {
            auto s = deck_aut_split(q, m);
            ASSERT_EQ(s.q_d * s.q_a, q);
            ASSERT_EQ(std::gcd(s.q_d, s.q_a), 1);
            const auto uq = static_cast<std::uint64_t>(q);
            ASSERT_EQ(detail::powmod(static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(s.r), static_cast<std::uint64_t>(s.q_d)), 0 % static_cast<std::uint64_t>(s.q_d));
            ASSERT_EQ(detail::powmod(static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(s.s), static_cast<std::uint64_t>(s.q_a)), 1 % static_cast<std::uint64_t>(s.q_a));
            // commutation of f^alpha o g with f^beta: q | m^alpha (m^beta - 1)
            auto ma = detail::powmod(static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(s.alpha), uq);
            auto mb = detail::powmod(static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(s.beta), uq);
            ASSERT_EQ(detail::mulmod(ma, (mb + uq - 1) % uq, uq), 0u) << q << " " << m;
        }
    }
}

TEST(DeckAut, MinimalityAndSubgroupOrdersBruteForce)
{
    for (std::int64_t q = 1; q <= 300; ++q) {
        for (std::int64_t m = 2; m <= 30; ++m) {
            auto s = deck_aut_split(q, m);
            // {w in <omega> : w^N = 1} has gcd(N, q) elements; count directly
            auto count_killed = [&](auto pred) {
                std::int64_t c = 0;
                for (std::int64_t e = 0; e < q; ++e)
                    c += pred(e) ? 1 : 0;
                return c;
            };
            const auto uq = static_cast<std::uint64_t>(q);
            auto mr = detail::powmod(static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(s.r), uq);
            auto ms1 = (detail::powmod(static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(s.s), uq) + uq - 1) % uq;
            EXPECT_EQ(count_killed([&](std::int64_t e) { return detail::mulmod(static_cast<std::uint64_t>(e), mr, uq) == 0; }), s.q_d);
            EXPECT_EQ(count_killed([&](std::int64_t e) { return detail::mulmod(static_cast<std::uint64_t>(e), ms1, uq) == 0; }), s.q_a);
            if (s.r > 0) {
                auto prev = detail::powmod(static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(s.r - 1), static_cast<std::uint64_t>(s.q_d));
                EXPECT_NE(prev, 0u);
            }
            for (std::int64_t t = 1; t < s.s; ++t)
                EXPECT_NE(detail::powmod(static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(s.q_a)), 1u);
        }
    }
}

TEST(DeckAut, CommutationByMonoCompose)
{
    for (std::int64_t q = 1; q <= 40; ++q) {
        for (std::int64_t m = 2; m <= 5; ++m) {
            auto s = deck_aut_split(q, m);
            if (static_cast<double>(s.alpha + s.beta + 1) * std::log2(static_cast<double>(m)) > 55)
                continue;
            auto f = Monomial::power(m, q);
            auto g = mono(1, q, 2);
            auto lhs = mono_compose(mono_iterate(f, s.alpha), g);
            auto fb = mono_iterate(f, s.beta);
            EXPECT_EQ(mono_compose(lhs, fb), mono_compose(fb, lhs)) << q << " " << m;
        }
    }
}

TEST(ClassifyPair, LevinForMinusZSquared)
{
    auto f = Monomial::power(2, 2);
    auto g = mono(1, 2, 2);
    auto c = classify_pair(f, g, 10);
    EXPECT_EQ(c.kind, PairClass::Kind::LevinPair);
    EXPECT_EQ(c.k, 1);
    EXPECT_EQ(c.l, 1);
    EXPECT_TRUE(levin_check(f, g, 1, 1));
    EXPECT_EQ(mono_compose(f, g), mono_iterate(f, 2));
    EXPECT_EQ(mono_compose(g, f), mono_iterate(g, 2));
}

TEST(ClassifyPair, CubeRootGivesExactRelationAtLengthTwo)
{
    auto f = Monomial::power(2, 3);
    auto g = mono(1, 3, 2);
    auto c = classify_pair(f, g, 10);
    EXPECT_EQ(c.kind, PairClass::Kind::ExactRelation);
    EXPECT_EQ(c.w1->str(), "GG");
    EXPECT_EQ(c.w2->str(), "FF");
    EXPECT_EQ(evaluate_word(*c.w1, f, g), evaluate_word(*c.w2, f, g));
    EXPECT_EQ(*c.value, Monomial::power(4, 3));
}

TEST(ClassifyPair, InfiniteOrderIsFreeUpToBound)
{
    auto c = classify_pair(Monomial::power(2, kInfinite), mono(1, kInfinite, 3), 8);
    EXPECT_EQ(c.kind, PairClass::Kind::FreeUpTo);
    EXPECT_EQ(c.bound, 8);
    auto d = classify_pair(Monomial::power(2, kInfinite), mono(1, kInfinite, 2), 10);
    EXPECT_EQ(d.kind, PairClass::Kind::FreeUpTo);
    EXPECT_EQ(d.bound, 10);
}

TEST(ClassifyPair, FreeUpToMeansAllWordValuesDistinct)
{
    auto f = Monomial::power(2, kInfinite);
    auto g = mono(1, kInfinite, 3);
    const int bound = 8;
    ASSERT_EQ(classify_pair(f, g, bound).kind, PairClass::Kind::FreeUpTo);
    std::set<std::pair<std::int64_t, std::int64_t>> values;
    std::size_t words = 0;
    for (int len = 1; len <= bound; ++len)
        for (std::size_t i = 0; i < (std::size_t{1} << len); ++i, ++words) {
            auto v = evaluate_word(Word::from_index(i, len), f, g);
            values.emplace(v.scale.exponent, v.degree);
        }
    EXPECT_EQ(values.size(), words);
}

TEST(ClassifyPair, CommutingWithoutSharedIterationIsFreeAbelian)
{
    auto c = classify_pair(Monomial::power(2, kInfinite), Monomial::power(3, kInfinite), 6);
    EXPECT_EQ(c.kind, PairClass::Kind::FreeAbelianWitness);
    EXPECT_EQ(c.w1->str(), "GF");
    EXPECT_EQ(c.w2->str(), "FG");
}

TEST(ClassifyPair, SharedIterationGivesLevin)
{
    auto f = Monomial::power(2, kInfinite);
    auto g = Monomial::power(4, kInfinite);
    auto c = classify_pair(f, g, 6);
    EXPECT_EQ(c.kind, PairClass::Kind::LevinPair);
    EXPECT_EQ(c.k, 2);
    EXPECT_EQ(c.l, 1);
    EXPECT_TRUE(levin_check(f, g, c.k, c.l));
}

TEST(ClassifyPair, SoundnessOnRandomPairs)
{
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> deg(2, 3), qd(1, 12), ed(0, 11);
    for (int t = 0; t < 200; ++t) {
        std::optional<std::int64_t> q = (t % 5 == 0) ? kInfinite : std::optional<std::int64_t>(qd(rng));
        auto f = mono(ed(rng), q, deg(rng));
        auto g = mono(ed(rng), q, deg(rng));
        auto c = classify_pair(f, g, 7);
        if (c.kind == PairClass::Kind::LevinPair)
            EXPECT_TRUE(levin_check(f, g, c.k, c.l));
        if (c.kind == PairClass::Kind::ExactRelation || c.kind == PairClass::Kind::FreeAbelianWitness) {
            EXPECT_NE(*c.w1, *c.w2);
            EXPECT_EQ(evaluate_word(*c.w1, f, g), evaluate_word(*c.w2, f, g));
        }
        if (c.kind == PairClass::Kind::FreeAbelianWitness)
            EXPECT_EQ(mono_compose(f, g), mono_compose(g, f));
        EXPECT_EQ(classify_pair(f, g, 7).kind, c.kind);
    }
}

TEST(LevinCheck, Examples)
{
    EXPECT_TRUE(levin_check(Monomial::power(2, 2), mono(1, 2, 2), 1, 1));
    EXPECT_FALSE(levin_check(Monomial::power(2, kInfinite), Monomial::power(3, kInfinite), 1, 1));
    for (std::int64_t m = 2; m <= 6; ++m)
        EXPECT_TRUE(levin_check(Monomial::power(m, kInfinite), Monomial::power(m, kInfinite), 1, 1));
}
