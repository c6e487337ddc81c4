#include <cstdlib>
#include <random>

#include <gtest/gtest.h>

#include <germkit/monomial.hpp>
#include <germkit/normal_forms.hpp>
#include <germkit/relations.hpp>

#include "oracles.hpp"

using namespace germkit;
using oracle::q;
using oracle::series_from;
using Cert = RelationCertificate<GaussianRational>;

namespace {

ExactSeries mono_series(long c, int deg, int order) { return ExactSeries::monomial(q(c, 1), deg, order); }

// Word value by untruncated expansion, truncated at the end.
ExactSeries expand_word(const Word& w, const ExactSeries& f, const ExactSeries& g)
{
    auto acc = w.letters().back() == Letter::F ? f : g;
    for (auto it = w.letters().rbegin() + 1; it != w.letters().rend(); ++it)
        acc = oracle::compose_by_expansion(*it == Letter::F ? f : g, acc);
    return acc;
}

std::vector<Word> all_words(int max_len)
{
    std::vector<Word> out;
    for (int len = 1; len <= max_len; ++len)
        for (std::size_t i = 0; i < (std::size_t{1} << len); ++i)
            out.push_back(Word::from_index(i, len));
    return out;
}

struct ThreadsEnv {
    explicit ThreadsEnv(const char* n) { setenv("GERMKIT_THREADS", n, 1); }
    ~ThreadsEnv() { unsetenv("GERMKIT_THREADS"); }
};

} // namespace

TEST(EvaluateWord, Examples)
{
    auto f = series_from({2, 1}, 2);
    auto g = series_from({3}, 2);
    EXPECT_EQ(evaluate_word(Word::parse("F"), f, g), f);
    EXPECT_EQ(evaluate_word(Word::parse("GF"), f, g), series_from({6, 3}, 2));
    EXPECT_EQ(evaluate_word(Word::parse("FG"), mono_series(1, 2, 8), mono_series(1, 3, 8)), mono_series(1, 6, 8));
}

TEST(EvaluateWord, MatchesExpansionOracle)
{
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        auto f = oracle::random_series(rng, 5, 1);
        auto g = oracle::random_series(rng, 5, 1 + trial % 2);
        for (const auto& w : all_words(3))
            EXPECT_EQ(evaluate_word(w, f, g), expand_word(w, f, g)) << w.str();
    }
}

TEST(FindRelations, OppositeSquares)
{
    auto c = find_relations(mono_series(1, 2, 8), mono_series(-1, 2, 8), 4);
    ASSERT_EQ(c.kind, Cert::Kind::OrderNRelation);
    EXPECT_EQ(c.w1->str(), "FG");
    EXPECT_EQ(c.w2->str(), "FF");
    EXPECT_EQ(*c.lhs, mono_series(1, 4, 8));
    EXPECT_EQ(*c.lhs, *c.rhs);
    EXPECT_FALSE(c.vanishing);
    EXPECT_EQ(c.order, 8);
}

TEST(FindRelations, CommutingPowers)
{
    auto c = find_relations(mono_series(1, 2, 8), mono_series(1, 3, 8), 4);
    ASSERT_EQ(c.kind, Cert::Kind::OrderNRelation);
    // later word first, then the earlier word it repeats
    EXPECT_EQ(c.w1->str(), "GF");
    EXPECT_EQ(c.w2->str(), "FG");
    EXPECT_EQ(*c.lhs, mono_series(1, 6, 8));
}

TEST(FindRelations, FreeUpToMatchesPairwiseOracle)
{
    auto f = series_from({2, 1}, 4);
    auto g = series_from({3, 0, 0, 0, 0, 0, 1}, 4);
    auto c = find_relations(f, g, 3);
    EXPECT_EQ(c.kind, Cert::Kind::FreeUpTo);
    EXPECT_EQ(c.max_len, 3);
    EXPECT_EQ(c.order, 4);

    auto words = all_words(3);
    for (std::size_t i = 0; i < words.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            EXPECT_NE(expand_word(words[i], f, g), expand_word(words[j], f, g));
}

TEST(FindRelations, Errors)
{
    auto f = mono_series(1, 2, 4);
    EXPECT_THROW((void)find_relations(f, ExactSeries::zero(4), 3), Error);
    EXPECT_THROW((void)find_relations(f, mono_series(1, 2, 5), 3), Error);
    try {
        (void)find_relations(to_approx(f), to_approx(f), 3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ModeMismatch);
    }
}

TEST(FindRelations, VanishingCollisionIsFlagged)
{
    // every word of length 2 is z^4, beyond order 3
    auto c = find_relations(mono_series(1, 2, 3), mono_series(2, 2, 3), 3);
    ASSERT_EQ(c.kind, Cert::Kind::OrderNRelation);
    EXPECT_EQ(c.w1->str(), "FG");
    EXPECT_TRUE(c.vanishing);
}

TEST(FindRelations, ConjugacyInvariance)
{
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 12; ++trial) {
        const int n = 5;
        auto f = oracle::random_series(rng, n, 1);
        // half the trials plant a relation
        auto g = trial % 2 ? compose(f, f) : oracle::random_series(rng, n, 1);
        auto gamma = oracle::random_series(rng, n, 1);
        auto gi = invert(gamma);
        auto cf = compose(gamma, compose(f, gi));
        auto cg = compose(gamma, compose(g, gi));
        auto a = find_relations(f, g, 4);
        auto b = find_relations(cf, cg, 4);
        EXPECT_EQ(a.kind, b.kind);
        EXPECT_EQ(a.w1, b.w1);
        EXPECT_EQ(a.w2, b.w2);
        if (trial % 2)
            EXPECT_EQ(a.kind, Cert::Kind::OrderNRelation);
    }
}

TEST(FindRelations, AgreesWithMonomialClassification)
{
    std::mt19937_64 rng(41);
    const std::int64_t bases[] = {1, 2, 4};
    for (int trial = 0; trial < 50; ++trial) {
        const int len = 3;
        std::int64_t q_base = bases[trial % 3];
        std::optional<std::int64_t> base = trial % 5 == 4 ? std::nullopt : std::optional(q_base);
        std::uniform_int_distribution<std::int64_t> exp(0, 3), deg(1, 3);
        Monomial f{UnitScale(exp(rng), base), deg(rng)};
        Monomial g{UnitScale(exp(rng), base), deg(rng)};
        const int order = 27; // 3^len
        auto sf = to_exact_series(f, order);
        auto sg = to_exact_series(g, order);
        auto mono = first_collision(f, g, len);
        auto cert = find_relations(sf, sg, len);
        ASSERT_EQ(mono.has_value(), cert.kind == Cert::Kind::OrderNRelation);
        if (mono) {
            EXPECT_EQ(mono->later, *cert.w1);
            EXPECT_EQ(mono->earlier, *cert.w2);
        }
        EXPECT_EQ(mono_compose(f, g) == mono_compose(g, f), commute_check(sf, sg));
    }
}

TEST(FindRelations, DeterministicAcrossThreadCounts)
{
    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 4; ++trial) {
        auto f = oracle::random_series(rng, 6, 1);
        auto g = trial % 2 ? iterate(f, 3) : oracle::random_series(rng, 6, 1);
        Cert one, many;
        {
            ThreadsEnv env("1");
            one = find_relations(f, g, 6);
        }
        {
            ThreadsEnv env("5");
            many = find_relations(f, g, 6);
        }
        EXPECT_EQ(one.kind, many.kind);
        EXPECT_EQ(one.w1, many.w1);
        EXPECT_EQ(one.w2, many.w2);
        EXPECT_EQ(one.lhs, many.lhs);
    }
}

TEST(FindRelations, CertificatesReverify)
{
    auto f = mono_series(1, 2, 8);
    auto g = mono_series(-1, 2, 8);
    EXPECT_TRUE(verify(find_relations(f, g, 4), f, g));
    auto a = series_from({2, 1}, 4);
    auto b = series_from({3, 0, 0, 0, 0, 0, 1}, 4);
    EXPECT_TRUE(verify(find_relations(a, b, 3), a, b));
    Cert forged;
    forged.kind = Cert::Kind::OrderNRelation;
    forged.w1 = Word::parse("F");
    forged.w2 = Word::parse("G");
    EXPECT_FALSE(verify(forged, a, b));
}

TEST(SharedIteration, Examples)
{
    auto c = shared_iteration(mono_series(2, 1, 16), mono_series(8, 1, 16), 6, 6);
    ASSERT_TRUE(c);
    EXPECT_EQ(c->m, 3);
    EXPECT_EQ(c->n, 1);
    EXPECT_TRUE(verify(*c, mono_series(2, 1, 16), mono_series(8, 1, 16)));

    auto d = shared_iteration(mono_series(1, 2, 16), mono_series(1, 4, 16), 6, 6);
    ASSERT_TRUE(d);
    EXPECT_EQ(d->m, 2);
    EXPECT_EQ(d->n, 1);

    EXPECT_FALSE(shared_iteration(mono_series(2, 1, 16), mono_series(3, 1, 16), 5, 5));
}

TEST(SharedIteration, LeastTotalFirst)
{
    // 4z and 8z: f^3 = g^2 (64z) is found before f^6 = g^4
    auto c = shared_iteration(mono_series(4, 1, 4), mono_series(8, 1, 4), 6, 6);
    ASSERT_TRUE(c);
    EXPECT_EQ(c->m, 3);
    EXPECT_EQ(c->n, 2);
}

TEST(CommuteCheck, Examples)
{
    EXPECT_TRUE(commute_check(mono_series(2, 1, 6), mono_series(5, 1, 6)));
    EXPECT_FALSE(commute_check(series_from({2, 1}, 4), mono_series(3, 1, 4)));
    EXPECT_TRUE(commute_check(to_approx(mono_series(1, 2, 6)), to_approx(mono_series(1, 3, 6))));
}

TEST(LevinVerify, Examples)
{
    EXPECT_TRUE(levin_verify(mono_series(1, 2, 8), mono_series(-1, 2, 8), 1, 1));
    EXPECT_FALSE(levin_verify(mono_series(1, 2, 8), mono_series(1, 3, 8), 1, 1));
    EXPECT_TRUE(levin_verify(mono_series(1, 4, 16), mono_series(-1, 4, 16), 1, 1));
    EXPECT_THROW((void)levin_verify(mono_series(1, 2, 8), mono_series(-1, 2, 8), 0, 1), Error);
}

TEST(LevinVerify, NonMonomialCounterpartFails)
{
    // a tangent-to-identity perturbation breaks the identity at low order
    auto f = series_from({1, 1}, 6);
    auto g = series_from({1, -1}, 6);
    EXPECT_FALSE(levin_verify(f, g, 1, 1));
    try {
        (void)levin_certificate(f, g, 1, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::LevinFails);
    }
}
