#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include <germkit/disk.hpp>

using namespace germkit;
using std::numbers::pi;

namespace {

// Plain 2x2 matrices, independent of MobiusDisk's product and renormalization.
struct Mat {
    Point p, q, r, s;
};

Mat mat_of(const MobiusDisk& m) { return {m.a(), m.b(), std::conj(m.b()), std::conj(m.a())}; }

Mat mul(const Mat& x, const Mat& y)
{
    return {x.p * y.p + x.q * y.r, x.p * y.q + x.q * y.s, x.r * y.p + x.s * y.r, x.r * y.q + x.s * y.s};
}

double abs_trace(const Mat& m)
{
    const Point det = m.p * m.s - m.q * m.r;
    return std::abs((m.p + m.s) / std::sqrt(det));
}

MobiusDisk random_automorphism(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-0.6, 0.6), ang(0, 2 * pi);
    return rotation_about({u(rng), u(rng)}, ang(rng)) * MobiusDisk(Point(1.0), Point(u(rng), u(rng)));
}

void expect_kind(ErrorKind k, auto&& fn)
{
    try {
        fn();
        FAIL() << "expected " << name(k);
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), k) << e.what();
    }
}

MobiusDisk symmetric_h() { return {Point(1.25), Point(0.75)}; }

MobiusDisk symmetric_g()
{
    auto r = rotation_about(0, pi / 2);
    return r * symmetric_h() * r.inverse();
}

} // namespace

TEST(Rotation, Examples)
{
    auto half_turn = rotation_about(0, pi);
    EXPECT_NEAR(std::abs(half_turn.a() - Point(0, 1)), 0, 1e-15);
    EXPECT_NEAR(std::abs(half_turn.b()), 0, 1e-15);
    EXPECT_TRUE(classify(rotation_about(0, 0)).identity);

    auto m = rotation_about(0.5, pi);
    EXPECT_NEAR(std::abs(m(0.5) - 0.5), 0, 1e-12);
    EXPECT_NEAR(std::abs(m(0.0) - 0.8), 0, 1e-12);
}

TEST(Rotation, FixesCenterWithDerivativeArgument)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-0.6, 0.6), ang(-3, 3);
    for (int i = 0; i < 50; ++i) {
        Point c(u(rng), u(rng));
        double theta = ang(rng);
        auto m = rotation_about(c, theta);
        EXPECT_NEAR(std::abs(m(c) - c), 0, 1e-12);
        EXPECT_NEAR(std::arg(m.derivative(c)), theta, 1e-9);
        EXPECT_NEAR(std::abs(elliptic_center(m) - c), 0, 1e-9);
    }
}

TEST(Classify, Examples)
{
    EXPECT_EQ(classify(rotation_about(0, pi / 3)).type, MobiusType::Elliptic);
    auto h = classify(symmetric_h());
    EXPECT_EQ(h.type, MobiusType::Hyperbolic);
    EXPECT_NEAR(h.trace, 2.5, 1e-15);
    auto id = classify(MobiusDisk(Point(1.0), Point(0.0)));
    EXPECT_EQ(id.type, MobiusType::Elliptic);
    EXPECT_TRUE(id.identity);
    // z -> (1 + i/2) z + i/2 over ..., trace exactly 2
    EXPECT_EQ(classify(MobiusDisk(Point(1, 0.5), Point(0, 0.5))).type, MobiusType::Parabolic);
}

TEST(Classify, ConjugationInvariant)
{
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
        auto m = random_automorphism(rng);
        auto c = random_automorphism(rng);
        auto conj = c * m * c.inverse();
        EXPECT_EQ(classify(m).type, classify(conj).type);
        EXPECT_NEAR(m.trace(), conj.trace(), 1e-9);
    }
}

TEST(Mobius, DeterminantStaysOneOverLongChains)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ang(-3, 3);
    // bounded chain: rotations about a common center
    const Point c(0.4, -0.3);
    MobiusDisk acc;
    for (int i = 0; i < 1000; ++i) {
        acc = acc * rotation_about(c, ang(rng));
        ASSERT_LT(std::abs(acc.determinant() - 1), 1e-6);
    }
    // random walk with short steps; long steps push |a| past the range where
    // |a|^2 - |b|^2 survives binary64 cancellation
    std::uniform_real_distribution<double> small(-0.05, 0.05);
    MobiusDisk walk;
    for (int i = 0; i < 1000; ++i) {
        walk = walk * MobiusDisk(std::polar(1.0, ang(rng)), Point(small(rng), small(rng)));
        ASSERT_LT(std::abs(walk.determinant() - 1), 1e-6);
    }
}

TEST(Mobius, ProductMatchesComposition)
{
    std::mt19937_64 rng(9);
    for (int i = 0; i < 50; ++i) {
        auto x = random_automorphism(rng);
        auto y = random_automorphism(rng);
        Point z(0.3, -0.2);
        EXPECT_NEAR(std::abs((x * y)(z) - x(y(z))), 0, 1e-12);
        EXPECT_NEAR(std::abs(x.inverse()(x(z)) - z), 0, 1e-12);
    }
}

TEST(FixedPoints, HyperbolicAxisOnBoundary)
{
    auto [p, q] = hyperbolic_axis(symmetric_h());
    EXPECT_NEAR(std::abs(p - 1.0), 0, 1e-12);
    EXPECT_NEAR(std::abs(q + 1.0), 0, 1e-12);
    std::mt19937_64 rng(11);
    for (int i = 0; i < 50; ++i) {
        auto c = random_automorphism(rng);
        auto m = c * symmetric_h() * c.inverse();
        auto [a, r] = hyperbolic_axis(m);
        EXPECT_NEAR(std::abs(a), 1, 1e-9);
        EXPECT_NEAR(std::abs(m(a) - a), 0, 1e-9);
        EXPECT_NEAR(std::abs(m(r) - r), 0, 1e-9);
        EXPECT_LT(std::abs(m.derivative(a)), 1);
        EXPECT_GT(std::abs(m.derivative(r)), 1);
    }
    expect_kind(ErrorKind::NotHyperbolic, [] { (void)hyperbolic_axis(rotation_about(0.1, 1)); });
}

TEST(FindHyperbolicWord, HalfTurns)
{
    auto [w, m] = find_hyperbolic_word(rotation_about(0, pi), rotation_about(0.5, pi), 2);
    EXPECT_EQ(w.str(), "FG");
    EXPECT_EQ(classify(m).type, MobiusType::Hyperbolic);
    EXPECT_NEAR(m.trace(), 2 * std::cosh(hyperbolic_distance(0, 0.5)), 1e-6);
    EXPECT_NEAR(m.trace(), 10.0 / 3.0, 1e-12);
}

TEST(FindHyperbolicWord, TraceIsTwiceCoshOfDistance)
{
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-0.6, 0.6);
    for (int i = 0; i < 100; ++i) {
        Point c1(u(rng), u(rng)), c2(u(rng), u(rng));
        auto m = rotation_about(c1, pi) * rotation_about(c2, pi);
        // translation length l = 2 d and t = 2 cosh(l / 2)
        EXPECT_NEAR(m.trace(), 2 * std::cosh(hyperbolic_distance(c1, c2)), 1e-6);
    }
}

TEST(FindHyperbolicWord, GoldenAngleAgainstExhaustiveOracle)
{
    const double golden = pi * (3 - std::sqrt(5.0));
    auto gamma = rotation_about(0, golden);
    auto tau = rotation_about(0.6, golden);
    auto [w, m] = find_hyperbolic_word(gamma, tau, 6);
    ASSERT_LE(w.size(), 6u);
    EXPECT_GT(abs_trace(mul(mat_of(gamma), mat_of(tau))), 0);

    // oracle: plain matrix products, first word with |trace| > 2 in shortlex order
    std::optional<Word> first;
    for (int len = 1; len <= 6 && !first; ++len)
        for (std::size_t i = 0; i < (std::size_t{1} << len) && !first; ++i) {
            auto word = Word::from_index(i, len);
            Mat acc{1, 0, 0, 1};
            for (auto l : word.letters())
                acc = mul(acc, mat_of(l == Letter::F ? gamma : tau));
            if (abs_trace(acc) > 2 + 1e-9)
                first = word;
        }
    ASSERT_TRUE(first);
    EXPECT_EQ(*first, w);
}

TEST(FindHyperbolicWord, Errors)
{
    expect_kind(ErrorKind::SameCenter,
                [] { (void)find_hyperbolic_word(rotation_about(0, 1), rotation_about(0, 2), 4); });
    expect_kind(ErrorKind::NotFound,
                [] { (void)find_hyperbolic_word(rotation_about(0, pi), rotation_about(0.5, pi), 1); });
    expect_kind(ErrorKind::InvalidArgument,
                [] { (void)find_hyperbolic_word(symmetric_h(), rotation_about(0.5, pi), 3); });
}

TEST(PingPong, SymmetricAxesUseNestedDomain)
{
    // translation length log 4 is too short for four disjoint disks on axes at
    // right angles, but the positive semigroup still plays ping-pong
    auto cert = ping_pong_certificate(symmetric_h(), symmetric_g(), 720);
    EXPECT_EQ(cert.kind, PingPongCertificate::Kind::NestedDomain);
    EXPECT_GT(cert.margin, 0);

    // independent dense recheck on the boundary arc from 1 to i
    for (int i = 0; i <= 5000; ++i) {
        Point z = std::polar(1.0, (pi / 2) * i / 5000);
        Point hz = cert.h(z), gz = cert.g(z);
        EXPECT_GE(std::arg(hz), -1e-12);
        EXPECT_LE(std::arg(gz), pi / 2 + 1e-12);
        // h pulls the whole arc close to 1, g close to i
        EXPECT_LT(std::arg(hz), std::arg(cert.g(1.0)));
    }
    EXPECT_NEAR(std::arg(cert.h(Point(0, 1))), 2 * std::atan(0.25), 1e-12);
}

TEST(PingPong, StrongTranslationsUseFourDisks)
{
    MobiusDisk h(Point(3.0), Point(std::sqrt(8.0)));
    auto r = rotation_about(0, pi / 2);
    auto g = r * h * r.inverse();
    auto cert = ping_pong_certificate(h, g, 720);
    EXPECT_EQ(cert.kind, PingPongCertificate::Kind::FourDisk);
    EXPECT_GT(cert.margin, 0);
    for (int i = 0; i < 5000; ++i) {
        Point z = std::polar(1.0, 2 * pi * (i + 0.5) / 5000);
        if (!cert.h_minus.contains(z))
            EXPECT_TRUE(cert.h_plus.contains(cert.h(z)));
        if (!cert.g_minus.contains(z))
            EXPECT_TRUE(cert.g_plus.contains(cert.g(z)));
    }
    const RoundDisk* d[] = {&cert.h_plus, &cert.h_minus, &cert.g_plus, &cert.g_minus};
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            EXPECT_GT(std::abs(d[i]->center - d[j]->center), d[i]->radius + d[j]->radius);
}

TEST(PingPong, WordsSeparateTheBasepoint)
{
    auto cert = ping_pong_certificate(symmetric_h(), symmetric_g(), 720);
    std::vector<Point> images;
    for (int len = 1; len <= 8; ++len)
        for (std::size_t i = 0; i < (std::size_t{1} << len); ++i)
            images.push_back(evaluate_word(Word::from_index(i, len), cert.h, cert.g)(0.0));
    ASSERT_EQ(images.size(), (std::size_t{1} << 9) - 2);
    for (std::size_t i = 0; i < images.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            ASSERT_GT(std::abs(images[i] - images[j]), 1e-9) << i << ' ' << j;
}

TEST(PingPong, Failures)
{
    expect_kind(ErrorKind::AxesTooClose, [] { (void)ping_pong_certificate(symmetric_h(), symmetric_h()); });
    expect_kind(ErrorKind::NotHyperbolic,
                [] { (void)ping_pong_certificate(symmetric_h(), rotation_about(0.2, 1.0)); });
    // weak translations on nearby axes cannot play ping-pong
    MobiusDisk weak(Point(1.01), Point(std::sqrt(1.01 * 1.01 - 1)));
    auto r = rotation_about(0, 0.3);
    expect_kind(ErrorKind::PingPongFailure, [&] { (void)ping_pong_certificate(weak, r * weak * r.inverse()); });
}
