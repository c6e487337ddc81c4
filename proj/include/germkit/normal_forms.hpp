#pragma once

#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "roots.hpp"
#include "series.hpp"

namespace germkit {

// Formal conjugacy normal forms in the group of units:
//   multiplier not a root of unity   -> a_1 z            (Koenig)
//   valuation m >= 2                 -> z^m              (Boettcher)
//   a_1 primitive k-th root of unity -> a_1 z + b_1 z^n + c_1 z^{2n-1}

enum class NormalFormKind { Linear, Power, Parabolic };

constexpr const char* to_string(NormalFormKind k) noexcept
{
    switch (k) {
    case NormalFormKind::Linear: return "Linear";
    case NormalFormKind::Power: return "Power";
    case NormalFormKind::Parabolic: return "Parabolic";
    }
    return "?";
}

template <Coefficient C>
struct ParabolicParameters {
    int k = 1; // order of a_1 as a root of unity
    int n = 2; // valuation of g^k - z
    C c{};     // formal invariant: g^k ~ z + z^n + c z^{2n-1}
    C b1{};
    C c1{};
};

template <Coefficient C>
struct NormalFormResult {
    NormalFormKind kind;
    TruncatedSeries<C> conjugator;
    TruncatedSeries<C> normal_form;
    // conjugate(conjugator, g) equals normal_form through this order.
    int verified_order;
    // Boettcher only: false when the principal root was not available in
    // exact arithmetic and another exact root was used.
    bool principal_root = true;
    std::optional<ParabolicParameters<C>> parabolic;
};

// gamma o g o gamma^{-1}.
template <Coefficient C>
TruncatedSeries<C> conjugate(const TruncatedSeries<C>& gamma, const TruncatedSeries<C>& g)
{
    if (is_zero(gamma[1]))
        fail(ErrorKind::NotInvertible, "conjugator has zero linear coefficient");
    return compose(compose(gamma, g), invert(gamma));
}

namespace detail {

inline constexpr double kApproxTol = 1e-10;

template <Coefficient C>
TruncatedSeries<C> near_identity(const C& beta, int degree, int order)
{
    return TruncatedSeries<C>::identity(order).with_coefficient(degree, beta);
}

template <Coefficient C>
void check_sound(const TruncatedSeries<C>& gamma, const TruncatedSeries<C>& g, const TruncatedSeries<C>& nf, int upto,
                 const char* what)
{
    if (!agree_to_order(conjugate(gamma, g), nf, upto, 1e-8))
        throw std::logic_error(std::string(what) + ": conjugator does not reproduce the normal form");
}

} // namespace detail

// Koenig coordinate: gamma tangent to the identity with gamma o g = a_1 gamma.
// Order-j equation: (a_1^j - a_1) gamma_j = -(residual with gamma_j = 0).
// A resonant j (a_1^j = a_1) is an error only when its residual is nonzero.
template <Coefficient C>
NormalFormResult<C> koenig_linearize(const TruncatedSeries<C>& g)
{
    detail::require_nonzero(g, "series");
    const C a1 = g[1];
    if (negligible(a1, detail::kApproxTol))
        fail(ErrorKind::ZeroMultiplier, "a_1 = 0; use the Boettcher coordinate");
    const int order = g.order();
    const auto pw = power_table(g, order);

    std::vector<C> gamma(static_cast<std::size_t>(order), from_int<C>(0));
    gamma[0] = from_int<C>(1);
    C a1_pow = a1;
    for (int j = 2; j <= order; ++j) {
        a1_pow *= a1;
        // residual = [gamma o g]_j - a_1 gamma_j with gamma_j = 0
        C residual = from_int<C>(0);
        for (int i = 1; i < j; ++i)
            residual += gamma[static_cast<std::size_t>(i - 1)] * pw[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)];
        const C denom = a1_pow - a1;
        if (negligible(denom, detail::kApproxTol)) {
            if (negligible(residual, detail::kApproxTol))
                continue;
            fail(ErrorKind::Resonance, "a_1^" + std::to_string(j) + " = a_1 with nonzero residual at order " +
                                           std::to_string(j));
        }
        gamma[static_cast<std::size_t>(j - 1)] = -residual / denom;
    }
    TruncatedSeries<C> conj(std::move(gamma));
    auto nf = TruncatedSeries<C>::monomial(a1, 1, order);
    detail::check_sound(conj, g, nf, order, "koenig_linearize");
    return {NormalFormKind::Linear, std::move(conj), std::move(nf), order};
}

// Boettcher coordinate: gamma with gamma o g o gamma^{-1} = z^m, m = val(g).
// The leading coefficient solves lambda^{m-1} = a_m (principal root); the
// rest follows from gamma(g(z)) = gamma(z)^m at order m + j - 1, with g
// treated as the polynomial given by its truncation.
template <Coefficient C>
NormalFormResult<C> boettcher_coordinate(const TruncatedSeries<C>& g)
{
    const int m = valuation(g);
    if (m < 2)
        fail(ErrorKind::NotSuperattracting, "valuation is 1");
    const int order = g.order();
    const C am = g[m];

    C lambda{};
    bool principal = true;
    if constexpr (is_exact_v<C>) {
        auto roots = exact_roots(am, m - 1);
        if (roots.empty())
            fail(ErrorKind::NoExactRoot, "a_" + std::to_string(m) + " has no exact " + std::to_string(m - 1) +
                                             "-th root in Q(i); use approximate coefficients");
        // roots are sorted by argument, so the principal root is first when exact
        const Complex principal_value = principal_root(am.to_complex(), m - 1);
        principal = std::abs(roots.front().to_complex() - principal_value) < 1e-9 * std::max(1.0, std::abs(principal_value));
        lambda = roots.front();
    } else {
        lambda = principal_root(am, m - 1);
    }

    const int work = order + m - 1;
    const auto g_ext = g.with_order(work);
    std::vector<C> gamma(static_cast<std::size_t>(work), from_int<C>(0));
    gamma[0] = lambda;
    const C scale = from_int<C>(m) * ipow(lambda, m - 1);
    for (int j = 2; j <= order; ++j) {
        const TruncatedSeries<C> current(gamma);
        auto lhs = compose(current, g_ext);
        auto rhs = detail::mul_trunc(detail::with_constant_slot(current), detail::with_constant_slot(current),
                                     static_cast<std::size_t>(work) + 1);
        for (int p = 3; p <= m; ++p)
            rhs = detail::mul_trunc(rhs, detail::with_constant_slot(current), static_cast<std::size_t>(work) + 1);
        const int d = m + j - 1;
        gamma[static_cast<std::size_t>(j - 1)] = (lhs[d] - rhs[static_cast<std::size_t>(d)]) / scale;
    }
    gamma.resize(static_cast<std::size_t>(order));
    TruncatedSeries<C> conj(std::move(gamma));
    auto nf = TruncatedSeries<C>::monomial(from_int<C>(1), m, order);
    detail::check_sound(conj, g, nf, order, "boettcher_coordinate");
    NormalFormResult<C> out{NormalFormKind::Power, std::move(conj), std::move(nf), order};
    out.principal_root = principal;
    return out;
}

// Parabolic normal form for a_1 a primitive k-th root of unity.
//  1. kill non-resonant terms of g (degree j with a_1^{j-1} != 1);
//  2. h = g^k = z + a z^n + ...; kill h's terms of degree n+1 .. 2n-2 with
//     conjugators z + beta z^{D-n+1}, which commute with a_1 z;
//  3. rescale by lambda, lambda^{n-1} = a, so that h ~ z + z^n + c z^{2n-1}.
// The resulting g is a_1 z + b_1 z^n + c_1 z^{2n-1} through order 2n-1 with
//   b_1 = a_1/k,  c_1 = c a_1/k - n(k-1) a_1/(2k^2)
// (for a_1 = +-1 these coincide with 1/(k a_1) and c a_1/k - n(k-1)/(2k^2 a_1^3)).
template <Coefficient C>
NormalFormResult<C> parabolic_normal_form(const TruncatedSeries<C>& g, std::optional<int> order_hint = std::nullopt)
{
    detail::require_nonzero(g, "series");
    const int order = g.order();
    const C a1 = g[1];

    int k = 0;
    if constexpr (is_exact_v<C>) {
        auto detected = root_of_unity_order(a1);
        if (!detected)
            fail(ErrorKind::NotRootOfUnity, "a_1 is not one of +-1, +-i (the roots of unity of Q(i))");
        k = *detected;
        if (order_hint && *order_hint != k)
            fail(ErrorKind::NotRootOfUnity, "order hint disagrees with a_1");
    } else {
        if (order_hint) {
            auto detected = root_of_unity_order(a1, *order_hint);
            if (!detected || *detected != *order_hint)
                fail(ErrorKind::NotRootOfUnity, "a_1 is not a primitive root of unity of the hinted order");
            k = *order_hint;
        } else {
            auto detected = root_of_unity_order(a1);
            if (!detected)
                fail(ErrorKind::NotRootOfUnity, "a_1 is not a root of unity of order <= 64");
            k = *detected;
        }
    }

    auto gamma = TruncatedSeries<C>::identity(order);
    auto current = g;
    auto apply = [&](const TruncatedSeries<C>& phi) {
        current = conjugate(phi, current);
        gamma = compose(phi, gamma);
    };

    // 1. Non-resonant terms.
    C a1_pow = a1;
    for (int j = 2; j <= order; ++j) {
        a1_pow *= a1;
        if ((j - 1) % k == 0 || negligible(current[j], detail::kApproxTol))
            continue;
        apply(detail::near_identity<C>(current[j] / (a1 - a1_pow), j, order));
    }

    // 2. Normalize the k-th iterate between n+1 and 2n-2.
    auto h = iterate(current, k);
    auto h_minus_z = subtract(h, TruncatedSeries<C>::identity(order));
    int n = 0;
    for (int j = 1; j <= order && n == 0; ++j)
        if (!negligible(h_minus_z[j], detail::kApproxTol))
            n = j;
    if (n == 0)
        fail(ErrorKind::FiniteOrder, "g^" + std::to_string(k) + " = z to order " + std::to_string(order));
    if ((n - 1) % k != 0)
        throw std::logic_error("parabolic_normal_form: n - 1 is not a multiple of k");
    if (2 * n - 1 > order)
        fail(ErrorKind::OrderTooSmall, "need order >= 2n-1 = " + std::to_string(2 * n - 1));
    const C a = h[n];
    for (int d = n + 1; d <= 2 * n - 2; ++d) {
        if (negligible(h[d], detail::kApproxTol))
            continue;
        const int j = d - n + 1;
        const auto phi = detail::near_identity<C>(-h[d] / (a * from_int<C>(j - n)), j, order);
        apply(phi);
        h = conjugate(phi, h);
    }
    const C c = h[2 * n - 1] / (a * a);

    const C kk = from_int<C>(k);
    const C b1 = a1 / kk;
    const C c1 = c * a1 / kk - from_int<C>(static_cast<std::int64_t>(n) * (k - 1)) * a1 / (from_int<C>(2) * kk * kk);

    // 3. Scale.
    C lambda{};
    if constexpr (is_exact_v<C>) {
        auto roots = exact_roots(a, n - 1);
        if (roots.empty()) {
            std::ostringstream msg;
            msg << "scale lambda^" << n - 1 << " = " << a << " has no root in Q(i); invariants: k=" << k << " n=" << n
                << " c=" << c << " b1=" << b1 << " c1=" << c1;
            fail(ErrorKind::NoExactRoot, msg.str());
        }
        lambda = roots.front();
    } else {
        lambda = principal_root(a, n - 1);
    }
    gamma = compose(TruncatedSeries<C>::monomial(lambda, 1, order), gamma);

    std::vector<C> nf(static_cast<std::size_t>(order), from_int<C>(0));
    nf[0] = a1;
    nf[static_cast<std::size_t>(n - 1)] += b1;
    nf[static_cast<std::size_t>(2 * n - 2)] += c1;
    TruncatedSeries<C> normal_form(std::move(nf));
    detail::check_sound(gamma, g, normal_form, 2 * n - 1, "parabolic_normal_form");

    NormalFormResult<C> out{NormalFormKind::Parabolic, std::move(gamma), std::move(normal_form), 2 * n - 1};
    out.parabolic = ParabolicParameters<C>{k, n, c, b1, c1};
    return out;
}

// Picks the applicable normal form: Power for valuation >= 2, Parabolic when
// a_1 is a (detectable) root of unity, Linear otherwise.
template <Coefficient C>
NormalFormResult<C> normal_form(const TruncatedSeries<C>& g, std::optional<int> order_hint = std::nullopt)
{
    const int m = valuation(g);
    if (m >= 2)
        return boettcher_coordinate(g);
    bool root_of_unity = false;
    if constexpr (is_exact_v<C>)
        root_of_unity = root_of_unity_order(g[1]).has_value();
    else
        root_of_unity = order_hint.has_value() || root_of_unity_order(g[1]).has_value();
    if (root_of_unity) {
        try {
            return parabolic_normal_form(g, order_hint);
        } catch (const Error& e) {
            // g^k = z: linearizable when already linear (finite-order branch)
            if (e.kind() != ErrorKind::FiniteOrder)
                throw;
            return koenig_linearize(g);
        }
    }
    return koenig_linearize(g);
}

} // namespace germkit
