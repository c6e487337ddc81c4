#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "coefficient.hpp"

namespace germkit {

// d-th roots of unity and of complex numbers, with the principal-branch
// convention argument in [0, 2*pi/d).

inline double argument_0_2pi(const Complex& z)
{
    double a = std::arg(z);
    return a < 0 ? a + 2 * std::numbers::pi : a;
}

inline Complex principal_root(const Complex& a, int d)
{
    return std::polar(std::pow(std::abs(a), 1.0 / d), argument_0_2pi(a) / d);
}

namespace detail {

using BigFloat = boost::multiprecision::cpp_bin_float_50;
using BigInt = boost::multiprecision::cpp_int;

inline BigFloat to_big(const Rational& q)
{
    return BigFloat(numerator(q).str()) / BigFloat(denominator(q).str());
}

// Best rational approximation of x by continued fractions, stopping once the
// error is below `eps` or the denominator exceeds `max_den`.
inline std::optional<Rational> reconstruct_rational(const BigFloat& x, const BigFloat& eps, const BigInt& max_den)
{
    BigInt p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    auto as_rational = [](const BigInt& p, const BigInt& q) { return Rational(Integer(p.str()), Integer(q.str())); };
    BigFloat r = x;
    for (int iter = 0; iter < 200; ++iter) {
        BigFloat fl = floor(r);
        BigInt a = fl.convert_to<BigInt>();
        BigInt p2 = a * p1 + p0;
        BigInt q2 = a * q1 + q0;
        if (q2 > max_den)
            return std::nullopt;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        BigFloat approx = BigFloat(p1) / BigFloat(q1);
        if (abs(x - approx) <= eps)
            return as_rational(p1, q1);
        BigFloat frac = r - fl;
        if (frac == 0)
            return as_rational(p1, q1);
        r = 1 / frac;
    }
    return std::nullopt;
}

} // namespace detail

// All d-th roots of `a` that lie in Q(i), ordered by argument in [0, 2*pi).
// Candidates come from a 50-digit floating evaluation followed by rational
// reconstruction; each candidate is confirmed exactly, so a returned root is
// always correct (roots with denominators beyond 10^20 are not found).
inline std::vector<GaussianRational> exact_roots(const GaussianRational& a, int d)
{
    using detail::BigFloat;
    if (d < 1 || a.is_zero())
        return {};
    if (d == 1)
        return {a};
    const BigFloat re = detail::to_big(a.re());
    const BigFloat im = detail::to_big(a.im());
    const BigFloat modulus = pow(sqrt(re * re + im * im), BigFloat(1) / d);
    BigFloat theta = atan2(im, re);
    const BigFloat two_pi = 2 * boost::math::constants::pi<BigFloat>();
    if (theta < 0)
        theta += two_pi;
    const BigFloat eps("1e-40");
    const detail::BigInt max_den("100000000000000000000");

    std::vector<GaussianRational> out;
    for (int k = 0; k < d; ++k) {
        BigFloat phi = (theta + two_pi * k) / d;
        auto rr = detail::reconstruct_rational(modulus * cos(phi), eps, max_den);
        auto ri = detail::reconstruct_rational(modulus * sin(phi), eps, max_den);
        if (!rr || !ri)
            continue;
        GaussianRational cand(*rr, *ri);
        if (ipow(cand, d) == a)
            out.push_back(std::move(cand));
    }
    return out;
}

// Multiplicative order k of a root of unity, or nullopt. Exact mode knows
// only the roots of unity of Q(i): +-1, +-i.
inline std::optional<int> root_of_unity_order(const GaussianRational& a)
{
    const GaussianRational i = GaussianRational::i();
    if (a == GaussianRational(1))
        return 1;
    if (a == GaussianRational(-1))
        return 2;
    if (a == i || a == -i)
        return 4;
    return std::nullopt;
}

// Approximate mode: smallest k <= max_order with |a^k - 1| <= tol.
inline std::optional<int> root_of_unity_order(const Complex& a, int max_order = 64, double tol = 1e-9)
{
    if (std::abs(std::abs(a) - 1.0) > tol)
        return std::nullopt;
    Complex p(1.0, 0.0);
    for (int k = 1; k <= max_order; ++k) {
        p *= a;
        if (std::abs(p - 1.0) <= tol)
            return k;
    }
    return std::nullopt;
}

} // namespace germkit
