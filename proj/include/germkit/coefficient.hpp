#pragma once

#include <cmath>
#include <complex>
#include <concepts>
#include <cstdint>
#include <type_traits>

#include "gaussian_rational.hpp"

namespace germkit {

// Approximate coefficients: plain binary64 complex numbers.
using Complex = std::complex<double>;

// The two coefficient rings a series can live over. Exact mode is the
// default for everything that produces certificates.
template <class C>
inline constexpr bool is_exact_v = std::is_same_v<C, GaussianRational>;

template <class C>
concept Coefficient = std::is_same_v<C, GaussianRational> || std::is_same_v<C, Complex>;

inline bool is_zero(const GaussianRational& c) { return c.is_zero(); }
inline bool is_zero(const Complex& c) { return c == Complex(0.0, 0.0); }

inline Complex to_complex(const GaussianRational& c) { return c.to_complex(); }
inline Complex to_complex(const Complex& c) { return c; }

inline Complex ipow(const Complex& base, std::int64_t e)
{
    Complex acc(1.0, 0.0);
    Complex b = e < 0 ? Complex(1.0, 0.0) / base : base;
    for (auto n = e < 0 ? -e : e; n > 0; n >>= 1) {
        if (n & 1)
            acc *= b;
        b *= b;
    }
    return acc;
}

template <Coefficient C>
C from_int(std::int64_t v)
{
    if constexpr (is_exact_v<C>)
        return GaussianRational(Rational(v));
    else
        return Complex(static_cast<double>(v), 0.0);
}

// Equality used by the algebra. Exact mode compares exactly; approximate
// mode compares with a relative tolerance.
inline bool coeff_equal(const GaussianRational& a, const GaussianRational& b, double = 0.0) { return a == b; }
inline bool coeff_equal(const Complex& a, const Complex& b, double tol)
{
    return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

inline bool negligible(const GaussianRational& c, double = 0.0) { return c.is_zero(); }
inline bool negligible(const Complex& c, double tol) { return std::abs(c) <= tol; }

} // namespace germkit
