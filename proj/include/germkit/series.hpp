#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "coefficient.hpp"
#include "error.hpp"

namespace germkit {

inline constexpr int kDefaultOrder = 16;

// Element a_1 z + a_2 z^2 + ... + a_N z^N of the semigroup of formal series
// without constant term, truncated at order N. Coefficient a_j is stored at
// index j-1. Values are immutable once built.
template <Coefficient C>
class TruncatedSeries {
public:
    using coefficient_type = C;

    explicit TruncatedSeries(std::vector<C> coeffs) : coeffs_(std::move(coeffs))
    {
        if (coeffs_.empty())
            fail(ErrorKind::InvalidArgument, "truncation order must be at least 1");
    }

    // The zero series of order N.
    static TruncatedSeries zero(int order) { return TruncatedSeries(std::vector<C>(checked(order), from_int<C>(0))); }

    static TruncatedSeries identity(int order) { return monomial(from_int<C>(1), 1, order); }

    // c z^d truncated at `order`; vanishes when d > order.
    static TruncatedSeries monomial(const C& c, int degree, int order)
    {
        if (degree < 1)
            fail(ErrorKind::InvalidArgument, "monomial degree must be >= 1");
        std::vector<C> v(checked(order), from_int<C>(0));
        if (degree <= order)
            v[degree - 1] = c;
        return TruncatedSeries(std::move(v));
    }

    int order() const noexcept { return static_cast<int>(coeffs_.size()); }

    // Coefficient of z^j, 1 <= j <= order.
    const C& operator[](int j) const { return coeffs_.at(static_cast<std::size_t>(j - 1)); }

    const std::vector<C>& coefficients() const noexcept { return coeffs_; }

    bool is_zero() const
    {
        for (const auto& c : coeffs_)
            if (!germkit::is_zero(c))
                return false;
        return true;
    }

    // Index of the first nonzero coefficient; nullopt for the zero series.
    std::optional<int> try_valuation() const
    {
        for (std::size_t i = 0; i < coeffs_.size(); ++i)
            if (!germkit::is_zero(coeffs_[i]))
                return static_cast<int>(i + 1);
        return std::nullopt;
    }

    // Copy with a different truncation order: drops high terms or pads zeros.
    TruncatedSeries with_order(int order) const
    {
        std::vector<C> v(checked(order), from_int<C>(0));
        for (std::size_t i = 0; i < v.size() && i < coeffs_.size(); ++i)
            v[i] = coeffs_[i];
        return TruncatedSeries(std::move(v));
    }

    TruncatedSeries with_coefficient(int j, C value) const
    {
        auto v = coeffs_;
        v.at(static_cast<std::size_t>(j - 1)) = std::move(value);
        return TruncatedSeries(std::move(v));
    }

    friend bool operator==(const TruncatedSeries& a, const TruncatedSeries& b) { return a.coeffs_ == b.coeffs_; }

    friend std::ostream& operator<<(std::ostream& os, const TruncatedSeries& s)
    {
        bool first = true;
        for (int j = 1; j <= s.order(); ++j) {
            if (germkit::is_zero(s[j]))
                continue;
            if (!first)
                os << " + ";
            os << "(" << s[j] << ")z^" << j;
            first = false;
        }
        if (first)
            os << "0";
        return os << " + O(z^" << s.order() + 1 << ")";
    }

private:
    static std::size_t checked(int order)
    {
        if (order < 1)
            fail(ErrorKind::InvalidArgument, "truncation order must be at least 1");
        return static_cast<std::size_t>(order);
    }

    std::vector<C> coeffs_;
};

using ExactSeries = TruncatedSeries<GaussianRational>;
using ApproxSeries = TruncatedSeries<Complex>;

namespace detail {

// Dense truncated products on coefficient vectors with an explicit constant
// slot (index k holds the z^k coefficient).
template <Coefficient C>
std::vector<C> mul_trunc(const std::vector<C>& a, const std::vector<C>& b, std::size_t len)
{
    std::vector<C> out(len, from_int<C>(0));
    for (std::size_t i = 0; i < a.size() && i < len; ++i) {
        if (is_zero(a[i]))
            continue;
        for (std::size_t j = 0; j < b.size() && i + j < len; ++j) {
            if (is_zero(b[j]))
                continue;
            out[i + j] += a[i] * b[j];
        }
    }
    return out;
}

template <Coefficient C>
std::vector<C> with_constant_slot(const TruncatedSeries<C>& s)
{
    std::vector<C> v;
    v.reserve(static_cast<std::size_t>(s.order()) + 1);
    v.push_back(from_int<C>(0));
    v.insert(v.end(), s.coefficients().begin(), s.coefficients().end());
    return v;
}

template <Coefficient C>
void require_nonzero(const TruncatedSeries<C>& s, const char* what)
{
    if (s.is_zero())
        fail(ErrorKind::ZeroSeries, std::string(what) + " is identically zero");
}

template <Coefficient C>
void require_same_order(const TruncatedSeries<C>& a, const TruncatedSeries<C>& b)
{
    if (a.order() != b.order())
        fail(ErrorKind::OrderMismatch, "orders " + std::to_string(a.order()) + " and " + std::to_string(b.order()) +
                                           " differ; pad or truncate first");
}

} // namespace detail

template <Coefficient C>
int valuation(const TruncatedSeries<C>& f)
{
    auto v = f.try_valuation();
    if (!v)
        fail(ErrorKind::ZeroSeries, "valuation of the zero series");
    return *v;
}

// Powers s, s^2, ..., s^count (ordinary products, not iterates), truncated
// at the order of s. Entry k-1 holds s^k with a constant slot.
template <Coefficient C>
std::vector<std::vector<C>> power_table(const TruncatedSeries<C>& s, int count)
{
    const auto len = static_cast<std::size_t>(s.order()) + 1;
    std::vector<std::vector<C>> pw;
    pw.reserve(static_cast<std::size_t>(count));
    pw.push_back(detail::with_constant_slot(s));
    for (int k = 2; k <= count; ++k)
        pw.push_back(detail::mul_trunc(pw.back(), pw.front(), len));
    return pw;
}

// f o g truncated at the common order N: sum_i f_i g^i.
template <Coefficient C>
TruncatedSeries<C> compose(const TruncatedSeries<C>& f, const TruncatedSeries<C>& g)
{
    detail::require_same_order(f, g);
    detail::require_nonzero(f, "outer series");
    detail::require_nonzero(g, "inner series");
    const int n = f.order();
    const auto len = static_cast<std::size_t>(n) + 1;

    // Horner in g: ((f_N g + f_{N-1}) g + ...) g. Every partial product has
    // valuation >= 1 so truncation at N never loses a needed term.
    const auto gv = detail::with_constant_slot(g);
    std::vector<C> acc(len, from_int<C>(0));
    for (int i = n; i >= 1; --i) {
        acc[0] += f[i];
        acc = detail::mul_trunc(acc, gv, len);
    }
    return TruncatedSeries<C>(std::vector<C>(acc.begin() + 1, acc.end()));
}

// Compositional inverse in the group of units (a_1 != 0). Solves g o f = z
// one order at a time: a_1^j g_j = [j = 1] - sum_{i<j} g_i [f^i]_j.
template <Coefficient C>
TruncatedSeries<C> invert(const TruncatedSeries<C>& f)
{
    if (is_zero(f[1]))
        fail(ErrorKind::NotInvertible, "linear coefficient is zero");
    const int n = f.order();
    const auto pw = power_table(f, n);
    std::vector<C> g(static_cast<std::size_t>(n), from_int<C>(0));
    for (int j = 1; j <= n; ++j) {
        C rhs = from_int<C>(j == 1 ? 1 : 0);
        for (int i = 1; i < j; ++i) {
            const auto& fij = pw[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)];
            if (!is_zero(g[static_cast<std::size_t>(i - 1)]) && !is_zero(fij))
                rhs -= g[static_cast<std::size_t>(i - 1)] * fij;
        }
        g[static_cast<std::size_t>(j - 1)] = rhs / pw[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(j)];
    }
    return TruncatedSeries<C>(std::move(g));
}

// f^n under composition; f^0 = z. Binary powering relies on associativity.
template <Coefficient C>
TruncatedSeries<C> iterate(const TruncatedSeries<C>& f, std::int64_t n)
{
    if (n < 0)
        fail(ErrorKind::InvalidArgument, "iteration count must be non-negative");
    detail::require_nonzero(f, "series");
    auto acc = TruncatedSeries<C>::identity(f.order());
    auto base = f;
    while (n > 0) {
        if (n & 1)
            acc = compose(base, acc);
        n >>= 1;
        if (n > 0)
            base = compose(base, base);
    }
    return acc;
}

// Coefficientwise difference; used for residual checks (the result may have
// arbitrary coefficients, including a nonzero linear term).
template <Coefficient C>
TruncatedSeries<C> subtract(const TruncatedSeries<C>& a, const TruncatedSeries<C>& b)
{
    detail::require_same_order(a, b);
    auto v = a.coefficients();
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] -= b.coefficients()[i];
    return TruncatedSeries<C>(std::move(v));
}

// Agreement through order `upto` (defaults to the full common order).
template <Coefficient C>
bool agree_to_order(const TruncatedSeries<C>& a, const TruncatedSeries<C>& b, int upto, double tol = 1e-10)
{
    upto = std::min({upto, a.order(), b.order()});
    for (int j = 1; j <= upto; ++j)
        if (!coeff_equal(a[j], b[j], tol))
            return false;
    return true;
}

inline ApproxSeries to_approx(const ExactSeries& s)
{
    std::vector<Complex> v;
    v.reserve(s.coefficients().size());
    for (const auto& c : s.coefficients())
        v.push_back(c.to_complex());
    return ApproxSeries(std::move(v));
}

} // namespace germkit
