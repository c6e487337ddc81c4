#pragma once

#include <complex>
#include <cstdint>
#include <ostream>
#include <string>
#include <utility>

#include <boost/multiprecision/gmp.hpp>

#include "error.hpp"

namespace germkit {

using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;

// Parse "p", "p/q" or "-p/q" into a canonical rational (lowest terms,
// positive denominator).
inline Rational parse_rational(const std::string& text)
{
    auto slash = text.find('/');
    try {
        if (slash == std::string::npos)
            return Rational(Integer(text));
        Integer num(text.substr(0, slash));
        Integer den(text.substr(slash + 1));
        if (den == 0)
            fail(ErrorKind::ParseError, "zero denominator in '" + text + "'");
        return Rational(num, den);
    } catch (const std::runtime_error& e) {
        if (dynamic_cast<const Error*>(&e))
            throw;
        fail(ErrorKind::ParseError, "malformed rational '" + text + "'");
    }
}

inline std::string to_string(const Rational& q)
{
    if (denominator(q) == 1)
        return numerator(q).str();
    return numerator(q).str() + "/" + denominator(q).str();
}

// Element of Q(i): re + im*i with exact rational parts.
class GaussianRational {
public:
    GaussianRational() = default;
    GaussianRational(long v) : re_(v) {} // NOLINT: integers embed implicitly
    GaussianRational(Rational re, Rational im = Rational(0)) : re_(std::move(re)), im_(std::move(im)) {}

    static GaussianRational i() { return {Rational(0), Rational(1)}; }

    const Rational& re() const { return re_; }
    const Rational& im() const { return im_; }

    bool is_zero() const { return re_ == 0 && im_ == 0; }
    bool is_real() const { return im_ == 0; }

    GaussianRational conj() const { return {re_, -im_}; }
    Rational norm() const { return re_ * re_ + im_ * im_; }

    GaussianRational& operator+=(const GaussianRational& o)
    {
        re_ += o.re_;
        im_ += o.im_;
        return *this;
    }
    GaussianRational& operator-=(const GaussianRational& o)
    {
        re_ -= o.re_;
        im_ -= o.im_;
        return *this;
    }
    GaussianRational& operator*=(const GaussianRational& o)
    {
        if (o.im_ == 0) {
            re_ *= o.re_;
            im_ *= o.re_;
            return *this;
        }
        Rational r = re_ * o.re_ - im_ * o.im_;
        Rational s = re_ * o.im_ + im_ * o.re_;
        re_ = std::move(r);
        im_ = std::move(s);
        return *this;
    }
    GaussianRational& operator/=(const GaussianRational& o)
    {
        if (o.is_zero())
            fail(ErrorKind::InvalidArgument, "division by zero in Q(i)");
        if (o.im_ == 0) {
            re_ /= o.re_;
            im_ /= o.re_;
            return *this;
        }
        Rational n = o.norm();
        *this *= o.conj();
        re_ /= n;
        im_ /= n;
        return *this;
    }

    friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
    friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
    friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
    friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }
    friend GaussianRational operator-(const GaussianRational& a) { return {-a.re_, -a.im_}; }

    friend bool operator==(const GaussianRational& a, const GaussianRational& b)
    {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }

    std::complex<double> to_complex() const
    {
        return {static_cast<double>(re_), static_cast<double>(im_)};
    }

    friend std::ostream& operator<<(std::ostream& os, const GaussianRational& q)
    {
        os << to_string(q.re_);
        if (q.im_ != 0)
            os << (q.im_ > 0 ? "+" : "-") << to_string(abs(q.im_)) << "i";
        return os;
    }

private:
    Rational re_{0};
    Rational im_{0};
};

inline GaussianRational ipow(GaussianRational base, std::int64_t e)
{
    if (e < 0) {
        base = GaussianRational(1) / base;
        e = -e;
    }
    GaussianRational acc(1);
    while (e > 0) {
        if (e & 1)
            acc *= base;
        e >>= 1;
        if (e > 0)
            base *= base;
    }
    return acc;
}

} // namespace germkit
