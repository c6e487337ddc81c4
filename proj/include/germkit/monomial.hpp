#pragma once

#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "series.hpp"
#include "word.hpp"

namespace germkit {

namespace detail {

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b)
{
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r))
        fail(ErrorKind::InvalidArgument, "exponent arithmetic overflows 64 bits; lower the search bound");
    return r;
}

inline std::int64_t checked_add(std::int64_t a, std::int64_t b)
{
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r))
        fail(ErrorKind::InvalidArgument, "exponent arithmetic overflows 64 bits; lower the search bound");
    return r;
}

inline std::int64_t mod(std::int64_t a, std::int64_t q)
{
    auto r = a % q;
    return r < 0 ? r + q : r;
}

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m)
{
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

inline std::uint64_t powmod(std::uint64_t base, std::uint64_t e, std::uint64_t m)
{
    std::uint64_t acc = 1 % m;
    base %= m;
    for (; e > 0; e >>= 1) {
        if (e & 1)
            acc = mulmod(acc, base, m);
        base = mulmod(base, base, m);
    }
    return acc;
}

inline std::vector<std::pair<std::uint64_t, int>> factorize(std::uint64_t n)
{
    std::vector<std::pair<std::uint64_t, int>> out;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % p)
            continue;
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.emplace_back(p, e);
    }
    if (n > 1)
        out.emplace_back(n, 1);
    return out;
}

// Multiplicative order of m modulo n, gcd(m, n) = 1, n >= 1.
inline std::uint64_t multiplicative_order(std::uint64_t m, std::uint64_t n)
{
    if (n == 1)
        return 1;
    std::uint64_t phi = n;
    for (auto [p, e] : factorize(n))
        phi = phi / p * (p - 1);
    std::uint64_t ord = phi;
    for (auto [p, e] : factorize(phi)) {
        for (int i = 0; i < e && ord % p == 0 && powmod(m, ord / p, n) == 1; ++i)
            ord /= p;
    }
    return ord;
}

} // namespace detail

// omega^exponent for a declared generator omega of multiplicative order
// base_order (e^{2 pi i / q}), or of infinite order when base_order is empty.
struct UnitScale {
    std::int64_t exponent = 0;
    std::optional<std::int64_t> base_order;

    UnitScale() = default;
    UnitScale(std::int64_t e, std::optional<std::int64_t> q) : exponent(e), base_order(q)
    {
        if (base_order) {
            if (*base_order < 1)
                fail(ErrorKind::InvalidArgument, "base order must be positive");
            exponent = detail::mod(exponent, *base_order);
        }
    }

    bool operator==(const UnitScale&) const = default;
};

// lambda z^d with lambda a unit scale.
struct Monomial {
    UnitScale scale;
    std::int64_t degree = 1;

    Monomial(UnitScale s, std::int64_t d) : scale(std::move(s)), degree(d)
    {
        if (degree < 1)
            fail(ErrorKind::InvalidArgument, "monomial degree must be >= 1");
    }

    // z^d over the given base.
    static Monomial power(std::int64_t d, std::optional<std::int64_t> base_order) { return {UnitScale(0, base_order), d}; }

    bool operator==(const Monomial&) const = default;
};

// (l1 z^d1) o (l2 z^d2) = l1 l2^d1 z^{d1 d2}.
inline Monomial mono_compose(const Monomial& p, const Monomial& q)
{
    if (p.scale.base_order != q.scale.base_order)
        fail(ErrorKind::BaseMismatch, "monomials use different unit bases");
    auto e = detail::checked_add(p.scale.exponent, detail::checked_mul(q.scale.exponent, p.degree));
    return {UnitScale(e, p.scale.base_order), detail::checked_mul(p.degree, q.degree)};
}

inline Monomial mono_iterate(const Monomial& f, std::int64_t n)
{
    if (n < 0)
        fail(ErrorKind::InvalidArgument, "iteration count must be non-negative");
    Monomial acc = Monomial::power(1, f.scale.base_order);
    for (std::int64_t i = 0; i < n; ++i)
        acc = mono_compose(f, acc);
    return acc;
}

inline Monomial evaluate_word(const Word& w, const Monomial& f, const Monomial& g)
{
    if (w.empty())
        fail(ErrorKind::InvalidArgument, "empty word");
    Monomial acc = Monomial::power(1, f.scale.base_order);
    for (auto it = w.letters().rbegin(); it != w.letters().rend(); ++it)
        acc = mono_compose(*it == Letter::F ? f : g, acc);
    return acc;
}

// Embedding into truncated series. Exact only for omega in Q(i): base orders
// 1, 2, 4, and the infinite-order marker, which is realized by the unit
// (3 + 4i)/5 (on the unit circle, not a root of unity).
inline GaussianRational exact_unit(const UnitScale& s)
{
    GaussianRational omega;
    if (!s.base_order)
        omega = GaussianRational(Rational(3, 5), Rational(4, 5));
    else if (*s.base_order == 1)
        omega = GaussianRational(1);
    else if (*s.base_order == 2)
        omega = GaussianRational(-1);
    else if (*s.base_order == 4)
        omega = GaussianRational::i();
    else
        fail(ErrorKind::InvalidArgument, "base order " + std::to_string(*s.base_order) + " is not exact in Q(i)");
    return ipow(omega, s.exponent);
}

inline Complex approx_unit(const UnitScale& s)
{
    if (!s.base_order)
        return exact_unit(s).to_complex();
    const double pi = 3.14159265358979323846;
    return std::polar(1.0, 2 * pi * static_cast<double>(s.exponent) / static_cast<double>(*s.base_order));
}

inline ExactSeries to_exact_series(const Monomial& p, int order)
{
    if (p.degree > order)
        fail(ErrorKind::OrderTooSmall, "degree exceeds truncation order");
    return ExactSeries::monomial(exact_unit(p.scale), static_cast<int>(p.degree), order);
}

inline ApproxSeries to_approx_series(const Monomial& p, int order)
{
    if (p.degree > order)
        fail(ErrorKind::OrderTooSmall, "degree exceeds truncation order");
    return ApproxSeries::monomial(approx_unit(p.scale), static_cast<int>(p.degree), order);
}

// Decomposition of the cyclic group W = <omega> of order q as
// Deck(f^r) x Aut(f^s) for f = z^m.
struct DeckAutSplit {
    std::int64_t q_d = 1; // |Deck(f^r)|: part of q built from primes dividing m
    std::int64_t q_a = 1; // |Aut(f^s)|: the rest, coprime to m
    std::int64_t r = 0;   // least r with q_d | m^r
    std::int64_t s = 1;   // multiplicative order of m mod q_a
    std::int64_t alpha = 0;
    std::int64_t beta = 1;

    bool operator==(const DeckAutSplit&) const = default;
};

inline DeckAutSplit deck_aut_split(std::optional<std::int64_t> q, std::int64_t m)
{
    if (!q)
        fail(ErrorKind::InfiniteOrder, "the unit group has infinite order");
    if (*q < 1 || m < 2)
        fail(ErrorKind::InvalidArgument, "need q >= 1 and m >= 2");
    DeckAutSplit out;
    auto rest = static_cast<std::uint64_t>(*q);
    std::uint64_t qd = 1;
    std::int64_t r = 0;
    for (auto [p, e] : detail::factorize(rest)) {
        if (static_cast<std::uint64_t>(m) % p != 0)
            continue;
        std::uint64_t pe = 1;
        for (int i = 0; i < e; ++i)
            pe *= p;
        qd *= pe;
        // v_p(m^r) = r v_p(m) >= e
        std::int64_t vp = 0;
        for (auto mm = static_cast<std::uint64_t>(m); mm % p == 0; mm /= p)
            ++vp;
        r = std::max<std::int64_t>(r, (e + vp - 1) / vp);
    }
    out.q_d = static_cast<std::int64_t>(qd);
    out.q_a = *q / out.q_d;
    out.r = r;
    out.s = static_cast<std::int64_t>(
        detail::multiplicative_order(static_cast<std::uint64_t>(m) % static_cast<std::uint64_t>(out.q_a),
                                     static_cast<std::uint64_t>(out.q_a)));
    out.alpha = out.r * out.s;
    out.beta = out.s;
    return out;
}

inline bool levin_check(const Monomial& f, const Monomial& g, std::int64_t k, std::int64_t l)
{
    if (k < 1 || l < 1)
        fail(ErrorKind::InvalidArgument, "k and l must be positive");
    const auto fk = mono_iterate(f, k);
    const auto gl = mono_iterate(g, l);
    return mono_compose(fk, gl) == mono_iterate(f, 2 * k) && mono_compose(gl, fk) == mono_iterate(g, 2 * l);
}

// Verdict of exhaustive word enumeration for <f, g> with monomial generators.
struct PairClass {
    enum class Kind { LevinPair, FreeAbelianWitness, FreeUpTo, ExactRelation };
    Kind kind = Kind::FreeUpTo;
    int bound = 0;                // search bound used
    std::int64_t k = 0, l = 0;    // LevinPair
    std::optional<Word> w1, w2;   // ExactRelation, and the first collision found otherwise
    std::optional<Monomial> value; // common value of w1, w2
};

inline const char* to_string(PairClass::Kind k)
{
    switch (k) {
    case PairClass::Kind::LevinPair: return "LevinPair";
    case PairClass::Kind::FreeAbelianWitness: return "FreeAbelianWitness";
    case PairClass::Kind::FreeUpTo: return "FreeUpTo";
    case PairClass::Kind::ExactRelation: return "ExactRelation";
    }
    return "?";
}

struct Collision {
    Word later;   // first word (shortlex) whose value repeats
    Word earlier; // shortlex-least earlier word with the same value
    Monomial value;
};

// Enumerate all words of length 1..max_len in shortlex order; report the first
// word whose (exponent, degree) value was already seen.
inline std::optional<Collision> first_collision(const Monomial& f, const Monomial& g, int max_len)
{
    if (f.scale.base_order != g.scale.base_order)
        fail(ErrorKind::BaseMismatch, "f and g use different unit bases");
    std::map<std::pair<std::int64_t, std::int64_t>, Word> seen;
    // values of the previous length, indexed like Word::from_index
    std::vector<Monomial> prev;
    for (int len = 1; len <= max_len; ++len) {
        std::vector<Monomial> cur;
        const std::size_t count = std::size_t{1} << len;
        cur.reserve(count);
        for (std::size_t idx = 0; idx < count; ++idx) {
            // word = prefix . last, value = value(prefix) o last
            const Monomial& last = (idx & 1) ? g : f;
            Monomial v = len == 1 ? last : mono_compose(prev[idx >> 1], last);
            auto key = std::make_pair(v.scale.exponent, v.degree);
            auto word = Word::from_index(idx, len);
            auto [it, inserted] = seen.emplace(key, word);
            if (!inserted)
                return Collision{std::move(word), it->second, v};
            cur.push_back(std::move(v));
        }
        prev = std::move(cur);
    }
    return std::nullopt;
}

// Shared iteration f^a = g^b with a, b <= bound, least (a + b, a).
inline std::optional<std::pair<std::int64_t, std::int64_t>> mono_shared_iteration(const Monomial& f, const Monomial& g,
                                                                                    int bound)
{
    for (int total = 2; total <= 2 * bound; ++total)
        for (int a = 1; a < total; ++a) {
            int b = total - a;
            if (a > bound || b > bound)
                continue;
            if (mono_iterate(f, a) == mono_iterate(g, b))
                return std::make_pair<std::int64_t, std::int64_t>(a, b);
        }
    return std::nullopt;
}

// Classify <f, g>:
//  - no coincidence among words of length <= bound: FreeUpTo(bound);
//  - otherwise, with L the length of the first coincidence: LevinPair(k, l)
//    for the least k + l <= L satisfying both Levin identities; else if f, g
//    commute, LevinPair from a shared iteration f^a = g^b (a, b <= bound) or
//    FreeAbelianWitness; else ExactRelation(w1, w2).
inline PairClass classify_pair(const Monomial& f, const Monomial& g, int search_bound = 10)
{
    if (f.scale.base_order != g.scale.base_order)
        fail(ErrorKind::BaseMismatch, "f and g use different unit bases");
    if (f.degree < 2 || g.degree < 2)
        fail(ErrorKind::InvalidArgument, "classify_pair needs degrees >= 2");
    if (search_bound < 1)
        fail(ErrorKind::InvalidArgument, "search bound must be positive");

    PairClass out;
    out.bound = search_bound;
    auto hit = first_collision(f, g, search_bound);
    if (!hit) {
        out.kind = PairClass::Kind::FreeUpTo;
        return out;
    }
    out.w1 = hit->later;
    out.w2 = hit->earlier;
    out.value = hit->value;

    const auto len = static_cast<std::int64_t>(hit->later.size());
    for (std::int64_t total = 2; total <= len; ++total)
        for (std::int64_t k = 1; k < total; ++k)
            if (levin_check(f, g, k, total - k)) {
                out.kind = PairClass::Kind::LevinPair;
                out.k = k;
                out.l = total - k;
                return out;
            }

    if (mono_compose(f, g) == mono_compose(g, f)) {
        if (auto shared = mono_shared_iteration(f, g, search_bound)) {
            out.kind = PairClass::Kind::LevinPair;
            out.k = shared->first;
            out.l = shared->second;
            return out;
        }
        out.kind = PairClass::Kind::FreeAbelianWitness;
        return out;
    }
    out.kind = PairClass::Kind::ExactRelation;
    return out;
}

} // namespace germkit
