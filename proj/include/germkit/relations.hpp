#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "parallel.hpp"
#include "series.hpp"
#include "word.hpp"

namespace germkit {

// Relation and freeness certificates for <f, g> given as truncated series.
// Agreement to order N is necessary but not sufficient for equality of the
// underlying maps: FreeUpTo is conclusive, OrderNRelation is not.

template <Coefficient C>
struct RelationCertificate {
    enum class Kind { FreeUpTo, OrderNRelation, ExactRelation, SharedIteration, Levin, Commute };

    Kind kind = Kind::FreeUpTo;
    int order = 0;
    int max_len = 0;                   // FreeUpTo / OrderNRelation search bound
    std::optional<Word> w1, w2;        // relation sides
    std::int64_t m = 0, n = 0;         // SharedIteration: f^m = g^n
    std::int64_t k = 0, l = 0;         // Levin
    std::optional<TruncatedSeries<C>> lhs, rhs; // evaluated sides
    bool vanishing = false;            // both sides are zero at order N
};

template <class Kind>
constexpr const char* certificate_kind_name(Kind k)
{
    switch (k) {
    case Kind::FreeUpTo: return "FreeUpTo";
    case Kind::OrderNRelation: return "OrderNRelation";
    case Kind::ExactRelation: return "ExactRelation";
    case Kind::SharedIteration: return "SharedIteration";
    case Kind::Levin: return "Levin";
    case Kind::Commute: return "Commute";
    }
    return "?";
}

// f o g, allowing either side to vanish at the truncation order.
template <Coefficient C>
TruncatedSeries<C> compose_or_zero(const TruncatedSeries<C>& f, const TruncatedSeries<C>& g)
{
    detail::require_same_order(f, g);
    if (f.is_zero() || g.is_zero())
        return TruncatedSeries<C>::zero(f.order());
    return compose(f, g);
}

template <Coefficient C>
TruncatedSeries<C> evaluate_word(const Word& w, const TruncatedSeries<C>& f, const TruncatedSeries<C>& g)
{
    if (w.empty())
        fail(ErrorKind::InvalidArgument, "empty word");
    detail::require_same_order(f, g);
    detail::require_nonzero(f, "f");
    detail::require_nonzero(g, "g");
    auto acc = w.letters().back() == Letter::F ? f : g;
    for (auto it = w.letters().rbegin() + 1; it != w.letters().rend(); ++it)
        acc = compose_or_zero(*it == Letter::F ? f : g, acc);
    return acc;
}

namespace detail {

inline std::string bucket_key(const ExactSeries& s)
{
    std::ostringstream os;
    for (const auto& c : s.coefficients())
        os << to_string(c.re()) << ',' << to_string(c.im()) << ';';
    return os.str();
}

template <Coefficient C>
void require_exact(const char* op)
{
    if constexpr (!is_exact_v<C>)
        fail(ErrorKind::ModeMismatch, std::string(op) + " needs exact coefficients");
}

} // namespace detail

// Exhaustive enumeration of words of length 1..max_len (shortlex), bucketed by
// coefficient vector. Reports the first word whose value repeats together
// with the shortlex-least earlier word of the same value.
template <Coefficient C>
RelationCertificate<C> find_relations(const TruncatedSeries<C>& f, const TruncatedSeries<C>& g, int max_len = 8)
{
    detail::require_exact<C>("find_relations");
    detail::require_same_order(f, g);
    detail::require_nonzero(f, "f");
    detail::require_nonzero(g, "g");
    if (max_len < 1 || max_len > 24)
        fail(ErrorKind::InvalidArgument, "max_len must be in 1..24");

    RelationCertificate<C> cert;
    cert.order = f.order();
    cert.max_len = max_len;

    if constexpr (is_exact_v<C>) {
        std::map<std::string, Word> seen;
        std::vector<TruncatedSeries<C>> prev;
        for (int len = 1; len <= max_len; ++len) {
            const std::size_t count = std::size_t{1} << len;
            std::vector<std::optional<TruncatedSeries<C>>> layer(count);
            std::vector<std::string> keys(count);
            parallel_for(count, [&](std::size_t idx) {
                const auto& last = (idx & 1) ? g : f;
                layer[idx] = len == 1 ? last : compose_or_zero(prev[idx >> 1], last);
                keys[idx] = detail::bucket_key(*layer[idx]);
            });
            // merge in shortlex order so the reported pair is deterministic
            for (std::size_t idx = 0; idx < count; ++idx) {
                auto word = Word::from_index(idx, len);
                auto [it, inserted] = seen.emplace(keys[idx], word);
                if (!inserted) {
                    cert.kind = RelationCertificate<C>::Kind::OrderNRelation;
                    cert.w1 = word;
                    cert.w2 = it->second;
                    cert.lhs = *layer[idx];
                    cert.rhs = evaluate_word(it->second, f, g);
                    cert.vanishing = layer[idx]->is_zero();
                    return cert;
                }
            }
            prev.clear();
            for (auto& v : layer)
                prev.push_back(std::move(*v));
        }
    }
    cert.kind = RelationCertificate<C>::Kind::FreeUpTo;
    return cert;
}

// Search f^a = g^b at order N for 1 <= a <= max_m, 1 <= b <= max_n, least
// (a + b, a) first.
template <Coefficient C>
std::optional<RelationCertificate<C>> shared_iteration(const TruncatedSeries<C>& f, const TruncatedSeries<C>& g,
                                                       int max_m = 6, int max_n = 6)
{
    detail::require_exact<C>("shared_iteration");
    detail::require_same_order(f, g);
    detail::require_nonzero(f, "f");
    detail::require_nonzero(g, "g");
    if (max_m < 1 || max_n < 1)
        fail(ErrorKind::InvalidArgument, "iteration bounds must be positive");
    std::vector<TruncatedSeries<C>> fi{f}, gi{g};
    for (int a = 2; a <= max_m; ++a)
        fi.push_back(compose_or_zero(f, fi.back()));
    for (int b = 2; b <= max_n; ++b)
        gi.push_back(compose_or_zero(g, gi.back()));
    for (int total = 2; total <= max_m + max_n; ++total) {
        for (int a = std::max(1, total - max_n); a <= std::min(max_m, total - 1); ++a) {
            const int b = total - a;
            const auto& lhs = fi[static_cast<std::size_t>(a - 1)];
            const auto& rhs = gi[static_cast<std::size_t>(b - 1)];
            if (lhs == rhs) {
                RelationCertificate<C> cert;
                cert.kind = RelationCertificate<C>::Kind::SharedIteration;
                cert.order = f.order();
                cert.m = a;
                cert.n = b;
                cert.lhs = lhs;
                cert.rhs = rhs;
                cert.vanishing = lhs.is_zero();
                return cert;
            }
        }
    }
    return std::nullopt;
}

template <Coefficient C>
bool commute_check(const TruncatedSeries<C>& f, const TruncatedSeries<C>& g)
{
    detail::require_same_order(f, g);
    return agree_to_order(compose_or_zero(f, g), compose_or_zero(g, f), f.order());
}

// f^k o g^l = f^{2k} and g^l o f^k = g^{2l} at order N.
template <Coefficient C>
bool levin_verify(const TruncatedSeries<C>& f, const TruncatedSeries<C>& g, std::int64_t k, std::int64_t l)
{
    if (k < 1 || l < 1)
        fail(ErrorKind::InvalidArgument, "k and l must be positive");
    detail::require_same_order(f, g);
    detail::require_nonzero(f, "f");
    detail::require_nonzero(g, "g");
    auto iter = [](const TruncatedSeries<C>& s, std::int64_t times) {
        auto acc = s;
        for (std::int64_t i = 1; i < times; ++i)
            acc = compose_or_zero(s, acc);
        return acc;
    };
    const auto fk = iter(f, k);
    const auto gl = iter(g, l);
    const int n = f.order();
    return agree_to_order(compose_or_zero(fk, gl), iter(f, 2 * k), n) &&
           agree_to_order(compose_or_zero(gl, fk), iter(g, 2 * l), n);
}

template <Coefficient C>
RelationCertificate<C> levin_certificate(const TruncatedSeries<C>& f, const TruncatedSeries<C>& g, std::int64_t k,
                                         std::int64_t l)
{
    if (!levin_verify(f, g, k, l))
        fail(ErrorKind::LevinFails, "Levin identities do not hold at order " + std::to_string(f.order()));
    RelationCertificate<C> cert;
    cert.kind = RelationCertificate<C>::Kind::Levin;
    cert.order = f.order();
    cert.k = k;
    cert.l = l;
    return cert;
}

// Re-checks an emitted certificate by direct evaluation.
template <Coefficient C>
bool verify(const RelationCertificate<C>& cert, const TruncatedSeries<C>& f, const TruncatedSeries<C>& g)
{
    using K = typename RelationCertificate<C>::Kind;
    switch (cert.kind) {
    case K::FreeUpTo: {
        auto again = find_relations(f, g, cert.max_len);
        return again.kind == K::FreeUpTo;
    }
    case K::OrderNRelation:
    case K::ExactRelation:
        return cert.w1 && cert.w2 && *cert.w1 != *cert.w2 &&
               evaluate_word(*cert.w1, f, g) == evaluate_word(*cert.w2, f, g);
    case K::SharedIteration:
        return evaluate_word(Word::repeat(Letter::F, static_cast<int>(cert.m)), f, g) ==
               evaluate_word(Word::repeat(Letter::G, static_cast<int>(cert.n)), f, g);
    case K::Levin: return levin_verify(f, g, cert.k, cert.l);
    case K::Commute: return commute_check(f, g);
    }
    return false;
}

} // namespace germkit
