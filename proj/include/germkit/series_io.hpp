#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "series.hpp"

namespace germkit {

using AnySeries = std::variant<ExactSeries, ApproxSeries>;

// JSON series format:
//   {"order": N, "coeffs": [[re, im], ...]}
// entry i holds a_{i+1}. Exact mode writes lowest-terms rational strings
// ("p/q" or "p"); approximate mode writes JSON numbers. Missing trailing
// coefficients are zero; "order" is authoritative.

inline nlohmann::json coefficient_to_json(const GaussianRational& c)
{
    return nlohmann::json::array({to_string(c.re()), to_string(c.im())});
}

inline nlohmann::json coefficient_to_json(const Complex& c) { return nlohmann::json::array({c.real(), c.imag()}); }

template <Coefficient C>
nlohmann::json series_to_json(const TruncatedSeries<C>& s)
{
    nlohmann::json coeffs = nlohmann::json::array();
    for (const auto& c : s.coefficients())
        coeffs.push_back(coefficient_to_json(c));
    return {{"order", s.order()}, {"coeffs", std::move(coeffs)}};
}

namespace detail {

inline bool entry_is_exact(const nlohmann::json& e)
{
    return e.is_array() && e.size() == 2 && e[0].is_string() && e[1].is_string();
}

inline bool entry_is_approx(const nlohmann::json& e)
{
    return e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number();
}

} // namespace detail

inline AnySeries series_from_json(const nlohmann::json& j)
{
    if (!j.is_object() || !j.contains("order") || !j.contains("coeffs"))
        fail(ErrorKind::ParseError, "series JSON needs \"order\" and \"coeffs\"");
    if (!j["order"].is_number_integer() || j["order"].get<long long>() < 1)
        fail(ErrorKind::ParseError, "\"order\" must be a positive integer");
    const auto& coeffs = j["coeffs"];
    if (!coeffs.is_array())
        fail(ErrorKind::ParseError, "\"coeffs\" must be an array");
    const int order = j["order"].get<int>();
    if (static_cast<int>(coeffs.size()) > order)
        fail(ErrorKind::ParseError, "more coefficients than the declared order");

    bool exact = true;
    bool approx = true;
    for (const auto& e : coeffs) {
        exact = exact && detail::entry_is_exact(e);
        approx = approx && detail::entry_is_approx(e);
    }
    if (coeffs.empty() || exact) {
        std::vector<GaussianRational> v;
        for (const auto& e : coeffs)
            v.emplace_back(parse_rational(e[0].get<std::string>()), parse_rational(e[1].get<std::string>()));
        v.resize(static_cast<std::size_t>(order));
        return ExactSeries(std::move(v));
    }
    if (approx) {
        std::vector<Complex> v;
        for (const auto& e : coeffs)
            v.emplace_back(e[0].get<double>(), e[1].get<double>());
        v.resize(static_cast<std::size_t>(order));
        return ApproxSeries(std::move(v));
    }
    fail(ErrorKind::ModeMismatch, "coefficients mix exact strings and numbers (or are malformed)");
}

inline AnySeries parse_series(const std::string& text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::ParseError, e.what());
    }
    return series_from_json(j);
}

inline AnySeries load_series(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::IoError, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_series(ss.str());
}

} // namespace germkit
