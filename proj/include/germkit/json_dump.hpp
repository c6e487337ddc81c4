#pragma once

#include <cmath>
#include <cstdio>
#include <string>

#include <json.hpp>

namespace germkit {

namespace detail {

inline void dump_float(std::string& out, double v)
{
    if (!std::isfinite(v)) {
        out += "null";
        return;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
    // keep it a float for readers that distinguish integers
    if (std::string_view(buf).find_first_of(".eEn") == std::string_view::npos)
        out += ".0";
}

inline void dump_into(std::string& out, const nlohmann::json& j, int indent, int depth)
{
    auto newline = [&](int d) {
        if (indent < 0)
            return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (j.type()) {
    case nlohmann::json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first)
                out += ',';
            first = false;
            newline(depth + 1);
            out += nlohmann::json(it.key()).dump();
            out += indent < 0 ? ":" : ": ";
            dump_into(out, it.value(), indent, depth + 1);
        }
        newline(depth);
        out += '}';
        return;
    }
    case nlohmann::json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        out += '[';
        bool first = true;
        for (const auto& v : j) {
            if (!first)
                out += ',';
            first = false;
            newline(depth + 1);
            dump_into(out, v, indent, depth + 1);
        }
        newline(depth);
        out += ']';
        return;
    }
    case nlohmann::json::value_t::number_float:
        dump_float(out, j.get<double>());
        return;
    default:
        out += j.dump();
    }
}

} // namespace detail

// Serializes like json::dump but prints every float with 17 significant
// digits, so output is byte-stable and round-trips exactly.
inline std::string dump_json(const nlohmann::json& j, int indent = 2)
{
    std::string out;
    detail::dump_into(out, j, indent, 0);
    return out;
}

} // namespace germkit
