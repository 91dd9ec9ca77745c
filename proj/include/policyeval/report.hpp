#pragma once

#include <cstdio>
#include <string>
#include <string_view>

namespace policyeval {

/// Fixed-point decimal string, e.g. format_fixed(59.4683, 2) == "59.47".
/// Uses the platform snprintf, which rounds half to even at the boundary
/// exactly like printf("%.*f").
inline std::string format_fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
    return buf;
}

/// CSV field quoting: wrap in quotes when the value contains a comma,
/// quote, or newline; double any embedded quotes.
inline std::string csv_escape(std::string_view field) {
    bool needs_quotes = false;
    for (char c : field) {
        if (c == ',' || c == '"' || c == '\n' || c == '\r') {
            needs_quotes = true;
            break;
        }
    }
    if (!needs_quotes) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

}  // namespace policyeval
