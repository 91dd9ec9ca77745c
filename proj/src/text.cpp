#include "policyeval/text.hpp"

#include <cctype>

namespace policyeval {

namespace {

bool is_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace

std::string trim(std::string_view raw) {
    std::size_t begin = 0;
    std::size_t end = raw.size();
    while (begin < end && is_space(static_cast<unsigned char>(raw[begin]))) ++begin;
    while (end > begin && is_space(static_cast<unsigned char>(raw[end - 1]))) --end;
    return std::string(raw.substr(begin, end - begin));
}

std::string normalize_answer(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    bool seen_any = false;
    for (char ch : raw) {
        const auto uc = static_cast<unsigned char>(ch);
        if (is_space(uc)) {
            if (seen_any) pending_space = true;
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(uc)));
        seen_any = true;
    }
    // strip one trailing sentence terminator: ASCII ., !, ? or U+3002 (e3 80 82)
    if (!out.empty()) {
        const char last = out.back();
        if (last == '.' || last == '!' || last == '?') {
            out.pop_back();
        } else if (out.size() >= 3) {
            const auto b0 = static_cast<unsigned char>(out[out.size() - 3]);
            const auto b1 = static_cast<unsigned char>(out[out.size() - 2]);
            const auto b2 = static_cast<unsigned char>(out[out.size() - 1]);
            if (b0 == 0xe3 && b1 == 0x80 && b2 == 0x82) out.resize(out.size() - 3);
        }
    }
    // stripping may have exposed trailing spaces that were internal before
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

bool answers_equal(std::string_view a, std::string_view b) {
    return normalize_answer(a) == normalize_answer(b);
}

std::string replace_all(std::string tmpl, std::string_view key, std::string_view value) {
    if (key.empty()) return tmpl;
    std::size_t pos = 0;
    while ((pos = tmpl.find(key, pos)) != std::string::npos) {
        tmpl.replace(pos, key.size(), value);
        pos += value.size();
    }
    return tmpl;
}

}  // namespace policyeval
