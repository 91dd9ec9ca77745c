#pragma once

#include <string>
#include <string_view>

namespace policyeval {

/// Canonical form used whenever two free-text answers are compared:
/// trim, lowercase ASCII, collapse internal whitespace runs to one space,
/// then strip at most one terminal '.', '!', '?' or U+3002.
std::string normalize_answer(std::string_view raw);

/// Trim ASCII whitespace from both ends.
std::string trim(std::string_view raw);

/// True if the normalized forms of a and b are equal.
bool answers_equal(std::string_view a, std::string_view b);

/// Replace every occurrence of `key` in `tmpl` with `value`.
std::string replace_all(std::string tmpl, std::string_view key, std::string_view value);

}  // namespace policyeval
