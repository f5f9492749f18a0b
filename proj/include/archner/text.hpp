#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace archner::text {

/// Decodes one UTF-8 code point starting at `pos` and advances `pos`.
/// Invalid bytes decode as themselves (Latin-1 fallback) so no input is lost.
char32_t next_code_point(std::string_view s, std::size_t& pos);

void append_utf8(std::string& out, char32_t cp);

std::size_t code_point_count(std::string_view s);

/// Lowercases ASCII and Latin-1 letters.
std::string to_lower(std::string_view s);
char32_t to_lower(char32_t cp);

bool is_upper(char32_t cp);
bool is_lower(char32_t cp);
bool is_digit(char32_t cp);
/// Letters and digits, including accented Latin letters and other non-punctuation
/// code points above U+00BF.
bool is_alnum(char32_t cp);

std::vector<std::string> split_whitespace(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);
std::string_view trim(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Lowercases and collapses runs of whitespace into a single space.
std::string normalize_phrase(std::string_view s);

}  // namespace archner::text
