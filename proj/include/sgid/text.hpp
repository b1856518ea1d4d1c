#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace sgid::text {

/// A token together with its byte span in the source string.
struct TokenSpan {
  std::string lower;  // ASCII-lowercased token text
  std::size_t begin = 0;
  std::size_t end = 0;
};

inline bool is_ascii_alpha(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}
inline bool is_ascii_digit(unsigned char c) { return c >= '0' && c <= '9'; }
inline bool is_ascii_alnum(unsigned char c) {
  return is_ascii_alpha(c) || is_ascii_digit(c);
}
inline bool is_ascii_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

/// Collapses every whitespace run to one space and trims both ends.
std::string normalize_whitespace(std::string_view s);

/// Splits on whitespace; empty tokens are dropped.
std::vector<std::string> split_whitespace(std::string_view s);

/// Maximal runs of ASCII letters/digits, lowercased, with byte offsets.
/// Every other byte (punctuation, whitespace, non-ASCII) separates tokens.
std::vector<TokenSpan> alnum_tokens(std::string_view s);

/// Lowercased alnum token strings only.
std::vector<std::string> alnum_words(std::string_view s);

/// Splits on a delimiter and trims each piece; empty pieces are dropped.
std::vector<std::string> split_trimmed(std::string_view s, char delim);

/// Decodes one UTF-8 code point starting at s[i]; advances i. Invalid bytes
/// decode as themselves (one byte) so the scan is total.
char32_t next_codepoint(std::string_view s, std::size_t& i);

}  // namespace sgid::text
