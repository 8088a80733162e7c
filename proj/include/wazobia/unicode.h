#ifndef WAZOBIA_UNICODE_H_
#define WAZOBIA_UNICODE_H_

// Thin UTF-8 helpers over ICU. All offsets exposed by the library count
// Unicode scalar values, never bytes.

#include <cstddef>
#include <string>
#include <string_view>

namespace wazobia::unicode {

std::u32string to_utf32(std::string_view utf8);
std::string to_utf8(std::u32string_view text);
std::string to_utf8(char32_t c);

// Number of scalar values in a UTF-8 string.
std::size_t length(std::string_view utf8);

// Substring by scalar-value offsets [begin, end).
std::string substr(std::string_view utf8, std::size_t begin, std::size_t end);

std::string nfc(std::string_view utf8);
std::string nfd(std::string_view utf8);
std::string lowercase(std::string_view utf8);

bool is_whitespace(char32_t c);
// General categories P* and S*.
bool is_punct(char32_t c);
// General categories Mn, Mc, Me.
bool is_combining_mark(char32_t c);
bool is_upper(char32_t c);
bool is_lower(char32_t c);
bool is_digit(char32_t c);

}  // namespace wazobia::unicode

#endif  // WAZOBIA_UNICODE_H_
