#include "wazobia/unicode.h"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <stdexcept>

namespace wazobia::unicode {
namespace {

std::string from_icu(const icu::UnicodeString& s) {
  std::string out;
  s.toUTF8String(out);
  return out;
}

const icu::Normalizer2& normalizer(bool compose) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* n = compose ? icu::Normalizer2::getNFCInstance(status)
                                      : icu::Normalizer2::getNFDInstance(status);
  if (U_FAILURE(status) || n == nullptr) {
    throw std::runtime_error("ICU normalizer unavailable");
  }
  return *n;
}

std::string normalize_with(const icu::Normalizer2& n, std::string_view utf8) {
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString src = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  icu::UnicodeString dst = n.normalize(src, status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU normalization failed");
  return from_icu(dst);
}

}  // namespace

std::u32string to_utf32(std::string_view utf8) {
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  std::u32string out;
  out.reserve(static_cast<std::size_t>(s.countChar32()));
  for (int32_t i = 0; i < s.length(); i = s.moveIndex32(i, 1)) {
    out.push_back(static_cast<char32_t>(s.char32At(i)));
  }
  return out;
}

std::string to_utf8(std::u32string_view text) {
  icu::UnicodeString s;
  for (char32_t c : text) s.append(static_cast<UChar32>(c));
  return from_icu(s);
}

std::string to_utf8(char32_t c) {
  return to_utf8(std::u32string_view(&c, 1));
}

std::size_t length(std::string_view utf8) { return to_utf32(utf8).size(); }

std::string substr(std::string_view utf8, std::size_t begin, std::size_t end) {
  std::u32string cps = to_utf32(utf8);
  if (begin > end || end > cps.size()) {
    throw std::out_of_range("unicode::substr range outside string");
  }
  return to_utf8(std::u32string_view(cps).substr(begin, end - begin));
}

std::string nfc(std::string_view utf8) {
  return normalize_with(normalizer(true), utf8);
}

std::string nfd(std::string_view utf8) {
  return normalize_with(normalizer(false), utf8);
}

std::string lowercase(std::string_view utf8) {
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  s.toLower(icu::Locale::getRoot());
  return from_icu(s);
}

bool is_whitespace(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)); }

bool is_punct(char32_t c) {
  const auto mask = U_GET_GC_MASK(static_cast<UChar32>(c));
  return (mask & (U_GC_P_MASK | U_GC_S_MASK)) != 0;
}

bool is_combining_mark(char32_t c) {
  return (U_GET_GC_MASK(static_cast<UChar32>(c)) & U_GC_M_MASK) != 0;
}

bool is_upper(char32_t c) { return u_isUUppercase(static_cast<UChar32>(c)); }
bool is_lower(char32_t c) { return u_isULowercase(static_cast<UChar32>(c)); }
bool is_digit(char32_t c) { return u_isdigit(static_cast<UChar32>(c)); }

}  // namespace wazobia::unicode
