#include "depsel/text.hpp"

#include <unicode/locid.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

namespace depsel::text {

namespace {

bool is_punct_or_symbol(UChar32 cp) {
  switch (u_charType(cp)) {
    case U_CONNECTOR_PUNCTUATION:
    case U_DASH_PUNCTUATION:
    case U_START_PUNCTUATION:
    case U_END_PUNCTUATION:
    case U_INITIAL_PUNCTUATION:
    case U_FINAL_PUNCTUATION:
    case U_OTHER_PUNCTUATION:
    case U_MATH_SYMBOL:
    case U_CURRENCY_SYMBOL:
    case U_MODIFIER_SYMBOL:
    case U_OTHER_SYMBOL:
      return true;
    default:
      return false;
  }
}

// Walks UTF-8 code points; malformed sequences are reported as U+FFFD
// (category So), so they end up stripped like any other symbol.
template <typename Fn>
void for_each_code_point(std::string_view s, Fn&& fn) {
  const auto* bytes = reinterpret_cast<const uint8_t*>(s.data());
  const int32_t length = static_cast<int32_t>(s.size());
  int32_t i = 0;
  while (i < length) {
    const int32_t start = i;
    UChar32 cp;
    U8_NEXT(bytes, i, length, cp);
    if (cp < 0) cp = 0xFFFD;
    fn(cp, s.substr(start, i - start));
  }
}

}  // namespace

std::string to_lower(std::string_view utf8) {
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  u.toLower(icu::Locale::getRoot());
  std::string out;
  u.toUTF8String(out);
  return out;
}

std::string strip_punctuation(std::string_view utf8, bool strip_digits) {
  std::string out;
  out.reserve(utf8.size());
  for_each_code_point(utf8, [&](UChar32 cp, std::string_view raw) {
    const bool drop = is_punct_or_symbol(cp) ||
                      (strip_digits && u_charType(cp) == U_DECIMAL_DIGIT_NUMBER);
    if (drop)
      out.push_back(' ');
    else
      out.append(raw);
  });
  return out;
}

std::vector<std::string> split_whitespace(std::string_view utf8) {
  std::vector<std::string> out;
  std::string current;
  for_each_code_point(utf8, [&](UChar32 cp, std::string_view raw) {
    if (u_isUWhiteSpace(cp)) {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    } else {
      current.append(raw);
    }
  });
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

bool has_upper(std::string_view utf8) { return to_lower(utf8) != utf8; }

bool has_punctuation(std::string_view utf8) {
  bool found = false;
  for_each_code_point(utf8, [&](UChar32 cp, std::string_view) {
    if (is_punct_or_symbol(cp)) found = true;
  });
  return found;
}

}  // namespace depsel::text
