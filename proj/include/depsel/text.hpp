#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace depsel::text {

/// Unicode lowercase (full case mapping, root locale) of UTF-8 text.
std::string to_lower(std::string_view utf8);

/// Replaces every code point in general categories P* and S* with a space.
/// When strip_digits is set, decimal digits (Nd) are replaced as well.
std::string strip_punctuation(std::string_view utf8, bool strip_digits = false);

/// Splits on Unicode white space, dropping empty pieces.
std::vector<std::string> split_whitespace(std::string_view utf8);

/// True if lowercasing would change the text.
bool has_upper(std::string_view utf8);
/// True if any code point is in P* or S*.
bool has_punctuation(std::string_view utf8);

}  // namespace depsel::text
