#ifndef SEMSEARCH_TEXT_UTIL_H_
#define SEMSEARCH_TEXT_UTIL_H_

#include <string>
#include <string_view>
#include <vector>

namespace semsearch {

// ASCII case folding. Bytes outside ASCII are passed through unchanged so
// UTF-8 sequences survive intact.
std::string CaseFold(std::string_view s);

// Case-fold, trim, and collapse internal whitespace runs to a single space.
// This is the comparison key for entity names.
std::string NormalizeName(std::string_view s);

// Splits on a single delimiter character. Empty fields are kept.
std::vector<std::string> Split(std::string_view s, char delim);

std::string_view Trim(std::string_view s);

inline bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

// Letters and digits, plus any non-ASCII byte (treated as part of a word).
inline bool IsWordChar(char c) {
  unsigned char u = static_cast<unsigned char>(c);
  return (u >= '0' && u <= '9') || (u >= 'a' && u <= 'z') ||
         (u >= 'A' && u <= 'Z') || u >= 0x80;
}

// Formats a double with enough digits to round-trip exactly.
std::string FormatDouble(double v);

}  // namespace semsearch

#endif  // SEMSEARCH_TEXT_UTIL_H_
