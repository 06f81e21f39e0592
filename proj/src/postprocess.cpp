#include "corpuseng/postprocess.hpp"

#include <vector>

#include "corpuseng/util.hpp"

namespace corpuseng {

namespace {

constexpr char32_t kStraight = 0x0022;   // "
constexpr char32_t kLeftDouble = 0x201C;  // also the German closing glyph
constexpr char32_t kRightDouble = 0x201D;
constexpr char32_t kLow9 = 0x201E;        // German opening glyph

bool is_quote(char32_t cp) {
  return cp == kStraight || cp == kLeftDouble || cp == kRightDouble ||
         cp == kLow9;
}

}  // namespace

QuoteResult convert_quotes_german(const std::string& line) {
  const std::vector<char32_t> cps = utf8_to_codepoints(line);
  std::uint64_t quote_count = 0;
  for (char32_t cp : cps) {
    if (is_quote(cp)) ++quote_count;
  }
  const std::uint64_t paired = quote_count - quote_count % 2;

  QuoteResult result;
  result.unpaired = quote_count % 2;
  std::uint64_t seen = 0;
  bool open = false;
  for (char32_t cp : cps) {
    if (is_quote(cp) && seen < paired) {
      ++seen;
      if (!open) {
        result.text += codepoint_to_utf8(kLow9);
        open = true;
      } else {
        result.text += codepoint_to_utf8(kLeftDouble);
        open = false;
      }
    } else {
      result.text += codepoint_to_utf8(cp);
    }
  }
  return result;
}

}  // namespace corpuseng
