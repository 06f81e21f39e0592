#pragma once

#include <cstdint>
#include <string>

namespace corpuseng {

struct QuoteResult {
  std::string text;
  std::uint64_t unpaired = 0;  // trailing quotes left untouched
};

// Rewrites paired quotation marks (straight " and typographic characters) to
// German-style low-9 open / high-6 close pairs. Quotes pair by left-to-right
// alternation within the line; an odd trailing quote is left unchanged.
// Idempotent; non-quote characters pass through byte-identical.
QuoteResult convert_quotes_german(const std::string& line);

}  // namespace corpuseng
