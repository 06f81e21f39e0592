#include "corpuseng/postprocess.hpp"

#include <random>

#include "corpuseng/util.hpp"

#include "doctest.h"
#include "test_util.hpp"

using namespace corpuseng;

TEST_CASE("paired straight quotes become low-9 and high-6") {
  const QuoteResult r = convert_quotes_german("Er sagte \"ja\".");
  CHECK(r.text == "Er sagte „ja“.");
  CHECK(r.unpaired == 0);
}

TEST_CASE("typographic English quotes are rewritten too") {
  CHECK(convert_quotes_german("Er sagte “ja”.").text == "Er sagte „ja“.");
  CHECK(convert_quotes_german("Er sagte ”ja“.").text == "Er sagte „ja“.");
}

TEST_CASE("text without quotes passes through unchanged") {
  const std::string line = "Keine Anführungszeichen hier, nur Umlaute: äöü.";
  const QuoteResult r = convert_quotes_german(line);
  CHECK(r.text == line);
  CHECK(r.unpaired == 0);
}

TEST_CASE("two quote pairs alternate independently") {
  const QuoteResult r = convert_quotes_german("\"eins\" und \"zwei\"");
  CHECK(r.text == "„eins“ und „zwei“");
}

TEST_CASE("odd trailing quote is left untouched") {
  const QuoteResult r = convert_quotes_german("\"a\" und \"b");
  CHECK(r.text == "„a“ und \"b");
  CHECK(r.unpaired == 1);
  const QuoteResult single = convert_quotes_german("nur \" eines");
  CHECK(single.text == "nur \" eines");
  CHECK(single.unpaired == 1);
}

TEST_CASE("conversion is idempotent") {
  for (const std::string line :
       {std::string("Er sagte \"ja\" und “nein”."),
        std::string("\"a\" \"b\" \"c"), std::string("„schon“ richtig"),
        std::string("gar nichts")}) {
    const QuoteResult once = convert_quotes_german(line);
    const QuoteResult twice = convert_quotes_german(once.text);
    CHECK(twice.text == once.text);
    CHECK(twice.unpaired == once.unpaired);
  }
}

TEST_CASE("empty line maps to an empty line") {
  const QuoteResult r = convert_quotes_german("");
  CHECK(r.text.empty());
  CHECK(r.unpaired == 0);
}

TEST_CASE("fuzzed lines keep non-quote codepoints byte-identical") {
  std::mt19937 rng(17);
  const std::vector<char32_t> alphabet = {
      'a', 'Z', '0', ' ', '.', 0xE4 /* ä */, 0x2014 /* em dash */,
      0x4E2D /* CJK */, 0x22, 0x201C, 0x201D, 0x201E};
  for (int trial = 0; trial < 10000; ++trial) {
    std::u32string line32;
    const int len = static_cast<int>(rng() % 40);
    for (int i = 0; i < len; ++i) {
      line32 += alphabet[rng() % alphabet.size()];
    }
    std::string line;
    for (char32_t cp : line32) line += codepoint_to_utf8(cp);
    const QuoteResult r = convert_quotes_german(line);

    // strip quote characters from both sides; the rest must match exactly
    auto strip = [](const std::string& s) {
      std::string out;
      for (char32_t cp : utf8_to_codepoints(s)) {
        if (cp != 0x22 && cp != 0x201C && cp != 0x201D && cp != 0x201E) {
          out += codepoint_to_utf8(cp);
        }
      }
      return out;
    };
    CHECK(strip(r.text) == strip(line));
    const QuoteResult again = convert_quotes_german(r.text);
    CHECK(again.text == r.text);
  }
}
