#include "corpuseng/bleu.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "corpuseng/util.hpp"

namespace corpuseng {

namespace {

bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }

// The 13a punctuation class: { - ~, [ - `, space - &, ( - +, : - @, /
bool in_13a_punct_class(char c) {
  const unsigned char u = static_cast<unsigned char>(c);
  return (u >= 0x7B && u <= 0x7E) || (u >= 0x5B && u <= 0x60) ||
         (u >= 0x20 && u <= 0x26) || (u >= 0x28 && u <= 0x2B) ||
         (u >= 0x3A && u <= 0x40) || u == 0x2F;
}

void replace_all(std::string& s, const std::string& from,
                 const std::string& to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

}  // namespace

std::vector<std::string> tokenize_13a(const std::string& text) {
  std::string norm = text;
  replace_all(norm, "<skipped>", "");
  replace_all(norm, "-\n", "");
  replace_all(norm, "\n", " ");
  if (norm.find('&') != std::string::npos) {
    replace_all(norm, "&quot;", "\"");
    replace_all(norm, "&amp;", "&");
    replace_all(norm, "&lt;", "<");
    replace_all(norm, "&gt;", ">");
  }

  std::string out;
  out.reserve(norm.size() * 2);
  for (std::size_t i = 0; i < norm.size(); ++i) {
    const char c = norm[i];
    const bool prev_digit = i > 0 && is_ascii_digit(norm[i - 1]);
    const bool next_digit = i + 1 < norm.size() && is_ascii_digit(norm[i + 1]);
    bool separate = false;
    if (in_13a_punct_class(c)) {
      separate = true;
    } else if (c == '.' || c == ',') {
      // Keep decimal and thousands separators inside numbers attached.
      separate = !(prev_digit && next_digit);
    } else if (c == '-') {
      separate = prev_digit;
    }
    if (separate) {
      out += ' ';
      out += c;
      out += ' ';
    } else {
      out += c;
    }
  }
  return split_whitespace(out);
}

namespace {

// Pragmatic Unicode category tables covering the scripts and punctuation
// this toolkit meets in practice; frozen by golden tests.
bool intl_is_number(char32_t cp) {
  if (cp >= '0' && cp <= '9') return true;
  if (cp == 0xB2 || cp == 0xB3 || cp == 0xB9) return true;   // superscripts
  if (cp >= 0xBC && cp <= 0xBE) return true;                 // fractions
  if (cp >= 0x0660 && cp <= 0x0669) return true;             // Arabic-Indic
  if (cp >= 0x06F0 && cp <= 0x06F9) return true;             // Extended A-I
  if (cp >= 0x0966 && cp <= 0x096F) return true;             // Devanagari
  if (cp >= 0x2070 && cp <= 0x2079) return true;             // super/sub
  if (cp >= 0x2080 && cp <= 0x2089) return true;
  if (cp >= 0x2150 && cp <= 0x2189) return true;             // number forms
  if (cp >= 0xFF10 && cp <= 0xFF19) return true;             // fullwidth
  return false;
}

bool intl_is_punct(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= '!' && cp <= '#') || (cp >= '%' && cp <= '*') ||
           cp == ',' || cp == '-' || cp == '.' || cp == '/' || cp == ':' ||
           cp == ';' || cp == '?' || cp == '@' ||
           (cp >= '[' && cp <= ']') || cp == '_' || cp == '{' || cp == '}';
  }
  switch (cp) {
    case 0xA1:   // inverted exclamation
    case 0xA7:   // section sign
    case 0xAB:   // left guillemet
    case 0xB6:   // pilcrow
    case 0xB7:   // middle dot
    case 0xBB:   // right guillemet
    case 0xBF:   // inverted question
      return true;
    default:
      break;
  }
  if (cp >= 0x2010 && cp <= 0x2027) return true;  // dashes, quotes, bullets
  if (cp >= 0x2030 && cp <= 0x205E) return true;  // permille .. punctuation
  if (cp >= 0x3001 && cp <= 0x3003) return true;  // CJK comma, stop
  if (cp >= 0x3008 && cp <= 0x3011) return true;  // CJK brackets
  if (cp >= 0x3014 && cp <= 0x301F) return true;
  if (cp == 0x30FB) return true;                  // katakana middle dot
  if (cp >= 0xFE50 && cp <= 0xFE6B) return true;  // small form variants
  if (cp >= 0xFF01 && cp <= 0xFF03) return true;  // fullwidth punctuation
  if (cp >= 0xFF05 && cp <= 0xFF0A) return true;
  if (cp == 0xFF0C || cp == 0xFF0D || cp == 0xFF0E || cp == 0xFF0F)
    return true;
  if (cp == 0xFF1A || cp == 0xFF1B || cp == 0xFF1F || cp == 0xFF20)
    return true;
  if (cp >= 0xFF3B && cp <= 0xFF3D) return true;
  if (cp == 0xFF3F || cp == 0xFF5B || cp == 0xFF5D) return true;
  if (cp >= 0xFF61 && cp <= 0xFF65) return true;  // halfwidth CJK punctuation
  return false;
}

bool intl_is_symbol(char32_t cp) {
  if (cp < 0x80) {
    return cp == '$' || cp == '+' || cp == '<' || cp == '=' || cp == '>' ||
           cp == '^' || cp == '`' || cp == '|' || cp == '~';
  }
  switch (cp) {
    case 0xA2: case 0xA3: case 0xA4: case 0xA5: case 0xA6: case 0xA8:
    case 0xA9: case 0xAC: case 0xAE: case 0xAF: case 0xB0: case 0xB1:
    case 0xB4: case 0xB8: case 0xD7: case 0xF7:
      return true;
    default:
      break;
  }
  if (cp >= 0x20A0 && cp <= 0x20CF) return true;  // currency symbols
  if (cp >= 0x2100 && cp <= 0x214F) return true;  // letterlike symbols
  if (cp >= 0x2190 && cp <= 0x2BFF) return true;  // arrows, math, misc
  if (cp == 0x3004 || cp == 0x3012 || cp == 0x3013 || cp == 0x3020)
    return true;
  if (cp == 0xFF04 || cp == 0xFF0B || cp == 0xFF1C || cp == 0xFF1D ||
      cp == 0xFF1E || cp == 0xFF3E || cp == 0xFF40 || cp == 0xFF5C ||
      cp == 0xFF5E)
    return true;
  return false;
}

}  // namespace

std::vector<std::string> tokenize_intl(const std::string& text) {
  const std::vector<char32_t> cps = utf8_to_codepoints(text);
  std::string out;
  out.reserve(text.size() * 2);
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t cp = cps[i];
    bool separate = false;
    if (intl_is_symbol(cp)) {
      separate = true;
    } else if (intl_is_punct(cp)) {
      const bool prev_number = i > 0 && intl_is_number(cps[i - 1]);
      const bool next_number = i + 1 < cps.size() && intl_is_number(cps[i + 1]);
      separate = (i > 0 && !prev_number) || (i + 1 < cps.size() && !next_number);
    }
    if (separate) {
      out += ' ';
      out += codepoint_to_utf8(cp);
      out += ' ';
    } else {
      out += codepoint_to_utf8(cp);
    }
  }
  return split_whitespace(out);
}

namespace {

using NGramCountMap = std::unordered_map<std::string, std::uint64_t>;

// Joins token spans with \x1f so n-grams of different tokens never collide.
NGramCountMap ngram_counts(const std::vector<std::string>& tokens, int n) {
  NGramCountMap counts;
  if (tokens.size() < static_cast<std::size_t>(n)) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (int k = 1; k < n; ++k) {
      key += '\x1f';
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace

BleuScore corpus_bleu(std::span<const std::string> hyps,
                      std::span<const std::string> refs,
                      BleuTokenizer tokenizer) {
  if (hyps.size() != refs.size()) {
    throw std::runtime_error("hypothesis/reference count mismatch: " +
                             std::to_string(hyps.size()) + " vs " +
                             std::to_string(refs.size()));
  }
  if (hyps.empty()) throw std::runtime_error("empty corpus");

  auto tok = tokenizer == BleuTokenizer::k13a ? tokenize_13a : tokenize_intl;

  std::array<std::uint64_t, 4> matches{};
  std::array<std::uint64_t, 4> totals{};
  BleuScore result;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    const std::vector<std::string> hyp = tok(hyps[i]);
    const std::vector<std::string> ref = tok(refs[i]);
    result.hyp_length += hyp.size();
    result.ref_length += ref.size();
    for (int n = 1; n <= 4; ++n) {
      if (hyp.size() < static_cast<std::size_t>(n)) continue;
      totals[n - 1] += hyp.size() - n + 1;
      const NGramCountMap hyp_counts = ngram_counts(hyp, n);
      const NGramCountMap ref_counts = ngram_counts(ref, n);
      for (const auto& [gram, cnt] : hyp_counts) {
        auto it = ref_counts.find(gram);
        if (it != ref_counts.end()) {
          matches[n - 1] += std::min(cnt, it->second);
        }
      }
    }
  }
  if (result.hyp_length == 0) {
    throw std::runtime_error("all hypotheses are empty");
  }

  // smooth.exp: each consecutive zero-match order halves a baseline count.
  double smooth = 1.0;
  double log_prec_sum = 0.0;
  int effective_order = 0;
  for (int n = 1; n <= 4; ++n) {
    if (totals[n - 1] == 0) break;
    ++effective_order;
    double p;
    if (matches[n - 1] == 0) {
      smooth *= 2.0;
      p = 1.0 / (smooth * static_cast<double>(totals[n - 1]));
    } else {
      p = static_cast<double>(matches[n - 1]) /
          static_cast<double>(totals[n - 1]);
    }
    result.precisions[n - 1] = p;
    log_prec_sum += std::log(p);
  }
  result.brevity_penalty =
      result.hyp_length >= result.ref_length
          ? 1.0
          : std::exp(1.0 - static_cast<double>(result.ref_length) /
                               static_cast<double>(result.hyp_length));
  result.score = 100.0 * result.brevity_penalty *
                 std::exp(log_prec_sum / effective_order);
  return result;
}

std::string bleu_signature(BleuTokenizer tokenizer) {
  std::string sig = "BLEU+case.mixed+numrefs.1+smooth.exp+tok.";
  sig += tokenizer == BleuTokenizer::k13a ? "13a" : "intl";
  sig += "+corpuseng.1.0";
  return sig;
}

}  // namespace corpuseng
