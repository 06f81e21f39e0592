#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace corpuseng {

enum class BleuTokenizer { k13a, kIntl };

// mteval-13a style tokenization: HTML entity unescaping, punctuation split
// off except decimal/thousand separators inside numbers, dash split after
// digits.
std::vector<std::string> tokenize_13a(const std::string& text);

// International tokenization: punctuation split from anything non-numeric on
// either side, symbols always split, any script.
std::vector<std::string> tokenize_intl(const std::string& text);

struct BleuScore {
  double score = 0.0;  // 0..100
  std::array<double, 4> precisions{};  // 0..1, smoothed
  double brevity_penalty = 1.0;
  std::uint64_t hyp_length = 0;
  std::uint64_t ref_length = 0;
};

// Case-sensitive corpus BLEU-4, single reference, exponential smoothing for
// zero match counts.
BleuScore corpus_bleu(std::span<const std::string> hyps,
                      std::span<const std::string> refs,
                      BleuTokenizer tokenizer);

std::string bleu_signature(BleuTokenizer tokenizer);

}  // namespace corpuseng
