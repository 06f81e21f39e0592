#pragma once

#include <optional>
#include <string>
#include <vector>

#include "corpuseng/corpus_io.hpp"
#include "corpuseng/langid.hpp"

namespace corpuseng {

struct FilterConfig {
  int max_tokens = 250;
  double max_ratio = 1.5;
  std::string expected_source_lang;
  std::string expected_target_lang;
  bool langid_enabled = true;
  // Minimum classification margin to accept a sentence; <= 0 means pure
  // argmax.
  double min_margin = 0.0;
};

// Strict comparison: a pair at exactly max_tokens is kept.
bool length_filter_keeps(const SentencePair& pair, int max_tokens);

// Symmetric ratio max/min, strict comparison. Requires both sides non-empty.
bool ratio_filter_keeps(const SentencePair& pair, double max_ratio);

// Rule name that drops this pair, or nullopt to keep it. Rules apply in
// order: empty, length, ratio, langid-src, langid-tgt.
std::optional<std::string> bitext_drop_rule(const SentencePair& pair,
                                            const FilterConfig& cfg,
                                            const LangIdModel* model);

std::optional<std::string> mono_drop_rule(const Sentence& s,
                                          const std::string& expected_lang,
                                          const FilterConfig& cfg,
                                          const LangIdModel* model);

struct BitextFilterResult {
  std::vector<SentencePair> kept;
  FilterStats stats;
};

struct MonoFilterResult {
  std::vector<Sentence> kept;
  FilterStats stats;
};

// threads <= 1 runs single-threaded; any thread count produces identical
// output (input order preserved, stats merged associatively).
BitextFilterResult filter_bitext(std::vector<SentencePair> pairs,
                                 const FilterConfig& cfg,
                                 const LangIdModel* model, int threads = 1);

MonoFilterResult filter_mono(std::vector<Sentence> sentences,
                             const std::string& expected_lang,
                             const FilterConfig& cfg, const LangIdModel* model,
                             int threads = 1);

}  // namespace corpuseng
