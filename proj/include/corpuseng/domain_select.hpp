#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "corpuseng/corpus_io.hpp"
#include "corpuseng/ngram_lm.hpp"

namespace corpuseng {

struct SelectionConfig {
  double cutoff = 0.01;
  const NGramModel* lm_in = nullptr;   // in-domain model
  const NGramModel* lm_out = nullptr;  // general-domain model
};

// Cross-entropy difference H_out(s) - H_in(s) in nats per token; positive
// means more in-domain-like.
double ml_score(const SelectionConfig& cfg, const Sentence& s);

struct SelectionReport {
  std::uint64_t input_count = 0;
  std::uint64_t selected_count = 0;
  double fraction = 0.0;
  double cutoff_used = 0.0;
  // Fixed histogram over [-5, 5) nats, 50 bins plus under/overflow.
  static constexpr int kBins = 50;
  static constexpr double kLo = -5.0, kHi = 5.0;
  std::array<std::uint64_t, kBins> histogram{};
  std::uint64_t underflow = 0, overflow = 0;

  void record(double score);
  void merge(const SelectionReport& other);
  std::string to_json() const;
};

struct SelectionResult {
  std::vector<Sentence> selected;
  SelectionReport report;
};

// Keeps sentences with score > cutoff.
SelectionResult select(std::span<const Sentence> corpus,
                       const SelectionConfig& cfg, int threads = 1);

// Picks the cutoff whose strict-greater selection is as close as possible
// to fraction * |corpus| (never more), then selects with it.
SelectionResult select_target_fraction(std::span<const Sentence> corpus,
                                       const SelectionConfig& cfg,
                                       double fraction, int threads = 1);

// TSV rows: line_index TAB score. Deterministic.
void score_dump(std::span<const Sentence> corpus, const SelectionConfig& cfg,
                std::ostream& out, int threads = 1);

std::vector<double> score_all(std::span<const Sentence> corpus,
                              const SelectionConfig& cfg, int threads);

}  // namespace corpuseng
