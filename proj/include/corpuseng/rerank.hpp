#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "corpuseng/bleu.hpp"
#include "corpuseng/corpus_io.hpp"

namespace corpuseng {

struct Hypothesis {
  std::uint64_t source_id = 0;
  Sentence text;
  double forward_score = 0.0;  // log P(y|x)
  double channel_score = 0.0;  // log P(x|y)
  double lm_score = 0.0;       // log P(y)
};

struct NBestList {
  std::uint64_t source_id = 0;
  Sentence source_text;  // optional; the n-best file carries only ids
  std::vector<Hypothesis> hypotheses;
};

struct TuningMetadata {
  std::string dataset;
  double dev_bleu = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t n_samples = 0;
};

struct RerankWeights {
  double lambda1 = 0.0;  // channel weight
  double lambda2 = 0.0;  // language model weight
  double length_penalty = 0.0;  // additive bonus per target token
  std::optional<TuningMetadata> tuned_on;
};

struct TuneRanges {
  double lambda_lo = 0.0, lambda_hi = 2.0;
  double length_penalty_lo = 0.0, length_penalty_hi = 1.0;
};

double combined_score(const Hypothesis& h, const RerankWeights& w);

// Stable argmax of combined_score; ties go to the lowest index.
const Hypothesis& rerank(const NBestList& list, const RerankWeights& w);

// Random search over seeded uniform triples (lambda1, lambda2,
// length_penalty drawn in that order per sample); best triple by corpus
// BLEU of the reranked outputs, ties to the first drawn. Thread count does
// not affect the result.
RerankWeights tune(const std::vector<NBestList>& dev,
                   const std::vector<std::string>& references,
                   const TuneRanges& ranges, std::uint64_t n_samples,
                   std::uint64_t seed, BleuTokenizer tokenizer,
                   int threads = 1);

// TSV: source_id TAB text TAB forward TAB channel TAB lm, grouped by
// ascending source_id.
std::vector<NBestList> read_nbest(std::istream& in,
                                  const std::string& name = "<nbest>");
std::vector<NBestList> read_nbest(const std::string& path);
void write_nbest(const std::vector<NBestList>& lists, std::ostream& out);
void write_nbest(const std::vector<NBestList>& lists, const std::string& path);

std::string weights_to_json(const RerankWeights& w);
RerankWeights weights_from_json(const std::string& json_text);

}  // namespace corpuseng
