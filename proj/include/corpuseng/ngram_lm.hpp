#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "corpuseng/corpus_io.hpp"

namespace corpuseng {

struct Vocab {
  static constexpr int kUnk = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;

  std::unordered_map<std::string, int> id_by_token;
  std::vector<std::string> token_by_id;

  Vocab();
  int add(const std::string& token);
  // kUnk for unknown tokens.
  int lookup(const std::string& token) const;
  int size() const { return static_cast<int>(token_by_id.size()); }
};

// Packs an id sequence into a hashable byte-string key.
std::string pack_ids(std::span<const int> ids);
std::vector<int> unpack_ids(const std::string& key);

using CountTable = std::unordered_map<std::string, std::uint64_t>;

struct NGramCounts {
  int order = 0;
  Vocab vocab;
  // by_order[k-1]: raw counts of k-grams over <s>-padded sentences.
  std::vector<CountTable> by_order;
};

// Unigram token counts, string-keyed so shards merge before a vocabulary
// exists. The first pass of two-pass counting.
std::unordered_map<std::string, std::uint64_t> count_unigram_tokens(
    std::span<const Sentence> corpus);

void merge_token_counts(std::unordered_map<std::string, std::uint64_t>& into,
                        const std::unordered_map<std::string, std::uint64_t>& from);

// Tokens below min_count map to <unk>.
Vocab build_vocab(const std::unordered_map<std::string, std::uint64_t>& unigrams,
                  std::uint64_t min_count);

// Second pass: counts all orders 1..order against a fixed vocabulary.
// Shards counted with the same vocab merge associatively.
NGramCounts count_ngrams_with_vocab(std::span<const Sentence> corpus,
                                    const Vocab& vocab, int order);

void merge_counts(NGramCounts& into, const NGramCounts& from);

// Convenience two-pass counting over an in-memory corpus.
NGramCounts count_ngrams(std::span<const Sentence> corpus, int order,
                         std::uint64_t min_count = 1);

struct ProbBackoff {
  double log_prob = 0.0;  // natural log
  double backoff = 0.0;   // natural log; 0 means backoff weight 1
};

struct NGramModel {
  int order = 0;
  Vocab vocab;
  // by_order[k-1]: stored k-grams with natural-log prob and backoff.
  std::vector<std::unordered_map<std::string, ProbBackoff>> by_order;

  // log P(word | context) with backoff; context is the preceding ids
  // (oldest first), truncated internally to order-1.
  double word_logprob(std::span<const int> context, int word) const;
};

// Interpolated Kneser-Ney with one discount per order,
// D_k = n1 / (n1 + 2*n2) over adjusted counts; degenerate discounts fall
// back to 0.75 with a warning on stderr.
NGramModel estimate_kn(const NGramCounts& counts);

struct SentenceScore {
  double total_log_prob = 0.0;  // natural log, includes </s>
  std::uint64_t scored_token_count = 0;  // |tokens| + 1
  double cross_entropy = 0.0;  // nats per token
};

SentenceScore sentence_logprob(const NGramModel& model, const Sentence& s);

double perplexity(const NGramModel& model, std::span<const Sentence> corpus);

// ARPA text format, log10 probabilities. Backoff fields are written only
// when the weight differs from 1.
void export_arpa(const NGramModel& model, std::ostream& out);
void export_arpa(const NGramModel& model, const std::string& path);
NGramModel import_arpa(std::istream& in, const std::string& name = "<arpa>");
NGramModel import_arpa(const std::string& path);

}  // namespace corpuseng
