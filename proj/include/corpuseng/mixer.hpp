#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "corpuseng/corpus_io.hpp"

namespace corpuseng {

struct MixConfig {
  std::uint32_t ratio_synthetic = 1;
  std::uint32_t ratio_bitext = 1;
  std::uint64_t seed = 0;
  bool shuffle = true;
};

struct MixReport {
  std::uint64_t bitext_in = 0, synthetic_in = 0;
  std::uint64_t bitext_out = 0, synthetic_out = 0;
  bool degenerate = false;  // one side empty, ratio not achievable
  std::uint64_t seed = 0;
  std::string to_json() const;
};

struct MixedPair {
  SentencePair pair;
  bool synthetic = false;
};

struct MixResult {
  std::vector<MixedPair> pairs;
  MixReport report;
};

// Upsamples the side that falls short of the configured ratio by whole-corpus
// repetition plus a seeded remainder sample, then shuffles with the same
// seeded generator. Achieved counts satisfy the ratio within one line.
MixResult mix(const std::vector<SentencePair>& bitext,
              const std::vector<SentencePair>& synthetic,
              const MixConfig& cfg);

}  // namespace corpuseng
