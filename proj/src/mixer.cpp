#include "corpuseng/mixer.hpp"

#include <cmath>
#include <stdexcept>

#include "corpuseng/util.hpp"
#include "json.hpp"

namespace corpuseng {

std::string MixReport::to_json() const {
  nlohmann::json j;
  j["bitext_in"] = bitext_in;
  j["synthetic_in"] = synthetic_in;
  j["bitext_out"] = bitext_out;
  j["synthetic_out"] = synthetic_out;
  j["degenerate"] = degenerate;
  j["seed"] = seed;
  if (bitext_out > 0) {
    j["achieved_ratio_synthetic_to_bitext"] =
        static_cast<double>(synthetic_out) / static_cast<double>(bitext_out);
  }
  return j.dump(2);
}

namespace {

// Whole-corpus repetitions plus a seeded without-replacement remainder.
void upsample(const std::vector<SentencePair>& input, std::uint64_t target,
              bool synthetic, Rng& rng, std::vector<MixedPair>& out) {
  const std::uint64_t n = input.size();
  const std::uint64_t reps = target / n;
  const std::uint64_t remainder = target % n;
  for (std::uint64_t r = 0; r < reps; ++r) {
    for (const SentencePair& p : input) out.push_back({p, synthetic});
  }
  if (remainder > 0) {
    std::vector<std::uint64_t> idx(n);
    for (std::uint64_t i = 0; i < n; ++i) idx[i] = i;
    for (std::uint64_t i = 0; i < remainder; ++i) {
      const std::uint64_t j = i + rng.below(n - i);
      std::swap(idx[i], idx[j]);
      out.push_back({input[idx[i]], synthetic});
    }
  }
}

}  // namespace

MixResult mix(const std::vector<SentencePair>& bitext,
              const std::vector<SentencePair>& synthetic,
              const MixConfig& cfg) {
  if (cfg.ratio_synthetic < 1 || cfg.ratio_bitext < 1) {
    throw std::runtime_error("mix ratio components must be >= 1");
  }
  if (bitext.empty() && synthetic.empty()) {
    throw std::runtime_error("both mix inputs are empty");
  }

  MixResult result;
  result.report.bitext_in = bitext.size();
  result.report.synthetic_in = synthetic.size();
  result.report.seed = cfg.seed;

  Rng rng(cfg.seed);
  if (bitext.empty() || synthetic.empty()) {
    result.report.degenerate = true;
    const auto& only = bitext.empty() ? synthetic : bitext;
    for (const SentencePair& p : only) {
      result.pairs.push_back({p, bitext.empty()});
    }
  } else {
    // The side with the larger weighted size anchors; the other side is
    // upsampled to the nearest count matching the ratio.
    const double synth_weighted =
        static_cast<double>(synthetic.size()) / cfg.ratio_synthetic;
    const double bitext_weighted =
        static_cast<double>(bitext.size()) / cfg.ratio_bitext;
    std::uint64_t synth_target, bitext_target;
    if (synth_weighted >= bitext_weighted) {
      synth_target = synthetic.size();
      bitext_target = static_cast<std::uint64_t>(std::llround(
          static_cast<double>(synthetic.size()) * cfg.ratio_bitext /
          cfg.ratio_synthetic));
    } else {
      bitext_target = bitext.size();
      synth_target = static_cast<std::uint64_t>(std::llround(
          static_cast<double>(bitext.size()) * cfg.ratio_synthetic /
          cfg.ratio_bitext));
    }
    upsample(synthetic, synth_target, true, rng, result.pairs);
    upsample(bitext, bitext_target, false, rng, result.pairs);
  }

  if (cfg.shuffle) rng.shuffle(result.pairs);

  for (const MixedPair& p : result.pairs) {
    if (p.synthetic) ++result.report.synthetic_out;
    else ++result.report.bitext_out;
  }
  return result;
}

}  // namespace corpuseng
