#include "corpuseng/filter.hpp"

#include <algorithm>
#include <thread>

namespace corpuseng {

bool length_filter_keeps(const SentencePair& pair, int max_tokens) {
  const auto limit = static_cast<std::size_t>(max_tokens);
  return pair.source.tokens.size() <= limit &&
         pair.target.tokens.size() <= limit;
}

bool ratio_filter_keeps(const SentencePair& pair, double max_ratio) {
  const double a = static_cast<double>(pair.source.tokens.size());
  const double b = static_cast<double>(pair.target.tokens.size());
  const double ratio = std::max(a, b) / std::min(a, b);
  return ratio <= max_ratio;
}

namespace {

// Returns "langid" on a wrong-language or low-margin sentence,
// "langid-empty" on unclassifiable input, nullopt when accepted.
std::optional<std::string> langid_rule(const Sentence& s,
                                       const std::string& expected,
                                       const FilterConfig& cfg,
                                       const LangIdModel* model) {
  if (s.text.empty() || s.tokens.empty()) return "langid-empty";
  const LangIdResult r = langid_classify(*model, s);
  if (r.language != expected) return "langid";
  if (cfg.min_margin > 0.0 && r.margin < cfg.min_margin) return "langid";
  return std::nullopt;
}

}  // namespace

std::optional<std::string> bitext_drop_rule(const SentencePair& pair,
                                            const FilterConfig& cfg,
                                            const LangIdModel* model) {
  if (pair.source.tokens.empty() || pair.target.tokens.empty()) return "empty";
  if (!length_filter_keeps(pair, cfg.max_tokens)) return "length";
  if (!ratio_filter_keeps(pair, cfg.max_ratio)) return "ratio";
  if (cfg.langid_enabled && model != nullptr) {
    if (auto rule = langid_rule(pair.source, cfg.expected_source_lang, cfg,
                                model)) {
      return rule;
    }
    if (auto rule = langid_rule(pair.target, cfg.expected_target_lang, cfg,
                                model)) {
      return rule;
    }
  }
  return std::nullopt;
}

std::optional<std::string> mono_drop_rule(const Sentence& s,
                                          const std::string& expected_lang,
                                          const FilterConfig& cfg,
                                          const LangIdModel* model) {
  if (s.tokens.empty()) return "empty";
  if (s.tokens.size() > static_cast<std::size_t>(cfg.max_tokens)) {
    return "length";
  }
  if (cfg.langid_enabled && model != nullptr) {
    if (auto rule = langid_rule(s, expected_lang, cfg, model)) return rule;
  }
  return std::nullopt;
}

namespace {

// Decides every item in parallel chunks, then assembles kept output in
// input order so the result is identical for any thread count.
template <typename Item, typename Decide>
std::pair<std::vector<Item>, FilterStats> run_filter(std::vector<Item> items,
                                                     const Decide& decide,
                                                     int threads) {
  std::vector<std::optional<std::string>> verdicts(items.size());
  if (threads <= 1 || items.size() < 1024) {
    for (std::size_t i = 0; i < items.size(); ++i) verdicts[i] = decide(items[i]);
  } else {
    const std::size_t n = items.size();
    const std::size_t n_threads = std::min<std::size_t>(threads, n);
    std::vector<std::thread> workers;
    const std::size_t chunk = (n + n_threads - 1) / n_threads;
    for (std::size_t t = 0; t < n_threads; ++t) {
      const std::size_t lo = t * chunk;
      const std::size_t hi = std::min(lo + chunk, n);
      if (lo >= hi) break;
      workers.emplace_back([&, lo, hi] {
        for (std::size_t i = lo; i < hi; ++i) verdicts[i] = decide(items[i]);
      });
    }
    for (auto& w : workers) w.join();
  }

  FilterStats stats;
  std::vector<Item> kept;
  kept.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (verdicts[i]) {
      stats.drop(*verdicts[i]);
    } else {
      stats.keep();
      kept.push_back(std::move(items[i]));
    }
  }
  return {std::move(kept), std::move(stats)};
}

}  // namespace

BitextFilterResult filter_bitext(std::vector<SentencePair> pairs,
                                 const FilterConfig& cfg,
                                 const LangIdModel* model, int threads) {
  auto [kept, stats] = run_filter(
      std::move(pairs),
      [&](const SentencePair& p) { return bitext_drop_rule(p, cfg, model); },
      threads);
  return {std::move(kept), std::move(stats)};
}

MonoFilterResult filter_mono(std::vector<Sentence> sentences,
                             const std::string& expected_lang,
                             const FilterConfig& cfg, const LangIdModel* model,
                             int threads) {
  auto [kept, stats] = run_filter(
      std::move(sentences),
      [&](const Sentence& s) {
        return mono_drop_rule(s, expected_lang, cfg, model);
      },
      threads);
  return {std::move(kept), std::move(stats)};
}

}  // namespace corpuseng
