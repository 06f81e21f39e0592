#include "corpuseng/domain_select.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace corpuseng {

double ml_score(const SelectionConfig& cfg, const Sentence& s) {
  if (cfg.lm_in == nullptr || cfg.lm_out == nullptr) {
    throw std::runtime_error("selection needs both language models");
  }
  const double h_in = sentence_logprob(*cfg.lm_in, s).cross_entropy;
  const double h_out = sentence_logprob(*cfg.lm_out, s).cross_entropy;
  return h_out - h_in;
}

void SelectionReport::record(double score) {
  if (score < kLo) {
    ++underflow;
  } else if (score >= kHi) {
    ++overflow;
  } else {
    const int bin = static_cast<int>((score - kLo) / (kHi - kLo) * kBins);
    ++histogram[std::min(bin, kBins - 1)];
  }
}

void SelectionReport::merge(const SelectionReport& other) {
  input_count += other.input_count;
  selected_count += other.selected_count;
  underflow += other.underflow;
  overflow += other.overflow;
  for (int i = 0; i < kBins; ++i) histogram[i] += other.histogram[i];
  fraction = input_count
                 ? static_cast<double>(selected_count) /
                       static_cast<double>(input_count)
                 : 0.0;
}

std::string SelectionReport::to_json() const {
  nlohmann::json j;
  j["input_count"] = input_count;
  j["selected_count"] = selected_count;
  j["fraction"] = fraction;
  j["cutoff"] = cutoff_used;
  j["histogram"] = {{"lo", kLo}, {"hi", kHi}, {"bins", histogram},
                    {"underflow", underflow}, {"overflow", overflow}};
  return j.dump(2);
}

std::vector<double> score_all(std::span<const Sentence> corpus,
                              const SelectionConfig& cfg, int threads) {
  std::vector<double> scores(corpus.size());
  if (threads <= 1 || corpus.size() < 1024) {
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      scores[i] = ml_score(cfg, corpus[i]);
    }
    return scores;
  }
  const std::size_t n = corpus.size();
  const std::size_t n_threads = std::min<std::size_t>(threads, n);
  const std::size_t chunk = (n + n_threads - 1) / n_threads;
  std::vector<std::thread> workers;
  for (std::size_t t = 0; t < n_threads; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(lo + chunk, n);
    if (lo >= hi) break;
    workers.emplace_back([&, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) scores[i] = ml_score(cfg, corpus[i]);
    });
  }
  for (auto& w : workers) w.join();
  return scores;
}

namespace {

SelectionResult select_with_scores(std::span<const Sentence> corpus,
                                   const std::vector<double>& scores,
                                   double cutoff) {
  SelectionResult result;
  result.report.cutoff_used = cutoff;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    ++result.report.input_count;
    result.report.record(scores[i]);
    if (scores[i] > cutoff) {
      ++result.report.selected_count;
      result.selected.push_back(corpus[i]);
    }
  }
  result.report.fraction =
      result.report.input_count
          ? static_cast<double>(result.report.selected_count) /
                static_cast<double>(result.report.input_count)
          : 0.0;
  return result;
}

}  // namespace

SelectionResult select(std::span<const Sentence> corpus,
                       const SelectionConfig& cfg, int threads) {
  return select_with_scores(corpus, score_all(corpus, cfg, threads),
                            cfg.cutoff);
}

SelectionResult select_target_fraction(std::span<const Sentence> corpus,
                                       const SelectionConfig& cfg,
                                       double fraction, int threads) {
  if (fraction < 0.0 || fraction > 1.0) {
    throw std::runtime_error("target fraction must be in [0, 1]");
  }
  const std::vector<double> scores = score_all(corpus, cfg, threads);
  const auto want = static_cast<std::uint64_t>(
      fraction * static_cast<double>(corpus.size()));
  // The cutoff is the smallest score whose strict-greater tail has at most
  // `want` sentences: the (n-want)-th order statistic.
  std::vector<double> sorted = scores;
  std::sort(sorted.begin(), sorted.end());
  double cutoff;
  if (want >= sorted.size()) {
    cutoff = sorted.empty() ? 0.0 : sorted.front() - 1.0;
  } else {
    cutoff = sorted[sorted.size() - 1 - want];
  }
  return select_with_scores(corpus, scores, cutoff);
}

void score_dump(std::span<const Sentence> corpus, const SelectionConfig& cfg,
                std::ostream& out, int threads) {
  const std::vector<double> scores = score_all(corpus, cfg, threads);
  out.precision(17);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out << i << '\t' << scores[i] << '\n';
  }
}

}  // namespace corpuseng
