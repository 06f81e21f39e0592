#include "corpuseng/rerank.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "corpuseng/util.hpp"
#include "json.hpp"

namespace corpuseng {

double combined_score(const Hypothesis& h, const RerankWeights& w) {
  return h.forward_score + w.lambda1 * h.channel_score +
         w.lambda2 * h.lm_score +
         w.length_penalty * static_cast<double>(h.text.tokens.size());
}

const Hypothesis& rerank(const NBestList& list, const RerankWeights& w) {
  if (list.hypotheses.empty()) {
    throw std::runtime_error("n-best list " + std::to_string(list.source_id) +
                             " is empty");
  }
  std::size_t best = 0;
  double best_score = combined_score(list.hypotheses[0], w);
  for (std::size_t i = 1; i < list.hypotheses.size(); ++i) {
    const double s = combined_score(list.hypotheses[i], w);
    if (s > best_score) {
      best = i;
      best_score = s;
    }
  }
  return list.hypotheses[best];
}

RerankWeights tune(const std::vector<NBestList>& dev,
                   const std::vector<std::string>& references,
                   const TuneRanges& ranges, std::uint64_t n_samples,
                   std::uint64_t seed, BleuTokenizer tokenizer, int threads) {
  if (dev.size() != references.size()) {
    throw std::runtime_error("dev/reference count mismatch: " +
                             std::to_string(dev.size()) + " vs " +
                             std::to_string(references.size()));
  }
  if (dev.empty()) throw std::runtime_error("empty dev set");
  if (n_samples < 1) throw std::runtime_error("n_samples must be >= 1");

  // Draw every triple up front so the sample sequence is independent of
  // evaluation parallelism.
  Rng rng(seed);
  std::vector<RerankWeights> candidates(n_samples);
  for (auto& w : candidates) {
    w.lambda1 = rng.uniform(ranges.lambda_lo, ranges.lambda_hi);
    w.lambda2 = rng.uniform(ranges.lambda_lo, ranges.lambda_hi);
    w.length_penalty =
        rng.uniform(ranges.length_penalty_lo, ranges.length_penalty_hi);
  }

  std::vector<double> bleus(n_samples);
  auto evaluate = [&](std::uint64_t i) {
    std::vector<std::string> outputs;
    outputs.reserve(dev.size());
    for (const NBestList& list : dev) {
      outputs.push_back(rerank(list, candidates[i]).text.text);
    }
    bleus[i] = corpus_bleu(outputs, references, tokenizer).score;
  };

  if (threads <= 1 || n_samples < 4) {
    for (std::uint64_t i = 0; i < n_samples; ++i) evaluate(i);
  } else {
    const std::uint64_t n_threads =
        std::min<std::uint64_t>(threads, n_samples);
    std::vector<std::thread> workers;
    for (std::uint64_t t = 0; t < n_threads; ++t) {
      workers.emplace_back([&, t] {
        for (std::uint64_t i = t; i < n_samples; i += n_threads) evaluate(i);
      });
    }
    for (auto& w : workers) w.join();
  }

  std::uint64_t best = 0;
  for (std::uint64_t i = 1; i < n_samples; ++i) {
    if (bleus[i] > bleus[best]) best = i;
  }
  RerankWeights result = candidates[best];
  result.tuned_on = TuningMetadata{"dev", bleus[best], seed, n_samples};
  return result;
}

std::vector<NBestList> read_nbest(std::istream& in, const std::string& name) {
  std::vector<NBestList> lists;
  std::uint64_t line_no = 0;
  std::string line;
  auto fail = [&](const std::string& msg) -> std::runtime_error {
    return std::runtime_error(name + ":" + std::to_string(line_no) + ": " +
                              msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t tab = line.find('\t', start);
      if (tab == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    if (fields.size() != 5) {
      throw fail("expected 5 tab-separated fields, got " +
                 std::to_string(fields.size()));
    }
    Hypothesis h;
    try {
      h.source_id = std::stoull(fields[0]);
    } catch (const std::exception&) {
      throw fail("non-numeric source_id '" + fields[0] + "'");
    }
    h.text = Sentence(fields[1]);
    const char* names[] = {"forward", "channel", "lm"};
    double* dests[] = {&h.forward_score, &h.channel_score, &h.lm_score};
    for (int i = 0; i < 3; ++i) {
      try {
        std::size_t pos = 0;
        *dests[i] = std::stod(fields[2 + i], &pos);
        if (pos != fields[2 + i].size()) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw fail(std::string("non-numeric ") + names[i] + " score '" +
                   fields[2 + i] + "'");
      }
      if (!std::isfinite(*dests[i])) {
        throw fail(std::string("non-finite ") + names[i] + " score");
      }
    }
    if (lists.empty() || lists.back().source_id != h.source_id) {
      if (!lists.empty() && h.source_id <= lists.back().source_id) {
        throw fail("non-contiguous source_id " + std::to_string(h.source_id));
      }
      lists.push_back(NBestList{h.source_id, Sentence(), {}});
    }
    lists.back().hypotheses.push_back(std::move(h));
  }
  if (lists.empty()) {
    ++line_no;
    throw fail("empty n-best file");
  }
  return lists;
}

std::vector<NBestList> read_nbest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_nbest(in, path);
}

void write_nbest(const std::vector<NBestList>& lists, std::ostream& out) {
  out.precision(17);
  for (const NBestList& list : lists) {
    for (const Hypothesis& h : list.hypotheses) {
      out << list.source_id << '\t' << h.text.text << '\t' << h.forward_score
          << '\t' << h.channel_score << '\t' << h.lm_score << '\n';
    }
  }
}

void write_nbest(const std::vector<NBestList>& lists,
                 const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_nbest(lists, out);
  if (!out) throw std::runtime_error("write failed on " + path);
}

std::string weights_to_json(const RerankWeights& w) {
  nlohmann::json j;
  j["lambda1"] = w.lambda1;
  j["lambda2"] = w.lambda2;
  j["length_penalty"] = w.length_penalty;
  j["generator"] = "mt19937_64-top53";
  if (w.tuned_on) {
    j["dataset"] = w.tuned_on->dataset;
    j["dev_bleu"] = w.tuned_on->dev_bleu;
    j["seed"] = w.tuned_on->seed;
    j["n_samples"] = w.tuned_on->n_samples;
  }
  return j.dump(2);
}

RerankWeights weights_from_json(const std::string& json_text) {
  const nlohmann::json j = nlohmann::json::parse(json_text);
  RerankWeights w;
  w.lambda1 = j.at("lambda1").get<double>();
  w.lambda2 = j.at("lambda2").get<double>();
  w.length_penalty = j.at("length_penalty").get<double>();
  if (j.contains("dev_bleu")) {
    w.tuned_on = TuningMetadata{
        j.value("dataset", std::string()), j.at("dev_bleu").get<double>(),
        j.value("seed", std::uint64_t{0}), j.value("n_samples", std::uint64_t{0})};
  }
  return w;
}

}  // namespace corpuseng
