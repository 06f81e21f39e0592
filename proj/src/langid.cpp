#include "corpuseng/langid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "corpuseng/util.hpp"

namespace corpuseng {

namespace {

void for_each_ngram(const std::vector<char32_t>& cps, int order,
                    const std::function<void(int, std::string)>& fn) {
  for (int k = 1; k <= order; ++k) {
    if (cps.size() < static_cast<std::size_t>(k)) break;
    for (std::size_t i = 0; i + k <= cps.size(); ++i) {
      fn(k, codepoints_to_utf8(
                std::span<const char32_t>(cps.data() + i, k)));
    }
  }
}

std::string escape_field(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape_field(const std::string& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      ++i;
      switch (s[i]) {
        case 't': out += '\t'; break;
        case 'n': out += '\n'; break;
        default: out += s[i];
      }
    } else {
      out += s[i];
    }
  }
  return out;
}

}  // namespace

const LangIdModel::Language* LangIdModel::find(const std::string& code) const {
  for (const auto& lang : languages) {
    if (lang.code == code) return &lang;
  }
  return nullptr;
}

LangIdModel langid_train(
    const std::map<std::string, std::vector<Sentence>>& labeled_corpora,
    int order) {
  if (labeled_corpora.size() < 2) {
    throw std::runtime_error("langid training needs at least two languages, got " +
                             std::to_string(labeled_corpora.size()));
  }
  if (order < 1) throw std::runtime_error("langid order must be >= 1");

  struct Counts {
    std::vector<std::unordered_map<std::string, std::uint64_t>> by_order;
    std::vector<std::uint64_t> totals;
    std::uint64_t sentences = 0;
  };
  std::map<std::string, Counts> counts;
  // Event space per order: every n-gram seen in any language.
  std::vector<std::set<std::string>> events(order);

  std::uint64_t total_sentences = 0;
  for (const auto& [code, corpus] : labeled_corpora) {
    if (corpus.empty()) {
      throw std::runtime_error("empty training corpus for language " + code);
    }
    Counts& c = counts[code];
    c.by_order.resize(order);
    c.totals.assign(order, 0);
    for (const Sentence& s : corpus) {
      ++c.sentences;
      const auto cps = utf8_to_codepoints(s.text);
      for_each_ngram(cps, order, [&](int k, std::string gram) {
        ++c.by_order[k - 1][gram];
        ++c.totals[k - 1];
        events[k - 1].insert(std::move(gram));
      });
    }
    total_sentences += c.sentences;
  }

  LangIdModel model;
  model.order = order;
  for (const auto& [code, c] : counts) {
    LangIdModel::Language lang;
    lang.code = code;
    lang.log_prior = std::log(static_cast<double>(c.sentences) /
                              static_cast<double>(total_sentences));
    lang.log_probs.resize(order);
    lang.default_log_prob.resize(order);
    for (int k = 0; k < order; ++k) {
      const double denom =
          static_cast<double>(c.totals[k]) + static_cast<double>(events[k].size());
      lang.default_log_prob[k] = std::log(1.0 / denom);
      for (const auto& [gram, n] : c.by_order[k]) {
        lang.log_probs[k][gram] = std::log((static_cast<double>(n) + 1.0) / denom);
      }
    }
    model.languages.push_back(std::move(lang));
  }
  return model;
}

LangIdResult langid_classify(const LangIdModel& model, const Sentence& s) {
  if (s.text.empty()) {
    throw std::runtime_error("cannot classify an empty sentence");
  }
  if (model.languages.size() < 2) {
    throw std::runtime_error("langid model has fewer than two languages");
  }
  const auto cps = utf8_to_codepoints(s.text);
  std::vector<double> scores;
  scores.reserve(model.languages.size());
  for (const auto& lang : model.languages) {
    double score = lang.log_prior;
    for_each_ngram(cps, model.order, [&](int k, std::string gram) {
      const auto& table = lang.log_probs[k - 1];
      auto it = table.find(gram);
      score += (it == table.end()) ? lang.default_log_prob[k - 1] : it->second;
    });
    scores.push_back(score);
  }
  std::size_t best = 0, second = 1;
  if (scores[second] > scores[best]) std::swap(best, second);
  for (std::size_t i = 2; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) {
      second = best;
      best = i;
    } else if (scores[i] > scores[second]) {
      second = i;
    }
  }
  return {model.languages[best].code, scores[best] - scores[second]};
}

void langid_save(const LangIdModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.precision(17);
  out << "langid-model\tv1\n";
  out << "order\t" << model.order << "\n";
  out << "languages\t" << model.languages.size() << "\n";
  std::uint64_t rows = 0;
  for (const auto& lang : model.languages) {
    out << "lang\t" << lang.code << "\t" << lang.log_prior;
    for (double d : lang.default_log_prob) out << "\t" << d;
    out << "\n";
    for (const auto& table : lang.log_probs) rows += table.size();
  }
  out << "ngrams\t" << rows << "\n";
  for (const auto& lang : model.languages) {
    for (int k = 0; k < model.order; ++k) {
      // Sorted rows keep the file deterministic.
      std::vector<std::pair<std::string, double>> entries(
          lang.log_probs[k].begin(), lang.log_probs[k].end());
      std::sort(entries.begin(), entries.end());
      for (const auto& [gram, lp] : entries) {
        out << lang.code << "\t" << (k + 1) << "\t" << escape_field(gram)
            << "\t" << lp << "\n";
      }
    }
  }
  if (!out) throw std::runtime_error("write failed on " + path);
}

LangIdModel langid_load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  auto fail = [&](const std::string& msg) -> std::runtime_error {
    return std::runtime_error(path + ": " + msg);
  };
  auto split_tabs = [](const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t pos = line.find('\t', start);
      if (pos == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, pos - start));
      start = pos + 1;
    }
    return fields;
  };

  std::string line;
  if (!std::getline(in, line) || split_tabs(line) !=
      std::vector<std::string>{"langid-model", "v1"}) {
    throw fail("bad header");
  }
  LangIdModel model;
  if (!std::getline(in, line)) throw fail("missing order line");
  auto f = split_tabs(line);
  if (f.size() != 2 || f[0] != "order") throw fail("bad order line");
  model.order = std::stoi(f[1]);

  if (!std::getline(in, line)) throw fail("missing languages line");
  f = split_tabs(line);
  if (f.size() != 2 || f[0] != "languages") throw fail("bad languages line");
  const int n_langs = std::stoi(f[1]);

  for (int i = 0; i < n_langs; ++i) {
    if (!std::getline(in, line)) throw fail("missing lang line");
    f = split_tabs(line);
    if (f.size() != static_cast<std::size_t>(3 + model.order) || f[0] != "lang") {
      throw fail("bad lang line: " + line);
    }
    LangIdModel::Language lang;
    lang.code = f[1];
    lang.log_prior = std::stod(f[2]);
    lang.log_probs.resize(model.order);
    for (int k = 0; k < model.order; ++k) {
      lang.default_log_prob.push_back(std::stod(f[3 + k]));
    }
    model.languages.push_back(std::move(lang));
  }

  if (!std::getline(in, line)) throw fail("missing ngrams line");
  f = split_tabs(line);
  if (f.size() != 2 || f[0] != "ngrams") throw fail("bad ngrams line");
  const std::uint64_t rows = std::stoull(f[1]);

  std::uint64_t seen = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    f = split_tabs(line);
    if (f.size() != 4) throw fail("bad ngram row: " + line);
    auto* lang = const_cast<LangIdModel::Language*>(model.find(f[0]));
    if (!lang) throw fail("unknown language in row: " + f[0]);
    const int k = std::stoi(f[1]);
    if (k < 1 || k > model.order) throw fail("bad order in row: " + f[1]);
    lang->log_probs[k - 1][unescape_field(f[2])] = std::stod(f[3]);
    ++seen;
  }
  if (seen != rows) {
    throw fail("ngram row count mismatch: declared " + std::to_string(rows) +
               ", found " + std::to_string(seen));
  }
  return model;
}

}  // namespace corpuseng
