#include "corpuseng/ngram_lm.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "corpuseng/util.hpp"

namespace corpuseng {

namespace {
constexpr double kLn10 = 2.302585092994045684;
constexpr double kBosPlaceholderLog10 = -99.0;
}  // namespace

Vocab::Vocab() {
  add("<unk>");
  add("<s>");
  add("</s>");
}

int Vocab::add(const std::string& token) {
  auto [it, inserted] = id_by_token.try_emplace(
      token, static_cast<int>(token_by_id.size()));
  if (inserted) token_by_id.push_back(token);
  return it->second;
}

int Vocab::lookup(const std::string& token) const {
  auto it = id_by_token.find(token);
  return it == id_by_token.end() ? kUnk : it->second;
}

std::string pack_ids(std::span<const int> ids) {
  std::string key(ids.size() * sizeof(int), '\0');
  if (!ids.empty()) std::memcpy(key.data(), ids.data(), key.size());
  return key;
}

std::vector<int> unpack_ids(const std::string& key) {
  std::vector<int> ids(key.size() / sizeof(int));
  if (!ids.empty()) std::memcpy(ids.data(), key.data(), key.size());
  return ids;
}

std::unordered_map<std::string, std::uint64_t> count_unigram_tokens(
    std::span<const Sentence> corpus) {
  std::unordered_map<std::string, std::uint64_t> counts;
  for (const Sentence& s : corpus) {
    for (const std::string& t : s.tokens) ++counts[t];
  }
  return counts;
}

void merge_token_counts(
    std::unordered_map<std::string, std::uint64_t>& into,
    const std::unordered_map<std::string, std::uint64_t>& from) {
  for (const auto& [t, n] : from) into[t] += n;
}

Vocab build_vocab(
    const std::unordered_map<std::string, std::uint64_t>& unigrams,
    std::uint64_t min_count) {
  // Sorted insertion keeps ids stable across hash-map iteration orders.
  std::vector<const std::string*> tokens;
  tokens.reserve(unigrams.size());
  for (const auto& [t, n] : unigrams) {
    if (n >= min_count) tokens.push_back(&t);
  }
  std::sort(tokens.begin(), tokens.end(),
            [](const std::string* a, const std::string* b) { return *a < *b; });
  Vocab vocab;
  for (const std::string* t : tokens) vocab.add(*t);
  return vocab;
}

NGramCounts count_ngrams_with_vocab(std::span<const Sentence> corpus,
                                    const Vocab& vocab, int order) {
  if (order < 1 || order > 6) {
    throw std::runtime_error("n-gram order must be in [1, 6]");
  }
  NGramCounts counts;
  counts.order = order;
  counts.vocab = vocab;
  counts.by_order.resize(order);
  std::vector<int> ids;
  for (const Sentence& s : corpus) {
    ids.clear();
    ids.push_back(Vocab::kBos);
    for (const std::string& t : s.tokens) ids.push_back(vocab.lookup(t));
    ids.push_back(Vocab::kEos);
    for (int k = 1; k <= order; ++k) {
      if (ids.size() < static_cast<std::size_t>(k)) break;
      for (std::size_t i = 0; i + k <= ids.size(); ++i) {
        ++counts.by_order[k - 1][pack_ids(
            std::span<const int>(ids.data() + i, k))];
      }
    }
  }
  return counts;
}

void merge_counts(NGramCounts& into, const NGramCounts& from) {
  if (into.order != from.order ||
      into.vocab.token_by_id != from.vocab.token_by_id) {
    throw std::runtime_error(
        "cannot merge counts with different order or vocabulary");
  }
  for (int k = 0; k < into.order; ++k) {
    for (const auto& [key, n] : from.by_order[k]) into.by_order[k][key] += n;
  }
}

NGramCounts count_ngrams(std::span<const Sentence> corpus, int order,
                         std::uint64_t min_count) {
  if (corpus.empty()) throw std::runtime_error("cannot count an empty corpus");
  if (min_count < 1) throw std::runtime_error("min_count must be >= 1");
  const auto unigrams = count_unigram_tokens(corpus);
  const Vocab vocab = build_vocab(unigrams, min_count);
  return count_ngrams_with_vocab(corpus, vocab, order);
}

namespace {

bool starts_with_bos(const std::string& key) {
  int first;
  std::memcpy(&first, key.data(), sizeof(int));
  return first == Vocab::kBos;
}

// One discount per order from singleton/doubleton counts.
double kn_discount(const CountTable& table, int order_k) {
  // The bare <s> unigram is a placeholder, not part of the distribution.
  const std::string bos_key =
      pack_ids(std::span<const int>(&Vocab::kBos, 1));
  std::uint64_t n1 = 0, n2 = 0;
  for (const auto& [key, n] : table) {
    if (order_k == 1 && key == bos_key) continue;
    if (n == 1) ++n1;
    if (n == 2) ++n2;
  }
  if (n1 == 0) {
    std::cerr << "warning: degenerate Kneser-Ney discount at order "
              << order_k << ", falling back to D=0.75\n";
    return 0.75;
  }
  return static_cast<double>(n1) /
         (static_cast<double>(n1) + 2.0 * static_cast<double>(n2));
}

}  // namespace

NGramModel estimate_kn(const NGramCounts& counts) {
  const int n = counts.order;
  if (n < 1) throw std::runtime_error("counts have no orders");
  for (int k = 1; k <= n; ++k) {
    if (counts.by_order[k - 1].empty()) {
      throw std::runtime_error("no " + std::to_string(k) +
                               "-grams observed; corpus too small for order " +
                               std::to_string(n));
    }
  }

  // Adjusted counts: raw at the top order; continuation counts (distinct
  // predecessors) below, except n-grams starting with <s> keep raw counts.
  std::vector<CountTable> adjusted(n);
  adjusted[n - 1] = counts.by_order[n - 1];
  for (int k = n - 1; k >= 1; --k) {
    CountTable& adj = adjusted[k - 1];
    for (const auto& [key, cnt] : counts.by_order[k]) {
      ++adj[key.substr(sizeof(int))];
    }
    for (const auto& [key, cnt] : counts.by_order[k - 1]) {
      if (starts_with_bos(key)) adj[key] = cnt;
      else adj.try_emplace(key, cnt);  // raw support not reachable as suffix
    }
  }

  std::vector<double> discount(n + 1, 0.0);
  for (int k = 1; k <= n; ++k) discount[k] = kn_discount(adjusted[k - 1], k);

  NGramModel model;
  model.order = n;
  model.vocab = counts.vocab;
  model.by_order.resize(n);

  // Unigram distribution over everything predictable (all but <s>),
  // discounted and interpolated with the uniform distribution so <unk>
  // stays strictly positive.
  const int vocab_size = model.vocab.size();
  const double n_predictable = static_cast<double>(vocab_size - 1);
  double total1 = 0.0;
  std::uint64_t types1 = 0;
  auto adjusted_unigram = [&](int w) -> std::uint64_t {
    const std::string key = pack_ids(std::span<const int>(&w, 1));
    auto it = adjusted[0].find(key);
    return it == adjusted[0].end() ? 0 : it->second;
  };
  for (int w = 0; w < vocab_size; ++w) {
    if (w == Vocab::kBos) continue;
    const std::uint64_t a = adjusted_unigram(w);
    total1 += static_cast<double>(a);
    if (a > 0) ++types1;
  }
  if (total1 <= 0.0) throw std::runtime_error("empty unigram distribution");
  const double d1 = discount[1];
  const double uniform_mass =
      d1 * static_cast<double>(types1) / total1 / n_predictable;
  for (int w = 0; w < vocab_size; ++w) {
    const std::string key = pack_ids(std::span<const int>(&w, 1));
    if (w == Vocab::kBos) {
      model.by_order[0][key] = {kBosPlaceholderLog10 * kLn10, 0.0};
      continue;
    }
    const double a = static_cast<double>(adjusted_unigram(w));
    const double p = std::max(a - d1, 0.0) / total1 + uniform_mass;
    model.by_order[0][key] = {std::log(p), 0.0};
  }

  // Higher orders, bottom-up. Backoff weight of a context is the
  // interpolation mass it hands down, stored on the context's own entry
  // one order below.
  for (int k = 2; k <= n; ++k) {
    const CountTable& adj = adjusted[k - 1];
    const double dk = discount[k];

    struct ContextAgg {
      double total = 0.0;
      std::uint64_t types = 0;
    };
    std::unordered_map<std::string, ContextAgg> contexts;
    for (const auto& [key, cnt] : adj) {
      ContextAgg& agg = contexts[key.substr(0, key.size() - sizeof(int))];
      agg.total += static_cast<double>(cnt);
      ++agg.types;
    }

    for (const auto& [ctx_key, agg] : contexts) {
      const double gamma = dk * static_cast<double>(agg.types) / agg.total;
      auto it = model.by_order[k - 2].find(ctx_key);
      if (it == model.by_order[k - 2].end()) {
        throw std::logic_error("context not stored at lower order");
      }
      it->second.backoff = std::log(gamma);
    }

    for (const auto& [key, cnt] : adj) {
      const std::string ctx_key = key.substr(0, key.size() - sizeof(int));
      const std::string lower_key = key.substr(sizeof(int));
      const ContextAgg& agg = contexts.at(ctx_key);
      const double gamma = dk * static_cast<double>(agg.types) / agg.total;
      auto lower = model.by_order[k - 2].find(lower_key);
      if (lower == model.by_order[k - 2].end()) {
        throw std::logic_error("lower-order n-gram not stored");
      }
      const double p =
          std::max(static_cast<double>(cnt) - dk, 0.0) / agg.total +
          gamma * std::exp(lower->second.log_prob);
      model.by_order[k - 1][key] = {std::log(p), 0.0};
    }
  }
  return model;
}

double NGramModel::word_logprob(std::span<const int> context, int word) const {
  std::span<const int> ctx = context;
  if (ctx.size() > static_cast<std::size_t>(order - 1)) {
    ctx = ctx.subspan(ctx.size() - (order - 1));
  }
  double backoff_sum = 0.0;
  std::vector<int> key_ids;
  for (std::size_t start = 0;; ++start) {
    const std::span<const int> cur = ctx.subspan(start);
    key_ids.assign(cur.begin(), cur.end());
    key_ids.push_back(word);
    const auto& table = by_order[cur.size()];
    auto it = table.find(pack_ids(key_ids));
    if (it != table.end()) return backoff_sum + it->second.log_prob;
    if (cur.empty()) {
      throw std::runtime_error("token id " + std::to_string(word) +
                               " has no unigram entry");
    }
    const auto& ctx_table = by_order[cur.size() - 1];
    auto ctx_it = ctx_table.find(pack_ids(cur));
    if (ctx_it != ctx_table.end()) backoff_sum += ctx_it->second.backoff;
  }
}

SentenceScore sentence_logprob(const NGramModel& model, const Sentence& s) {
  if (s.tokens.empty()) {
    throw std::runtime_error("cannot score an empty sentence");
  }
  std::vector<int> context;
  context.push_back(Vocab::kBos);
  SentenceScore score;
  auto score_word = [&](int w) {
    score.total_log_prob += model.word_logprob(context, w);
    ++score.scored_token_count;
    context.push_back(w);
  };
  for (const std::string& t : s.tokens) score_word(model.vocab.lookup(t));
  score_word(Vocab::kEos);
  score.cross_entropy = -score.total_log_prob /
                        static_cast<double>(score.scored_token_count);
  return score;
}

double perplexity(const NGramModel& model, std::span<const Sentence> corpus) {
  if (corpus.empty()) {
    throw std::runtime_error("cannot compute perplexity of an empty corpus");
  }
  double total = 0.0;
  std::uint64_t tokens = 0;
  for (const Sentence& s : corpus) {
    const SentenceScore sc = sentence_logprob(model, s);
    total += sc.total_log_prob;
    tokens += sc.scored_token_count;
  }
  return std::exp(-total / static_cast<double>(tokens));
}

void export_arpa(const NGramModel& model, std::ostream& out) {
  out.precision(12);
  out << "\\data\\\n";
  for (int k = 1; k <= model.order; ++k) {
    out << "ngram " << k << "=" << model.by_order[k - 1].size() << "\n";
  }
  out << "\n";
  for (int k = 1; k <= model.order; ++k) {
    out << "\\" << k << "-grams:\n";
    std::vector<const std::string*> keys;
    keys.reserve(model.by_order[k - 1].size());
    for (const auto& [key, pb] : model.by_order[k - 1]) keys.push_back(&key);
    std::sort(keys.begin(), keys.end(),
              [](const std::string* a, const std::string* b) { return *a < *b; });
    for (const std::string* key : keys) {
      const ProbBackoff& pb = model.by_order[k - 1].at(*key);
      out << pb.log_prob / kLn10;
      out << '\t';
      const std::vector<int> ids = unpack_ids(*key);
      for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) out << ' ';
        out << model.vocab.token_by_id[ids[i]];
      }
      if (k < model.order && pb.backoff != 0.0) {
        out << '\t' << pb.backoff / kLn10;
      }
      out << "\n";
    }
    out << "\n";
  }
  out << "\\end\\\n";
}

void export_arpa(const NGramModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  export_arpa(model, out);
  if (!out) throw std::runtime_error("write failed on " + path);
}

namespace {

struct ArpaParser {
  std::istream& in;
  std::string name;
  std::uint64_t line_no = 0;
  std::string line;

  bool next_line() {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::runtime_error(name + ":" + std::to_string(line_no) + ": " +
                             msg);
  }
};

double parse_double(ArpaParser& p, const std::string& field) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(field, &pos);
    if (pos != field.size()) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    p.fail("non-numeric field '" + field + "'");
  }
}

}  // namespace

NGramModel import_arpa(std::istream& in, const std::string& name) {
  ArpaParser p{in, name};

  // \data\ section
  while (p.next_line()) {
    if (p.line == "\\data\\") break;
    if (!p.line.empty()) p.fail("expected \\data\\ header");
  }
  if (p.line != "\\data\\") p.fail("missing \\data\\ header");

  std::vector<std::uint64_t> declared;
  while (p.next_line()) {
    if (p.line.empty()) break;
    if (p.line.rfind("ngram ", 0) != 0) p.fail("bad count line: " + p.line);
    const std::size_t eq = p.line.find('=');
    if (eq == std::string::npos) p.fail("bad count line: " + p.line);
    const int k = std::stoi(p.line.substr(6, eq - 6));
    if (k != static_cast<int>(declared.size()) + 1) {
      p.fail("count lines out of order");
    }
    declared.push_back(std::stoull(p.line.substr(eq + 1)));
  }
  if (declared.empty()) p.fail("no ngram counts declared");

  NGramModel model;
  model.order = static_cast<int>(declared.size());
  model.by_order.resize(model.order);

  int current = 0;
  while (p.next_line()) {
    if (p.line.empty()) continue;
    if (p.line == "\\end\\") {
      current = -1;
      break;
    }
    const std::string expected_header =
        "\\" + std::to_string(current + 1) + "-grams:";
    if (p.line == expected_header) {
      ++current;
      continue;
    }
    if (current == 0) p.fail("expected " + expected_header);
    if (p.line[0] == '\\') p.fail("unexpected section header " + p.line);

    // logprob TAB tokens [TAB backoff]
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t tab = p.line.find('\t', start);
      if (tab == std::string::npos) {
        fields.push_back(p.line.substr(start));
        break;
      }
      fields.push_back(p.line.substr(start, tab - start));
      start = tab + 1;
    }
    if (fields.size() < 2 || fields.size() > 3) {
      p.fail("expected 2 or 3 tab-separated fields");
    }
    const double log10_prob = parse_double(p, fields[0]);
    const std::vector<std::string> tokens = split_whitespace(fields[1]);
    if (static_cast<int>(tokens.size()) != current) {
      p.fail("expected a " + std::to_string(current) + "-gram, got " +
             std::to_string(tokens.size()) + " tokens");
    }
    double log10_backoff = 0.0;
    if (fields.size() == 3) {
      if (current == model.order) p.fail("backoff weight on highest order");
      log10_backoff = parse_double(p, fields[2]);
    }
    std::vector<int> ids;
    ids.reserve(tokens.size());
    for (const std::string& t : tokens) {
      ids.push_back(current == 1 ? model.vocab.add(t) : model.vocab.lookup(t));
    }
    model.by_order[current - 1][pack_ids(ids)] = {log10_prob * kLn10,
                                                  log10_backoff * kLn10};
  }
  if (current != -1) p.fail("missing \\end\\ marker");

  for (int k = 1; k <= model.order; ++k) {
    if (model.by_order[k - 1].size() != declared[k - 1]) {
      p.fail("count mismatch in " + std::to_string(k) + "-grams: declared " +
             std::to_string(declared[k - 1]) + ", found " +
             std::to_string(model.by_order[k - 1].size()));
    }
  }
  return model;
}

NGramModel import_arpa(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return import_arpa(in, path);
}

}  // namespace corpuseng
