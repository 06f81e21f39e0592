#include "corpuseng/bleu.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "test_util.hpp"

using namespace corpuseng;

namespace {

using Tokens = std::vector<std::string>;

// Reference BLEU computed the slow way: map-keyed n-gram multisets and the
// same exponential smoothing rule, written independently of the library.
double reference_bleu(const std::vector<Tokens>& hyps,
                      const std::vector<Tokens>& refs) {
  std::array<long, 4> matches{};
  std::array<long, 4> totals{};
  long hyp_len = 0, ref_len = 0;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    hyp_len += static_cast<long>(hyps[i].size());
    ref_len += static_cast<long>(refs[i].size());
    for (int n = 1; n <= 4; ++n) {
      std::map<Tokens, long> h, r;
      for (std::size_t k = 0; k + n <= hyps[i].size(); ++k) {
        ++h[Tokens(hyps[i].begin() + k, hyps[i].begin() + k + n)];
      }
      for (std::size_t k = 0; k + n <= refs[i].size(); ++k) {
        ++r[Tokens(refs[i].begin() + k, refs[i].begin() + k + n)];
      }
      for (const auto& [gram, cnt] : h) {
        totals[n - 1] += cnt;
        auto it = r.find(gram);
        if (it != r.end()) matches[n - 1] += std::min(cnt, it->second);
      }
    }
  }
  double smooth = 1.0, logsum = 0.0;
  int orders = 0;
  for (int n = 1; n <= 4; ++n) {
    if (totals[n - 1] == 0) break;
    ++orders;
    double p;
    if (matches[n - 1] == 0) {
      smooth *= 2.0;
      p = 1.0 / (smooth * totals[n - 1]);
    } else {
      p = static_cast<double>(matches[n - 1]) / totals[n - 1];
    }
    logsum += std::log(p);
  }
  const double bp = hyp_len >= ref_len
                        ? 1.0
                        : std::exp(1.0 - static_cast<double>(ref_len) / hyp_len);
  return 100.0 * bp * std::exp(logsum / orders);
}

std::string join(const Tokens& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

}  // namespace

TEST_CASE("13a tokenizer golden cases") {
  CHECK(tokenize_13a("Hello, world!") == Tokens{"Hello", ",", "world", "!"});
  CHECK(tokenize_13a("3.5") == Tokens{"3.5"});
  CHECK(tokenize_13a("1,000,000") == Tokens{"1,000,000"});
  CHECK(tokenize_13a("3.") == Tokens{"3", "."});
  CHECK(tokenize_13a("It's fine.") == Tokens{"It's", "fine", "."});
  CHECK(tokenize_13a("a-b") == Tokens{"a-b"});
  CHECK(tokenize_13a("1-2") == Tokens{"1", "-", "2"});
  CHECK(tokenize_13a("(brackets)") == Tokens{"(", "brackets", ")"});
  CHECK(tokenize_13a("&quot;hi&quot;") == Tokens{"\"", "hi", "\""});
  CHECK(tokenize_13a("x &amp; y") == Tokens{"x", "&", "y"});
  CHECK(tokenize_13a("a  b\tc") == Tokens{"a", "b", "c"});
  CHECK(tokenize_13a("") == Tokens{});
  CHECK(tokenize_13a("50%") == Tokens{"50", "%"});
  CHECK(tokenize_13a("http://x.y/z") ==
        Tokens{"http", ":", "/", "/", "x", ".", "y", "/", "z"});
}

TEST_CASE("intl tokenizer golden cases") {
  CHECK(tokenize_intl("Hello, world!") == Tokens{"Hello", ",", "world", "!"});
  CHECK(tokenize_intl("привет,мир") == Tokens{"привет", ",", "мир"});
  CHECK(tokenize_intl("«да»") == Tokens{"«", "да", "»"});
  CHECK(tokenize_intl("3.5") == Tokens{"3.5"});
  CHECK(tokenize_intl("3,14") == Tokens{"3,14"});
  CHECK(tokenize_intl("x.") == Tokens{"x", "."});
  CHECK(tokenize_intl("€5") == Tokens{"€", "5"});
  CHECK(tokenize_intl("a+b") == Tokens{"a", "+", "b"});
  CHECK(tokenize_intl("„Wort“") == Tokens{"„", "Wort", "“"});
  CHECK(tokenize_intl("中文、测试。") == Tokens{"中文", "、", "测试", "。"});
  CHECK(tokenize_intl("") == Tokens{});
}

TEST_CASE("identity hypothesis scores exactly 100") {
  const std::vector<std::string> text = {
      "The quick brown fox jumps over the lazy dog.",
      "She sells sea shells on the sea shore.",
      "Numbers like 3.5 and 1,000 stay together.",
  };
  for (auto tok : {BleuTokenizer::k13a, BleuTokenizer::kIntl}) {
    const BleuScore s = corpus_bleu(text, text, tok);
    CHECK(s.score == 100.0);
    CHECK(s.brevity_penalty == 1.0);
    for (double p : s.precisions) CHECK(p == 1.0);
  }
}

TEST_CASE("repeated-token hypothesis is clipped and smoothed") {
  const std::vector<std::string> hyps = {"the the the"};
  const std::vector<std::string> refs = {"the cat"};
  const BleuScore s = corpus_bleu(hyps, refs, BleuTokenizer::k13a);
  // clipped unigram matches: 1 of 3; orders 2 and 3 smoothed; order 4 absent
  CHECK(s.precisions[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(s.precisions[1] == doctest::Approx(1.0 / 4.0).epsilon(1e-12));
  CHECK(s.precisions[2] == doctest::Approx(1.0 / 4.0).epsilon(1e-12));
  CHECK(s.precisions[3] == 0.0);
  CHECK(s.brevity_penalty == 1.0);
  CHECK(s.score ==
        doctest::Approx(100.0 * std::pow(1.0 / 48.0, 1.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("brevity penalty fires only when the hypothesis is shorter") {
  const BleuScore shorter = corpus_bleu(
      std::vector<std::string>{"a b"}, std::vector<std::string>{"a b c d"},
      BleuTokenizer::k13a);
  CHECK(shorter.brevity_penalty == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  const BleuScore longer = corpus_bleu(
      std::vector<std::string>{"a b c d"}, std::vector<std::string>{"a b"},
      BleuTokenizer::k13a);
  CHECK(longer.brevity_penalty == 1.0);
}

TEST_CASE("corpus score is invariant under joint permutation") {
  std::vector<std::string> hyps = {"the cat sat", "a dog ran fast",
                                   "hello there world", "one two three four"};
  std::vector<std::string> refs = {"the cat sat down", "a dog ran",
                                   "hello world", "one two three four five"};
  const double base = corpus_bleu(hyps, refs, BleuTokenizer::k13a).score;
  std::vector<std::size_t> order = {2, 0, 3, 1};
  std::vector<std::string> h2, r2;
  for (std::size_t i : order) {
    h2.push_back(hyps[i]);
    r2.push_back(refs[i]);
  }
  CHECK(corpus_bleu(h2, r2, BleuTokenizer::k13a).score == base);
}

TEST_CASE("randomized corpora match the reference computation") {
  std::mt19937 rng(2024);
  const std::vector<std::string> words = {"a", "b", "c", "d", "e", "f"};
  for (int trial = 0; trial < 1000; ++trial) {
    const int n_pairs = 1 + static_cast<int>(rng() % 5);
    std::vector<Tokens> hyp_tok, ref_tok;
    std::vector<std::string> hyps, refs;
    bool any_hyp_token = false;
    for (int i = 0; i < n_pairs; ++i) {
      Tokens h, r;
      const int hl = static_cast<int>(rng() % 9);
      const int rl = 1 + static_cast<int>(rng() % 8);
      for (int k = 0; k < hl; ++k) h.push_back(words[rng() % words.size()]);
      for (int k = 0; k < rl; ++k) r.push_back(words[rng() % words.size()]);
      any_hyp_token = any_hyp_token || !h.empty();
      hyp_tok.push_back(h);
      ref_tok.push_back(r);
      hyps.push_back(join(h));
      refs.push_back(join(r));
    }
    if (!any_hyp_token) continue;
    const double got = corpus_bleu(hyps, refs, BleuTokenizer::k13a).score;
    const double expected = reference_bleu(hyp_tok, ref_tok);
    CHECK(std::abs(got - expected) < 1e-9);
  }
}

TEST_CASE("corrupting hypothesis tokens never raises the score") {
  const std::vector<std::string> refs = {
      "the cat sat on the mat today",
      "a quick brown fox jumps over the dog",
  };
  std::vector<std::string> hyps = refs;
  double prev = corpus_bleu(hyps, refs, BleuTokenizer::k13a).score;
  std::mt19937 rng(7);
  for (int step = 0; step < 10; ++step) {
    // replace one matching word with an out-of-reference token
    std::vector<std::string> tokens = tokenize_13a(hyps[step % 2]);
    tokens[rng() % tokens.size()] = "zzqx";
    hyps[step % 2] = join(tokens);
    const double cur = corpus_bleu(hyps, refs, BleuTokenizer::k13a).score;
    CHECK(cur <= prev + 1e-12);
    prev = cur;
  }
}

TEST_CASE("length bookkeeping uses tokenized counts") {
  const BleuScore s = corpus_bleu(std::vector<std::string>{"Hello, world!"},
                                  std::vector<std::string>{"Hello, world!"},
                                  BleuTokenizer::k13a);
  CHECK(s.hyp_length == 4);
  CHECK(s.ref_length == 4);
}

TEST_CASE("mismatched corpus sizes are an error") {
  CHECK_THROWS_WITH_AS(
      corpus_bleu(std::vector<std::string>{"a", "b"},
                  std::vector<std::string>{"a"}, BleuTokenizer::k13a),
      doctest::Contains("2 vs 1"), std::runtime_error);
}

TEST_CASE("empty corpus and all-empty hypotheses are errors") {
  CHECK_THROWS_AS(corpus_bleu({}, {}, BleuTokenizer::k13a),
                  std::runtime_error);
  CHECK_THROWS_AS(corpus_bleu(std::vector<std::string>{""},
                              std::vector<std::string>{"a b"},
                              BleuTokenizer::k13a),
                  std::runtime_error);
}

TEST_CASE("signature names the tokenizer") {
  CHECK(bleu_signature(BleuTokenizer::k13a) ==
        "BLEU+case.mixed+numrefs.1+smooth.exp+tok.13a+corpuseng.1.0");
  CHECK(bleu_signature(BleuTokenizer::kIntl) ==
        "BLEU+case.mixed+numrefs.1+smooth.exp+tok.intl+corpuseng.1.0");
}

TEST_CASE("scoring is case-sensitive") {
  const double mixed = corpus_bleu(std::vector<std::string>{"The Cat"},
                                   std::vector<std::string>{"the cat"},
                                   BleuTokenizer::k13a)
                           .score;
  const double same = corpus_bleu(std::vector<std::string>{"the cat"},
                                  std::vector<std::string>{"the cat"},
                                  BleuTokenizer::k13a)
                          .score;
  CHECK(mixed < same);
}
