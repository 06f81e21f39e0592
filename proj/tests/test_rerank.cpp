#include "corpuseng/rerank.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "test_util.hpp"

using namespace corpuseng;

namespace {

Hypothesis hyp(std::uint64_t id, const std::string& text, double fwd,
               double ch, double lm) {
  Hypothesis h;
  h.source_id = id;
  h.text = Sentence(text);
  h.forward_score = fwd;
  h.channel_score = ch;
  h.lm_score = lm;
  return h;
}

NBestList list_of(std::uint64_t id, std::vector<Hypothesis> hyps) {
  NBestList l;
  l.source_id = id;
  l.hypotheses = std::move(hyps);
  return l;
}

}  // namespace

TEST_CASE("combined score is the weighted feature sum") {
  const Hypothesis h = hyp(0, "w w w w", -1.0, -2.0, -3.0);
  RerankWeights w;
  w.lambda1 = 1.0;
  w.lambda2 = 0.5;
  w.length_penalty = 0.25;
  // -1 + 1*(-2) + 0.5*(-3) + 0.25*4 = -3.5
  CHECK(combined_score(h, w) == doctest::Approx(-3.5).epsilon(1e-15));
}

TEST_CASE("zero weights reduce to the forward argmax") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> score(-50.0, 0.0);
  for (int trial = 0; trial < 200; ++trial) {
    NBestList l;
    l.source_id = trial;
    const int n = 1 + static_cast<int>(rng() % 20);
    std::size_t best = 0;
    for (int i = 0; i < n; ++i) {
      l.hypotheses.push_back(hyp(trial, "h" + std::to_string(i), score(rng),
                                 score(rng), score(rng)));
      if (l.hypotheses[i].forward_score > l.hypotheses[best].forward_score) {
        best = i;
      }
    }
    CHECK(rerank(l, RerankWeights{}).text.text ==
          l.hypotheses[best].text.text);
  }
}

TEST_CASE("argmax is invariant under additive shifts of a feature") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> score(-30.0, 0.0);
  RerankWeights w;
  w.lambda1 = 0.7;
  w.lambda2 = 1.3;
  w.length_penalty = 0.1;
  for (int trial = 0; trial < 100; ++trial) {
    NBestList l;
    for (int i = 0; i < 10; ++i) {
      l.hypotheses.push_back(
          hyp(0, "h" + std::to_string(i), score(rng), score(rng), score(rng)));
    }
    const std::string before = rerank(l, w).text.text;
    NBestList shifted = l;
    for (auto& h : shifted.hypotheses) {
      h.forward_score += 17.0;
      h.channel_score -= 4.0;
      h.lm_score += 2.5;
    }
    CHECK(rerank(shifted, w).text.text == before);
  }
}

TEST_CASE("ties go to the earlier hypothesis") {
  const NBestList l = list_of(0, {hyp(0, "first", -1.0, 0.0, 0.0),
                                  hyp(0, "second", -1.0, 0.0, 0.0)});
  CHECK(rerank(l, RerankWeights{}).text.text == "first");
}

TEST_CASE("empty n-best list is an error") {
  CHECK_THROWS_AS(rerank(NBestList{}, RerankWeights{}), std::runtime_error);
}

TEST_CASE("tuning finds weights that recover the references") {
  // Forward scores prefer the wrong hypothesis everywhere; the language
  // model score points at the reference with a margin no forward score can
  // overcome once lambda2 is positive.
  std::vector<NBestList> dev;
  std::vector<std::string> refs;
  for (int i = 0; i < 8; ++i) {
    const std::string good = "good sentence number " + std::to_string(i);
    const std::string bad = "bad output " + std::to_string(i);
    dev.push_back(list_of(i, {hyp(i, bad, -1.0, -5.0, -1000.0),
                              hyp(i, good, -20.0, -5.0, -1.0)}));
    refs.push_back(good);
  }
  const RerankWeights w =
      tune(dev, refs, TuneRanges{}, 64, 42, BleuTokenizer::k13a);
  REQUIRE(w.tuned_on.has_value());
  CHECK(w.tuned_on->dev_bleu == 100.0);
  CHECK(w.tuned_on->seed == 42);
  CHECK(w.tuned_on->n_samples == 64);
  // reranking the dev set with the tuned weights reproduces dev_bleu
  std::vector<std::string> outputs;
  for (const auto& l : dev) outputs.push_back(rerank(l, w).text.text);
  CHECK(corpus_bleu(outputs, refs, BleuTokenizer::k13a).score ==
        w.tuned_on->dev_bleu);
}

TEST_CASE("tuning is deterministic in the seed and thread count") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> score(-40.0, 0.0);
  std::vector<NBestList> dev;
  std::vector<std::string> refs;
  for (int i = 0; i < 12; ++i) {
    NBestList l;
    l.source_id = i;
    for (int k = 0; k < 6; ++k) {
      l.hypotheses.push_back(hyp(i, "cand " + std::to_string(i % 4) + " " +
                                        std::to_string(k % 3),
                                 score(rng), score(rng), score(rng)));
    }
    dev.push_back(l);
    refs.push_back("cand " + std::to_string(i % 4) + " 1");
  }
  const RerankWeights a =
      tune(dev, refs, TuneRanges{}, 50, 7, BleuTokenizer::k13a, 1);
  const RerankWeights b =
      tune(dev, refs, TuneRanges{}, 50, 7, BleuTokenizer::k13a, 4);
  CHECK(a.lambda1 == b.lambda1);
  CHECK(a.lambda2 == b.lambda2);
  CHECK(a.length_penalty == b.length_penalty);
  CHECK(a.tuned_on->dev_bleu == b.tuned_on->dev_bleu);
  const RerankWeights c =
      tune(dev, refs, TuneRanges{}, 50, 8, BleuTokenizer::k13a, 1);
  // a different seed draws different triples
  CHECK(a.lambda1 != c.lambda1);
}

TEST_CASE("tuned triples fall inside the configured ranges") {
  std::vector<NBestList> dev = {
      list_of(0, {hyp(0, "a b", -1.0, -1.0, -1.0)})};
  std::vector<std::string> refs = {"a b"};
  TuneRanges ranges;
  ranges.lambda_lo = 0.25;
  ranges.lambda_hi = 0.75;
  ranges.length_penalty_lo = 0.1;
  ranges.length_penalty_hi = 0.2;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const RerankWeights w =
        tune(dev, refs, ranges, 5, seed, BleuTokenizer::k13a);
    CHECK(w.lambda1 >= 0.25);
    CHECK(w.lambda1 < 0.75);
    CHECK(w.lambda2 >= 0.25);
    CHECK(w.lambda2 < 0.75);
    CHECK(w.length_penalty >= 0.1);
    CHECK(w.length_penalty < 0.2);
  }
}

TEST_CASE("a single tuning sample is accepted") {
  std::vector<NBestList> dev = {list_of(0, {hyp(0, "x", -1.0, 0.0, 0.0)})};
  const RerankWeights w =
      tune(dev, {"x"}, TuneRanges{}, 1, 3, BleuTokenizer::k13a);
  CHECK(w.tuned_on->n_samples == 1);
}

TEST_CASE("tuning input validation") {
  std::vector<NBestList> dev = {list_of(0, {hyp(0, "x", -1.0, 0.0, 0.0)})};
  CHECK_THROWS_WITH_AS(
      tune(dev, {"x", "y"}, TuneRanges{}, 4, 0, BleuTokenizer::k13a),
      doctest::Contains("1 vs 2"), std::runtime_error);
  CHECK_THROWS_AS(tune({}, {}, TuneRanges{}, 4, 0, BleuTokenizer::k13a),
                  std::runtime_error);
  CHECK_THROWS_AS(tune(dev, {"x"}, TuneRanges{}, 0, 0, BleuTokenizer::k13a),
                  std::runtime_error);
}

TEST_CASE("n-best TSV round-trip preserves every field") {
  std::vector<NBestList> lists;
  lists.push_back(list_of(0, {hyp(0, "erste Zeile", -1.5, -2.25, -0.125),
                              hyp(0, "zweite Zeile", -0.3333333333333333,
                                  -7.0, -2.875)}));
  lists.push_back(list_of(3, {hyp(3, "andere Quelle", -4.0, -1.0, -9.5)}));
  std::ostringstream out;
  write_nbest(lists, out);
  std::istringstream in(out.str());
  const auto back = read_nbest(in);
  REQUIRE(back.size() == 2);
  CHECK(back[0].source_id == 0);
  CHECK(back[1].source_id == 3);
  REQUIRE(back[0].hypotheses.size() == 2);
  CHECK(back[0].hypotheses[1].text.text == "zweite Zeile");
  CHECK(back[0].hypotheses[1].forward_score == -0.3333333333333333);
  CHECK(back[0].hypotheses[0].channel_score == -2.25);
  CHECK(back[1].hypotheses[0].lm_score == -9.5);
}

TEST_CASE("n-best parse errors carry line numbers") {
  {
    std::istringstream in("0\ttext\t-1\t-2\n");
    CHECK_THROWS_WITH_AS(read_nbest(in),
                         doctest::Contains("expected 5 tab-separated fields"),
                         std::runtime_error);
  }
  {
    std::istringstream in("0\ttext\t-1\t-2\tnan\n");
    CHECK_THROWS_WITH_AS(read_nbest(in), doctest::Contains("non-finite"),
                         std::runtime_error);
  }
  {
    std::istringstream in("x\ttext\t-1\t-2\t-3\n");
    CHECK_THROWS_WITH_AS(read_nbest(in),
                         doctest::Contains("non-numeric source_id"),
                         std::runtime_error);
  }
  {
    // ids must be grouped and ascending
    std::istringstream in(
        "1\ta\t-1\t-1\t-1\n"
        "0\tb\t-1\t-1\t-1\n");
    CHECK_THROWS_WITH_AS(read_nbest(in),
                         doctest::Contains("non-contiguous source_id 0"),
                         std::runtime_error);
  }
  {
    std::istringstream in("");
    CHECK_THROWS_WITH_AS(read_nbest(in), doctest::Contains("empty n-best"),
                         std::runtime_error);
  }
}

TEST_CASE("weights JSON round-trip") {
  RerankWeights w;
  w.lambda1 = 0.625;
  w.lambda2 = 1.25;
  w.length_penalty = 0.0078125;
  w.tuned_on = TuningMetadata{"dev", 37.5, 99, 1000};
  const RerankWeights back = weights_from_json(weights_to_json(w));
  CHECK(back.lambda1 == w.lambda1);
  CHECK(back.lambda2 == w.lambda2);
  CHECK(back.length_penalty == w.length_penalty);
  REQUIRE(back.tuned_on.has_value());
  CHECK(back.tuned_on->dev_bleu == 37.5);
  CHECK(back.tuned_on->seed == 99);
  CHECK(back.tuned_on->n_samples == 1000);
  // untuned weights omit the metadata
  RerankWeights plain;
  plain.lambda1 = 0.5;
  CHECK_FALSE(weights_from_json(weights_to_json(plain)).tuned_on.has_value());
}
