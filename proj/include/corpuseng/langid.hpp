#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "corpuseng/corpus_io.hpp"

namespace corpuseng {

// Character n-gram naive Bayes language classifier. Counts character
// n-grams of orders 1..order over sentence text (code points, spaces
// included) with add-one smoothing over the closed event space of all
// n-grams observed across the training languages.
struct LangIdModel {
  struct Language {
    std::string code;
    double log_prior = 0.0;
    // per order (index k-1): observed-ngram log probabilities
    std::vector<std::unordered_map<std::string, double>> log_probs;
    // per order: log probability of an n-gram unseen for this language
    std::vector<double> default_log_prob;
  };

  int order = 3;
  std::vector<Language> languages;

  const Language* find(const std::string& code) const;
};

struct LangIdResult {
  std::string language;
  double margin;  // best log-posterior minus second best
};

// Throws on fewer than two languages or an empty corpus for any language.
LangIdModel langid_train(
    const std::map<std::string, std::vector<Sentence>>& labeled_corpora,
    int order = 3);

// Throws on an empty sentence.
LangIdResult langid_classify(const LangIdModel& model, const Sentence& s);

void langid_save(const LangIdModel& model, const std::string& path);
LangIdModel langid_load(const std::string& path);

}  // namespace corpuseng
