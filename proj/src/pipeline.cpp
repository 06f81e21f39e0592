#include "corpuseng/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "corpuseng/bleu.hpp"
#include "corpuseng/corpus_io.hpp"
#include "corpuseng/domain_select.hpp"
#include "corpuseng/filter.hpp"
#include "corpuseng/langid.hpp"
#include "corpuseng/mixer.hpp"
#include "corpuseng/ngram_lm.hpp"
#include "corpuseng/postprocess.hpp"
#include "corpuseng/rerank.hpp"
#include "corpuseng/util.hpp"
#include "json.hpp"

namespace corpuseng {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

BleuTokenizer parse_tokenizer(const std::string& name) {
  if (name == "13a") return BleuTokenizer::k13a;
  if (name == "intl") return BleuTokenizer::kIntl;
  throw ValidationError("unknown tokenizer '" + name + "' (use 13a or intl)");
}

std::pair<std::uint32_t, std::uint32_t> parse_ratio(const std::string& text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string::npos) {
    throw ValidationError("ratio must look like '1:1', got '" + text + "'");
  }
  const int a = std::stoi(text.substr(0, colon));
  const int b = std::stoi(text.substr(colon + 1));
  if (a < 1 || b < 1) throw ValidationError("ratio components must be >= 1");
  return {static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
}

std::string require_string(const json& stage, const std::string& key) {
  if (!stage.contains(key)) {
    throw ValidationError("stage '" + stage.value("stage", std::string()) +
                          "' is missing required parameter '" + key + "'");
  }
  return stage.at(key).get<std::string>();
}

// Input paths a stage reads; used for pre-run validation and the manifest.
std::vector<std::string> stage_inputs(const json& stage) {
  static const std::map<std::string, std::vector<std::string>> keys = {
      {"langid-train", {}},  // corpora handled separately
      {"filter-bitext", {"src", "tgt", "langid_model"}},
      {"filter-mono", {"in", "langid_model"}},
      {"lm-train", {"text"}},
      {"lm-score", {"arpa", "text"}},
      {"select", {"in_lm", "out_lm", "text"}},
      {"mix", {"bitext_src", "bitext_tgt", "synth_src", "synth_tgt"}},
      {"tune", {"nbest", "refs"}},
      {"rerank", {"nbest", "weights"}},
      {"bleu", {"hyp", "ref"}},
      {"postprocess", {"in"}},
  };
  const std::string name = stage.value("stage", std::string());
  auto it = keys.find(name);
  if (it == keys.end()) throw ValidationError("unknown stage '" + name + "'");
  std::vector<std::string> inputs;
  for (const std::string& key : it->second) {
    if (stage.contains(key)) inputs.push_back(stage.at(key).get<std::string>());
  }
  if (name == "langid-train") {
    for (const auto& [lang, path] : stage.at("corpora").items()) {
      inputs.push_back(path.get<std::string>());
    }
  }
  return inputs;
}

std::vector<std::string> stage_outputs(const json& stage) {
  static const std::map<std::string, std::vector<std::string>> keys = {
      {"langid-train", {"model_out"}},
      {"filter-bitext", {"out_src", "out_tgt"}},
      {"filter-mono", {"out"}},
      {"lm-train", {"arpa_out"}},
      {"lm-score", {"out"}},
      {"select", {"out", "scores_out"}},
      {"mix", {"out_src", "out_tgt"}},
      {"tune", {"weights_out"}},
      {"rerank", {"out"}},
      {"bleu", {"json_out"}},
      {"postprocess", {"out"}},
  };
  std::vector<std::string> outputs;
  for (const std::string& key : keys.at(stage.value("stage", std::string()))) {
    if (stage.contains(key)) outputs.push_back(stage.at(key).get<std::string>());
  }
  return outputs;
}

json run_stage_impl(const json& stage, int threads,
                    std::uint64_t default_seed) {
  const std::string name = stage.value("stage", std::string());
  json report;
  report["stage"] = name;
  report["schema_version"] = 1;

  if (name == "langid-train") {
    std::map<std::string, std::vector<Sentence>> corpora;
    for (const auto& [lang, path] : stage.at("corpora").items()) {
      corpora[lang] = read_mono(path.get<std::string>());
    }
    const LangIdModel model =
        langid_train(corpora, stage.value("order", 3));
    langid_save(model, require_string(stage, "model_out"));
    report["languages"] = json::array();
    for (const auto& lang : model.languages) {
      report["languages"].push_back(lang.code);
    }
  } else if (name == "filter-bitext" || name == "filter-mono") {
    FilterConfig cfg;
    cfg.max_tokens = stage.value("max_tokens", 250);
    cfg.max_ratio = stage.value("max_ratio", 1.5);
    cfg.min_margin = stage.value("min_margin", 0.0);
    cfg.langid_enabled = stage.value("langid", true) &&
                         stage.contains("langid_model");
    LangIdModel model;
    if (cfg.langid_enabled) {
      model = langid_load(require_string(stage, "langid_model"));
    }
    FilterStats stats;
    if (name == "filter-bitext") {
      cfg.expected_source_lang = stage.value("src_lang", std::string());
      cfg.expected_target_lang = stage.value("tgt_lang", std::string());
      auto pairs = read_parallel(require_string(stage, "src"),
                                 require_string(stage, "tgt"));
      auto result = filter_bitext(std::move(pairs), cfg,
                                  cfg.langid_enabled ? &model : nullptr,
                                  threads);
      write_parallel(result.kept, require_string(stage, "out_src"),
                     require_string(stage, "out_tgt"));
      stats = result.stats;
    } else {
      auto sentences = read_mono(require_string(stage, "in"));
      auto result = filter_mono(std::move(sentences),
                                require_string(stage, "lang"), cfg,
                                cfg.langid_enabled ? &model : nullptr,
                                threads);
      write_mono(result.kept, require_string(stage, "out"));
      stats = result.stats;
    }
    report["filter_stats"] = json::parse(stats.to_json());
  } else if (name == "lm-train") {
    const auto corpus = read_mono(require_string(stage, "text"));
    const NGramCounts counts =
        count_ngrams(corpus, stage.value("order", 5),
                     stage.value("min_count", std::uint64_t{1}));
    const NGramModel model = estimate_kn(counts);
    export_arpa(model, require_string(stage, "arpa_out"));
    report["order"] = model.order;
    report["vocab_size"] = model.vocab.size();
  } else if (name == "lm-score") {
    const NGramModel model = import_arpa(require_string(stage, "arpa"));
    const auto corpus = read_mono(require_string(stage, "text"));
    std::ofstream out(require_string(stage, "out"));
    out.precision(17);
    double total = 0.0;
    std::uint64_t tokens = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const SentenceScore s = sentence_logprob(model, corpus[i]);
      out << i << '\t' << s.total_log_prob << '\t' << s.scored_token_count
          << '\t' << s.cross_entropy << '\n';
      total += s.total_log_prob;
      tokens += s.scored_token_count;
    }
    report["sentences"] = corpus.size();
    report["perplexity"] =
        std::exp(-total / static_cast<double>(tokens));
  } else if (name == "select") {
    const NGramModel lm_in = import_arpa(require_string(stage, "in_lm"));
    const NGramModel lm_out = import_arpa(require_string(stage, "out_lm"));
    SelectionConfig cfg;
    cfg.lm_in = &lm_in;
    cfg.lm_out = &lm_out;
    cfg.cutoff = stage.value("cutoff", 0.01);
    const auto corpus = read_mono(require_string(stage, "text"));
    SelectionResult result =
        stage.contains("target_fraction")
            ? select_target_fraction(corpus, cfg,
                                     stage.at("target_fraction").get<double>(),
                                     threads)
            : select(corpus, cfg, threads);
    write_mono(result.selected, require_string(stage, "out"));
    if (stage.contains("scores_out")) {
      std::ofstream scores(stage.at("scores_out").get<std::string>());
      score_dump(corpus, cfg, scores, threads);
    }
    report["selection"] = json::parse(result.report.to_json());
  } else if (name == "mix") {
    MixConfig cfg;
    std::tie(cfg.ratio_synthetic, cfg.ratio_bitext) =
        parse_ratio(stage.value("ratio", std::string("1:1")));
    cfg.seed = stage.value("seed", default_seed);
    cfg.shuffle = stage.value("shuffle", true);
    const auto bitext = read_parallel(require_string(stage, "bitext_src"),
                                      require_string(stage, "bitext_tgt"));
    const auto synth = read_parallel(require_string(stage, "synth_src"),
                                     require_string(stage, "synth_tgt"));
    const MixResult result = mix(bitext, synth, cfg);
    ParallelWriter writer(require_string(stage, "out_src"),
                          require_string(stage, "out_tgt"));
    std::ofstream marks;
    if (stage.contains("marks_out")) {
      marks.open(stage.at("marks_out").get<std::string>());
    }
    for (const MixedPair& p : result.pairs) {
      writer.write(p.pair);
      if (marks.is_open()) marks << (p.synthetic ? "S" : "B") << '\n';
    }
    writer.close();
    report["mix"] = json::parse(result.report.to_json());
  } else if (name == "tune") {
    const auto lists = read_nbest(require_string(stage, "nbest"));
    const auto ref_sentences = read_mono(require_string(stage, "refs"));
    std::vector<std::string> refs;
    for (const Sentence& s : ref_sentences) refs.push_back(s.text);
    TuneRanges ranges;
    ranges.lambda_hi = stage.value("lambda_max", 2.0);
    ranges.length_penalty_hi = stage.value("length_penalty_max", 1.0);
    RerankWeights w = tune(lists, refs, ranges,
                           stage.value("samples", std::uint64_t{1000}),
                           stage.value("seed", default_seed),
                           parse_tokenizer(stage.value("tok", std::string("13a"))),
                           threads);
    if (w.tuned_on) w.tuned_on->dataset = require_string(stage, "nbest");
    std::ofstream out(require_string(stage, "weights_out"));
    out << weights_to_json(w) << '\n';
    report["weights"] = json::parse(weights_to_json(w));
  } else if (name == "rerank") {
    const auto lists = read_nbest(require_string(stage, "nbest"));
    std::ifstream win(require_string(stage, "weights"));
    std::stringstream wbuf;
    wbuf << win.rdbuf();
    const RerankWeights w = weights_from_json(wbuf.str());
    std::ofstream out(require_string(stage, "out"));
    for (const NBestList& list : lists) {
      out << rerank(list, w).text.text << '\n';
    }
    report["lists"] = lists.size();
  } else if (name == "bleu") {
    const auto hyp_sentences = read_mono(require_string(stage, "hyp"));
    const auto ref_sentences = read_mono(require_string(stage, "ref"));
    std::vector<std::string> hyps, refs;
    for (const Sentence& s : hyp_sentences) hyps.push_back(s.text);
    for (const Sentence& s : ref_sentences) refs.push_back(s.text);
    const BleuTokenizer tok =
        parse_tokenizer(stage.value("tok", std::string("13a")));
    const BleuScore score = corpus_bleu(hyps, refs, tok);
    json j;
    j["score"] = score.score;
    j["precisions"] = score.precisions;
    j["brevity_penalty"] = score.brevity_penalty;
    j["hyp_length"] = score.hyp_length;
    j["ref_length"] = score.ref_length;
    j["signature"] = bleu_signature(tok);
    if (stage.contains("json_out")) {
      std::ofstream out(stage.at("json_out").get<std::string>());
      out << j.dump(2) << '\n';
    }
    report["bleu"] = j;
  } else if (name == "postprocess") {
    std::ifstream in(require_string(stage, "in"));
    if (!in) throw std::runtime_error("cannot open " + require_string(stage, "in"));
    std::ofstream out(require_string(stage, "out"));
    std::string line;
    std::uint64_t unpaired = 0, lines = 0;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const QuoteResult q = convert_quotes_german(line);
      out << q.text << '\n';
      unpaired += q.unpaired;
      ++lines;
    }
    report["lines"] = lines;
    report["unpaired_quotes"] = unpaired;
  } else {
    throw ValidationError("unknown stage '" + name + "'");
  }
  return report;
}

}  // namespace

std::string run_stage(const std::string& stage_json, int threads,
                      std::uint64_t default_seed) {
  return run_stage_impl(json::parse(stage_json), threads, default_seed)
      .dump(2);
}

void run_pipeline(const std::string& config_path) {
  std::ifstream in(config_path);
  if (!in) throw ValidationError("cannot open config " + config_path);
  json config;
  try {
    in >> config;
  } catch (const json::exception& e) {
    throw ValidationError("config parse error: " + std::string(e.what()));
  }

  const int threads = config.value("threads", 1);
  const std::uint64_t seed = config.value("seed", std::uint64_t{0});
  const std::string report_dir = config.value("report_dir", std::string("reports"));
  if (!config.contains("stages") || !config.at("stages").is_array()) {
    throw ValidationError("config has no stages array");
  }

  // Validate everything up front: stage names, required inputs. Outputs of
  // earlier stages count as available.
  std::vector<std::string> problems;
  std::set<std::string> produced;
  for (const auto& stage : config.at("stages")) {
    try {
      for (const std::string& input : stage_inputs(stage)) {
        if (!produced.contains(input) && !fs::exists(input)) {
          problems.push_back("missing input file: " + input);
        }
      }
      for (const std::string& output : stage_outputs(stage)) {
        produced.insert(output);
      }
    } catch (const std::exception& e) {
      problems.push_back(e.what());
    }
  }
  if (!problems.empty()) {
    std::string msg = "config validation failed:";
    for (const std::string& p : problems) msg += "\n  " + p;
    throw ValidationError(msg);
  }

  fs::create_directories(report_dir);
  json manifest;
  manifest["config"] = config_path;
  manifest["stages"] = json::array();

  int index = 0;
  for (const auto& stage : config.at("stages")) {
    const std::string name = stage.value("stage", std::string());
    json entry;
    entry["stage"] = name;
    const auto started = std::chrono::system_clock::now();
    json report;
    try {
      report = json::parse(
          run_stage(stage.dump(), stage.value("threads", threads), seed));
    } catch (const std::exception& e) {
      throw std::runtime_error("stage " + std::to_string(index) + " (" +
                               name + ") failed: " + e.what());
    }
    entry["seconds"] =
        std::chrono::duration<double>(std::chrono::system_clock::now() -
                                      started)
            .count();
    for (const std::string& input : stage_inputs(stage)) {
      entry["inputs"][input] = fnv1a_file_digest(input);
    }
    for (const std::string& output : stage_outputs(stage)) {
      if (fs::exists(output)) {
        entry["outputs"][output] = fnv1a_file_digest(output);
      }
    }
    manifest["stages"].push_back(entry);

    char report_name[64];
    std::snprintf(report_name, sizeof(report_name), "%02d_%s.json", index,
                  name.c_str());
    std::ofstream rout(fs::path(report_dir) / report_name);
    rout << report.dump(2) << '\n';
    ++index;
  }

  std::ofstream mout(fs::path(report_dir) / "manifest.json");
  mout << manifest.dump(2) << '\n';
}

}  // namespace corpuseng
