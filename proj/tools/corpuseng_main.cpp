// Command-line front end: every subcommand builds a stage description and
// hands it to the same runner the pipeline uses, so CLI behavior is
// identical to the library operation.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "corpuseng/pipeline.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;

struct Common {
  int threads = static_cast<int>(std::thread::hardware_concurrency());
  std::uint64_t seed = 0;
};

void add_stage_flag(CLI::App* cmd, json& stage, const std::string& flag,
                    const std::string& key, const std::string& desc,
                    bool required = false) {
  auto opt = cmd->add_option_function<std::string>(
      flag, [&stage, key](const std::string& v) { stage[key] = v; }, desc);
  if (required) opt->required();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"corpus engineering and reranking toolkit"};
  app.require_subcommand(1);

  Common common;
  app.add_option("--threads", common.threads, "worker thread cap");
  app.add_option("--seed", common.seed, "global random seed");

  std::vector<std::pair<json, bool>> stages;  // (stage json, print report)
  stages.reserve(16);
  std::string run_config;

  auto make = [&](const std::string& name, const std::string& desc) {
    CLI::App* cmd = app.add_subcommand(name, desc);
    stages.emplace_back(json{{"stage", name}}, false);
    json& stage = stages.back().first;
    bool& print = stages.back().second;
    cmd->callback([&stage, &print] { print = true; });
    return std::pair<CLI::App*, json*>(cmd, &stage);
  };

  {
    auto [cmd, stage] = make("langid-train",
                             "train a character n-gram language classifier");
    cmd->add_option_function<std::vector<std::string>>(
           "--corpus",
           [stage](const std::vector<std::string>& specs) {
             for (const auto& spec : specs) {
               const auto colon = spec.find(':');
               if (colon == std::string::npos) {
                 throw CLI::ValidationError("--corpus expects LANG:PATH");
               }
               (*stage)["corpora"][spec.substr(0, colon)] =
                   spec.substr(colon + 1);
             }
           },
           "labeled corpus as LANG:PATH (repeatable)")
        ->required()
        ->take_all();
    cmd->add_option_function<int>(
        "--order", [stage](int v) { (*stage)["order"] = v; },
        "character n-gram order (default 3)");
    add_stage_flag(cmd, *stage, "--model-out", "model_out", "model file",
                   true);
  }
  {
    auto [cmd, stage] = make("filter-bitext", "filter a parallel corpus");
    add_stage_flag(cmd, *stage, "--src", "src", "source file", true);
    add_stage_flag(cmd, *stage, "--tgt", "tgt", "target file", true);
    add_stage_flag(cmd, *stage, "--src-lang", "src_lang", "source language");
    add_stage_flag(cmd, *stage, "--tgt-lang", "tgt_lang", "target language");
    add_stage_flag(cmd, *stage, "--langid-model", "langid_model",
                   "classifier model file");
    add_stage_flag(cmd, *stage, "--out-src", "out_src", "kept source", true);
    add_stage_flag(cmd, *stage, "--out-tgt", "out_tgt", "kept target", true);
    cmd->add_option_function<int>(
        "--max-tokens", [stage](int v) { (*stage)["max_tokens"] = v; },
        "length limit (default 250)");
    cmd->add_option_function<double>(
        "--max-ratio", [stage](double v) { (*stage)["max_ratio"] = v; },
        "length ratio limit (default 1.5)");
    cmd->add_option_function<double>(
        "--min-margin", [stage](double v) { (*stage)["min_margin"] = v; },
        "minimum langid margin (default: accept argmax)");
    add_stage_flag(cmd, *stage, "--stats-out", "stats_out", "stats JSON");
  }
  {
    auto [cmd, stage] = make("filter-mono", "filter a monolingual corpus");
    add_stage_flag(cmd, *stage, "--in", "in", "input file", true);
    add_stage_flag(cmd, *stage, "--lang", "lang", "expected language", true);
    add_stage_flag(cmd, *stage, "--langid-model", "langid_model",
                   "classifier model file");
    add_stage_flag(cmd, *stage, "--out", "out", "kept sentences", true);
    cmd->add_option_function<int>(
        "--max-tokens", [stage](int v) { (*stage)["max_tokens"] = v; },
        "length limit (default 250)");
    add_stage_flag(cmd, *stage, "--stats-out", "stats_out", "stats JSON");
  }
  {
    auto [cmd, stage] = make("lm-train", "train a Kneser-Ney n-gram model");
    add_stage_flag(cmd, *stage, "--text", "text", "training corpus", true);
    add_stage_flag(cmd, *stage, "--arpa-out", "arpa_out", "model file", true);
    cmd->add_option_function<int>(
        "--order", [stage](int v) { (*stage)["order"] = v; },
        "model order (default 5)");
    cmd->add_option_function<std::uint64_t>(
        "--min-count", [stage](std::uint64_t v) { (*stage)["min_count"] = v; },
        "unigram count threshold (default 1)");
  }
  {
    auto [cmd, stage] = make("lm-score", "score sentences with an ARPA model");
    add_stage_flag(cmd, *stage, "--arpa", "arpa", "model file", true);
    add_stage_flag(cmd, *stage, "--text", "text", "corpus to score", true);
    add_stage_flag(cmd, *stage, "--out", "out", "TSV score file", true);
  }
  {
    auto [cmd, stage] = make("select", "in-domain data selection");
    add_stage_flag(cmd, *stage, "--in-lm", "in_lm", "in-domain ARPA", true);
    add_stage_flag(cmd, *stage, "--out-lm", "out_lm", "general ARPA", true);
    add_stage_flag(cmd, *stage, "--text", "text", "corpus", true);
    add_stage_flag(cmd, *stage, "--out", "out", "selected sentences", true);
    cmd->add_option_function<double>(
        "--cutoff", [stage](double v) { (*stage)["cutoff"] = v; },
        "score cutoff (default 0.01)");
    cmd->add_option_function<double>(
        "--target-fraction",
        [stage](double v) { (*stage)["target_fraction"] = v; },
        "pick the cutoff that selects this fraction");
    add_stage_flag(cmd, *stage, "--scores-out", "scores_out",
                   "score dump TSV");
    add_stage_flag(cmd, *stage, "--report", "report_out", "report JSON");
  }
  {
    auto [cmd, stage] = make("mix", "mix bitext with synthetic data");
    add_stage_flag(cmd, *stage, "--bitext-src", "bitext_src", "", true);
    add_stage_flag(cmd, *stage, "--bitext-tgt", "bitext_tgt", "", true);
    add_stage_flag(cmd, *stage, "--synth-src", "synth_src", "", true);
    add_stage_flag(cmd, *stage, "--synth-tgt", "synth_tgt", "", true);
    add_stage_flag(cmd, *stage, "--out-src", "out_src", "", true);
    add_stage_flag(cmd, *stage, "--out-tgt", "out_tgt", "", true);
    add_stage_flag(cmd, *stage, "--ratio", "ratio",
                   "synthetic:bitext ratio (default 1:1)");
    cmd->add_option_function<std::uint64_t>(
        "--seed", [stage](std::uint64_t v) { (*stage)["seed"] = v; },
        "shuffle seed");
    cmd->add_flag_function(
        "--mark-synthetic",
        [stage](std::int64_t) { (*stage)["marks_out"] = "mix.marks"; },
        "write per-line S/B origin marks to mix.marks");
    add_stage_flag(cmd, *stage, "--marks-out", "marks_out",
                   "origin marks file");
    add_stage_flag(cmd, *stage, "--report", "report_out", "report JSON");
  }
  {
    auto [cmd, stage] = make("tune", "random-search reranking weights");
    add_stage_flag(cmd, *stage, "--nbest", "nbest", "n-best TSV", true);
    add_stage_flag(cmd, *stage, "--refs", "refs", "references", true);
    add_stage_flag(cmd, *stage, "--weights-out", "weights_out",
                   "weights JSON", true);
    cmd->add_option_function<std::uint64_t>(
        "--samples", [stage](std::uint64_t v) { (*stage)["samples"] = v; },
        "number of random triples (default 1000)");
    cmd->add_option_function<std::uint64_t>(
        "--seed", [stage](std::uint64_t v) { (*stage)["seed"] = v; },
        "search seed");
    add_stage_flag(cmd, *stage, "--tok", "tok", "BLEU tokenizer (13a|intl)");
  }
  {
    auto [cmd, stage] = make("rerank", "pick best hypotheses from n-best lists");
    add_stage_flag(cmd, *stage, "--nbest", "nbest", "n-best TSV", true);
    add_stage_flag(cmd, *stage, "--weights", "weights", "weights JSON", true);
    add_stage_flag(cmd, *stage, "--out", "out", "selected hypotheses", true);
  }
  {
    auto [cmd, stage] = make("bleu", "corpus BLEU");
    add_stage_flag(cmd, *stage, "--hyp", "hyp", "hypothesis file", true);
    add_stage_flag(cmd, *stage, "--ref", "ref", "reference file", true);
    add_stage_flag(cmd, *stage, "--tok", "tok", "tokenizer (13a|intl)");
    add_stage_flag(cmd, *stage, "--json-out", "json_out", "score JSON");
  }
  {
    auto [cmd, stage] = make("postprocess", "quote conversion");
    add_stage_flag(cmd, *stage, "--in", "in", "input file", true);
    add_stage_flag(cmd, *stage, "--out", "out", "output file", true);
    cmd->add_option_function<std::string>(
        "--quotes",
        [](const std::string& v) {
          if (v != "german") {
            throw CLI::ValidationError("--quotes supports only 'german'");
          }
        },
        "quote style (german)");
  }

  CLI::App* run_cmd = app.add_subcommand("run", "run a pipeline config");
  run_cmd->add_option("--config", run_config, "pipeline config JSON")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (run_cmd->parsed()) {
      corpuseng::run_pipeline(run_config);
      return 0;
    }
    for (auto& [stage, active] : stages) {
      if (!active) continue;
      const std::string report = corpuseng::run_stage(
          stage.dump(), common.threads, common.seed);
      const json rj = json::parse(report);
      // Optional side outputs that belong to the CLI, not the stage.
      if (stage.contains("stats_out")) {
        std::ofstream out(stage.at("stats_out").get<std::string>());
        out << rj.at("filter_stats").dump(2) << '\n';
      }
      if (stage.contains("report_out")) {
        std::ofstream out(stage.at("report_out").get<std::string>());
        if (rj.contains("selection")) out << rj.at("selection").dump(2) << '\n';
        else if (rj.contains("mix")) out << rj.at("mix").dump(2) << '\n';
        else out << rj.dump(2) << '\n';
      }
      if (rj.contains("bleu")) {
        std::printf("BLEU = %.1f  %s\n",
                    rj.at("bleu").at("score").get<double>(),
                    rj.at("bleu").at("signature").get<std::string>().c_str());
      } else {
        std::cout << report << '\n';
      }
    }
    return 0;
  } catch (const corpuseng::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
