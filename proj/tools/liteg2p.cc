// Copyright (c) 2026 The liteg2p Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// liteg2p command-line tool: train, predict, eval, bench, export-mask.
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "liteg2p/checkpoint.h"
#include "liteg2p/eval.h"
#include "liteg2p/expert_dict.h"
#include "liteg2p/lexicon.h"
#include "liteg2p/model.h"
#include "liteg2p/training.h"

namespace {

using namespace liteg2p;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct SplitArgs {
  int subset = 0;
  int test_size = 12000;
  int dev_size = 2670;
  uint64_t seed = 42;
};

struct TrainArgs {
  std::string cmu;
  std::string dict;
  std::string size = "small";
  std::string vocab = "stressed";
  std::string out;
  std::string resume;
  std::string skip_log;
  SplitArgs split;
  TrainConfig config;
  double grad_clip = 0.0;
  bool no_epoch_ckpts = false;
};

struct PredictArgs {
  std::string model;
  std::string dict;
  std::string word;
};

struct EvalArgs {
  std::string model;
  std::string cmu;
  std::string dict;
  std::string part = "test";
  std::string errors;
  std::string summary;
  std::optional<int> subset;
  std::optional<int> test_size;
  std::optional<int> dev_size;
  std::optional<uint64_t> split_seed;
  int threads = 1;
};

struct BenchArgs {
  std::string model;
  std::string cmu;
  std::string out;
  int n = 100;
  uint64_t seed = 0;
  int threads = 1;
};

struct MaskArgs {
  std::string dict;
  std::string vocab = "stressed";
  std::string out;
};

std::string Lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<LexiconEntry> LoadPrimary(const std::string& path) {
  CmuParseResult parsed = ParseCmuFile(path);
  for (const ParseError& e : parsed.errors) {
    std::cerr << "warning: " << path << ":" << e.line() << ": " << e.what() << "\n";
  }
  return FilterPrimary(std::move(parsed.entries));
}

ExpertDictionary LoadDict(const std::string& path) {
  return ExpertDictionary::LoadFile(path.empty() ? DefaultDictionaryPath() : path);
}

nlohmann::json SplitJson(const SplitArgs& s) {
  return {{"subset", s.subset},
          {"test_size", s.test_size},
          {"dev_size", s.dev_size},
          {"seed", s.seed}};
}

template <typename T>
int RunTrain(const TrainArgs& args) {
  const ExpertDictionary dict = LoadDict(args.dict);
  const ModelConfig model_config =
      ModelConfig::ForSize(ParseModelSize(args.size), ParseVocabMode(args.vocab));
  TrainConfig config = args.config;
  if (args.grad_clip > 0.0) config.grad_clip = args.grad_clip;
  config.keep_epoch_checkpoints = !args.no_epoch_ckpts;
  config.Validate();

  const std::vector<LexiconEntry> entries =
      SampleEntries(LoadPrimary(args.cmu), args.split.subset, args.split.seed);
  const DataSplit split =
      MakeSplit(entries, args.split.test_size, args.split.dev_size, args.split.seed);
  std::cerr << "entries " << entries.size() << ": train " << split.train.size() << ", dev "
            << split.dev.size() << ", test " << split.test.size() << "\n";
  std::cerr << "model " << args.size << " (" << ParamCount(model_config) << " parameters), "
            << VocabModeName(model_config.vocab_mode) << " vocabulary\n";

  std::ofstream skip_log;
  if (!args.skip_log.empty()) skip_log.open(args.skip_log);
  TrainOptions options;
  if (!args.resume.empty()) options.resume_from = args.resume;
  options.extra_metadata["split"] = SplitJson(args.split);
  options.on_epoch = [](const EpochMetrics& m) {
    std::cerr << "epoch " << m.epoch << " lr " << m.lr << " loss " << m.train_loss
              << " dev_wer " << m.dev_wer << " dev_wer_s " << m.dev_wer_s << " skipped "
              << m.skipped << " (" << m.seconds << " s)\n";
  };
  options.on_skip = [&](const std::string& line) {
    if (skip_log.is_open()) skip_log << line << "\n";
  };
  const TrainResult result =
      Train<T>(split, dict, model_config, config, args.out, options);
  if (result.prechecked_skips > 0) {
    std::cerr << result.prechecked_skips << " training entries skipped (unreachable under the mask)\n";
  }
  const EpochMetrics& last = result.history.back();
  std::cout << nlohmann::json{{"epoch", last.epoch},
                              {"dev_wer", last.dev_wer},
                              {"dev_wer_s", last.dev_wer_s},
                              {"dev_wer_ss", last.dev_wer_ss},
                              {"best_epoch", result.best_epoch},
                              {"best_dev_wer", result.best_dev_wer}}
                   .dump()
            << "\n";
  return kExitOk;
}

template <typename T>
G2pEngine<T> LoadWithDict(const std::string& model, const std::string& dict_path) {
  G2pEngine<T> engine = LoadEngine<T>(model);
  if (!dict_path.empty()) {
    if (!ReplaceDictionary(&engine, ExpertDictionary::LoadFile(dict_path))) {
      std::cerr << "warning: " << dict_path
                << " differs from the dictionary the model was trained with\n";
    }
  }
  return engine;
}

template <typename T>
int RunPredict(const PredictArgs& args) {
  G2pEngine<T> engine = LoadWithDict<T>(args.model, args.dict);
  auto emit = [&](const std::string& raw) {
    const std::string word = Lower(Trim(raw));
    if (word.empty()) return;
    if (!IsValidSpelling(word)) {
      std::cerr << "error: '" << word << "' contains characters outside a-z, ' and -\n";
      return;
    }
    std::cout << word << "\t" << JoinPronunciation(engine.Predict(word)) << "\n";
  };
  if (!args.word.empty()) {
    emit(args.word);
    return kExitOk;
  }
  std::string line;
  while (std::getline(std::cin, line)) emit(line);
  return kExitOk;
}

template <typename T>
int RunEval(const EvalArgs& args) {
  const CheckpointFile file = ReadCheckpointFile(args.model);
  G2pEngine<T> engine = EngineFromCheckpoint<T>(file);
  if (!args.dict.empty() && !ReplaceDictionary(&engine, ExpertDictionary::LoadFile(args.dict))) {
    std::cerr << "warning: " << args.dict
              << " differs from the dictionary the model was trained with\n";
  }
  SplitArgs split_args;
  split_args.seed = file.metadata.value("split_seed", uint64_t{0});
  if (file.metadata.contains("split")) {
    const nlohmann::json& s = file.metadata["split"];
    split_args.subset = s.value("subset", 0);
    split_args.test_size = s.value("test_size", split_args.test_size);
    split_args.dev_size = s.value("dev_size", split_args.dev_size);
  }
  if (args.subset) split_args.subset = *args.subset;
  if (args.test_size) split_args.test_size = *args.test_size;
  if (args.dev_size) split_args.dev_size = *args.dev_size;
  if (args.split_seed) split_args.seed = *args.split_seed;

  const std::vector<LexiconEntry> entries =
      SampleEntries(LoadPrimary(args.cmu), split_args.subset, split_args.seed);
  const DataSplit split =
      MakeSplit(entries, split_args.test_size, split_args.dev_size, split_args.seed);
  const std::vector<LexiconEntry>& part = args.part == "dev" ? split.dev : split.test;
  if (part.empty()) throw ConfigError("the " + args.part + " split is empty");
  const EvalReport report = EvaluateEntries(engine, part, args.threads);

  std::string errors = args.errors;
  if (errors.empty()) {
    errors = (std::filesystem::path(args.model).parent_path() / ("errors_" + args.part + ".tsv"))
                 .string();
  }
  WriteErrorTsv(errors, report);
  nlohmann::json summary = SummaryJson(report);
  summary["part"] = args.part;
  summary["errors_tsv"] = errors;
  if (!args.summary.empty()) {
    std::ofstream out(args.summary);
    out << summary.dump(2) << "\n";
    if (!out) throw Error("cannot write " + args.summary);
  }
  std::cout << summary.dump() << "\n";
  return kExitOk;
}

template <typename T>
int RunBench(const BenchArgs& args) {
  const G2pEngine<T> engine = LoadEngine<T>(args.model);
  const std::vector<std::string> words = SampleWords(LoadPrimary(args.cmu), args.n, args.seed);
  const BenchResult r = Bench(engine, words, args.threads);
  nlohmann::json j = r.ToJson();
  j["seed"] = args.seed;
  j["model"] = ModelSizeName(engine.model.config().size);
  if (!args.out.empty()) {
    std::ofstream out(args.out);
    out << j.dump(2) << "\n";
    if (!out) throw Error("cannot write " + args.out);
  }
  std::cout << j.dump() << "\n";
  return kExitOk;
}

int RunExportMask(const MaskArgs& args) {
  const ExpertDictionary dict = LoadDict(args.dict);
  const PhonemeVocabulary vocab = PhonemeVocabulary::Make(ParseVocabMode(args.vocab));
  const std::string csv = MaskToCsv(BuildMask(dict, vocab), vocab);
  if (args.out.empty()) {
    std::cout << csv;
  } else {
    std::ofstream out(args.out);
    out << csv;
    if (!out) throw Error("cannot write " + args.out);
  }
  return kExitOk;
}

template <typename Fn>
int WithPrecision(Fn fn) {
  return PrecisionFromEnv() == Precision::kFloat64 ? fn(double{}) : fn(float{});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"liteg2p: CTC grapheme-to-phoneme conversion with an expert mask"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train a model on the CMU dictionary");
  train_cmd->add_option("--cmu", train.cmu, "CMU dictionary file")
      ->required()
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--dict", train.dict, "Expert dictionary TSV (default: bundled)")
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--size", train.size, "small|medium|large")
      ->check(CLI::IsMember({"small", "medium", "large"}));
  train_cmd->add_option("--vocab", train.vocab, "base|stressed")
      ->check(CLI::IsMember({"base", "stressed"}));
  train_cmd->add_option("--seed", train.config.seed, "Seed for init, shuffling and dropout");
  train_cmd->add_option("--split-seed", train.split.seed, "Seed for subset and split");
  train_cmd->add_option("--out", train.out, "Output directory")->required();
  train_cmd->add_option("--epochs", train.config.epochs);
  train_cmd->add_option("--batch-size", train.config.batch_size);
  train_cmd->add_option("--lr0", train.config.lr0);
  train_cmd->add_option("--lr-decay", train.config.lr_decay);
  train_cmd->add_option("--decay-every", train.config.decay_every);
  train_cmd->add_option("--beta1", train.config.beta1);
  train_cmd->add_option("--beta2", train.config.beta2);
  train_cmd->add_option("--adam-eps", train.config.adam_eps);
  train_cmd->add_option("--grad-clip", train.grad_clip, "Max global gradient norm (0 = off)");
  train_cmd->add_option("--eval-threads", train.config.eval_threads);
  train_cmd->add_option("--subset", train.split.subset, "Use a seeded subset of N entries");
  train_cmd->add_option("--test-size", train.split.test_size);
  train_cmd->add_option("--dev-size", train.split.dev_size);
  train_cmd->add_option("--resume", train.resume, "Continue from a training checkpoint")
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--skip-log", train.skip_log, "Write skipped entries here");
  train_cmd->add_flag("--no-epoch-checkpoints", train.no_epoch_ckpts);

  PredictArgs predict;
  auto* predict_cmd = app.add_subcommand("predict", "Print pronunciations");
  predict_cmd->add_option("--model", predict.model, "Checkpoint")->required();
  predict_cmd->add_option("--dict", predict.dict, "Override the expert dictionary")
      ->check(CLI::ExistingFile);
  predict_cmd->add_option("--word", predict.word, "Single word (default: read stdin)");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score a checkpoint on a split");
  eval_cmd->add_option("--model", eval.model, "Checkpoint")->required();
  eval_cmd->add_option("--cmu", eval.cmu, "CMU dictionary file")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--dict", eval.dict, "Override the expert dictionary")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--part", eval.part, "test|dev")->check(CLI::IsMember({"test", "dev"}));
  eval_cmd->add_option("--errors", eval.errors, "Per-word TSV path");
  eval_cmd->add_option("--summary", eval.summary, "JSON summary path");
  eval_cmd->add_option("--subset", eval.subset);
  eval_cmd->add_option("--test-size", eval.test_size);
  eval_cmd->add_option("--dev-size", eval.dev_size);
  eval_cmd->add_option("--split-seed", eval.split_seed);
  eval_cmd->add_option("--threads", eval.threads)->check(CLI::PositiveNumber);

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Per-word latency at batch size 1");
  bench_cmd->add_option("--model", bench.model, "Checkpoint")->required();
  bench_cmd->add_option("--cmu", bench.cmu, "CMU dictionary file")
      ->required()
      ->check(CLI::ExistingFile);
  bench_cmd->add_option("--n", bench.n, "Words to time")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", bench.seed, "Sample seed");
  bench_cmd->add_option("--threads", bench.threads)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--out", bench.out, "Also write the JSON report here");

  MaskArgs mask;
  auto* mask_cmd = app.add_subcommand("export-mask", "Write the mask matrix as CSV");
  mask_cmd->add_option("--dict", mask.dict, "Expert dictionary TSV (default: bundled)")
      ->check(CLI::ExistingFile);
  mask_cmd->add_option("--vocab", mask.vocab, "base|stressed")
      ->check(CLI::IsMember({"base", "stressed"}));
  mask_cmd->add_option("--out", mask.out, "CSV path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*train_cmd) {
      return WithPrecision([&](auto t) { return RunTrain<decltype(t)>(train); });
    }
    if (*predict_cmd) {
      return WithPrecision([&](auto t) { return RunPredict<decltype(t)>(predict); });
    }
    if (*eval_cmd) {
      return WithPrecision([&](auto t) { return RunEval<decltype(t)>(eval); });
    }
    if (*bench_cmd) {
      return WithPrecision([&](auto t) { return RunBench<decltype(t)>(bench); });
    }
    return RunExportMask(mask);
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}
