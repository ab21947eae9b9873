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

// Acceptance checks 1-10. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. Criterion 7 needs a finished full run and
// reads it from $LITEG2P_FULL_RUN (a train output directory); without it the
// criterion is reported as SKIP.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "gradient_suite.h"
#include "liteg2p/checkpoint.h"
#include "liteg2p/ctc.h"
#include "liteg2p/eval.h"
#include "liteg2p/training.h"
#include "test_util.h"

namespace liteg2p {
namespace {

constexpr double kCtcTolerance = 1e-9;
constexpr int kCtcDraws = 1000;
constexpr int kGradientTrials = 50;
constexpr double kMaskedMass = 1e-6;
constexpr int kMaskWords = 500;
constexpr double kParamTolerance = 0.20;
constexpr int kSyntheticWords = 200;
constexpr int kSyntheticEpochs = 30;
constexpr int kSmokeSubset = 2400;
constexpr int kSmokeSplit = 200;
constexpr int kSmokeEpochs = 15;
constexpr uint64_t kSplitSeed = 42;
constexpr double kSmokeWer = 70.0;
constexpr double kSmokeGain = 10.0;
constexpr double kFullWer = 28.0;
constexpr double kFullWerS = 38.0;
constexpr double kFullWerSs = 39.0;
constexpr int kBenchWords = 100;
constexpr double kMediumMs = 10.0;
constexpr double kSmallMs = 6.0;
constexpr int kRoundTripInputs = 100;

int failures = 0;

void Report(int id, const std::string& name, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::printf("%s %d %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
}

void Skip(int id, const std::string& name, const std::string& detail) {
  std::printf("SKIP %d %s: %s\n", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
}

template <typename... Args>
std::string Format(const char* fmt, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

// Runs `check`, turning an escaped exception into a FAIL line.
void Guard(int id, const std::string& name, const std::function<void()>& check) {
  const auto start = std::chrono::steady_clock::now();
  try {
    check();
  } catch (const std::exception& e) {
    Report(id, name, false, std::string("exception: ") + e.what());
  }
  const double s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::fprintf(stderr, "criterion %d took %.1f s\n", id, s);
}

const ExpertDictionary& Dict() {
  static const ExpertDictionary d = ExpertDictionary::LoadFile(DefaultDictionaryPath());
  return d;
}

const std::vector<LexiconEntry>& CmuPrimary() {
  static const std::vector<LexiconEntry> entries =
      FilterPrimary(ParseCmuFile(std::string(LITEG2P_TEST_DATA_DIR) + "/cmudict.dict").entries);
  return entries;
}

std::string RandomWord(Rng& rng, int max_len) {
  std::string w;
  const int len = 1 + static_cast<int>(UniformIndex(rng, max_len));
  for (int i = 0; i < len; ++i) w.push_back(GraphemeChar(static_cast<int>(UniformIndex(rng, kNumGraphemes))));
  return w;
}

std::string ReadBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::vector<nlohmann::json> MetricsWithoutTimes(const std::string& path) {
  std::ifstream in(path);
  std::vector<nlohmann::json> out;
  std::string line;
  while (std::getline(in, line)) {
    nlohmann::json j = nlohmann::json::parse(line);
    j.erase("seconds");
    out.push_back(std::move(j));
  }
  return out;
}

void AllTargets(int vocab, int max_len, std::vector<int>* prefix,
                std::vector<std::vector<int>>* out) {
  out->push_back(*prefix);
  if (static_cast<int>(prefix->size()) == max_len) return;
  for (int v = 1; v < vocab; ++v) {
    prefix->push_back(v);
    AllTargets(vocab, max_len, prefix, out);
    prefix->pop_back();
  }
}

void CtcOracle() {
  Rng rng(1);
  double worst = 0.0;
  int64_t comparisons = 0;
  for (int frames = 1; frames <= 5; ++frames) {
    for (int vocab = 2; vocab <= 3; ++vocab) {
      std::vector<std::vector<int>> targets;
      std::vector<int> prefix;
      AllTargets(vocab, 3, &prefix, &targets);
      for (int draw = 0; draw < kCtcDraws; ++draw) {
        const Tensor<double> lp = LogSoftmax(testing::RandomTensor({1, frames, vocab}, rng, 3.0));
        const LogProbView<double> view{lp.data(), frames, vocab};
        for (const std::vector<int>& t : targets) {
          const double a = CtcLoss(view, CtcTarget::Make(t)).loss;
          const double b = CtcBruteForce(view, t);
          const double diff = std::isinf(a) && std::isinf(b) ? 0.0 : std::abs(a - b);
          worst = std::max(worst, std::isnan(diff) ? INFINITY : diff);
          ++comparisons;
        }
      }
    }
  }
  Report(1, "ctc oracle", worst < kCtcTolerance,
         Format("%lld comparisons, max |loss - brute| = %.3g (limit %.0e)",
                static_cast<long long>(comparisons), worst, kCtcTolerance));
}

void GradientSuite() {
  Rng rng(2);
  std::ostringstream detail;
  bool pass = true;
  for (const testing::GradientCase& c : testing::GradientCases()) {
    double worst = 0.0;
    for (int i = 0; i < kGradientTrials; ++i) worst = std::max(worst, c.trial(rng));
    pass = pass && worst < testing::kFdTolerance;
    detail << c.name << "=" << Format("%.2g", worst) << " ";
  }
  detail << Format("(%d trials each, limit %.0e)", kGradientTrials, testing::kFdTolerance);
  Report(2, "gradient suite", pass, detail.str());
}

void MaskSuppression() {
  Rng rng(3);
  const ModelConfig config = ModelConfig::ForSize(ModelSize::kSmall, VocabMode::kStressed);
  const MaskMatrix mask = BuildMask(Dict(), PhonemeVocabulary::Make(VocabMode::kStressed));
  double worst_masked = 0.0;
  double min_blank = 1.0;
  for (int i = 0; i < kMaskWords; ++i) {
    G2pModel<float> model(config, mask);
    model.Init(1000 + i);
    const std::string word = RandomWord(rng, 14);
    const EncodedBatch batch = BatchEncode({ExpandWord(word, Dict())});
    const Tensor<float> lp = model.Forward(batch, Mode::kInfer);
    for (int t = 0; t < batch.lengths[0]; ++t) {
      const uint8_t* allowed = mask.row(batch.grapheme(0, t));
      double masked = 0.0;
      for (int v = 0; v < lp.dim(2); ++v) {
        if (!allowed[v]) masked += std::exp(static_cast<double>(lp.at(0, t, v)));
      }
      worst_masked = std::max(worst_masked, masked);
      min_blank = std::min(min_blank, std::exp(static_cast<double>(lp.at(0, t, 0))));
    }
  }
  Report(3, "mask suppression", worst_masked < kMaskedMass && min_blank > 0.0,
         Format("%d words, max disallowed mass %.3g, min blank prob %.3g", kMaskWords,
                worst_masked, min_blank));
}

void ParamCounts() {
  const double published[] = {0.6e6, 1.27e6, 2.25e6};
  const ModelSize sizes[] = {ModelSize::kSmall, ModelSize::kMedium, ModelSize::kLarge};
  std::ostringstream detail;
  bool pass = true;
  for (int i = 0; i < 3; ++i) {
    const int64_t n = ParamCount(ModelConfig::ForSize(sizes[i], VocabMode::kBase));
    const double delta = (static_cast<double>(n) - published[i]) / published[i];
    pass = pass && std::abs(delta) <= kParamTolerance;
    detail << ModelSizeName(sizes[i]) << "=" << n << Format(" (%+.1f%% vs %.2fM) ", 100 * delta,
                                                            published[i] / 1e6);
  }
  detail << "limit +/-20%";
  Report(4, "parameter counts", pass, detail.str());
}

void SyntheticLearnability() {
  testing::TempDir dir("accept_synth");
  const DataSplit split =
      MakeSplit(testing::SyntheticLexicon(kSyntheticWords, 5), kSyntheticWords / 10,
                kSyntheticWords / 10, 5);
  TrainConfig t;
  t.epochs = kSyntheticEpochs;
  t.batch_size = 16;
  t.keep_epoch_checkpoints = false;
  const TrainResult r = Train<float>(split, Dict(),
                                     ModelConfig::ForSize(ModelSize::kSmall, VocabMode::kStressed),
                                     t, dir.path().string());
  int first_zero = 0;
  for (const EpochMetrics& m : r.history) {
    if (m.dev_wer == 0.0 && first_zero == 0) first_zero = m.epoch;
  }
  bool monotone = true;
  std::ostringstream losses;
  for (int e = 0; e < 5; ++e) {
    losses << Format("%.3f ", r.history[e].train_loss);
    if (e > 0) monotone = monotone && r.history[e].train_loss < r.history[e - 1].train_loss;
  }
  Report(5, "synthetic learnability", first_zero > 0 && monotone,
         Format("train %zu / dev %zu words, first epoch with dev WER 0: %d, ",
                split.train.size(), split.dev.size(), first_zero) +
             "losses epochs 1-5: " + losses.str() + (monotone ? "(decreasing)" : "(NOT decreasing)"));
}

DataSplit SmokeSplit() {
  return MakeSplit(SampleEntries(CmuPrimary(), kSmokeSubset, kSplitSeed), kSmokeSplit, kSmokeSplit,
                   kSplitSeed);
}

TrainResult SmokeRun(const std::string& out_dir) {
  TrainConfig t;
  t.epochs = kSmokeEpochs;
  t.keep_epoch_checkpoints = false;
  return Train<float>(SmokeSplit(), Dict(),
                      ModelConfig::ForSize(ModelSize::kSmall, VocabMode::kStressed), t, out_dir);
}

void CmuSmoke(const testing::TempDir& a) {
  const DataSplit split = SmokeSplit();
  const TrainResult r = SmokeRun(a.path().string());
  const double first = r.history.front().dev_wer;
  const double last = r.history.back().dev_wer;
  std::ostringstream curve;
  for (const EpochMetrics& m : r.history) curve << Format("%g ", m.dev_wer);
  Report(6, "cmu smoke", last < kSmokeWer && first - last >= kSmokeGain,
         Format("train %zu / dev %zu, skipped %d; epoch 1 dev WER %.1f, final %.1f (limit < %.0f, "
                "gain >= %.0f); curve: ",
                split.train.size(), split.dev.size(), r.prechecked_skips, first, last, kSmokeWer,
                kSmokeGain) +
             curve.str());
}

// Repeats the smoke run of criterion 6 and compares artifacts with it.
void Determinism(const testing::TempDir& a) {
  if (!std::filesystem::exists(a.File("last.ckpt"))) throw Error("first smoke run did not finish");
  testing::TempDir b("accept_smoke_b");
  SmokeRun(b.path().string());
  const bool last_same = ReadBytes(a.File("last.ckpt")) == ReadBytes(b.File("last.ckpt"));
  const bool best_same = ReadBytes(a.File("best.ckpt")) == ReadBytes(b.File("best.ckpt"));
  const bool metrics_same =
      MetricsWithoutTimes(a.File("metrics.jsonl")) == MetricsWithoutTimes(b.File("metrics.jsonl"));
  const bool batches_same = ReadBytes(a.File("batches.jsonl")) == ReadBytes(b.File("batches.jsonl"));
  Report(9, "determinism", last_same && best_same && metrics_same && batches_same,
         Format("last.ckpt %s, best.ckpt %s, metrics.jsonl (wall-clock seconds excluded) %s, "
                "batches.jsonl %s",
                last_same ? "identical" : "DIFFER", best_same ? "identical" : "DIFFER",
                metrics_same ? "identical" : "DIFFER", batches_same ? "identical" : "DIFFER"));
}

void FullReproduction() {
  const char* run = std::getenv("LITEG2P_FULL_RUN");
  if (run == nullptr || *run == '\0') {
    Skip(7, "full reproduction", "set LITEG2P_FULL_RUN to a finished medium train directory");
    return;
  }
  const std::string ckpt = std::string(run) + "/best.ckpt";
  const CheckpointFile file = ReadCheckpointFile(ckpt);
  const G2pEngine<float> engine = EngineFromCheckpoint<float>(file);
  const nlohmann::json split_meta = file.metadata.value("split", nlohmann::json::object());
  const int subset = split_meta.value("subset", 0);
  const int test_size = split_meta.value("test_size", 12000);
  const int dev_size = split_meta.value("dev_size", 2670);
  const uint64_t seed = file.metadata.value("split_seed", kSplitSeed);
  const DataSplit split =
      MakeSplit(SampleEntries(CmuPrimary(), subset, seed), test_size, dev_size, seed);
  const EvalReport report = EvaluateEntries(engine, split.test, 1);
  const WerScores& s = report.scores;
  const nlohmann::json state = file.metadata.value("train_state", nlohmann::json::object());
  Report(7, "full reproduction",
         engine.model.config().size == ModelSize::kMedium && s.wer <= kFullWer &&
             s.wer_s <= kFullWerS && s.wer_ss <= kFullWerSs,
         Format("%s, best epoch %d, %d test words: WER %.2f (limit %.1f), WER_S %.2f (limit %.1f), "
                "WER_SS %.2f (limit %.1f)",
                std::string(ModelSizeName(engine.model.config().size)).c_str(), state.value("best_epoch", 0),
                s.words, s.wer, kFullWer, s.wer_s, kFullWerS, s.wer_ss, kFullWerSs));
}

void Latency() {
  const std::vector<std::string> words = SampleWords(CmuPrimary(), kBenchWords, 0);
  std::ostringstream detail;
  bool pass = true;
  for (const auto& [size, limit] :
       {std::pair{ModelSize::kMedium, kMediumMs}, std::pair{ModelSize::kSmall, kSmallMs}}) {
    const G2pEngine<float> engine =
        MakeEngine<float>(ModelConfig::ForSize(size, VocabMode::kStressed), Dict(), 1);
    Bench(engine, std::vector<std::string>(words.begin(), words.begin() + 10), 1);  // warm-up
    const BenchResult r = Bench(engine, words, 1);
    pass = pass && r.mean_ms < limit;
    detail << ModelSizeName(size)
           << Format(" mean %.3f ms/word (limit %.0f), median %.3f, p95 %.3f; ", r.mean_ms, limit,
                     r.median_ms, r.p95_ms);
  }
  detail << kBenchWords << " words, batch 1, 1 thread";
  Report(8, "latency", pass, detail.str());
}

void RoundTrip() {
  testing::TempDir dir("accept_ckpt");
  const G2pEngine<float> engine =
      MakeEngine<float>(ModelConfig::ForSize(ModelSize::kSmall, VocabMode::kStressed), Dict(), 7);
  const std::string path = dir.File("m.ckpt");
  SaveEngine(path, engine, kSplitSeed);
  G2pEngine<float> loaded = LoadEngine<float>(path);
  G2pEngine<float> original = engine;
  Rng rng(10);
  int identical = 0;
  for (int i = 0; i < kRoundTripInputs; ++i) {
    const std::string w = RandomWord(rng, 16);
    Tensor<float> a, b;
    const bool same_out = original.Predict(w, &a) == loaded.Predict(w, &b);
    if (same_out && a == b) ++identical;
  }

  const std::string good = ReadBytes(path);
  auto kind_of = [](const std::function<void()>& fn) -> std::string {
    try {
      fn();
    } catch (const CheckpointError& e) {
      switch (e.kind()) {
        case CheckpointErrorKind::kIo: return "io";
        case CheckpointErrorKind::kBadMagic: return "bad_magic";
        case CheckpointErrorKind::kUnsupportedVersion: return "unsupported_version";
        case CheckpointErrorKind::kTruncated: return "truncated";
        case CheckpointErrorKind::kMalformed: return "malformed";
      }
    } catch (const std::exception&) {
      return "other";
    }
    return "none";
  };
  std::string magic = good, version = good, json = good;
  magic[1] = 'X';
  version[4] = static_cast<char>(kCheckpointVersion + 1);
  json[16] = '#';
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"bad_magic", kind_of([&] { DecodeCheckpoint(magic); })},
      {"unsupported_version", kind_of([&] { DecodeCheckpoint(version); })},
      {"truncated", kind_of([&] { DecodeCheckpoint(good.substr(0, good.size() - 3)); })},
      {"malformed", kind_of([&] { DecodeCheckpoint(json); })},
      {"io", kind_of([&] { ReadCheckpointFile(dir.File("absent.ckpt")); })},
  };
  bool kinds_ok = true;
  std::ostringstream detail;
  detail << identical << "/" << kRoundTripInputs << " inputs bit-identical; errors:";
  for (const auto& [want, got] : cases) {
    kinds_ok = kinds_ok && want == got;
    detail << " " << want << (want == got ? " ok" : " got " + got);
  }
  Report(10, "checkpoint round-trip", identical == kRoundTripInputs && kinds_ok, detail.str());
}

}  // namespace
}  // namespace liteg2p

int main() {
  using namespace liteg2p;
  Guard(1, "ctc oracle", CtcOracle);
  Guard(2, "gradient suite", GradientSuite);
  Guard(3, "mask suppression", MaskSuppression);
  Guard(4, "parameter counts", ParamCounts);
  Guard(5, "synthetic learnability", SyntheticLearnability);
  testing::TempDir smoke("accept_smoke_a");
  Guard(6, "cmu smoke", [&] { CmuSmoke(smoke); });
  Guard(7, "full reproduction", FullReproduction);
  Guard(8, "latency", Latency);
  Guard(9, "determinism", [&] { Determinism(smoke); });
  Guard(10, "checkpoint round-trip", RoundTrip);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
