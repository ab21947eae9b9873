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

#include "liteg2p/eval.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <thread>

#include "liteg2p/ctc.h"
#include "liteg2p/random.h"

namespace liteg2p {

namespace {

// Runs fn(worker, begin, end) over [0, count) in contiguous blocks.
template <typename Fn>
void ParallelBlocks(int count, int threads, Fn fn) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    fn(0, 0, count);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (int w = 0; w < threads; ++w) {
    const int begin = static_cast<int>(static_cast<int64_t>(count) * w / threads);
    const int end = static_cast<int>(static_cast<int64_t>(count) * (w + 1) / threads);
    pool.emplace_back([&, w, begin, end] {
      try {
        fn(w, begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

double Wer(const std::vector<Pronunciation>& preds, const std::vector<Pronunciation>& refs,
           MarkLevel level) {
  if (preds.size() != refs.size()) {
    throw Error("WER needs as many predictions as references (" + std::to_string(preds.size()) +
                " vs " + std::to_string(refs.size()) + ")");
  }
  if (preds.empty()) throw Error("WER over an empty set");
  size_t errors = 0;
  for (size_t i = 0; i < preds.size(); ++i) {
    if (StripMarks(preds[i], level) != StripMarks(refs[i], level)) ++errors;
  }
  return 100.0 * static_cast<double>(errors) / static_cast<double>(preds.size());
}

WerScores Score(const std::vector<Pronunciation>& preds, const std::vector<Pronunciation>& refs) {
  WerScores s;
  s.wer = Wer(preds, refs, MarkLevel::kNone);
  s.wer_s = Wer(preds, refs, MarkLevel::kStress);
  s.wer_ss = Wer(preds, refs, MarkLevel::kStressAndBoundary);
  s.words = static_cast<int>(preds.size());
  return s;
}

template <typename T>
std::vector<Pronunciation> PredictMany(const G2pModel<T>& model, const ExpertDictionary& dict,
                                       const PhonemeVocabulary& vocab,
                                       const std::vector<std::string>& spellings,
                                       int batch_size, int threads) {
  if (batch_size < 1) throw ConfigError("batch size must be positive");
  std::vector<Pronunciation> out(spellings.size());
  const int n = static_cast<int>(spellings.size());
  const int chunks = (n + batch_size - 1) / batch_size;
  ParallelBlocks(chunks, threads, [&](int, int begin, int end) {
    G2pModel<T> local = model;
    for (int c = begin; c < end; ++c) {
      const int lo = c * batch_size;
      const int hi = std::min(n, lo + batch_size);
      std::vector<ExpandedInput> words;
      for (int i = lo; i < hi; ++i) words.push_back(ExpandWord(spellings[i], dict));
      const EncodedBatch batch = BatchEncode(words);
      Tensor<T> lp = local.Forward(batch, Mode::kInfer);
      const int v = lp.dim(2);
      for (int b = 0; b < batch.batch; ++b) {
        const LogProbView<T> view{&lp.at(b, 0, 0), batch.lengths[b], v};
        out[lo + b] = vocab.Decode(GreedyDecode(view, vocab.blank_id()));
      }
    }
  });
  return out;
}

template <typename T>
EvalReport EvaluateEntries(const G2pEngine<T>& engine, const std::vector<LexiconEntry>& entries,
                           int threads) {
  std::vector<std::string> spellings;
  std::vector<Pronunciation> refs;
  for (const LexiconEntry& e : entries) {
    spellings.push_back(e.spelling);
    refs.push_back(e.pronunciation);
  }
  EvalReport report;
  std::vector<Pronunciation> preds =
      PredictMany(engine.model, engine.dict, engine.vocab, spellings, 64, threads);
  report.scores = Score(preds, refs);
  for (size_t i = 0; i < entries.size(); ++i) {
    WordResult w;
    w.spelling = spellings[i];
    w.reference = refs[i];
    w.prediction = preds[i];
    auto same = [&](MarkLevel level) {
      return StripMarks(w.prediction, level) == StripMarks(w.reference, level);
    };
    w.match = same(MarkLevel::kNone);
    w.match_s = same(MarkLevel::kStress);
    w.match_ss = same(MarkLevel::kStressAndBoundary);
    report.words.push_back(std::move(w));
  }
  return report;
}

void WriteErrorTsv(const std::string& path, const EvalReport& report) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "spelling\treference\tprediction\tmatch\tmatch_s\tmatch_ss\n";
  for (const WordResult& w : report.words) {
    out << w.spelling << '\t' << JoinPronunciation(w.reference) << '\t'
        << JoinPronunciation(w.prediction) << '\t' << int(w.match) << '\t' << int(w.match_s)
        << '\t' << int(w.match_ss) << '\n';
  }
  if (!out) throw Error("write failed: " + path);
}

nlohmann::json SummaryJson(const EvalReport& report) {
  return {{"words", report.scores.words},
          {"wer", report.scores.wer},
          {"wer_s", report.scores.wer_s},
          {"wer_ss", report.scores.wer_ss}};
}

nlohmann::json BenchResult::ToJson() const {
  return {{"n", n},
          {"threads", threads},
          {"mean_ms", mean_ms},
          {"median_ms", median_ms},
          {"p95_ms", p95_ms},
          {"words_per_sec", words_per_sec},
          {"words", words},
          {"ms", ms}};
}

std::vector<std::string> SampleWords(const std::vector<LexiconEntry>& pool, int n,
                                     uint64_t seed) {
  if (n < 1) throw Error("sample size must be positive");
  if (static_cast<size_t>(n) > pool.size()) {
    throw Error("cannot sample " + std::to_string(n) + " words from a pool of " +
                std::to_string(pool.size()));
  }
  std::vector<size_t> order(pool.size());
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng(seed);
  Shuffle(&order, rng);
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(pool[order[i]].spelling);
  return out;
}

template <typename T>
BenchResult Bench(const G2pEngine<T>& engine, const std::vector<std::string>& words,
                  int threads) {
  using Clock = std::chrono::steady_clock;
  if (words.empty()) throw Error("nothing to benchmark");
  BenchResult r;
  r.n = static_cast<int>(words.size());
  r.threads = std::max(1, threads);
  r.words = words;
  r.ms.assign(words.size(), 0.0);
  const auto wall_start = Clock::now();
  ParallelBlocks(r.n, r.threads, [&](int, int begin, int end) {
    G2pEngine<T> local = engine;
    for (int i = begin; i < end; ++i) {
      const auto t0 = Clock::now();
      const Pronunciation p = local.Predict(words[i]);
      const auto t1 = Clock::now();
      r.ms[i] = std::chrono::duration<double, std::milli>(t1 - t0).count();
      (void)p;
    }
  });
  const double wall_s = std::chrono::duration<double>(Clock::now() - wall_start).count();
  r.mean_ms = std::accumulate(r.ms.begin(), r.ms.end(), 0.0) / r.n;
  std::vector<double> sorted = r.ms;
  std::sort(sorted.begin(), sorted.end());
  r.median_ms = r.n % 2 ? sorted[r.n / 2] : 0.5 * (sorted[r.n / 2 - 1] + sorted[r.n / 2]);
  const int rank = static_cast<int>(std::ceil(0.95 * r.n));
  r.p95_ms = sorted[std::max(0, rank - 1)];
  r.words_per_sec = wall_s > 0.0 ? r.n / wall_s : 0.0;
  return r;
}

#define LITEG2P_INSTANTIATE(T)                                                              \
  template std::vector<Pronunciation> PredictMany<T>(                                       \
      const G2pModel<T>&, const ExpertDictionary&, const PhonemeVocabulary&,                \
      const std::vector<std::string>&, int, int);                                           \
  template EvalReport EvaluateEntries<T>(const G2pEngine<T>&,                               \
                                         const std::vector<LexiconEntry>&, int);            \
  template BenchResult Bench<T>(const G2pEngine<T>&, const std::vector<std::string>&, int);

LITEG2P_INSTANTIATE(float)
LITEG2P_INSTANTIATE(double)

#undef LITEG2P_INSTANTIATE

}  // namespace liteg2p
