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

#ifndef LITEG2P_EVAL_H_
#define LITEG2P_EVAL_H_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "liteg2p/checkpoint.h"
#include "liteg2p/lexicon.h"
#include "liteg2p/model.h"

namespace liteg2p {

// Percentage of words whose prediction differs from the reference after
// both pass through StripMarks(level). Exact match only.
double Wer(const std::vector<Pronunciation>& preds, const std::vector<Pronunciation>& refs,
           MarkLevel level);

struct WerScores {
  double wer = 0.0;     // marks stripped
  double wer_s = 0.0;   // stress kept
  double wer_ss = 0.0;  // stress and boundaries kept
  int words = 0;
};

WerScores Score(const std::vector<Pronunciation>& preds, const std::vector<Pronunciation>& refs);

// Greedy predictions in input order. Words are run through the model in
// fixed chunks of `batch_size`; chunks are spread over `threads` model
// copies, so the output does not depend on the thread count.
template <typename T>
std::vector<Pronunciation> PredictMany(const G2pModel<T>& model, const ExpertDictionary& dict,
                                       const PhonemeVocabulary& vocab,
                                       const std::vector<std::string>& spellings,
                                       int batch_size = 64, int threads = 1);

struct WordResult {
  std::string spelling;
  Pronunciation reference;
  Pronunciation prediction;
  bool match = false;     // WER level
  bool match_s = false;   // WER_S level
  bool match_ss = false;  // WER_SS level
};

struct EvalReport {
  WerScores scores;
  std::vector<WordResult> words;
};

template <typename T>
EvalReport EvaluateEntries(const G2pEngine<T>& engine, const std::vector<LexiconEntry>& entries,
                           int threads = 1);

// Columns: spelling, reference, prediction, match, match_s, match_ss.
void WriteErrorTsv(const std::string& path, const EvalReport& report);
nlohmann::json SummaryJson(const EvalReport& report);

struct BenchResult {
  int n = 0;
  int threads = 1;
  std::vector<std::string> words;
  std::vector<double> ms;  // per word, in sample order
  double mean_ms = 0.0;
  double median_ms = 0.0;
  double p95_ms = 0.0;
  double words_per_sec = 0.0;

  nlohmann::json ToJson() const;
};

// Seeded sample of `n` distinct words from `pool` (throws Error when n is
// larger than the pool).
std::vector<std::string> SampleWords(const std::vector<LexiconEntry>& pool, int n,
                                     uint64_t seed);

// Times expand -> forward -> decode for each word at batch size 1.
template <typename T>
BenchResult Bench(const G2pEngine<T>& engine, const std::vector<std::string>& words,
                  int threads = 1);

}  // namespace liteg2p

#endif  // LITEG2P_EVAL_H_
