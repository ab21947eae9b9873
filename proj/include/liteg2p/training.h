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

#ifndef LITEG2P_TRAINING_H_
#define LITEG2P_TRAINING_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "liteg2p/checkpoint.h"
#include "liteg2p/lexicon.h"
#include "liteg2p/model.h"

namespace liteg2p {

struct TrainConfig {
  double lr0 = 0.001;
  double lr_decay = 0.5;
  int decay_every = 5;
  int epochs = 50;
  int batch_size = 128;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  uint64_t seed = 0;
  // Global L2 norm cap on the gradient; off when unset.
  std::optional<double> grad_clip;
  // Threads used for the per-epoch dev evaluation.
  int eval_threads = 1;
  // Write epoch_NNN.ckpt every epoch (best.ckpt and last.ckpt are always written).
  bool keep_epoch_checkpoints = true;

  // Throws ConfigError.
  void Validate() const;
  nlohmann::json ToJson() const;
  static TrainConfig FromJson(const nlohmann::json& j);
};

// lr0 * lr_decay^floor(epoch / decay_every), epoch 0-based.
double LrAt(int epoch, const TrainConfig& config);

template <typename T>
struct AdamState {
  int64_t step = 0;
  std::vector<Tensor<T>> m;
  std::vector<Tensor<T>> v;
};

// Zero moments shaped like `params`.
template <typename T>
AdamState<T> MakeAdamState(std::span<Param<T>* const> params);

// One bias-corrected Adam update of every trainable parameter. Throws
// TrainingError naming the first parameter with a non-finite gradient.
template <typename T>
void AdamStep(std::span<Param<T>* const> params, AdamState<T>* state, double lr,
              const TrainConfig& config);

// Scales gradients so their global L2 norm is at most max_norm. Returns the
// norm before scaling.
template <typename T>
double ClipGradNorm(std::span<Param<T>* const> params, double max_norm);

struct EpochMetrics {
  int epoch = 0;  // 1-based
  double lr = 0.0;
  double train_loss = 0.0;
  double dev_wer = 0.0;
  double dev_wer_s = 0.0;
  double dev_wer_ss = 0.0;
  int skipped = 0;
  double seconds = 0.0;

  nlohmann::json ToJson() const;
  static EpochMetrics FromJson(const nlohmann::json& j);
};

struct TrainOptions {
  // Checkpoint carrying train_state to continue from.
  std::optional<std::string> resume_from;
  // Stop after this epoch (1-based) even if config.epochs is larger.
  std::optional<int> stop_after;
  // Merged into the metadata of every checkpoint written.
  nlohmann::json extra_metadata = nlohmann::json::object();
  std::function<void(const EpochMetrics&)> on_epoch;
  // Receives "spelling<TAB>reason" for each skipped entry.
  std::function<void(const std::string&)> on_skip;
};

struct TrainResult {
  std::vector<EpochMetrics> history;
  int best_epoch = 0;
  double best_dev_wer = 0.0;
  // Entries excluded before training because their target cannot be
  // encoded or aligned under the mask.
  int prechecked_skips = 0;
};

// Full loop. Writes into out_dir: metrics.jsonl, batches.jsonl (per-batch
// loss sums), split_{train,dev,test}.txt, epoch_NNN.ckpt, last.ckpt and
// best.ckpt. Throws TrainingError on a non-finite loss or gradient.
template <typename T>
TrainResult Train(const DataSplit& split, const ExpertDictionary& dict,
                  const ModelConfig& model_config, const TrainConfig& train_config,
                  const std::string& out_dir, const TrainOptions& options = {});

}  // namespace liteg2p

#endif  // LITEG2P_TRAINING_H_
