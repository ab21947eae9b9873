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

#ifndef LITEG2P_MODEL_H_
#define LITEG2P_MODEL_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "liteg2p/expert_dict.h"
#include "liteg2p/nn.h"
#include "liteg2p/preprocess.h"

namespace liteg2p {

enum class ModelSize { kSmall, kMedium, kLarge };

std::string_view ModelSizeName(ModelSize size);
ModelSize ParseModelSize(std::string_view name);
int GruHiddenFor(ModelSize size);

struct ModelConfig {
  ModelSize size = ModelSize::kSmall;
  int embed_dim = 64;
  int conv_channels = 128;
  int kernel = 3;
  int gru_hidden = 128;
  int gru_layers = 2;
  int cnn_blocks = 2;
  double dropout = 0.1;
  VocabMode vocab_mode = VocabMode::kStressed;

  static ModelConfig ForSize(ModelSize size, VocabMode mode = VocabMode::kStressed);
  // Throws ConfigError when a field is out of range or gru_hidden does not
  // match the size preset.
  void Validate() const;

  nlohmann::json ToJson() const;
  static ModelConfig FromJson(const nlohmann::json& j);

  bool operator==(const ModelConfig&) const = default;
};

// Trainable scalars for a configuration; frozen pad rows and batch-norm
// running statistics are not counted.
int64_t ParamCount(const ModelConfig& config);

enum class Mode { kTrain, kInfer };

// Logit assigned to phonemes the expert mask rules out for a frame.
inline constexpr double kMaskedLogit = -1e9;

// Replaces logits[b, t, v] with kMaskedLogit wherever
// mask[grapheme(b, t)][v] == 0, for valid frames only.
template <typename T>
void ApplyMask(Tensor<T>* logits, std::span<const int> frame_graphemes,
               Lengths lengths, const MaskMatrix& mask);

// Letter and position embeddings (concatenated), CNN blocks of
// conv/batch-norm/GELU, bidirectional GRU layers with dropout on their
// outputs, a linear projection to the vocabulary, the expert mask and a
// log-softmax. Forward() caches activations for Backward(); give each
// thread its own copy for concurrent inference.
template <typename T>
class G2pModel {
 public:
  G2pModel() = default;
  G2pModel(const ModelConfig& config, MaskMatrix mask);

  void Init(uint64_t seed);

  // (B, T, V) log-probabilities. Rows of padded frames are unspecified.
  Tensor<T> Forward(const EncodedBatch& batch, Mode mode, Rng* rng = nullptr);
  // d loss / d log-probabilities for the last Forward(); rows of padded
  // frames are ignored.
  void Backward(const Tensor<T>& dlogprobs);

  // Every named array, including non-trainable state, in a fixed order.
  std::vector<Param<T>*> Params();
  std::vector<const Param<T>*> Params() const;
  void ZeroGrad();
  int64_t NumTrainable() const;

  const ModelConfig& config() const { return config_; }
  const MaskMatrix& mask() const { return mask_; }
  void set_mask(MaskMatrix mask);
  int vocab_size() const { return mask_.cols(); }

 private:
  ModelConfig config_;
  MaskMatrix mask_;
  Embedding<T> letters_;
  Embedding<T> positions_;
  std::vector<Conv1d<T>> convs_;
  std::vector<BatchNorm<T>> norms_;
  std::vector<GeluLayer<T>> gelus_;
  std::vector<BiGru<T>> grus_;
  std::vector<Dropout<T>> dropouts_;
  Linear<T> proj_;

  std::vector<int> lengths_;
  std::vector<int> graphemes_;
  Tensor<T> logprobs_;
};

// Model plus the dictionary and vocabulary it was trained with.
template <typename T>
struct G2pEngine {
  G2pModel<T> model;
  ExpertDictionary dict;
  PhonemeVocabulary vocab;
  // Fingerprint of the dictionary the weights were trained with.
  std::string trained_fingerprint;

  // expand -> forward (inference) -> greedy decode.
  Pronunciation Predict(std::string_view spelling);
  // Same, keeping the (T, V) log-probabilities of the word.
  Pronunciation Predict(std::string_view spelling, Tensor<T>* logprobs);
};

// Precision selected by LITEG2P_PRECISION (f32 by default, or f64).
enum class Precision { kFloat32, kFloat64 };
Precision PrecisionFromEnv();

}  // namespace liteg2p

#endif  // LITEG2P_MODEL_H_
