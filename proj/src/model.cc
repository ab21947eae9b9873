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

#include "liteg2p/model.h"

#include <cstdlib>

#include "liteg2p/ctc.h"

namespace liteg2p {

std::string_view ModelSizeName(ModelSize size) {
  switch (size) {
    case ModelSize::kSmall:
      return "small";
    case ModelSize::kMedium:
      return "medium";
    case ModelSize::kLarge:
      return "large";
  }
  return "small";
}

ModelSize ParseModelSize(std::string_view name) {
  if (name == "small") return ModelSize::kSmall;
  if (name == "medium") return ModelSize::kMedium;
  if (name == "large") return ModelSize::kLarge;
  throw ConfigError("unknown model size: " + std::string(name));
}

int GruHiddenFor(ModelSize size) {
  switch (size) {
    case ModelSize::kSmall:
      return 128;
    case ModelSize::kMedium:
      return 192;
    case ModelSize::kLarge:
      return 256;
  }
  return 128;
}

ModelConfig ModelConfig::ForSize(ModelSize size, VocabMode mode) {
  ModelConfig c;
  c.size = size;
  c.gru_hidden = GruHiddenFor(size);
  c.vocab_mode = mode;
  return c;
}

void ModelConfig::Validate() const {
  if (embed_dim < 1 || conv_channels < 1 || gru_hidden < 1) {
    throw ConfigError("model dimensions must be positive");
  }
  if (kernel < 1 || kernel % 2 == 0) {
    throw ConfigError("conv kernel must be a positive odd number");
  }
  if (gru_layers < 1 || cnn_blocks < 1) {
    throw ConfigError("need at least one CNN block and one GRU layer");
  }
  if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("dropout must be in [0, 1)");
  if (gru_hidden != GruHiddenFor(size)) {
    throw ConfigError("gru_hidden " + std::to_string(gru_hidden) + " does not match size " +
                      std::string(ModelSizeName(size)));
  }
}

nlohmann::json ModelConfig::ToJson() const {
  return {{"size", ModelSizeName(size)}, {"embed_dim", embed_dim},
          {"conv_channels", conv_channels}, {"kernel", kernel},
          {"gru_hidden", gru_hidden},       {"gru_layers", gru_layers},
          {"cnn_blocks", cnn_blocks},       {"dropout", dropout},
          {"vocab_mode", VocabModeName(vocab_mode)}};
}

ModelConfig ModelConfig::FromJson(const nlohmann::json& j) {
  ModelConfig c;
  c.size = ParseModelSize(j.at("size").get<std::string>());
  c.embed_dim = j.at("embed_dim").get<int>();
  c.conv_channels = j.at("conv_channels").get<int>();
  c.kernel = j.at("kernel").get<int>();
  c.gru_hidden = j.at("gru_hidden").get<int>();
  c.gru_layers = j.at("gru_layers").get<int>();
  c.cnn_blocks = j.at("cnn_blocks").get<int>();
  c.dropout = j.at("dropout").get<double>();
  c.vocab_mode = ParseVocabMode(j.at("vocab_mode").get<std::string>());
  c.Validate();
  return c;
}

int64_t ParamCount(const ModelConfig& c) {
  const int64_t vocab = PhonemeVocabulary::Make(c.vocab_mode).size();
  const int64_t e = c.embed_dim, ch = c.conv_channels, h = c.gru_hidden;
  int64_t n = kNumGraphemes * e + PositionTable::Get().num_rows() * e;
  int64_t in = 2 * e;
  for (int i = 0; i < c.cnn_blocks; ++i) {
    n += c.kernel * in * ch + ch;  // conv
    n += 2 * ch;                   // batch-norm scale and shift
    in = ch;
  }
  for (int i = 0; i < c.gru_layers; ++i) {
    n += 2 * (3 * h * (in + h) + 3 * h);
    in = 2 * h;
  }
  n += in * vocab + vocab;
  return n;
}

template <typename T>
void ApplyMask(Tensor<T>* logits, std::span<const int> frame_graphemes, Lengths lengths,
               const MaskMatrix& mask) {
  const int batch = logits->dim(0), time = logits->dim(1), vocab = logits->dim(2);
  if (vocab != mask.cols()) throw ShapeError("mask width does not match the vocabulary");
  for (int b = 0; b < batch; ++b) {
    for (int t = 0; t < lengths[b]; ++t) {
      const uint8_t* allowed = mask.row(frame_graphemes[b * time + t]);
      T* row = &logits->at(b, t, 0);
      for (int v = 0; v < vocab; ++v) {
        if (!allowed[v]) row[v] = static_cast<T>(kMaskedLogit);
      }
    }
  }
}

template <typename T>
G2pModel<T>::G2pModel(const ModelConfig& config, MaskMatrix mask)
    : config_(config), mask_(std::move(mask)) {
  config_.Validate();
  const int vocab = PhonemeVocabulary::Make(config_.vocab_mode).size();
  if (mask_.rows() != kNumGraphemes || mask_.cols() != vocab) {
    throw ConfigError("mask matrix is " + std::to_string(mask_.rows()) + "x" +
                      std::to_string(mask_.cols()) + ", expected " +
                      std::to_string(kNumGraphemes) + "x" + std::to_string(vocab));
  }
  const int e = config_.embed_dim;
  letters_ = Embedding<T>("letter_embedding", kNumGraphemes + 1, e, kGraphemePadId);
  const PositionTable& table = PositionTable::Get();
  positions_ = Embedding<T>("position_embedding", table.num_rows() + 1, e, table.pad_row());
  int in = 2 * e;
  for (int i = 0; i < config_.cnn_blocks; ++i) {
    const std::string prefix = "cnn" + std::to_string(i);
    convs_.emplace_back(prefix + ".conv", in, config_.conv_channels, config_.kernel);
    norms_.emplace_back(prefix + ".bn", config_.conv_channels);
    gelus_.emplace_back();
    in = config_.conv_channels;
  }
  for (int i = 0; i < config_.gru_layers; ++i) {
    grus_.emplace_back("gru" + std::to_string(i), in, config_.gru_hidden);
    dropouts_.emplace_back();
    in = 2 * config_.gru_hidden;
  }
  proj_ = Linear<T>("proj", in, vocab);
}

template <typename T>
void G2pModel<T>::set_mask(MaskMatrix mask) {
  if (mask.rows() != mask_.rows() || mask.cols() != mask_.cols()) {
    throw ConfigError("replacement mask has a different shape");
  }
  mask_ = std::move(mask);
}

template <typename T>
void G2pModel<T>::Init(uint64_t seed) {
  Rng rng(seed);
  letters_.Init(rng);
  positions_.Init(rng);
  for (auto& conv : convs_) conv.Init(rng);
  for (auto& bn : norms_) bn.Init();
  for (auto& gru : grus_) gru.Init(rng);
  proj_.Init(rng);
}

template <typename T>
Tensor<T> G2pModel<T>::Forward(const EncodedBatch& batch, Mode mode, Rng* rng) {
  const bool training = mode == Mode::kTrain;
  const int b = batch.batch, time = batch.max_len;
  lengths_ = batch.lengths;
  graphemes_ = batch.grapheme_ids;
  const Lengths lengths(lengths_);

  Tensor<T> letters = letters_.Forward(batch.grapheme_ids, b, time, lengths);
  Tensor<T> positions = positions_.Forward(batch.position_ids, b, time, lengths);
  const int e = config_.embed_dim;
  Tensor<T> x({b, time, 2 * e});
  {
    auto xm = x.Matrix();
    xm.leftCols(e) = letters.Matrix();
    xm.rightCols(e) = positions.Matrix();
  }
  for (size_t i = 0; i < convs_.size(); ++i) {
    x = convs_[i].Forward(x, lengths);
    x = norms_[i].Forward(x, lengths, training);
    x = gelus_[i].Forward(x);
  }
  for (size_t i = 0; i < grus_.size(); ++i) {
    x = grus_[i].Forward(x, lengths);
    x = dropouts_[i].Forward(x, config_.dropout, rng, training);
  }
  Tensor<T> logits = proj_.Forward(x);
  ApplyMask(&logits, graphemes_, lengths, mask_);
  logprobs_ = LogSoftmax(logits);
  return logprobs_;
}

template <typename T>
void G2pModel<T>::Backward(const Tensor<T>& dlogprobs) {
  CheckShape(dlogprobs.shape(), logprobs_.shape(), "model backward");
  Tensor<T> g = LogSoftmaxBackward(logprobs_, dlogprobs);
  const int batch = g.dim(0), time = g.dim(1), vocab = g.dim(2);
  for (int b = 0; b < batch; ++b) {
    for (int t = 0; t < time; ++t) {
      T* row = &g.at(b, t, 0);
      if (t >= lengths_[b]) {
        std::fill(row, row + vocab, T(0));
        continue;
      }
      // Masked logits are constants.
      const uint8_t* allowed = mask_.row(graphemes_[b * time + t]);
      for (int v = 0; v < vocab; ++v) {
        if (!allowed[v]) row[v] = T(0);
      }
    }
  }
  g = proj_.Backward(g);
  for (size_t i = grus_.size(); i-- > 0;) {
    g = dropouts_[i].Backward(g);
    g = grus_[i].Backward(g);
  }
  for (size_t i = convs_.size(); i-- > 0;) {
    g = gelus_[i].Backward(g);
    g = norms_[i].Backward(g);
    g = convs_[i].Backward(g);
  }
  const int e = config_.embed_dim;
  Tensor<T> dletters({batch, time, e});
  Tensor<T> dpositions({batch, time, e});
  dletters.Matrix() = g.Matrix().leftCols(e);
  dpositions.Matrix() = g.Matrix().rightCols(e);
  letters_.Backward(dletters);
  positions_.Backward(dpositions);
}

template <typename T>
std::vector<Param<T>*> G2pModel<T>::Params() {
  std::vector<Param<T>*> out;
  auto add = [&](std::vector<Param<T>*> ps) { out.insert(out.end(), ps.begin(), ps.end()); };
  add(letters_.Params());
  add(positions_.Params());
  for (size_t i = 0; i < convs_.size(); ++i) {
    add(convs_[i].Params());
    add(norms_[i].Params());
  }
  for (auto& gru : grus_) add(gru.Params());
  add(proj_.Params());
  return out;
}

template <typename T>
std::vector<const Param<T>*> G2pModel<T>::Params() const {
  auto params = const_cast<G2pModel<T>*>(this)->Params();
  return {params.begin(), params.end()};
}

template <typename T>
void G2pModel<T>::ZeroGrad() {
  for (Param<T>* p : Params()) p->ZeroGrad();
}

template <typename T>
int64_t G2pModel<T>::NumTrainable() const {
  int64_t n = 0;
  for (const Param<T>* p : Params()) {
    if (p->trainable) n += static_cast<int64_t>(p->value.size() - p->frozen);
  }
  return n;
}

template <typename T>
Pronunciation G2pEngine<T>::Predict(std::string_view spelling) {
  return Predict(spelling, nullptr);
}

template <typename T>
Pronunciation G2pEngine<T>::Predict(std::string_view spelling, Tensor<T>* logprobs) {
  const EncodedBatch batch = BatchEncode({ExpandWord(spelling, dict)});
  Tensor<T> out = model.Forward(batch, Mode::kInfer);
  const LogProbView<T> view{out.data(), batch.max_len, out.dim(2)};
  const std::vector<int> ids = GreedyDecode(view, vocab.blank_id());
  if (logprobs != nullptr) {
    *logprobs = Tensor<T>({batch.max_len, out.dim(2)});
    std::copy(out.data(), out.data() + out.size(), logprobs->data());
  }
  return vocab.Decode(ids);
}

Precision PrecisionFromEnv() {
  const char* env = std::getenv("LITEG2P_PRECISION");
  if (env == nullptr || std::string_view(env).empty() || std::string_view(env) == "f32") {
    return Precision::kFloat32;
  }
  if (std::string_view(env) == "f64") return Precision::kFloat64;
  throw ConfigError("LITEG2P_PRECISION must be f32 or f64, got '" + std::string(env) + "'");
}

template void ApplyMask<float>(Tensor<float>*, std::span<const int>, Lengths,
                               const MaskMatrix&);
template void ApplyMask<double>(Tensor<double>*, std::span<const int>, Lengths,
                                const MaskMatrix&);
template class G2pModel<float>;
template class G2pModel<double>;
template struct G2pEngine<float>;
template struct G2pEngine<double>;

}  // namespace liteg2p
