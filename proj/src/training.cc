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

#include "liteg2p/training.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "liteg2p/ctc.h"
#include "liteg2p/eval.h"
#include "liteg2p/random.h"

namespace liteg2p {

namespace fs = std::filesystem;

void TrainConfig::Validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  require(lr0 > 0.0, "lr0 must be positive");
  require(lr_decay > 0.0, "lr_decay must be positive");
  require(decay_every >= 1, "decay_every must be >= 1");
  require(epochs >= 1, "epochs must be >= 1");
  require(batch_size >= 1, "batch_size must be >= 1");
  require(beta1 > 0.0 && beta1 < 1.0, "beta1 must lie in (0, 1)");
  require(beta2 > 0.0 && beta2 < 1.0, "beta2 must lie in (0, 1)");
  require(adam_eps > 0.0, "adam_eps must be positive");
  require(!grad_clip || *grad_clip > 0.0, "grad_clip must be positive");
  require(eval_threads >= 1, "eval_threads must be >= 1");
}

nlohmann::json TrainConfig::ToJson() const {
  nlohmann::json j = {{"lr0", lr0},
                      {"lr_decay", lr_decay},
                      {"decay_every", decay_every},
                      {"epochs", epochs},
                      {"batch_size", batch_size},
                      {"beta1", beta1},
                      {"beta2", beta2},
                      {"adam_eps", adam_eps},
                      {"seed", seed}};
  j["grad_clip"] = grad_clip ? nlohmann::json(*grad_clip) : nlohmann::json(nullptr);
  return j;
}

TrainConfig TrainConfig::FromJson(const nlohmann::json& j) {
  TrainConfig c;
  c.lr0 = j.at("lr0").get<double>();
  c.lr_decay = j.at("lr_decay").get<double>();
  c.decay_every = j.at("decay_every").get<int>();
  c.epochs = j.at("epochs").get<int>();
  c.batch_size = j.at("batch_size").get<int>();
  c.beta1 = j.at("beta1").get<double>();
  c.beta2 = j.at("beta2").get<double>();
  c.adam_eps = j.at("adam_eps").get<double>();
  c.seed = j.at("seed").get<uint64_t>();
  if (j.contains("grad_clip") && !j["grad_clip"].is_null()) {
    c.grad_clip = j["grad_clip"].get<double>();
  }
  return c;
}

double LrAt(int epoch, const TrainConfig& config) {
  if (epoch < 0) throw ConfigError("epoch must be non-negative");
  return config.lr0 * std::pow(config.lr_decay, epoch / config.decay_every);
}

template <typename T>
AdamState<T> MakeAdamState(std::span<Param<T>* const> params) {
  AdamState<T> state;
  for (const Param<T>* p : params) {
    state.m.emplace_back(p->value.shape());
    state.v.emplace_back(p->value.shape());
  }
  return state;
}

template <typename T>
void AdamStep(std::span<Param<T>* const> params, AdamState<T>* state, double lr,
              const TrainConfig& config) {
  if (state->m.size() != params.size() || state->v.size() != params.size()) {
    throw ShapeError("Adam state does not match the parameter list");
  }
  for (size_t i = 0; i < params.size(); ++i) {
    const Param<T>* p = params[i];
    if (!p->trainable) continue;
    CheckShape(state->m[i].shape(), p->value.shape(), ("adam moment for " + p->name).c_str());
    for (T g : p->grad.values()) {
      if (!std::isfinite(static_cast<double>(g))) {
        throw TrainingError("non-finite gradient in parameter '" + p->name + "'");
      }
    }
  }
  ++state->step;
  const double b1 = config.beta1, b2 = config.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state->step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state->step));
  for (size_t i = 0; i < params.size(); ++i) {
    Param<T>* p = params[i];
    if (!p->trainable) continue;
    T* theta = p->value.data();
    const T* g = p->grad.data();
    T* m = state->m[i].data();
    T* v = state->v[i].data();
    for (size_t k = 0; k < p->value.size(); ++k) {
      m[k] = static_cast<T>(b1 * m[k] + (1.0 - b1) * g[k]);
      v[k] = static_cast<T>(b2 * v[k] + (1.0 - b2) * static_cast<double>(g[k]) * g[k]);
      const double m_hat = m[k] / c1;
      const double v_hat = v[k] / c2;
      theta[k] = static_cast<T>(theta[k] - lr * m_hat / (std::sqrt(v_hat) + config.adam_eps));
    }
  }
}

template <typename T>
double ClipGradNorm(std::span<Param<T>* const> params, double max_norm) {
  double sq = 0.0;
  for (const Param<T>* p : params) {
    if (!p->trainable) continue;
    for (T g : p->grad.values()) sq += static_cast<double>(g) * g;
  }
  const double norm = std::sqrt(sq);
  if (norm > max_norm) {
    const T scale = static_cast<T>(max_norm / norm);
    for (Param<T>* p : params) {
      if (!p->trainable) continue;
      for (size_t k = 0; k < p->grad.size(); ++k) p->grad[k] *= scale;
    }
  }
  return norm;
}

nlohmann::json EpochMetrics::ToJson() const {
  return {{"epoch", epoch},         {"lr", lr},
          {"train_loss", train_loss}, {"dev_wer", dev_wer},
          {"dev_wer_s", dev_wer_s}, {"dev_wer_ss", dev_wer_ss},
          {"skipped", skipped},     {"seconds", seconds}};
}

EpochMetrics EpochMetrics::FromJson(const nlohmann::json& j) {
  EpochMetrics m;
  m.epoch = j.at("epoch").get<int>();
  m.lr = j.at("lr").get<double>();
  m.train_loss = j.at("train_loss").get<double>();
  m.dev_wer = j.at("dev_wer").get<double>();
  m.dev_wer_s = j.at("dev_wer_s").get<double>();
  m.dev_wer_ss = j.at("dev_wer_ss").get<double>();
  m.skipped = j.at("skipped").get<int>();
  m.seconds = j.at("seconds").get<double>();
  return m;
}

namespace {

struct Example {
  ExpandedInput input;
  CtcTarget target;
  std::string spelling;
};

std::string EpochFileName(int epoch) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "epoch_%03d.ckpt", epoch);
  return buf;
}

// Keeps the lines of a JSONL file whose "epoch" is at most `epoch`.
void TruncateJsonl(const fs::path& path, int epoch) {
  std::vector<std::string> kept;
  {
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      if (nlohmann::json::parse(line).at("epoch").get<int>() <= epoch) kept.push_back(line);
    }
  }
  std::ofstream out(path, std::ios::trunc);
  for (const std::string& line : kept) out << line << '\n';
}

template <typename T>
CheckpointFile TrainingCheckpoint(const G2pEngine<T>& engine, const AdamState<T>& adam,
                                  const Rng& rng, int epoch, int best_epoch, double best_wer,
                                  const TrainConfig& config, uint64_t split_seed) {
  CheckpointFile file = EngineToCheckpoint(engine, split_seed);
  file.metadata["train_state"] = {{"step", adam.step},
                                  {"epoch", epoch},
                                  {"rng", SerializeRng(rng)},
                                  {"best_dev_wer", best_wer},
                                  {"best_epoch", best_epoch},
                                  {"train_config", config.ToJson()}};
  const auto params = engine.model.Params();
  for (size_t i = 0; i < params.size(); ++i) {
    if (!params[i]->trainable) continue;
    for (int which = 0; which < 2; ++which) {
      const Tensor<T>& moment = which == 0 ? adam.m[i] : adam.v[i];
      NamedArray a;
      a.name = std::string(which == 0 ? "adam.m." : "adam.v.") + params[i]->name;
      a.shape = moment.shape();
      for (T x : moment.values()) a.data.push_back(static_cast<float>(x));
      file.arrays.push_back(std::move(a));
    }
  }
  return file;
}

}  // namespace

template <typename T>
TrainResult Train(const DataSplit& split, const ExpertDictionary& dict,
                  const ModelConfig& model_config, const TrainConfig& config,
                  const std::string& out_dir, const TrainOptions& options) {
  using Clock = std::chrono::steady_clock;
  config.Validate();
  model_config.Validate();
  if (split.train.empty()) throw ConfigError("training split is empty");
  if (split.dev.empty()) throw ConfigError("dev split is empty");
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  WriteSplitManifest(split, out_dir);

  G2pEngine<T> engine = MakeEngine<T>(model_config, dict, config.seed);
  auto params = engine.model.Params();
  AdamState<T> adam = MakeAdamState<T>(params);
  Rng rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  TrainResult result;
  int start_epoch = 0;
  result.best_dev_wer = std::numeric_limits<double>::infinity();

  const fs::path metrics_path = dir / "metrics.jsonl";
  const fs::path batches_path = dir / "batches.jsonl";
  if (options.resume_from) {
    const CheckpointFile file = ReadCheckpointFile(*options.resume_from);
    if (!file.metadata.contains("train_state")) {
      throw ConfigError("checkpoint " + *options.resume_from + " carries no training state");
    }
    engine = EngineFromCheckpoint<T>(file);
    if (engine.model.config() != model_config) {
      throw ConfigError("resume checkpoint was trained with a different model config");
    }
    if (engine.trained_fingerprint != dict.Fingerprint()) {
      throw ConfigError("resume checkpoint was trained with a different expert dictionary");
    }
    params = engine.model.Params();
    const nlohmann::json& st = file.metadata["train_state"];
    adam = MakeAdamState<T>(params);
    adam.step = st.at("step").get<int64_t>();
    for (size_t i = 0; i < params.size(); ++i) {
      if (!params[i]->trainable) continue;
      for (int which = 0; which < 2; ++which) {
        const std::string name =
            std::string(which == 0 ? "adam.m." : "adam.v.") + params[i]->name;
        const NamedArray* a = file.Find(name);
        Tensor<T>& moment = which == 0 ? adam.m[i] : adam.v[i];
        if (a == nullptr || a->shape != moment.shape()) {
          throw CheckpointError(CheckpointErrorKind::kMalformed,
                                "training state lacks a usable '" + name + "'");
        }
        for (size_t k = 0; k < a->data.size(); ++k) moment[k] = static_cast<T>(a->data[k]);
      }
    }
    rng = DeserializeRng(st.at("rng").get<std::string>());
    start_epoch = st.at("epoch").get<int>();
    result.best_epoch = st.at("best_epoch").get<int>();
    result.best_dev_wer = st.at("best_dev_wer").get<double>();
    TruncateJsonl(metrics_path, start_epoch);
    TruncateJsonl(batches_path, start_epoch);
    std::ifstream in(metrics_path);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty()) result.history.push_back(EpochMetrics::FromJson(nlohmann::json::parse(line)));
    }
  } else {
    std::ofstream(metrics_path, std::ios::trunc);
    std::ofstream(batches_path, std::ios::trunc);
  }

  std::vector<Example> examples;
  const MaskMatrix& mask = engine.model.mask();
  for (const LexiconEntry& entry : split.train) {
    std::string reason;
    try {
      Example ex{ExpandWord(entry.spelling, dict),
                 CtcTarget::Make(engine.vocab.Encode(entry.pronunciation),
                                 engine.vocab.blank_id()),
                 entry.spelling};
      std::vector<const uint8_t*> rows;
      for (const Frame& f : ex.input.frames) rows.push_back(mask.row(f.grapheme_id));
      if (CtcAlignable(rows, ex.target)) {
        examples.push_back(std::move(ex));
        continue;
      }
      reason = "target not reachable under the expert mask";
    } catch (const Error& e) {
      reason = e.what();
    }
    ++result.prechecked_skips;
    if (options.on_skip) options.on_skip(entry.spelling + "\t" + reason);
  }
  if (examples.empty()) throw TrainingError("no trainable entries survive the mask check");

  std::vector<std::string> dev_spellings;
  std::vector<Pronunciation> dev_refs;
  for (const LexiconEntry& e : split.dev) {
    dev_spellings.push_back(e.spelling);
    dev_refs.push_back(e.pronunciation);
  }

  const int last_epoch = options.stop_after ? std::min(*options.stop_after, config.epochs)
                                            : config.epochs;
  for (int epoch = start_epoch; epoch < last_epoch; ++epoch) {
    const auto t0 = Clock::now();
    const double lr = LrAt(epoch, config);
    std::vector<int> order(examples.size());
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng(config.seed + static_cast<uint64_t>(epoch));
    Shuffle(&order, shuffle_rng);

    double epoch_loss = 0.0;
    int64_t epoch_words = 0;
    int runtime_skips = 0;
    std::ofstream batch_log(batches_path, std::ios::app);
    const int num_batches = static_cast<int>((order.size() + config.batch_size - 1) /
                                             config.batch_size);
    for (int bi = 0; bi < num_batches; ++bi) {
      const size_t lo = static_cast<size_t>(bi) * config.batch_size;
      const size_t hi = std::min(order.size(), lo + config.batch_size);
      std::vector<ExpandedInput> inputs;
      for (size_t i = lo; i < hi; ++i) inputs.push_back(examples[order[i]].input);
      const EncodedBatch batch = BatchEncode(inputs);

      engine.model.ZeroGrad();
      const Tensor<T> lp = engine.model.Forward(batch, Mode::kTrain, &rng);
      const int vocab = lp.dim(2);
      std::vector<CtcResult> losses;
      double loss_sum = 0.0;
      int kept = 0, skipped = 0;
      for (int b = 0; b < batch.batch; ++b) {
        const Example& ex = examples[order[lo + b]];
        const LogProbView<T> view{&lp.at(b, 0, 0), batch.lengths[b], vocab};
        CtcResult r = CtcLoss(view, ex.target);
        if (!r.feasible) {
          ++skipped;
          if (options.on_skip) options.on_skip(ex.spelling + "\tinfeasible CTC target");
        } else if (!std::isfinite(r.loss)) {
          throw TrainingError("non-finite loss in epoch " + std::to_string(epoch + 1) +
                              ", batch " + std::to_string(bi) + " (word '" + ex.spelling +
                              "')");
        } else {
          loss_sum += r.loss;
          ++kept;
        }
        losses.push_back(std::move(r));
      }
      runtime_skips += skipped;
      batch_log << nlohmann::json{{"epoch", epoch + 1},
                                  {"batch", bi},
                                  {"words", kept},
                                  {"loss_sum", loss_sum},
                                  {"skipped", skipped}}
                       .dump()
                << '\n';
      if (kept == 0) continue;
      if (!std::isfinite(loss_sum)) {
        throw TrainingError("non-finite loss sum in epoch " + std::to_string(epoch + 1) +
                            ", batch " + std::to_string(bi));
      }
      Tensor<T> dlp(lp.shape());
      const double scale = 1.0 / kept;
      for (int b = 0; b < batch.batch; ++b) {
        if (!losses[b].feasible) continue;
        const Tensor<double>& g = losses[b].grad;
        T* dst = &dlp.at(b, 0, 0);
        for (size_t k = 0; k < g.size(); ++k) dst[k] = static_cast<T>(g[k] * scale);
      }
      engine.model.Backward(dlp);
      if (config.grad_clip) ClipGradNorm<T>(params, *config.grad_clip);
      try {
        AdamStep<T>(params, &adam, lr, config);
      } catch (const TrainingError& e) {
        throw TrainingError(std::string(e.what()) + " in epoch " + std::to_string(epoch + 1) +
                            ", batch " + std::to_string(bi));
      }
      epoch_loss += loss_sum;
      epoch_words += kept;
    }

    EpochMetrics m;
    m.epoch = epoch + 1;
    m.lr = lr;
    m.train_loss = epoch_words > 0 ? epoch_loss / static_cast<double>(epoch_words) : 0.0;
    if (!std::isfinite(m.train_loss)) {
      throw TrainingError("non-finite mean training loss in epoch " + std::to_string(m.epoch));
    }
    const WerScores dev =
        Score(PredictMany(engine.model, engine.dict, engine.vocab, dev_spellings, 64,
                          config.eval_threads),
              dev_refs);
    m.dev_wer = dev.wer;
    m.dev_wer_s = dev.wer_s;
    m.dev_wer_ss = dev.wer_ss;
    m.skipped = result.prechecked_skips + runtime_skips;

    const bool improved = m.dev_wer < result.best_dev_wer;
    if (improved) {
      result.best_dev_wer = m.dev_wer;
      result.best_epoch = m.epoch;
    }
    CheckpointFile ckpt = TrainingCheckpoint(engine, adam, rng, m.epoch, result.best_epoch,
                                             result.best_dev_wer, config, split.seed);
    ckpt.metadata.update(options.extra_metadata);
    WriteCheckpointFile((dir / "last.ckpt").string(), ckpt);
    if (config.keep_epoch_checkpoints) {
      fs::copy_file(dir / "last.ckpt", dir / EpochFileName(m.epoch),
                    fs::copy_options::overwrite_existing);
    }
    if (improved) {
      fs::copy_file(dir / "last.ckpt", dir / "best.ckpt", fs::copy_options::overwrite_existing);
    }
    m.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    {
      std::ofstream metrics(metrics_path, std::ios::app);
      metrics << m.ToJson().dump() << '\n';
    }
    result.history.push_back(m);
    if (options.on_epoch) options.on_epoch(m);
  }
  return result;
}

#define LITEG2P_INSTANTIATE(T)                                                                \
  template AdamState<T> MakeAdamState<T>(std::span<Param<T>* const>);                         \
  template void AdamStep<T>(std::span<Param<T>* const>, AdamState<T>*, double,                \
                            const TrainConfig&);                                              \
  template double ClipGradNorm<T>(std::span<Param<T>* const>, double);                        \
  template TrainResult Train<T>(const DataSplit&, const ExpertDictionary&, const ModelConfig&, \
                                const TrainConfig&, const std::string&, const TrainOptions&);

LITEG2P_INSTANTIATE(float)
LITEG2P_INSTANTIATE(double)

#undef LITEG2P_INSTANTIATE

}  // namespace liteg2p
