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

// Fixed layer set with hand-written backward passes.
//
// Sequence tensors are (batch, time, channels) with a per-item length
// vector. Frames at t >= length are padding: layers never read them, write
// zeros there, and keep them out of statistics and gradients.
//
// Each layer caches what its backward pass needs during Forward(), so the
// usual call pattern is Forward -> (loss) -> Backward on the same object.
// Backward() accumulates into Param::grad and returns the input gradient.

#ifndef LITEG2P_NN_H_
#define LITEG2P_NN_H_

#include <span>
#include <string>
#include <vector>

#include "liteg2p/random.h"
#include "liteg2p/tensor.h"

namespace liteg2p {

using Lengths = std::span<const int>;

template <typename T>
class Embedding {
 public:
  Embedding() = default;
  // `pad_row` >= 0 reserves that row as a frozen all-zero pad embedding.
  Embedding(std::string name, int rows, int dim, int pad_row = -1);

  void Init(Rng& rng);
  Tensor<T> Forward(std::span<const int> ids, int batch, int time, Lengths lengths);
  void Backward(const Tensor<T>& dy);
  std::vector<Param<T>*> Params() { return {&table_}; }

  Param<T>& table() { return table_; }
  const Param<T>& table() const { return table_; }

 private:
  Param<T> table_;
  int pad_row_ = -1;
  std::vector<int> ids_;
  std::vector<int> lengths_;
  int time_ = 0;
};

// Stride-1 convolution over time, zero "same" padding at sequence ends.
template <typename T>
class Conv1d {
 public:
  Conv1d() = default;
  Conv1d(std::string name, int in_channels, int out_channels, int kernel);

  void Init(Rng& rng);
  Tensor<T> Forward(const Tensor<T>& x, Lengths lengths);
  Tensor<T> Backward(const Tensor<T>& dy);
  std::vector<Param<T>*> Params() { return {&kernel_, &bias_}; }

  Param<T>& kernel() { return kernel_; }
  Param<T>& bias() { return bias_; }

 private:
  Param<T> kernel_;  // (K, Cin, Cout)
  Param<T> bias_;    // (Cout)
  int in_ = 0, out_ = 0, k_ = 0;
  RowMatrix<T> columns_;  // im2col over valid frames
  std::vector<int> lengths_;
  int time_ = 0;
};

template <typename T>
class BatchNorm {
 public:
  static constexpr double kEpsilon = 1e-5;
  static constexpr double kMomentum = 0.1;

  BatchNorm() = default;
  BatchNorm(std::string name, int channels);

  void Init();
  // Training mode normalizes with statistics over valid frames and updates
  // the running estimates; inference mode uses the running estimates.
  Tensor<T> Forward(const Tensor<T>& x, Lengths lengths, bool training);
  Tensor<T> Backward(const Tensor<T>& dy);
  std::vector<Param<T>*> Params() {
    return {&gamma_, &beta_, &running_mean_, &running_var_};
  }

  Param<T>& gamma() { return gamma_; }
  Param<T>& beta() { return beta_; }
  Param<T>& running_mean() { return running_mean_; }
  Param<T>& running_var() { return running_var_; }

 private:
  Param<T> gamma_, beta_, running_mean_, running_var_;
  int channels_ = 0;
  bool training_ = false;
  RowMatrix<T> xhat_;  // valid frames only
  RowVector<T> inv_std_;
  std::vector<int> lengths_;
  int time_ = 0;
};

// Exact GELU: 0.5 x (1 + erf(x / sqrt 2)).
template <typename T>
T Gelu(T x);
template <typename T>
T GeluDerivative(T x);

template <typename T>
class GeluLayer {
 public:
  Tensor<T> Forward(const Tensor<T>& x);
  Tensor<T> Backward(const Tensor<T>& dy) const;

 private:
  Tensor<T> input_;
};

// One direction of a GRU. Gate column order in W, U and b is [z | r | h]:
//   z  = sigmoid(x W_z + h U_z + b_z)
//   r  = sigmoid(x W_r + h U_r + b_r)
//   h~ = tanh(x W_h + (r * h) U_h + b_h)
//   h' = (1 - z) * h + z * h~
template <typename T>
struct GruDirection {
  Param<T> w;  // (Cin, 3H)
  Param<T> u;  // (H, 3H)
  Param<T> b;  // (3H)
  bool reverse = false;

  // Per-step caches; step s covers the n_s longest sequences.
  std::vector<RowMatrix<T>> h_prev, z, r, cand;
};

template <typename T>
class BiGru {
 public:
  BiGru() = default;
  BiGru(std::string name, int input_size, int hidden);

  void Init(Rng& rng);
  // (B, T, Cin) -> (B, T, 2H); forward direction in [0, H), reverse in [H, 2H).
  Tensor<T> Forward(const Tensor<T>& x, Lengths lengths);
  Tensor<T> Backward(const Tensor<T>& dy);
  std::vector<Param<T>*> Params();

  int hidden() const { return hidden_; }
  GruDirection<T>& direction(int d) { return dirs_[d]; }

 private:
  void RunDirection(GruDirection<T>* dir, const Tensor<T>& x, Tensor<T>* y, int offset);
  void BackDirection(GruDirection<T>* dir, const Tensor<T>& dy, Tensor<T>* dx,
                     int offset);
  int FrameOf(const GruDirection<T>& dir, int item, int step) const;

  int input_ = 0, hidden_ = 0;
  GruDirection<T> dirs_[2];
  Tensor<T> input_cache_;
  std::vector<int> lengths_;
  std::vector<int> order_;   // items sorted by length, longest first
  std::vector<int> active_;  // active_[s] = items with length > s
  int time_ = 0;
};

template <typename T>
class Linear {
 public:
  Linear() = default;
  Linear(std::string name, int in_features, int out_features);

  void Init(Rng& rng);
  // Applies to the last dimension; any leading shape is preserved.
  Tensor<T> Forward(const Tensor<T>& x);
  Tensor<T> Backward(const Tensor<T>& dy);
  std::vector<Param<T>*> Params() { return {&weight_, &bias_}; }

  Param<T>& weight() { return weight_; }
  Param<T>& bias() { return bias_; }

 private:
  Param<T> weight_;  // (Cin, Cout)
  Param<T> bias_;
  Tensor<T> input_;
};

// Inverted dropout: survivors scaled by 1 / (1 - rate).
template <typename T>
class Dropout {
 public:
  Tensor<T> Forward(const Tensor<T>& x, double rate, Rng* rng, bool training);
  Tensor<T> Backward(const Tensor<T>& dy) const;

 private:
  std::vector<T> scale_;
};

// Row-wise over the last dimension. Rows may hold -inf entries but not only
// -inf (throws Error).
template <typename T>
Tensor<T> LogSoftmax(const Tensor<T>& x);
// Gradient w.r.t. the logits given y = LogSoftmax(x) and dL/dy.
template <typename T>
Tensor<T> LogSoftmaxBackward(const Tensor<T>& y, const Tensor<T>& dy);

}  // namespace liteg2p

#endif  // LITEG2P_NN_H_
