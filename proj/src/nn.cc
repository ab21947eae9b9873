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

#include "liteg2p/nn.h"

#include <cmath>
#include <limits>

namespace liteg2p {

namespace {

template <typename T>
void UniformInit(Tensor<T>* t, Rng& rng, double bound) {
  for (T& v : t->values()) v = static_cast<T>(UniformRange(rng, -bound, bound));
}

void CheckLengths(Lengths lengths, int batch, int time) {
  if (static_cast<int>(lengths.size()) != batch) {
    throw ShapeError("lengths has " + std::to_string(lengths.size()) +
                     " entries for batch " + std::to_string(batch));
  }
  for (int len : lengths) {
    if (len < 0 || len > time) {
      throw ShapeError("sequence length " + std::to_string(len) +
                       " outside [0, " + std::to_string(time) + "]");
    }
  }
}

int ValidFrames(Lengths lengths) {
  int n = 0;
  for (int len : lengths) n += len;
  return n;
}

template <typename T>
auto Sigmoid(const Eigen::ArrayBase<T>& a) {
  using Scalar = typename T::Scalar;
  return (Scalar(1) + (-a).exp()).inverse();
}

}  // namespace

// ---------------------------------------------------------------- Embedding

template <typename T>
Embedding<T>::Embedding(std::string name, int rows, int dim, int pad_row)
    : table_(std::move(name), {rows, dim}), pad_row_(pad_row) {
  if (pad_row_ >= 0) table_.frozen = static_cast<size_t>(dim);
}

template <typename T>
void Embedding<T>::Init(Rng& rng) {
  for (T& v : table_.value.values()) v = static_cast<T>(Normal(rng, 0.0, 0.1));
  if (pad_row_ >= 0) {
    table_.value.Matrix().row(pad_row_).setZero();
  }
}

template <typename T>
Tensor<T> Embedding<T>::Forward(std::span<const int> ids, int batch, int time,
                                Lengths lengths) {
  if (ids.size() != static_cast<size_t>(batch) * time) {
    throw ShapeError("embedding ids size mismatch");
  }
  CheckLengths(lengths, batch, time);
  const int rows = table_.value.dim(0);
  const int dim = table_.value.dim(1);
  ids_.assign(ids.begin(), ids.end());
  lengths_.assign(lengths.begin(), lengths.end());
  time_ = time;
  Tensor<T> out({batch, time, dim});
  auto table = table_.value.Matrix();
  auto y = out.Matrix();
  for (int b = 0; b < batch; ++b) {
    for (int t = 0; t < lengths[b]; ++t) {
      const int id = ids[b * time + t];
      if (id < 0 || id >= rows) {
        throw Error("embedding id " + std::to_string(id) + " outside table of " +
                    std::to_string(rows) + " rows");
      }
      y.row(b * time + t) = table.row(id);
    }
  }
  return out;
}

template <typename T>
void Embedding<T>::Backward(const Tensor<T>& dy) {
  auto grad = table_.grad.Matrix();
  auto g = dy.Matrix();
  for (size_t b = 0; b < lengths_.size(); ++b) {
    for (int t = 0; t < lengths_[b]; ++t) {
      const int id = ids_[b * time_ + t];
      if (id == pad_row_) continue;
      grad.row(id) += g.row(b * time_ + t);
    }
  }
}

// ------------------------------------------------------------------- Conv1d

template <typename T>
Conv1d<T>::Conv1d(std::string name, int in_channels, int out_channels, int kernel)
    : kernel_(name + ".kernel", {kernel, in_channels, out_channels}),
      bias_(name + ".bias", {out_channels}),
      in_(in_channels),
      out_(out_channels),
      k_(kernel) {}

template <typename T>
void Conv1d<T>::Init(Rng& rng) {
  UniformInit(&kernel_.value, rng, std::sqrt(1.0 / (k_ * in_)));
  bias_.value.Fill(T(0));
}

template <typename T>
Tensor<T> Conv1d<T>::Forward(const Tensor<T>& x, Lengths lengths) {
  if (x.rank() != 3 || x.dim(2) != in_) {
    throw ShapeError("conv1d input " + ShapeString(x.shape()) + " needs " +
                     std::to_string(in_) + " channels");
  }
  const int batch = x.dim(0);
  time_ = x.dim(1);
  CheckLengths(lengths, batch, time_);
  lengths_.assign(lengths.begin(), lengths.end());
  const int half = k_ / 2;
  const int n = ValidFrames(lengths);

  auto xm = x.Matrix();
  columns_.setZero(n, static_cast<Eigen::Index>(k_) * in_);
  int row = 0;
  for (int b = 0; b < batch; ++b) {
    for (int t = 0; t < lengths[b]; ++t, ++row) {
      for (int k = 0; k < k_; ++k) {
        const int src = t + k - half;
        if (src < 0 || src >= lengths[b]) continue;
        columns_.row(row).segment(static_cast<Eigen::Index>(k) * in_, in_) =
            xm.row(b * time_ + src);
      }
    }
  }
  ConstMatrixMap<T> w(kernel_.value.data(), static_cast<Eigen::Index>(k_) * in_, out_);
  RowMatrix<T> yv = columns_ * w;
  yv.rowwise() += bias_.value.Matrix().row(0);

  Tensor<T> y({batch, time_, out_});
  auto ym = y.Matrix();
  row = 0;
  for (int b = 0; b < batch; ++b) {
    for (int t = 0; t < lengths[b]; ++t, ++row) ym.row(b * time_ + t) = yv.row(row);
  }
  return y;
}

template <typename T>
Tensor<T> Conv1d<T>::Backward(const Tensor<T>& dy) {
  const int batch = static_cast<int>(lengths_.size());
  CheckShape(dy.shape(), {batch, time_, out_}, "conv1d backward");
  const int n = static_cast<int>(columns_.rows());
  const int half = k_ / 2;
  auto dym = dy.Matrix();
  RowMatrix<T> dyv(n, out_);
  int row = 0;
  for (int b = 0; b < batch; ++b) {
    for (int t = 0; t < lengths_[b]; ++t, ++row) dyv.row(row) = dym.row(b * time_ + t);
  }
  MatrixMap<T> dw(kernel_.grad.data(), static_cast<Eigen::Index>(k_) * in_, out_);
  dw.noalias() += columns_.transpose() * dyv;
  bias_.grad.Matrix() += dyv.colwise().sum();

  ConstMatrixMap<T> w(kernel_.value.data(), static_cast<Eigen::Index>(k_) * in_, out_);
  RowMatrix<T> dcol = dyv * w.transpose();
  Tensor<T> dx({batch, time_, in_});
  auto dxm = dx.Matrix();
  row = 0;
  for (int b = 0; b < batch; ++b) {
    for (int t = 0; t < lengths_[b]; ++t, ++row) {
      for (int k = 0; k < k_; ++k) {
        const int src = t + k - half;
        if (src < 0 || src >= lengths_[b]) continue;
        dxm.row(b * time_ + src) +=
            dcol.row(row).segment(static_cast<Eigen::Index>(k) * in_, in_);
      }
    }
  }
  return dx;
}

// ---------------------------------------------------------------- BatchNorm

template <typename T>
BatchNorm<T>::BatchNorm(std::string name, int channels)
    : gamma_(name + ".gamma", {channels}),
      beta_(name + ".beta", {channels}),
      running_mean_(name + ".running_mean", {channels}, false),
      running_var_(name + ".running_var", {channels}, false),
      channels_(channels) {
  Init();
}

template <typename T>
void BatchNorm<T>::Init() {
  gamma_.value.Fill(T(1));
  beta_.value.Fill(T(0));
  running_mean_.value.Fill(T(0));
  running_var_.value.Fill(T(1));
}

template <typename T>
Tensor<T> BatchNorm<T>::Forward(const Tensor<T>& x, Lengths lengths, bool training) {
  if (x.rank() != 3 || x.dim(2) != channels_) {
    throw ShapeError("batch norm input " + ShapeString(x.shape()) + " needs " +
                     std::to_string(channels_) + " channels");
  }
  const int batch = x.dim(0);
  time_ = x.dim(1);
  CheckLengths(lengths, batch, time_);
  lengths_.assign(lengths.begin(), lengths.end());
  training_ = training;
  const int n = ValidFrames(lengths);
  if (n == 0) throw Error("batch norm over zero valid frames");

  auto xm = x.Matrix();
  RowMatrix<T> xv(n, channels_);
  int row = 0;
  for (int b = 0; b < batch; ++b) {
    for (int t = 0; t < lengths[b]; ++t, ++row) xv.row(row) = xm.row(b * time_ + t);
  }

  RowVector<T> mean, var;
  if (training) {
    mean = xv.colwise().mean();
    xv.rowwise() -= mean;
    var = xv.array().square().colwise().mean().matrix();
    const T unbias = n > 1 ? T(n) / T(n - 1) : T(1);
    auto rm = running_mean_.value.Matrix();
    auto rv = running_var_.value.Matrix();
    const T m = T(kMomentum);
    rm = (T(1) - m) * rm + m * mean;
    rv = (T(1) - m) * rv + m * unbias * var;
  } else {
    mean = running_mean_.value.Matrix();
    var = running_var_.value.Matrix();
    xv.rowwise() -= mean;
  }
  inv_std_ = (var.array() + T(kEpsilon)).rsqrt().matrix();
  xhat_ = xv.array().rowwise() * inv_std_.array();

  Tensor<T> y({batch, time_, channels_});
  auto ym = y.Matrix();
  const auto gamma = gamma_.value.Matrix().array();
  const auto beta = beta_.value.Matrix().array();
  row = 0;
  for (int b = 0; b < batch; ++b) {
    for (int t = 0; t < lengths[b]; ++t, ++row) {
      ym.row(b * time_ + t) = (xhat_.row(row).array() * gamma + beta).matrix();
    }
  }
  return y;
}

template <typename T>
Tensor<T> BatchNorm<T>::Backward(const Tensor<T>& dy) {
  const int batch = static_cast<int>(lengths_.size());
  CheckShape(dy.shape(), {batch, time_, channels_}, "batch norm backward");
  const int n = static_cast<int>(xhat_.rows());
  auto dym = dy.Matrix();
  RowMatrix<T> dyv(n, channels_);
  int row = 0;
  for (int b = 0; b < batch; ++b) {
    for (int t = 0; t < lengths_[b]; ++t, ++row) dyv.row(row) = dym.row(b * time_ + t);
  }
  gamma_.grad.Matrix() += dyv.cwiseProduct(xhat_).colwise().sum();
  beta_.grad.Matrix() += dyv.colwise().sum();

  const RowVector<T> gamma = gamma_.value.Matrix();
  RowMatrix<T> dxhat = dyv.array().rowwise() * gamma.array();
  RowMatrix<T> dxv;
  if (training_) {
    const RowVector<T> sum_dxhat = dxhat.colwise().sum();
    const RowVector<T> sum_dxhat_xhat = dxhat.cwiseProduct(xhat_).colwise().sum();
    RowMatrix<T> centered = T(n) * dxhat;
    centered.rowwise() -= sum_dxhat;
    centered.array() -= xhat_.array().rowwise() * sum_dxhat_xhat.array();
    dxv = centered.array().rowwise() * (inv_std_.array() / T(n));
  } else {
    dxv = dxhat.array().rowwise() * inv_std_.array();
  }

  Tensor<T> dx({batch, time_, channels_});
  auto dxm = dx.Matrix();
  row = 0;
  for (int b = 0; b < batch; ++b) {
    for (int t = 0; t < lengths_[b]; ++t, ++row) dxm.row(b * time_ + t) = dxv.row(row);
  }
  return dx;
}

// --------------------------------------------------------------------- GELU

template <typename T>
T Gelu(T x) {
  return T(0.5) * x * (T(1) + std::erf(x / std::sqrt(T(2))));
}

template <typename T>
T GeluDerivative(T x) {
  const T cdf = T(0.5) * (T(1) + std::erf(x / std::sqrt(T(2))));
  const T pdf = std::exp(T(-0.5) * x * x) / std::sqrt(T(2) * T(M_PI));
  return cdf + x * pdf;
}

template <typename T>
Tensor<T> GeluLayer<T>::Forward(const Tensor<T>& x) {
  input_ = x;
  Tensor<T> y(x.shape());
  for (size_t i = 0; i < x.size(); ++i) y[i] = Gelu(x[i]);
  return y;
}

template <typename T>
Tensor<T> GeluLayer<T>::Backward(const Tensor<T>& dy) const {
  CheckShape(dy.shape(), input_.shape(), "gelu backward");
  Tensor<T> dx(dy.shape());
  for (size_t i = 0; i < dy.size(); ++i) dx[i] = dy[i] * GeluDerivative(input_[i]);
  return dx;
}

// -------------------------------------------------------------------- BiGRU

template <typename T>
BiGru<T>::BiGru(std::string name, int input_size, int hidden)
    : input_(input_size), hidden_(hidden) {
  const char* suffix[2] = {".fwd", ".bwd"};
  for (int d = 0; d < 2; ++d) {
    const std::string prefix = name + suffix[d];
    dirs_[d].w = Param<T>(prefix + ".w", {input_size, 3 * hidden});
    dirs_[d].u = Param<T>(prefix + ".u", {hidden, 3 * hidden});
    dirs_[d].b = Param<T>(prefix + ".b", {3 * hidden});
    dirs_[d].reverse = d == 1;
  }
}

template <typename T>
void BiGru<T>::Init(Rng& rng) {
  const double bound = std::sqrt(1.0 / hidden_);
  for (auto& dir : dirs_) {
    UniformInit(&dir.w.value, rng, bound);
    UniformInit(&dir.u.value, rng, bound);
    dir.b.value.Fill(T(0));
  }
}

template <typename T>
std::vector<Param<T>*> BiGru<T>::Params() {
  return {&dirs_[0].w, &dirs_[0].u, &dirs_[0].b,
          &dirs_[1].w, &dirs_[1].u, &dirs_[1].b};
}

template <typename T>
int BiGru<T>::FrameOf(const GruDirection<T>& dir, int item, int step) const {
  return dir.reverse ? lengths_[item] - 1 - step : step;
}

template <typename T>
Tensor<T> BiGru<T>::Forward(const Tensor<T>& x, Lengths lengths) {
  if (x.rank() != 3 || x.dim(2) != input_) {
    throw ShapeError("bigru input " + ShapeString(x.shape()) + " needs " +
                     std::to_string(input_) + " features");
  }
  const int batch = x.dim(0);
  time_ = x.dim(1);
  CheckLengths(lengths, batch, time_);
  lengths_.assign(lengths.begin(), lengths.end());
  input_cache_ = x;

  order_.resize(batch);
  for (int b = 0; b < batch; ++b) order_[b] = b;
  std::stable_sort(order_.begin(), order_.end(),
                   [&](int a, int b) { return lengths_[a] > lengths_[b]; });
  const int steps = batch > 0 ? lengths_[order_[0]] : 0;
  active_.assign(steps, 0);
  for (int s = 0; s < steps; ++s) {
    for (int len : lengths_) active_[s] += len > s ? 1 : 0;
  }

  Tensor<T> y({batch, time_, 2 * hidden_});
  RunDirection(&dirs_[0], x, &y, 0);
  RunDirection(&dirs_[1], x, &y, hidden_);
  return y;
}

template <typename T>
void BiGru<T>::RunDirection(GruDirection<T>* dir, const Tensor<T>& x, Tensor<T>* y,
                            int offset) {
  const int h = hidden_;
  const int steps = static_cast<int>(active_.size());
  RowMatrix<T> xp = x.Matrix() * dir->w.value.Matrix();
  xp.rowwise() += dir->b.value.Matrix().row(0);
  const auto u = dir->u.value.Matrix();

  dir->h_prev.resize(steps);
  dir->z.resize(steps);
  dir->r.resize(steps);
  dir->cand.resize(steps);

  auto ym = y->Matrix();
  RowMatrix<T> state = RowMatrix<T>::Zero(steps > 0 ? active_[0] : 0, h);
  RowMatrix<T> a;
  for (int s = 0; s < steps; ++s) {
    const int n = active_[s];
    dir->h_prev[s] = state.topRows(n);
    const RowMatrix<T>& hp = dir->h_prev[s];
    a.resize(n, 3 * h);
    for (int i = 0; i < n; ++i) {
      const int item = order_[i];
      a.row(i) = xp.row(item * time_ + FrameOf(*dir, item, s));
    }
    RowMatrix<T> g = hp * u.leftCols(2 * h);
    dir->z[s] = Sigmoid((a.leftCols(h) + g.leftCols(h)).array()).matrix();
    dir->r[s] = Sigmoid((a.middleCols(h, h) + g.rightCols(h)).array()).matrix();
    RowMatrix<T> rh = dir->r[s].cwiseProduct(hp);
    dir->cand[s] = (a.rightCols(h) + rh * u.rightCols(h)).array().tanh().matrix();
    const auto z = dir->z[s].array();
    state = ((T(1) - z) * hp.array() + z * dir->cand[s].array()).matrix();
    for (int i = 0; i < n; ++i) {
      const int item = order_[i];
      ym.row(item * time_ + FrameOf(*dir, item, s)).segment(offset, h) = state.row(i);
    }
  }
}

template <typename T>
Tensor<T> BiGru<T>::Backward(const Tensor<T>& dy) {
  const int batch = static_cast<int>(lengths_.size());
  CheckShape(dy.shape(), {batch, time_, 2 * hidden_}, "bigru backward");
  Tensor<T> dx({batch, time_, input_});
  BackDirection(&dirs_[0], dy, &dx, 0);
  BackDirection(&dirs_[1], dy, &dx, hidden_);
  return dx;
}

template <typename T>
void BiGru<T>::BackDirection(GruDirection<T>* dir, const Tensor<T>& dy, Tensor<T>* dx,
                             int offset) {
  const int h = hidden_;
  const int steps = static_cast<int>(active_.size());
  const int batch = static_cast<int>(lengths_.size());
  const auto u = dir->u.value.Matrix();
  auto du = dir->u.grad.Matrix();
  const auto dym = dy.Matrix();

  RowMatrix<T> dxp = RowMatrix<T>::Zero(static_cast<Eigen::Index>(batch) * time_, 3 * h);
  RowMatrix<T> carry;  // dL/dh flowing back from step s + 1
  RowMatrix<T> dh, dgates;
  for (int s = steps - 1; s >= 0; --s) {
    const int n = active_[s];
    const RowMatrix<T>& hp = dir->h_prev[s];
    const RowMatrix<T>& zm = dir->z[s];
    const RowMatrix<T>& rm = dir->r[s];
    const RowMatrix<T>& cm = dir->cand[s];

    dh.resize(n, h);
    for (int i = 0; i < n; ++i) {
      const int item = order_[i];
      dh.row(i) = dym.row(item * time_ + FrameOf(*dir, item, s)).segment(offset, h);
    }
    if (carry.rows() > 0) dh.topRows(carry.rows()) += carry;

    const auto z = zm.array();
    const auto r = rm.array();
    const auto c = cm.array();
    dgates.resize(n, 3 * h);
    // Candidate pre-activation.
    dgates.rightCols(h) = (dh.array() * z * (T(1) - c.square())).matrix();
    RowMatrix<T> dhp = (dh.array() * (T(1) - z)).matrix();
    const RowMatrix<T> rh = rm.cwiseProduct(hp);
    du.rightCols(h).noalias() += rh.transpose() * dgates.rightCols(h);
    const RowMatrix<T> drh = dgates.rightCols(h) * u.rightCols(h).transpose();
    dhp += drh.cwiseProduct(rm);
    // Update and reset gate pre-activations.
    dgates.leftCols(h) =
        (dh.array() * (c - hp.array()) * z * (T(1) - z)).matrix();
    dgates.middleCols(h, h) = (drh.array() * hp.array() * r * (T(1) - r)).matrix();
    du.leftCols(2 * h).noalias() += hp.transpose() * dgates.leftCols(2 * h);
    dhp.noalias() += dgates.leftCols(2 * h) * u.leftCols(2 * h).transpose();

    for (int i = 0; i < n; ++i) {
      const int item = order_[i];
      dxp.row(item * time_ + FrameOf(*dir, item, s)) = dgates.row(i);
    }
    carry = std::move(dhp);
  }

  dir->w.grad.Matrix().noalias() += input_cache_.Matrix().transpose() * dxp;
  dir->b.grad.Matrix() += dxp.colwise().sum();
  dx->Matrix().noalias() += dxp * dir->w.value.Matrix().transpose();
}

// ------------------------------------------------------------------- Linear

template <typename T>
Linear<T>::Linear(std::string name, int in_features, int out_features)
    : weight_(name + ".weight", {in_features, out_features}),
      bias_(name + ".bias", {out_features}) {}

template <typename T>
void Linear<T>::Init(Rng& rng) {
  UniformInit(&weight_.value, rng, std::sqrt(1.0 / weight_.value.dim(0)));
  bias_.value.Fill(T(0));
}

template <typename T>
Tensor<T> Linear<T>::Forward(const Tensor<T>& x) {
  if (x.Cols() != weight_.value.dim(0)) {
    throw ShapeError("linear input " + ShapeString(x.shape()) + " vs weight " +
                     ShapeString(weight_.value.shape()));
  }
  input_ = x;
  std::vector<int> shape = x.shape();
  shape.back() = weight_.value.dim(1);
  Tensor<T> y(shape);
  auto ym = y.Matrix();
  ym.noalias() = x.Matrix() * weight_.value.Matrix();
  ym.rowwise() += bias_.value.Matrix().row(0);
  return y;
}

template <typename T>
Tensor<T> Linear<T>::Backward(const Tensor<T>& dy) {
  std::vector<int> want = input_.shape();
  want.back() = weight_.value.dim(1);
  CheckShape(dy.shape(), want, "linear backward");
  weight_.grad.Matrix().noalias() += input_.Matrix().transpose() * dy.Matrix();
  bias_.grad.Matrix() += dy.Matrix().colwise().sum();
  Tensor<T> dx(input_.shape());
  dx.Matrix().noalias() = dy.Matrix() * weight_.value.Matrix().transpose();
  return dx;
}

// ------------------------------------------------------------------ Dropout

template <typename T>
Tensor<T> Dropout<T>::Forward(const Tensor<T>& x, double rate, Rng* rng,
                              bool training) {
  if (rate < 0.0 || rate >= 1.0) {
    throw ConfigError("dropout rate must be in [0, 1), got " + std::to_string(rate));
  }
  scale_.clear();
  if (!training || rate == 0.0) return x;
  if (rng == nullptr) throw Error("training-mode dropout needs an RNG");
  const T keep_scale = static_cast<T>(1.0 / (1.0 - rate));
  scale_.resize(x.size());
  Tensor<T> y(x.shape());
  for (size_t i = 0; i < x.size(); ++i) {
    scale_[i] = UniformUnit(*rng) < rate ? T(0) : keep_scale;
    y[i] = x[i] * scale_[i];
  }
  return y;
}

template <typename T>
Tensor<T> Dropout<T>::Backward(const Tensor<T>& dy) const {
  if (scale_.empty()) return dy;
  if (scale_.size() != dy.size()) throw ShapeError("dropout backward size mismatch");
  Tensor<T> dx(dy.shape());
  for (size_t i = 0; i < dy.size(); ++i) dx[i] = dy[i] * scale_[i];
  return dx;
}

// --------------------------------------------------------------- LogSoftmax

template <typename T>
Tensor<T> LogSoftmax(const Tensor<T>& x) {
  Tensor<T> y(x.shape());
  const Eigen::Index rows = x.Rows(), cols = x.Cols();
  const T neg_inf = -std::numeric_limits<T>::infinity();
  for (Eigen::Index i = 0; i < rows; ++i) {
    const T* in = x.data() + i * cols;
    T* out = y.data() + i * cols;
    T m = neg_inf;
    for (Eigen::Index j = 0; j < cols; ++j) m = std::max(m, in[j]);
    if (m == neg_inf) throw Error("log_softmax row has no finite entry");
    T sum = 0;
    for (Eigen::Index j = 0; j < cols; ++j) sum += std::exp(in[j] - m);
    const T log_z = m + std::log(sum);
    for (Eigen::Index j = 0; j < cols; ++j) out[j] = in[j] - log_z;
  }
  return y;
}

template <typename T>
Tensor<T> LogSoftmaxBackward(const Tensor<T>& y, const Tensor<T>& dy) {
  CheckShape(dy.shape(), y.shape(), "log_softmax backward");
  Tensor<T> dx(y.shape());
  const Eigen::Index rows = y.Rows(), cols = y.Cols();
  for (Eigen::Index i = 0; i < rows; ++i) {
    const T* yo = y.data() + i * cols;
    const T* g = dy.data() + i * cols;
    T* out = dx.data() + i * cols;
    T sum = 0;
    for (Eigen::Index j = 0; j < cols; ++j) sum += g[j];
    for (Eigen::Index j = 0; j < cols; ++j) out[j] = g[j] - std::exp(yo[j]) * sum;
  }
  return dx;
}

#define LITEG2P_INSTANTIATE(T)                                            \
  template class Embedding<T>;                                            \
  template class Conv1d<T>;                                               \
  template class BatchNorm<T>;                                            \
  template class GeluLayer<T>;                                            \
  template class BiGru<T>;                                                \
  template class Linear<T>;                                               \
  template class Dropout<T>;                                              \
  template T Gelu<T>(T);                                                  \
  template T GeluDerivative<T>(T);                                        \
  template Tensor<T> LogSoftmax<T>(const Tensor<T>&);                     \
  template Tensor<T> LogSoftmaxBackward<T>(const Tensor<T>&, const Tensor<T>&);

LITEG2P_INSTANTIATE(float)
LITEG2P_INSTANTIATE(double)

#undef LITEG2P_INSTANTIATE

}  // namespace liteg2p
