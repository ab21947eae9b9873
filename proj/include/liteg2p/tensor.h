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

#ifndef LITEG2P_TENSOR_H_
#define LITEG2P_TENSOR_H_

#include <algorithm>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "liteg2p/error.h"

namespace liteg2p {

template <typename T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatrixMap = Eigen::Map<RowMatrix<T>>;
template <typename T>
using ConstMatrixMap = Eigen::Map<const RowMatrix<T>>;
template <typename T>
using RowVector = Eigen::Matrix<T, 1, Eigen::Dynamic>;

std::string ShapeString(const std::vector<int>& shape);

// Dense row-major array of rank 1..3, zero-initialized.
template <typename T>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape, T fill = T(0)) : shape_(std::move(shape)) {
    if (shape_.empty() || shape_.size() > 3) {
      throw ShapeError("tensor rank must be 1..3, got shape " + ShapeString(shape_));
    }
    for (int d : shape_) {
      if (d < 0) throw ShapeError("negative extent in shape " + ShapeString(shape_));
    }
    data_.assign(Product(shape_), fill);
  }

  const std::vector<int>& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  int dim(int i) const { return shape_.at(i); }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  T& operator[](size_t i) { return data_[i]; }
  const T& operator[](size_t i) const { return data_[i]; }

  T& at(int i, int j) { return data_[static_cast<size_t>(i) * shape_[1] + j]; }
  const T& at(int i, int j) const { return data_[static_cast<size_t>(i) * shape_[1] + j]; }
  T& at(int i, int j, int k) {
    return data_[(static_cast<size_t>(i) * shape_[1] + j) * shape_[2] + k];
  }
  const T& at(int i, int j, int k) const {
    return data_[(static_cast<size_t>(i) * shape_[1] + j) * shape_[2] + k];
  }

  void Fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  // All leading dimensions flattened into rows; the last dimension is columns.
  MatrixMap<T> Matrix() { return MatrixMap<T>(data_.data(), Rows(), Cols()); }
  ConstMatrixMap<T> Matrix() const {
    return ConstMatrixMap<T>(data_.data(), Rows(), Cols());
  }

  Eigen::Index Rows() const {
    return shape_.empty() ? 0 : static_cast<Eigen::Index>(size() / shape_.back());
  }
  Eigen::Index Cols() const { return shape_.empty() ? 0 : shape_.back(); }

  bool operator==(const Tensor&) const = default;

  template <typename U>
  Tensor<U> Cast() const {
    Tensor<U> out(shape_);
    for (size_t i = 0; i < data_.size(); ++i) out[i] = static_cast<U>(data_[i]);
    return out;
  }

 private:
  static size_t Product(const std::vector<int>& shape) {
    size_t n = 1;
    for (int d : shape) n *= static_cast<size_t>(d);
    return n;
  }

  std::vector<int> shape_;
  // Eigen-aligned storage.
  std::vector<T, Eigen::aligned_allocator<T>> data_;
};

inline std::string ShapeString(const std::vector<int>& shape) {
  std::string s = "(";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + ")";
}

inline void CheckShape(const std::vector<int>& got, const std::vector<int>& want,
                       const char* what) {
  if (got != want) {
    throw ShapeError(std::string(what) + ": expected shape " + ShapeString(want) +
                     ", got " + ShapeString(got));
  }
}

// A trainable (or state) array with its gradient accumulator.
template <typename T>
struct Param {
  std::string name;
  Tensor<T> value;
  Tensor<T> grad;
  // State arrays (batch-norm running stats) are saved but never optimized.
  bool trainable = true;
  // Scalars excluded from the parameter count (frozen pad rows).
  size_t frozen = 0;

  Param() = default;
  Param(std::string n, std::vector<int> shape, bool is_trainable = true)
      : name(std::move(n)), value(shape), grad(shape), trainable(is_trainable) {}

  void ZeroGrad() { grad.Fill(T(0)); }
};

}  // namespace liteg2p

#endif  // LITEG2P_TENSOR_H_
