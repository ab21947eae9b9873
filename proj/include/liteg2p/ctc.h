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

#ifndef LITEG2P_CTC_H_
#define LITEG2P_CTC_H_

#include <cstdint>
#include <span>
#include <vector>

#include "liteg2p/tensor.h"

namespace liteg2p {

struct CtcTarget {
  std::vector<int> labels;
  // blank, l1, blank, l2, ..., blank (length 2 * |labels| + 1).
  std::vector<int> extended;
  int blank = 0;

  static CtcTarget Make(std::vector<int> labels, int blank = 0);
  // Fewest frames that can emit the labels: one per label plus one blank
  // between each pair of equal neighbours.
  int MinFrames() const;
};

// Frames x vocabulary log-probabilities, row-major.
template <typename T>
struct LogProbView {
  const T* data = nullptr;
  int frames = 0;
  int vocab = 0;

  T at(int t, int v) const { return data[static_cast<size_t>(t) * vocab + v]; }
};

template <typename T>
LogProbView<T> ViewOf(const Tensor<T>& logprobs) {
  if (logprobs.rank() != 2) throw ShapeError("CTC expects a (frames, vocab) tensor");
  return {logprobs.data(), logprobs.dim(0), logprobs.dim(1)};
}

struct CtcResult {
  double loss = 0.0;  // +inf when infeasible
  bool feasible = true;
  // d loss / d logprob[t][v], each entry treated as an independent input.
  // Rows sum to -1 on feasible targets; all zero when infeasible.
  Tensor<double> grad;
};

// Negative log-likelihood of `target` summed over all alignments, with the
// alpha/beta recursions in log space.
template <typename T>
CtcResult CtcLoss(LogProbView<T> logprobs, const CtcTarget& target);

// Enumerates all vocab^frames paths. Reference implementation for tests;
// throws Error above 10^6 paths.
double CtcBruteForce(LogProbView<double> logprobs, const std::vector<int>& labels,
                     int blank = 0);

// Merges adjacent repeats, then drops blanks.
std::vector<int> CtcCollapse(std::span<const int> path, int blank = 0);

// Best path: per-frame argmax (ties to the lowest id), then collapse.
template <typename T>
std::vector<int> GreedyDecode(LogProbView<T> logprobs, int blank = 0);

// Whether some alignment of `target` uses only permitted symbols on every
// frame. `frame_masks[t]` points at `vocab` 0/1 flags for frame t.
bool CtcAlignable(std::span<const uint8_t* const> frame_masks, const CtcTarget& target);

}  // namespace liteg2p

#endif  // LITEG2P_CTC_H_
