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

#include "liteg2p/ctc.h"

#include <cmath>
#include <limits>

namespace liteg2p {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double LogAdd(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

// Whether state s may be entered from s - 2 (skipping the blank between).
inline bool CanSkip(const std::vector<int>& ext, int s) {
  return s >= 2 && ext[s] != ext[0] && ext[s] != ext[s - 2];
}

}  // namespace

CtcTarget CtcTarget::Make(std::vector<int> labels, int blank) {
  CtcTarget target;
  target.blank = blank;
  target.extended.reserve(2 * labels.size() + 1);
  target.extended.push_back(blank);
  for (int l : labels) {
    if (l == blank) throw Error("CTC target contains the blank label");
    target.extended.push_back(l);
    target.extended.push_back(blank);
  }
  target.labels = std::move(labels);
  return target;
}

int CtcTarget::MinFrames() const {
  int n = static_cast<int>(labels.size());
  for (size_t i = 1; i < labels.size(); ++i) {
    if (labels[i] == labels[i - 1]) ++n;
  }
  return n;
}

template <typename T>
CtcResult CtcLoss(LogProbView<T> lp, const CtcTarget& target) {
  const int frames = lp.frames;
  const int vocab = lp.vocab;
  const std::vector<int>& ext = target.extended;
  const int states = static_cast<int>(ext.size());
  for (int v : ext) {
    if (v < 0 || v >= vocab) throw Error("CTC label outside the vocabulary");
  }

  CtcResult result;
  result.grad = Tensor<double>({frames, vocab});
  if (frames == 0 || target.MinFrames() > frames) {
    result.loss = std::numeric_limits<double>::infinity();
    result.feasible = target.labels.empty() && frames == 0;
    if (result.feasible) result.loss = 0.0;
    return result;
  }

  auto emit = [&](int t, int s) { return static_cast<double>(lp.at(t, ext[s])); };
  std::vector<double> alpha(static_cast<size_t>(frames) * states, kNegInf);
  std::vector<double> beta(static_cast<size_t>(frames) * states, kNegInf);
  auto a = [&](int t, int s) -> double& { return alpha[static_cast<size_t>(t) * states + s]; };
  auto b = [&](int t, int s) -> double& { return beta[static_cast<size_t>(t) * states + s]; };

  a(0, 0) = emit(0, 0);
  if (states > 1) a(0, 1) = emit(0, 1);
  for (int t = 1; t < frames; ++t) {
    for (int s = 0; s < states; ++s) {
      double acc = a(t - 1, s);
      if (s >= 1) acc = LogAdd(acc, a(t - 1, s - 1));
      if (CanSkip(ext, s)) acc = LogAdd(acc, a(t - 1, s - 2));
      a(t, s) = acc == kNegInf ? kNegInf : acc + emit(t, s);
    }
  }
  const int last = frames - 1;
  double log_p = a(last, states - 1);
  if (states > 1) log_p = LogAdd(log_p, a(last, states - 2));

  if (log_p == kNegInf) {
    result.loss = std::numeric_limits<double>::infinity();
    result.feasible = false;
    return result;
  }
  result.loss = -log_p;

  b(last, states - 1) = emit(last, states - 1);
  if (states > 1) b(last, states - 2) = emit(last, states - 2);
  for (int t = last - 1; t >= 0; --t) {
    for (int s = 0; s < states; ++s) {
      double acc = b(t + 1, s);
      if (s + 1 < states) acc = LogAdd(acc, b(t + 1, s + 1));
      if (s + 2 < states && CanSkip(ext, s + 2)) acc = LogAdd(acc, b(t + 1, s + 2));
      b(t, s) = acc == kNegInf ? kNegInf : acc + emit(t, s);
    }
  }

  // Occupancy of state s at frame t is alpha * beta / emission.
  std::vector<double> occ(vocab);
  for (int t = 0; t < frames; ++t) {
    std::fill(occ.begin(), occ.end(), kNegInf);
    for (int s = 0; s < states; ++s) {
      const double g = a(t, s) + b(t, s);
      if (g == kNegInf) continue;
      occ[ext[s]] = LogAdd(occ[ext[s]], g - emit(t, s));
    }
    for (int v = 0; v < vocab; ++v) {
      result.grad.at(t, v) = occ[v] == kNegInf ? 0.0 : -std::exp(occ[v] - log_p);
    }
  }
  return result;
}

std::vector<int> CtcCollapse(std::span<const int> path, int blank) {
  std::vector<int> out;
  int prev = -1;
  for (int p : path) {
    if (p != prev && p != blank) out.push_back(p);
    prev = p;
  }
  return out;
}

double CtcBruteForce(LogProbView<double> lp, const std::vector<int>& labels, int blank) {
  double paths = 1.0;
  for (int t = 0; t < lp.frames; ++t) {
    paths *= lp.vocab;
    if (paths > 1e6) throw Error("brute-force CTC search space too large");
  }
  const long total = static_cast<long>(paths);
  std::vector<int> path(lp.frames, 0);
  double sum = 0.0;
  for (long code = 0; code < total; ++code) {
    long rest = code;
    double log_prob = 0.0;
    for (int t = lp.frames - 1; t >= 0; --t) {
      path[t] = static_cast<int>(rest % lp.vocab);
      rest /= lp.vocab;
      log_prob += lp.at(t, path[t]);
    }
    if (CtcCollapse(path, blank) == labels) sum += std::exp(log_prob);
  }
  if (sum <= 0.0) return std::numeric_limits<double>::infinity();
  return -std::log(sum);
}

template <typename T>
std::vector<int> GreedyDecode(LogProbView<T> lp, int blank) {
  std::vector<int> path(lp.frames);
  for (int t = 0; t < lp.frames; ++t) {
    int best = 0;
    for (int v = 1; v < lp.vocab; ++v) {
      if (lp.at(t, v) > lp.at(t, best)) best = v;
    }
    path[t] = best;
  }
  return CtcCollapse(path, blank);
}

bool CtcAlignable(std::span<const uint8_t* const> frame_masks, const CtcTarget& target) {
  const int frames = static_cast<int>(frame_masks.size());
  const std::vector<int>& ext = target.extended;
  const int states = static_cast<int>(ext.size());
  if (frames == 0) return target.labels.empty();
  if (target.MinFrames() > frames) return false;
  std::vector<uint8_t> reach(states, 0), next(states, 0);
  reach[0] = frame_masks[0][ext[0]];
  if (states > 1) reach[1] = frame_masks[0][ext[1]];
  for (int t = 1; t < frames; ++t) {
    for (int s = 0; s < states; ++s) {
      const bool from = reach[s] || (s >= 1 && reach[s - 1]) ||
                        (CanSkip(ext, s) && reach[s - 2]);
      next[s] = from && frame_masks[t][ext[s]];
    }
    reach.swap(next);
  }
  return reach[states - 1] || (states > 1 && reach[states - 2]);
}

template CtcResult CtcLoss<float>(LogProbView<float>, const CtcTarget&);
template CtcResult CtcLoss<double>(LogProbView<double>, const CtcTarget&);
template std::vector<int> GreedyDecode<float>(LogProbView<float>, int);
template std::vector<int> GreedyDecode<double>(LogProbView<double>, int);

}  // namespace liteg2p
