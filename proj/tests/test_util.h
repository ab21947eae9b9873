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

// Helpers shared by the test binaries.

#ifndef LITEG2P_TESTS_TEST_UTIL_H_
#define LITEG2P_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "liteg2p/lexicon.h"
#include "liteg2p/random.h"
#include "liteg2p/tensor.h"

namespace liteg2p::testing {

inline constexpr double kFdStep = 1e-4;
inline constexpr double kFdTolerance = 1e-4;

// |a - b| / max(|a|, |b|), with differences below `floor` treated as equal
// so that gradients that are zero up to rounding do not divide by ~0.
inline double RelativeError(double a, double b, double floor = 1e-9) {
  const double diff = std::abs(a - b);
  if (diff < floor) return 0.0;
  return diff / std::max(std::abs(a), std::abs(b));
}

inline Tensor<double> RandomTensor(std::vector<int> shape, Rng& rng, double scale = 1.0) {
  Tensor<double> t(std::move(shape));
  for (size_t i = 0; i < t.size(); ++i) t[i] = Normal(rng, 0.0, scale);
  return t;
}

inline std::vector<int> RandomLengths(int batch, int max_len, Rng& rng) {
  std::vector<int> lengths(batch);
  for (int b = 0; b < batch; ++b) lengths[b] = 1 + static_cast<int>(UniformIndex(rng, max_len));
  lengths[UniformIndex(rng, batch)] = max_len;
  return lengths;
}

inline double Dot(const Tensor<double>& a, const Tensor<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Largest relative error between `analytic[i]` and the central difference
// of `loss` with respect to `values[i]`, over every index or over a random
// subset of `max_probes` indices.
inline double MaxGradError(std::vector<double>* values, const std::vector<double>& analytic,
                           const std::function<double()>& loss, Rng& rng,
                           size_t max_probes = 0) {
  std::vector<size_t> probes(values->size());
  for (size_t i = 0; i < probes.size(); ++i) probes[i] = i;
  if (max_probes > 0 && probes.size() > max_probes) {
    Shuffle(&probes, rng);
    probes.resize(max_probes);
  }
  double worst = 0.0;
  for (size_t i : probes) {
    const double saved = (*values)[i];
    (*values)[i] = saved + kFdStep;
    const double up = loss();
    (*values)[i] = saved - kFdStep;
    const double down = loss();
    (*values)[i] = saved;
    worst = std::max(worst, RelativeError(analytic[i], (up - down) / (2 * kFdStep)));
  }
  return worst;
}

// Same over the storage of a tensor.
inline double MaxGradError(Tensor<double>* values, const Tensor<double>& analytic,
                           const std::function<double()>& loss, Rng& rng,
                           size_t max_probes = 0) {
  std::vector<double> flat(values->values().begin(), values->values().end());
  std::vector<double> grad(analytic.values().begin(), analytic.values().end());
  auto wrapped = [&]() {
    std::copy(flat.begin(), flat.end(), values->data());
    return loss();
  };
  const double worst = MaxGradError(&flat, grad, wrapped, rng, max_probes);
  std::copy(flat.begin(), flat.end(), values->data());
  return worst;
}

// Fresh directory under the system temp path, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("liteg2p_" + tag + "_" + std::to_string(std::random_device{}()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string File(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

// Lexicon where letter i of a fixed 10-letter alphabet always reads as one
// fixed phoneme, so the mapping is learnable by construction. No letter is
// doubled, so every target fits the default dictionary's expansion.
inline std::vector<LexiconEntry> SyntheticLexicon(int words, uint64_t seed) {
  static const char kLetters[] = "abdefklmst";
  static const char* kPhones[] = {"AE1", "B", "D", "EH1", "F", "K", "L", "M", "S", "T"};
  Rng rng(seed);
  std::vector<LexiconEntry> out;
  std::vector<std::string> seen;
  while (static_cast<int>(out.size()) < words) {
    const int len = 3 + static_cast<int>(UniformIndex(rng, 5));
    LexiconEntry e;
    for (int i = 0; i < len; ++i) {
      int k = static_cast<int>(UniformIndex(rng, 10));
      while (!e.spelling.empty() && e.spelling.back() == kLetters[k]) {
        k = static_cast<int>(UniformIndex(rng, 10));
      }
      e.spelling.push_back(kLetters[k]);
      e.pronunciation.push_back(kPhones[k]);
    }
    if (std::find(seen.begin(), seen.end(), e.spelling) != seen.end()) continue;
    seen.push_back(e.spelling);
    out.push_back(std::move(e));
  }
  std::sort(out.begin(), out.end(),
            [](const LexiconEntry& a, const LexiconEntry& b) { return a.spelling < b.spelling; });
  return out;
}

}  // namespace liteg2p::testing

#endif  // LITEG2P_TESTS_TEST_UTIL_H_
