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

// Checkpoint container, all integers little-endian:
//
//   "LG2P"                 4-byte magic
//   u32 version            kCheckpointVersion
//   u64 n, n bytes         metadata as compact JSON with sorted keys
//   u32 count              number of arrays, then per array:
//     u32 n, n bytes       name
//     u32 rank, u32 dims[rank]
//     f32 values[prod(dims)]
//
// Metadata keys: config, vocab {mode, tokens}, split_seed, dict_fingerprint,
// expert_dict (TSV text) and, for training checkpoints, train_state.

#ifndef LITEG2P_CHECKPOINT_H_
#define LITEG2P_CHECKPOINT_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "liteg2p/model.h"

namespace liteg2p {

inline constexpr char kCheckpointMagic[4] = {'L', 'G', '2', 'P'};
inline constexpr uint32_t kCheckpointVersion = 1;

struct NamedArray {
  std::string name;
  std::vector<int> shape;
  std::vector<float> data;
};

struct CheckpointFile {
  nlohmann::json metadata;
  std::vector<NamedArray> arrays;

  const NamedArray* Find(std::string_view name) const;
};

std::string EncodeCheckpoint(const CheckpointFile& file);
// Throws CheckpointError (kBadMagic, kUnsupportedVersion, kTruncated or
// kMalformed).
CheckpointFile DecodeCheckpoint(std::string_view bytes);

// Writes through a temporary file and renames, so readers never observe a
// partial checkpoint.
void WriteCheckpointFile(const std::string& path, const CheckpointFile& file);
CheckpointFile ReadCheckpointFile(const std::string& path);

// Fresh engine: mask built from `dict`, weights initialized from `seed`.
template <typename T>
G2pEngine<T> MakeEngine(const ModelConfig& config, const ExpertDictionary& dict,
                        uint64_t seed);

template <typename T>
CheckpointFile EngineToCheckpoint(const G2pEngine<T>& engine, uint64_t split_seed);
template <typename T>
G2pEngine<T> EngineFromCheckpoint(const CheckpointFile& file);

template <typename T>
void SaveEngine(const std::string& path, const G2pEngine<T>& engine, uint64_t split_seed);
template <typename T>
G2pEngine<T> LoadEngine(const std::string& path);

// Rebuilds expansion and mask from `dict`. Returns false (and still swaps)
// when its fingerprint differs from the one the engine was trained with.
template <typename T>
bool ReplaceDictionary(G2pEngine<T>* engine, const ExpertDictionary& dict);

}  // namespace liteg2p

#endif  // LITEG2P_CHECKPOINT_H_
