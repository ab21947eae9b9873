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

#include "liteg2p/checkpoint.h"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

namespace liteg2p {

namespace {

void PutU32(std::string* out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void PutU64(std::string* out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::string_view Take(size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) {
      throw CheckpointError(CheckpointErrorKind::kTruncated,
                            std::string("checkpoint truncated while reading ") + what);
    }
    std::string_view out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  uint32_t U32(const char* what) {
    std::string_view b = Take(4, what);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<uint8_t>(b[i])) << (8 * i);
    return v;
  }

  uint64_t U64(const char* what) {
    std::string_view b = Take(8, what);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<uint8_t>(b[i])) << (8 * i);
    return v;
  }

  bool AtEnd() const { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  size_t pos_ = 0;
};

CheckpointError Malformed(const std::string& what) {
  return CheckpointError(CheckpointErrorKind::kMalformed, what);
}

}  // namespace

const NamedArray* CheckpointFile::Find(std::string_view name) const {
  for (const NamedArray& a : arrays) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

std::string EncodeCheckpoint(const CheckpointFile& file) {
  std::string out(kCheckpointMagic, sizeof(kCheckpointMagic));
  PutU32(&out, kCheckpointVersion);
  const std::string meta = file.metadata.dump();
  PutU64(&out, meta.size());
  out += meta;
  PutU32(&out, static_cast<uint32_t>(file.arrays.size()));
  for (const NamedArray& a : file.arrays) {
    PutU32(&out, static_cast<uint32_t>(a.name.size()));
    out += a.name;
    PutU32(&out, static_cast<uint32_t>(a.shape.size()));
    size_t count = 1;
    for (int d : a.shape) {
      PutU32(&out, static_cast<uint32_t>(d));
      count *= static_cast<size_t>(d);
    }
    if (count != a.data.size()) throw Error("array '" + a.name + "' shape/data mismatch");
    for (float v : a.data) PutU32(&out, std::bit_cast<uint32_t>(v));
  }
  return out;
}

CheckpointFile DecodeCheckpoint(std::string_view bytes) {
  Reader in(bytes);
  std::string_view magic = in.Take(sizeof(kCheckpointMagic), "magic");
  if (std::memcmp(magic.data(), kCheckpointMagic, sizeof(kCheckpointMagic)) != 0) {
    throw CheckpointError(CheckpointErrorKind::kBadMagic, "not a liteg2p checkpoint (bad magic)");
  }
  const uint32_t version = in.U32("version");
  if (version != kCheckpointVersion) {
    throw CheckpointError(CheckpointErrorKind::kUnsupportedVersion,
                          "unsupported checkpoint version " + std::to_string(version));
  }
  CheckpointFile file;
  const uint64_t meta_len = in.U64("metadata length");
  std::string_view meta = in.Take(meta_len, "metadata");
  try {
    file.metadata = nlohmann::json::parse(meta);
  } catch (const nlohmann::json::exception& e) {
    throw Malformed(std::string("checkpoint metadata is not JSON: ") + e.what());
  }
  const uint32_t count = in.U32("array count");
  for (uint32_t i = 0; i < count; ++i) {
    NamedArray a;
    a.name = std::string(in.Take(in.U32("name length"), "array name"));
    const uint32_t rank = in.U32("rank");
    if (rank > 3) throw Malformed("array '" + a.name + "' has rank " + std::to_string(rank));
    size_t n = 1;
    for (uint32_t r = 0; r < rank; ++r) {
      const uint32_t d = in.U32("dims");
      if (d > (1u << 30)) throw Malformed("array '" + a.name + "' has an absurd extent");
      a.shape.push_back(static_cast<int>(d));
      n *= d;
    }
    std::string_view raw = in.Take(n * 4, "array data");
    a.data.resize(n);
    for (size_t k = 0; k < n; ++k) {
      uint32_t v = 0;
      for (int b = 0; b < 4; ++b) {
        v |= static_cast<uint32_t>(static_cast<uint8_t>(raw[4 * k + b])) << (8 * b);
      }
      a.data[k] = std::bit_cast<float>(v);
    }
    file.arrays.push_back(std::move(a));
  }
  if (!in.AtEnd()) throw Malformed("trailing bytes after the last array");
  return file;
}

void WriteCheckpointFile(const std::string& path, const CheckpointFile& file) {
  const std::string bytes = EncodeCheckpoint(file);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError(CheckpointErrorKind::kIo, "cannot write " + tmp);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw CheckpointError(CheckpointErrorKind::kIo, "write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

CheckpointFile ReadCheckpointFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError(CheckpointErrorKind::kIo, "cannot open checkpoint " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return DecodeCheckpoint(bytes);
}

template <typename T>
G2pEngine<T> MakeEngine(const ModelConfig& config, const ExpertDictionary& dict,
                        uint64_t seed) {
  G2pEngine<T> engine;
  engine.dict = dict;
  engine.vocab = PhonemeVocabulary::Make(config.vocab_mode);
  engine.model = G2pModel<T>(config, BuildMask(dict, engine.vocab));
  engine.model.Init(seed);
  engine.trained_fingerprint = dict.Fingerprint();
  return engine;
}

template <typename T>
CheckpointFile EngineToCheckpoint(const G2pEngine<T>& engine, uint64_t split_seed) {
  CheckpointFile file;
  file.metadata["config"] = engine.model.config().ToJson();
  file.metadata["vocab"] = {{"mode", VocabModeName(engine.vocab.mode())},
                            {"tokens", engine.vocab.tokens()}};
  file.metadata["split_seed"] = split_seed;
  file.metadata["dict_fingerprint"] = engine.trained_fingerprint;
  file.metadata["expert_dict"] = engine.dict.Serialize();
  for (const Param<T>* p : engine.model.Params()) {
    NamedArray a;
    a.name = p->name;
    a.shape = p->value.shape();
    a.data.reserve(p->value.size());
    for (T v : p->value.values()) a.data.push_back(static_cast<float>(v));
    file.arrays.push_back(std::move(a));
  }
  NamedArray mask{"mask", {engine.model.mask().rows(), engine.model.mask().cols()}, {}};
  for (uint8_t v : engine.model.mask().data()) mask.data.push_back(v ? 1.0f : 0.0f);
  file.arrays.push_back(std::move(mask));
  return file;
}

template <typename T>
G2pEngine<T> EngineFromCheckpoint(const CheckpointFile& file) {
  const nlohmann::json& meta = file.metadata;
  G2pEngine<T> engine;
  ModelConfig config;
  try {
    config = ModelConfig::FromJson(meta.at("config"));
    engine.dict = ExpertDictionary::Parse(meta.at("expert_dict").get<std::string>());
    engine.trained_fingerprint = meta.at("dict_fingerprint").get<std::string>();
    engine.vocab = PhonemeVocabulary::Make(config.vocab_mode);
    if (meta.at("vocab").at("tokens").get<std::vector<std::string>>() != engine.vocab.tokens()) {
      throw Malformed("checkpoint vocabulary does not match the " +
                      std::string(VocabModeName(config.vocab_mode)) + " inventory");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Malformed(std::string("checkpoint metadata incomplete: ") + e.what());
  } catch (const CheckpointError&) {
    throw;
  } catch (const Error& e) {
    throw Malformed(std::string("checkpoint metadata invalid: ") + e.what());
  }

  const NamedArray* mask_array = file.Find("mask");
  if (mask_array == nullptr ||
      mask_array->shape != std::vector<int>{kNumGraphemes, engine.vocab.size()}) {
    throw Malformed("checkpoint mask missing or misshapen");
  }
  MaskMatrix mask(kNumGraphemes, engine.vocab.size());
  for (int g = 0; g < kNumGraphemes; ++g) {
    for (int v = 0; v < engine.vocab.size(); ++v) {
      mask.set(g, v, mask_array->data[static_cast<size_t>(g) * engine.vocab.size() + v] != 0.0f);
    }
  }
  engine.model = G2pModel<T>(config, std::move(mask));
  for (Param<T>* p : engine.model.Params()) {
    const NamedArray* a = file.Find(p->name);
    if (a == nullptr) throw Malformed("checkpoint lacks array '" + p->name + "'");
    if (a->shape != p->value.shape()) {
      throw Malformed("array '" + p->name + "' has shape " + ShapeString(a->shape) +
                      ", model expects " + ShapeString(p->value.shape()));
    }
    for (size_t i = 0; i < a->data.size(); ++i) p->value[i] = static_cast<T>(a->data[i]);
  }
  return engine;
}

template <typename T>
void SaveEngine(const std::string& path, const G2pEngine<T>& engine, uint64_t split_seed) {
  WriteCheckpointFile(path, EngineToCheckpoint(engine, split_seed));
}

template <typename T>
G2pEngine<T> LoadEngine(const std::string& path) {
  return EngineFromCheckpoint<T>(ReadCheckpointFile(path));
}

template <typename T>
bool ReplaceDictionary(G2pEngine<T>* engine, const ExpertDictionary& dict) {
  engine->dict = dict;
  engine->model.set_mask(BuildMask(dict, engine->vocab));
  return dict.Fingerprint() == engine->trained_fingerprint;
}

#define LITEG2P_INSTANTIATE(T)                                                        \
  template G2pEngine<T> MakeEngine<T>(const ModelConfig&, const ExpertDictionary&,    \
                                      uint64_t);                                      \
  template CheckpointFile EngineToCheckpoint<T>(const G2pEngine<T>&, uint64_t);       \
  template G2pEngine<T> EngineFromCheckpoint<T>(const CheckpointFile&);               \
  template void SaveEngine<T>(const std::string&, const G2pEngine<T>&, uint64_t);     \
  template G2pEngine<T> LoadEngine<T>(const std::string&);                            \
  template bool ReplaceDictionary<T>(G2pEngine<T>*, const ExpertDictionary&);

LITEG2P_INSTANTIATE(float)
LITEG2P_INSTANTIATE(double)

#undef LITEG2P_INSTANTIATE

}  // namespace liteg2p
