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

#include "liteg2p/lexicon.h"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <utility>

#include "liteg2p/random.h"

namespace liteg2p {

int GraphemeId(char c) {
  if (c >= 'a' && c <= 'z') return c - 'a';
  if (c == '\'') return 26;
  if (c == '-') return 27;
  return -1;
}

char GraphemeChar(int id) {
  if (id >= 0 && id < 26) return static_cast<char>('a' + id);
  if (id == 26) return '\'';
  if (id == 27) return '-';
  throw Error("grapheme id out of range: " + std::to_string(id));
}

bool IsValidSpelling(std::string_view spelling) {
  if (spelling.empty()) return false;
  return std::all_of(spelling.begin(), spelling.end(),
                     [](char c) { return GraphemeId(c) >= 0; });
}

const std::vector<std::string>& BasePhonemes() {
  static const std::vector<std::string> phonemes = {
      "AA", "AE", "AH", "AO", "AW", "AY", "B",  "CH", "D",  "DH",
      "EH", "ER", "EY", "F",  "G",  "HH", "IH", "IY", "JH", "K",
      "L",  "M",  "N",  "NG", "OW", "OY", "P",  "R",  "S",  "SH",
      "T",  "TH", "UH", "UW", "V",  "W",  "Y",  "Z",  "ZH"};
  return phonemes;
}

bool IsVowel(std::string_view base_phoneme) {
  static const char* const kVowels[] = {"AA", "AE", "AH", "AO", "AW",
                                        "AY", "EH", "ER", "EY", "IH",
                                        "IY", "OW", "OY", "UH", "UW"};
  for (const char* v : kVowels) {
    if (base_phoneme == v) return true;
  }
  return false;
}

std::string StripStress(std::string_view token) {
  if (token.size() > 1) {
    const char last = token.back();
    if (last == '0' || last == '1' || last == '2') {
      std::string_view base = token.substr(0, token.size() - 1);
      if (IsVowel(base)) return std::string(base);
    }
  }
  return std::string(token);
}

std::string_view VocabModeName(VocabMode mode) {
  return mode == VocabMode::kBase ? "base" : "stressed";
}

VocabMode ParseVocabMode(std::string_view name) {
  if (name == "base") return VocabMode::kBase;
  if (name == "stressed") return VocabMode::kStressed;
  throw ConfigError("unknown vocabulary mode: " + std::string(name));
}

PhonemeVocabulary PhonemeVocabulary::Make(VocabMode mode) {
  PhonemeVocabulary vocab;
  vocab.mode_ = mode;
  vocab.tokens_.push_back(kBlankToken);
  for (const std::string& ph : BasePhonemes()) {
    vocab.tokens_.push_back(ph);
    if (mode == VocabMode::kStressed && IsVowel(ph)) {
      for (char digit : {'0', '1', '2'}) vocab.tokens_.push_back(ph + digit);
    }
  }
  vocab.tokens_.push_back(kBoundaryToken);
  vocab.tokens_.push_back(kUnknownToken);
  for (int i = 0; i < vocab.size(); ++i) vocab.index_[vocab.tokens_[i]] = i;
  return vocab;
}

int PhonemeVocabulary::boundary_id() const { return size() - 2; }

std::optional<int> PhonemeVocabulary::Id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<int> PhonemeVocabulary::Encode(const Pronunciation& pron) const {
  const Pronunciation normalized =
      mode_ == VocabMode::kBase ? StripMarks(pron, MarkLevel::kNone) : pron;
  std::vector<int> ids;
  ids.reserve(normalized.size());
  for (const std::string& token : normalized) {
    auto id = Id(token);
    if (!id || *id == blank_id()) {
      throw Error("phoneme not in vocabulary: '" + token + "'");
    }
    ids.push_back(*id);
  }
  return ids;
}

Pronunciation PhonemeVocabulary::Decode(const std::vector<int>& ids) const {
  Pronunciation pron;
  pron.reserve(ids.size());
  for (int id : ids) pron.push_back(Token(id));
  return pron;
}

namespace {

// Splits on runs of spaces and tabs.
std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

const PhonemeVocabulary& LexiconVocabulary() {
  static const PhonemeVocabulary vocab =
      PhonemeVocabulary::Make(VocabMode::kStressed);
  return vocab;
}

}  // namespace

CmuParseResult ParseCmu(std::istream& in) {
  CmuParseResult result;
  const PhonemeVocabulary& vocab = LexiconVocabulary();
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.starts_with(";;;")) continue;
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    const size_t first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos) continue;
    line = line.substr(first);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t')) {
      line.remove_suffix(1);
    }
    if (line.find_first_of(" \t") == std::string_view::npos) {
      result.errors.emplace_back("no whitespace separator", line_no);
      continue;
    }
    std::vector<std::string_view> fields = SplitFields(line);

    LexiconEntry entry;
    std::string_view word = fields[0];
    if (word.size() > 3 && word.back() == ')') {
      const size_t open = word.rfind('(');
      if (open != std::string_view::npos && open > 0) {
        std::string_view digits = word.substr(open + 1, word.size() - open - 2);
        if (!digits.empty() &&
            std::all_of(digits.begin(), digits.end(),
                        [](char c) { return std::isdigit(
                                         static_cast<unsigned char>(c)); })) {
          entry.variant_index = std::stoi(std::string(digits));
          word = word.substr(0, open);
        }
      }
    }
    entry.spelling.reserve(word.size());
    for (char c : word) {
      entry.spelling.push_back(
          static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    if (!IsValidSpelling(entry.spelling)) {
      ++result.dropped_spellings;
      continue;
    }
    bool ok = true;
    for (size_t i = 1; i < fields.size(); ++i) {
      std::string token(fields[i]);
      if (!vocab.Id(token) || token == kBlankToken || token == kUnknownToken) {
        result.errors.emplace_back("unknown phoneme '" + token + "'", line_no);
        ok = false;
        break;
      }
      entry.pronunciation.push_back(std::move(token));
    }
    if (ok) result.entries.push_back(std::move(entry));
  }
  return result;
}

CmuParseResult ParseCmuFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open lexicon: " + path);
  return ParseCmu(in);
}

std::string SerializeCmu(const std::vector<LexiconEntry>& entries) {
  std::string out;
  for (const LexiconEntry& e : entries) {
    for (char c : e.spelling) {
      out.push_back(
          static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
    if (e.variant_index > 1) {
      out += "(" + std::to_string(e.variant_index) + ")";
    }
    out += "  ";
    out += JoinPronunciation(e.pronunciation);
    out += '\n';
  }
  return out;
}

std::vector<LexiconEntry> FilterPrimary(std::vector<LexiconEntry> entries) {
  std::vector<LexiconEntry> kept;
  kept.reserve(entries.size());
  for (LexiconEntry& e : entries) {
    if (e.variant_index == 1) kept.push_back(std::move(e));
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const LexiconEntry& a, const LexiconEntry& b) {
                     return a.spelling < b.spelling;
                   });
  // A file listing the same spelling twice without a suffix keeps the first.
  kept.erase(std::unique(kept.begin(), kept.end(),
                         [](const LexiconEntry& a, const LexiconEntry& b) {
                           return a.spelling == b.spelling;
                         }),
             kept.end());
  return kept;
}

std::vector<LexiconEntry> SampleEntries(const std::vector<LexiconEntry>& entries, int n,
                                        uint64_t seed) {
  if (n < 0) throw ConfigError("sample size must be non-negative");
  if (n == 0 || static_cast<size_t>(n) >= entries.size()) return entries;
  std::vector<size_t> order(entries.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  Shuffle(&order, rng);
  order.resize(n);
  std::sort(order.begin(), order.end());
  std::vector<LexiconEntry> out;
  out.reserve(n);
  for (size_t i : order) out.push_back(entries[i]);
  return out;
}

DataSplit MakeSplit(const std::vector<LexiconEntry>& entries, int test_size,
                    int dev_size, uint64_t seed) {
  if (test_size < 0 || dev_size < 0) {
    throw ConfigError("split sizes must be non-negative");
  }
  if (static_cast<size_t>(test_size) + static_cast<size_t>(dev_size) >=
      entries.size()) {
    throw ConfigError("split sizes (" + std::to_string(test_size) + " + " +
                      std::to_string(dev_size) + ") exceed corpus of " +
                      std::to_string(entries.size()) + " entries");
  }
  std::vector<size_t> order(entries.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  Shuffle(&order, rng);

  DataSplit split;
  split.seed = seed;
  for (size_t i = 0; i < order.size(); ++i) {
    const LexiconEntry& e = entries[order[i]];
    if (i < static_cast<size_t>(test_size)) {
      split.test.push_back(e);
    } else if (i < static_cast<size_t>(test_size + dev_size)) {
      split.dev.push_back(e);
    } else {
      split.train.push_back(e);
    }
  }
  return split;
}

void WriteSplitManifest(const DataSplit& split, const std::string& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::vector<LexiconEntry>& part, const char* name) {
    const std::string path = dir + "/split_" + name + ".txt";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    for (const LexiconEntry& e : part) out << e.spelling << '\n';
  };
  write(split.train, "train");
  write(split.dev, "dev");
  write(split.test, "test");
}

Pronunciation StripMarks(const Pronunciation& pron, MarkLevel level) {
  if (level == MarkLevel::kStressAndBoundary) return pron;
  Pronunciation out;
  out.reserve(pron.size());
  for (const std::string& token : pron) {
    if (token == kBoundaryToken) continue;
    out.push_back(level == MarkLevel::kNone ? StripStress(token) : token);
  }
  return out;
}

std::string JoinPronunciation(const Pronunciation& pron) {
  std::string out;
  for (size_t i = 0; i < pron.size(); ++i) {
    if (i) out += ' ';
    out += pron[i];
  }
  return out;
}

Pronunciation SplitPronunciation(std::string_view text) {
  Pronunciation pron;
  for (std::string_view f : SplitFields(text)) pron.emplace_back(f);
  return pron;
}

}  // namespace liteg2p
