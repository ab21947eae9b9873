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

#ifndef LITEG2P_EXPERT_DICT_H_
#define LITEG2P_EXPERT_DICT_H_

#include <array>
#include <cstdint>
#include <istream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "liteg2p/lexicon.h"

namespace liteg2p {

inline constexpr int kMaxExpansion = 4;

// Letter-to-sound knowledge for one grapheme: how many output frames the
// letter expands to and which phonemes it may emit.
struct LetterRule {
  int max_len = 2;
  bool allow_all = true;
  // Tokens as written in the dictionary file (stress digits optional).
  std::set<std::string> allowed;
};

// Expert dictionary in TSV form:
//
//   # comment
//   b<TAB>1<TAB>B,P
//   a<TAB>2<TAB>*          (`*` allows every phoneme)
//   '<TAB>1<TAB>           (empty list: blank only)
//
// Graphemes missing from the file fall back to (2, ALL).
class ExpertDictionary {
 public:
  static constexpr int kFallbackMaxLen = 2;

  ExpertDictionary();

  // Throws ParseError on malformed lines and on phonemes that are not
  // ARPAbet tokens.
  static ExpertDictionary Load(std::istream& in);
  static ExpertDictionary LoadFile(const std::string& path);
  static ExpertDictionary Parse(const std::string& text);

  const LetterRule& Rule(int grapheme_id) const;
  int MaxLen(int grapheme_id) const { return Rule(grapheme_id).max_len; }
  bool IsExplicit(int grapheme_id) const {
    return explicit_.at(grapheme_id);
  }
  int duplicate_lines() const { return duplicate_lines_; }

  // Canonical TSV text; Parse(Serialize()) reproduces this dictionary.
  std::string Serialize() const;
  // FNV-1a 64 over Serialize(), as 16 hex digits.
  std::string Fingerprint() const;

 private:
  std::array<LetterRule, kNumGraphemes> rules_;
  std::array<bool, kNumGraphemes> explicit_{};
  int duplicate_lines_ = 0;
};

// 0/1 matrix, one row per grapheme and one column per vocabulary id.
class MaskMatrix {
 public:
  MaskMatrix() = default;
  MaskMatrix(int rows, int cols)
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, 0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  uint8_t at(int g, int v) const { return data_[static_cast<size_t>(g) * cols_ + v]; }
  void set(int g, int v, uint8_t value) {
    data_[static_cast<size_t>(g) * cols_ + v] = value;
  }
  const uint8_t* row(int g) const { return data_.data() + static_cast<size_t>(g) * cols_; }
  const std::vector<uint8_t>& data() const { return data_; }

  bool operator==(const MaskMatrix&) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<uint8_t> data_;
};

// Resolves every allowed token against `vocab`; blank is always allowed.
// In STRESSED mode a stress-free vowel also enables its three stressed
// variants; in BASE mode stressed tokens map onto their base phoneme.
MaskMatrix BuildMask(const ExpertDictionary& dict,
                     const PhonemeVocabulary& vocab);

// CSV with grapheme row labels and phoneme column headers.
std::string MaskToCsv(const MaskMatrix& mask, const PhonemeVocabulary& vocab);

std::string DefaultDictionaryPath();

}  // namespace liteg2p

#endif  // LITEG2P_EXPERT_DICT_H_
