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

#ifndef LITEG2P_LEXICON_H_
#define LITEG2P_LEXICON_H_

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "liteg2p/error.h"

namespace liteg2p {

// Graphemes are a-z, apostrophe and hyphen, with ids 0..27 in that order.
inline constexpr int kNumGraphemes = 28;

// Returns -1 for characters outside the grapheme set.
int GraphemeId(char c);
char GraphemeChar(int id);
bool IsValidSpelling(std::string_view spelling);

inline constexpr char kBlankToken[] = "<blank>";
inline constexpr char kBoundaryToken[] = "-";
inline constexpr char kUnknownToken[] = "<unk>";

using Pronunciation = std::vector<std::string>;

struct LexiconEntry {
  std::string spelling;
  Pronunciation pronunciation;
  int variant_index = 1;

  bool operator==(const LexiconEntry&) const = default;
};

enum class VocabMode { kBase, kStressed };

std::string_view VocabModeName(VocabMode mode);
VocabMode ParseVocabMode(std::string_view name);

// Output label inventory. Id 0 is always the CTC blank. Layout is
// [blank, phonemes..., boundary, unk]: 42 tokens in BASE mode, 87 in
// STRESSED mode (the 84 CMU symbols, which include stress-free vowels).
class PhonemeVocabulary {
 public:
  static PhonemeVocabulary Make(VocabMode mode);

  VocabMode mode() const { return mode_; }
  int size() const { return static_cast<int>(tokens_.size()); }
  int blank_id() const { return 0; }
  int boundary_id() const;
  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::string& Token(int id) const { return tokens_.at(id); }
  std::optional<int> Id(std::string_view token) const;

  // Maps a lexicon pronunciation into this vocabulary's label space
  // (BASE mode strips stress digits and boundaries first). Throws Error on
  // tokens the vocabulary cannot represent.
  std::vector<int> Encode(const Pronunciation& pron) const;
  Pronunciation Decode(const std::vector<int>& ids) const;

 private:
  VocabMode mode_ = VocabMode::kStressed;
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

// The 39 ARPAbet phonemes without stress marks.
const std::vector<std::string>& BasePhonemes();
bool IsVowel(std::string_view base_phoneme);
// "AE1" -> "AE"; consonants and bare vowels unchanged.
std::string StripStress(std::string_view token);

struct CmuParseResult {
  std::vector<LexiconEntry> entries;
  // Entries dropped because the spelling left the grapheme set.
  int dropped_spellings = 0;
  // Malformed lines; parsing continues past them.
  std::vector<ParseError> errors;
};

// Reads CMU dict text: `WORD  PH1 PH2 ...`, `;;;` comments, `WORD(2)`
// alternates. Also accepts the lowercase single-space layout with trailing
// `# ...` annotations used by newer releases.
CmuParseResult ParseCmu(std::istream& in);
CmuParseResult ParseCmuFile(const std::string& path);
std::string SerializeCmu(const std::vector<LexiconEntry>& entries);

// Keeps variant 1 of each spelling, sorted by spelling.
std::vector<LexiconEntry> FilterPrimary(std::vector<LexiconEntry> entries);

struct DataSplit {
  std::vector<LexiconEntry> train;
  std::vector<LexiconEntry> dev;
  std::vector<LexiconEntry> test;
  uint64_t seed = 0;
};

DataSplit MakeSplit(const std::vector<LexiconEntry>& entries, int test_size,
                    int dev_size, uint64_t seed);

// Seeded sample of n entries (all of them when n is 0 or at least the
// corpus size), returned in spelling order.
std::vector<LexiconEntry> SampleEntries(const std::vector<LexiconEntry>& entries, int n,
                                        uint64_t seed);

// Writes split_{train,dev,test}.txt, one spelling per line.
void WriteSplitManifest(const DataSplit& split, const std::string& dir);

enum class MarkLevel { kNone, kStress, kStressAndBoundary };

Pronunciation StripMarks(const Pronunciation& pron, MarkLevel level);

std::string JoinPronunciation(const Pronunciation& pron);
Pronunciation SplitPronunciation(std::string_view text);

}  // namespace liteg2p

#endif  // LITEG2P_LEXICON_H_
