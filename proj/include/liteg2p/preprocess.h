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

#ifndef LITEG2P_PREPROCESS_H_
#define LITEG2P_PREPROCESS_H_

#include <string>
#include <string_view>
#include <vector>

#include "liteg2p/expert_dict.h"

namespace liteg2p {

// Normalized position of the j-th copy (1-based) of a letter expanded to
// `len` frames: (j - len) / max(len - 1, 1). Runs from -1 to 0 inside a block.
double LocalPosition(int j, int len);

struct Frame {
  int grapheme_id = 0;
  int letter_index = 0;  // 0-based index into the spelling
  int local_index = 1;   // 1-based copy number inside the letter block
  int expansion_len = 1;
  double pos_norm = 0.0;
};

struct ExpandedInput {
  std::vector<Frame> frames;
  std::string source_spelling;

  int length() const { return static_cast<int>(frames.size()); }
};

// Embedding rows for the position feature: one per distinct LocalPosition
// value over all (len, j) with 1 <= j <= len <= kMaxExpansion, ordered by
// value. The pad row comes last.
class PositionTable {
 public:
  static const PositionTable& Get();

  int num_rows() const { return static_cast<int>(values_.size()); }
  int pad_row() const { return num_rows(); }
  int Row(int j, int len) const;
  double Value(int row) const { return values_.at(row); }

 private:
  PositionTable();
  std::vector<double> values_;
  // row_[len][j], both 1-based.
  int row_[kMaxExpansion + 1][kMaxExpansion + 1] = {};
};

// Each letter becomes max_len(letter) consecutive frames. Throws Error on
// an empty spelling or a character outside the grapheme set.
ExpandedInput ExpandWord(std::string_view spelling, const ExpertDictionary& dict);

inline constexpr int kGraphemePadId = kNumGraphemes;

// Row-major (batch, max_len) id grids plus true lengths. Pad cells carry
// kGraphemePadId / PositionTable::pad_row().
struct EncodedBatch {
  int batch = 0;
  int max_len = 0;
  std::vector<int> grapheme_ids;
  std::vector<int> position_ids;
  std::vector<int> lengths;

  int grapheme(int b, int t) const { return grapheme_ids[b * max_len + t]; }
  int position(int b, int t) const { return position_ids[b * max_len + t]; }
};

EncodedBatch BatchEncode(const std::vector<ExpandedInput>& words);

}  // namespace liteg2p

#endif  // LITEG2P_PREPROCESS_H_
