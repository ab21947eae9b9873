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

#include "liteg2p/preprocess.h"

#include <algorithm>

namespace liteg2p {

double LocalPosition(int j, int len) {
  if (len < 1 || j < 1 || j > len) {
    throw Error("local position out of range: j=" + std::to_string(j) +
                " len=" + std::to_string(len));
  }
  return static_cast<double>(j - len) / static_cast<double>(std::max(len - 1, 1));
}

const PositionTable& PositionTable::Get() {
  static const PositionTable table;
  return table;
}

PositionTable::PositionTable() {
  for (int len = 1; len <= kMaxExpansion; ++len) {
    for (int j = 1; j <= len; ++j) values_.push_back(LocalPosition(j, len));
  }
  std::sort(values_.begin(), values_.end());
  values_.erase(std::unique(values_.begin(), values_.end()), values_.end());
  for (int len = 1; len <= kMaxExpansion; ++len) {
    for (int j = 1; j <= len; ++j) {
      const double v = LocalPosition(j, len);
      row_[len][j] = static_cast<int>(
          std::lower_bound(values_.begin(), values_.end(), v) - values_.begin());
    }
  }
}

int PositionTable::Row(int j, int len) const {
  if (len < 1 || len > kMaxExpansion || j < 1 || j > len) {
    throw Error("position (" + std::to_string(j) + ", " + std::to_string(len) +
                ") outside the table");
  }
  return row_[len][j];
}

ExpandedInput ExpandWord(std::string_view spelling, const ExpertDictionary& dict) {
  if (spelling.empty()) throw Error("cannot expand an empty spelling");
  ExpandedInput out;
  out.source_spelling = std::string(spelling);
  for (size_t i = 0; i < spelling.size(); ++i) {
    const int g = GraphemeId(spelling[i]);
    if (g < 0) {
      throw Error("character '" + std::string(1, spelling[i]) + "' in '" +
                  std::string(spelling) + "' is not a grapheme");
    }
    const int len = dict.MaxLen(g);
    for (int j = 1; j <= len; ++j) {
      out.frames.push_back(Frame{g, static_cast<int>(i), j, len, LocalPosition(j, len)});
    }
  }
  return out;
}

EncodedBatch BatchEncode(const std::vector<ExpandedInput>& words) {
  if (words.empty()) throw Error("cannot encode an empty batch");
  const PositionTable& table = PositionTable::Get();
  EncodedBatch batch;
  batch.batch = static_cast<int>(words.size());
  for (const ExpandedInput& w : words) {
    batch.max_len = std::max(batch.max_len, w.length());
    batch.lengths.push_back(w.length());
  }
  const size_t cells = static_cast<size_t>(batch.batch) * batch.max_len;
  batch.grapheme_ids.assign(cells, kGraphemePadId);
  batch.position_ids.assign(cells, table.pad_row());
  for (int b = 0; b < batch.batch; ++b) {
    const ExpandedInput& w = words[b];
    for (int t = 0; t < w.length(); ++t) {
      const Frame& f = w.frames[t];
      batch.grapheme_ids[b * batch.max_len + t] = f.grapheme_id;
      batch.position_ids[b * batch.max_len + t] =
          table.Row(f.local_index, f.expansion_len);
    }
  }
  return batch;
}

}  // namespace liteg2p
