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

#include "liteg2p/expert_dict.h"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace liteg2p {

namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> SplitOn(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  size_t start = 0;
  while (true) {
    const size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

bool IsKnownToken(const std::string& token) {
  static const PhonemeVocabulary vocab =
      PhonemeVocabulary::Make(VocabMode::kStressed);
  auto id = vocab.Id(token);
  return id && token != kBlankToken && token != kUnknownToken;
}

}  // namespace

ExpertDictionary::ExpertDictionary() {
  for (LetterRule& rule : rules_) {
    rule.max_len = kFallbackMaxLen;
    rule.allow_all = true;
  }
}

ExpertDictionary ExpertDictionary::Load(std::istream& in) {
  ExpertDictionary dict;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.starts_with("#") || Trim(line).empty()) continue;
    std::vector<std::string_view> cols = SplitOn(line, '\t');
    if (cols.size() != 3) {
      throw ParseError("expected 3 tab-separated columns, got " +
                           std::to_string(cols.size()),
                       line_no);
    }
    std::string_view letter = Trim(cols[0]);
    if (letter.size() != 1 || GraphemeId(letter[0]) < 0) {
      throw ParseError("not a grapheme: '" + std::string(letter) + "'", line_no);
    }
    std::string_view len_text = Trim(cols[1]);
    int max_len = 0;
    auto [ptr, ec] =
        std::from_chars(len_text.data(), len_text.data() + len_text.size(), max_len);
    if (ec != std::errc() || ptr != len_text.data() + len_text.size()) {
      throw ParseError("unparseable max_len '" + std::string(len_text) + "'",
                       line_no);
    }
    if (max_len < 1 || max_len > kMaxExpansion) {
      throw ParseError("max_len must be in [1, " + std::to_string(kMaxExpansion) +
                           "], got " + std::to_string(max_len),
                       line_no);
    }
    LetterRule rule;
    rule.max_len = max_len;
    rule.allow_all = false;
    std::string_view phones = Trim(cols[2]);
    if (phones == "*") {
      rule.allow_all = true;
    } else if (!phones.empty()) {
      for (std::string_view p : SplitOn(phones, ',')) {
        std::string token(Trim(p));
        if (token.empty()) continue;
        if (!IsKnownToken(token)) {
          throw ParseError("phoneme not in vocabulary: '" + token + "'", line_no);
        }
        rule.allowed.insert(token);
      }
    }
    const int g = GraphemeId(letter[0]);
    if (dict.explicit_[g]) ++dict.duplicate_lines_;
    dict.rules_[g] = std::move(rule);
    dict.explicit_[g] = true;
  }
  return dict;
}

ExpertDictionary ExpertDictionary::LoadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open expert dictionary: " + path);
  return Load(in);
}

ExpertDictionary ExpertDictionary::Parse(const std::string& text) {
  std::istringstream in(text);
  return Load(in);
}

const LetterRule& ExpertDictionary::Rule(int grapheme_id) const {
  if (grapheme_id < 0 || grapheme_id >= kNumGraphemes) {
    throw Error("grapheme id out of range: " + std::to_string(grapheme_id));
  }
  return rules_[grapheme_id];
}

std::string ExpertDictionary::Serialize() const {
  std::string out;
  for (int g = 0; g < kNumGraphemes; ++g) {
    if (!explicit_[g]) continue;
    const LetterRule& rule = rules_[g];
    out += GraphemeChar(g);
    out += '\t';
    out += std::to_string(rule.max_len);
    out += '\t';
    if (rule.allow_all) {
      out += '*';
    } else {
      bool first = true;
      for (const std::string& p : rule.allowed) {
        if (!first) out += ',';
        out += p;
        first = false;
      }
    }
    out += '\n';
  }
  return out;
}

std::string ExpertDictionary::Fingerprint() const {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : Serialize()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

MaskMatrix BuildMask(const ExpertDictionary& dict,
                     const PhonemeVocabulary& vocab) {
  MaskMatrix mask(kNumGraphemes, vocab.size());
  for (int g = 0; g < kNumGraphemes; ++g) {
    const LetterRule& rule = dict.Rule(g);
    mask.set(g, vocab.blank_id(), 1);
    if (rule.allow_all) {
      for (int v = 0; v < vocab.size(); ++v) mask.set(g, v, 1);
      continue;
    }
    for (const std::string& token : rule.allowed) {
      bool resolved = false;
      if (auto id = vocab.Id(token)) {
        mask.set(g, *id, 1);
        resolved = true;
      }
      if (vocab.mode() == VocabMode::kStressed && IsVowel(token)) {
        for (char digit : {'0', '1', '2'}) {
          if (auto id = vocab.Id(token + digit)) {
            mask.set(g, *id, 1);
            resolved = true;
          }
        }
      } else if (vocab.mode() == VocabMode::kBase && !resolved) {
        if (auto id = vocab.Id(StripStress(token))) {
          mask.set(g, *id, 1);
          resolved = true;
        }
      }
      if (!resolved) {
        throw Error("expert dictionary token '" + token +
                    "' does not resolve in the " +
                    std::string(VocabModeName(vocab.mode())) + " vocabulary");
      }
    }
  }
  return mask;
}

std::string MaskToCsv(const MaskMatrix& mask, const PhonemeVocabulary& vocab) {
  std::string out = "grapheme";
  for (const std::string& token : vocab.tokens()) {
    out += ',';
    out += token;
  }
  out += '\n';
  for (int g = 0; g < mask.rows(); ++g) {
    out += GraphemeChar(g);
    for (int v = 0; v < mask.cols(); ++v) {
      out += ',';
      out += mask.at(g, v) ? '1' : '0';
    }
    out += '\n';
  }
  return out;
}

std::string DefaultDictionaryPath() {
  if (const char* dir = std::getenv("LITEG2P_DATA_DIR")) {
    return std::string(dir) + "/expert_dict_en.tsv";
  }
  return std::string(LITEG2P_DATA_DIR) + "/expert_dict_en.tsv";
}

}  // namespace liteg2p
