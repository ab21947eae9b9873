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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <set>
#include <sstream>

#include "liteg2p/lexicon.h"
#include "test_util.h"

namespace liteg2p {
namespace {

CmuParseResult ParseText(const std::string& text) {
  std::istringstream in(text);
  return ParseCmu(in);
}

LexiconEntry Entry(std::string spelling, int variant = 1) {
  return {std::move(spelling), {"K"}, variant};
}

TEST_CASE("graphemes") {
  CHECK(GraphemeId('a') == 0);
  CHECK(GraphemeId('z') == 25);
  CHECK(GraphemeId('\'') == 26);
  CHECK(GraphemeId('-') == 27);
  CHECK(GraphemeId('A') == -1);
  CHECK(GraphemeId('.') == -1);
  CHECK(GraphemeChar(27) == '-');
  CHECK(IsValidSpelling("o'neil-smith"));
  CHECK_FALSE(IsValidSpelling(""));
  CHECK_FALSE(IsValidSpelling("abc1"));
}

TEST_CASE("vocabulary sizes and layout") {
  const PhonemeVocabulary base = PhonemeVocabulary::Make(VocabMode::kBase);
  CHECK(base.size() == 42);
  CHECK(base.Token(0) == kBlankToken);
  CHECK(base.Token(base.boundary_id()) == "-");
  CHECK(base.Token(base.size() - 1) == kUnknownToken);
  const PhonemeVocabulary stressed = PhonemeVocabulary::Make(VocabMode::kStressed);
  CHECK(stressed.size() == 87);
  CHECK(stressed.Id("AE1").has_value());
  CHECK(stressed.Id("AE").has_value());
  CHECK_FALSE(base.Id("AE1").has_value());

  std::set<std::string> seen(stressed.tokens().begin(), stressed.tokens().end());
  CHECK(seen.size() == stressed.tokens().size());
  for (int i = 0; i < stressed.size(); ++i) CHECK(*stressed.Id(stressed.Token(i)) == i);
}

TEST_CASE("vocabulary encode and decode") {
  const PhonemeVocabulary base = PhonemeVocabulary::Make(VocabMode::kBase);
  const std::vector<int> ids = base.Encode({"K", "AE1", "-", "T"});
  CHECK(base.Decode(ids) == Pronunciation{"K", "AE", "T"});
  const PhonemeVocabulary stressed = PhonemeVocabulary::Make(VocabMode::kStressed);
  CHECK(stressed.Decode(stressed.Encode({"K", "AE1", "T"})) == Pronunciation{"K", "AE1", "T"});
  CHECK_THROWS_AS(stressed.Encode({"QQ"}), Error);
}

TEST_CASE("parse_cmu basic entries") {
  const CmuParseResult r = ParseText(";;; comment\nCAT  K AE1 T\n\nREAD(2)  R EH1 D\n");
  REQUIRE(r.entries.size() == 2);
  CHECK(r.entries[0] == LexiconEntry{"cat", {"K", "AE1", "T"}, 1});
  CHECK(r.entries[1].spelling == "read");
  CHECK(r.entries[1].variant_index == 2);
  CHECK(r.errors.empty());
}

TEST_CASE("parse_cmu drops spellings outside the grapheme set and recovers from bad lines") {
  const CmuParseResult r =
      ParseText("!EXCLAMATION-POINT  EH2 K S\nBROKENLINE\nDOG  D AO1 G\r\n");
  CHECK(r.dropped_spellings == 1);
  REQUIRE(r.errors.size() == 1);
  CHECK(r.errors[0].line() == 2);
  REQUIRE(r.entries.size() == 1);
  CHECK(r.entries[0].pronunciation == Pronunciation{"D", "AO1", "G"});
}

TEST_CASE("parse_cmu accepts the lowercase annotated layout") {
  const CmuParseResult r = ParseText("abbe AE1 B IY0 # place, french\nabbe(2) AE1 B\n");
  REQUIRE(r.entries.size() == 2);
  CHECK(r.entries[0].pronunciation == Pronunciation{"AE1", "B", "IY0"});
  CHECK(r.entries[1].variant_index == 2);
}

TEST_CASE("parse, serialize, parse is stable") {
  const CmuParseResult first = ParseText("CAT  K AE1 T\nREAD  R IY1 D\nREAD(2)  R EH1 D\n");
  const CmuParseResult second = ParseText(SerializeCmu(first.entries));
  CHECK(second.entries == first.entries);
}

TEST_CASE("filter_primary") {
  CHECK(FilterPrimary({}).empty());
  CHECK(FilterPrimary({Entry("a")}) == std::vector<LexiconEntry>{Entry("a")});
  const std::vector<LexiconEntry> out =
      FilterPrimary({Entry("read"), Entry("read", 2), Entry("cat")});
  CHECK(out == std::vector<LexiconEntry>{Entry("cat"), Entry("read")});
}

TEST_CASE("make_split sizes, determinism and partition") {
  std::vector<LexiconEntry> entries;
  for (int i = 0; i < 10; ++i) entries.push_back(Entry(std::string(1, static_cast<char>('a' + i))));
  const DataSplit s = MakeSplit(entries, 2, 1, 7);
  CHECK(s.train.size() == 7);
  CHECK(s.dev.size() == 1);
  CHECK(s.test.size() == 2);
  const DataSplit again = MakeSplit(entries, 2, 1, 7);
  CHECK(again.train == s.train);
  CHECK(again.test == s.test);

  std::multiset<std::string> all;
  for (const auto* part : {&s.train, &s.dev, &s.test}) {
    for (const LexiconEntry& e : *part) all.insert(e.spelling);
  }
  CHECK(all.size() == 10);
  CHECK(std::set<std::string>(all.begin(), all.end()).size() == 10);

  CHECK_THROWS_AS(MakeSplit(entries, 6, 4, 7), ConfigError);
}

TEST_CASE("sample_entries") {
  std::vector<LexiconEntry> entries;
  for (int i = 0; i < 20; ++i) entries.push_back(Entry("w" + std::string(1, static_cast<char>('a' + i))));
  const std::vector<LexiconEntry> sample = SampleEntries(entries, 5, 3);
  CHECK(sample.size() == 5);
  CHECK(SampleEntries(entries, 5, 3) == sample);
  CHECK(std::is_sorted(sample.begin(), sample.end(), [](const auto& a, const auto& b) {
    return a.spelling < b.spelling;
  }));
  CHECK(SampleEntries(entries, 0, 3).size() == 20);
}

TEST_CASE("strip_marks levels") {
  const Pronunciation cat = {"K", "AE1", "T"};
  CHECK(StripMarks(cat, MarkLevel::kNone) == Pronunciation{"K", "AE", "T"});
  CHECK(StripMarks(cat, MarkLevel::kStressAndBoundary) == cat);
  CHECK(StripMarks({"K", "AE1", "-", "T"}, MarkLevel::kStress) == cat);
  CHECK(StripMarks({"K", "AE1", "-", "T"}, MarkLevel::kNone) == Pronunciation{"K", "AE", "T"});
}

TEST_CASE("split manifest files") {
  testing::TempDir dir("manifest");
  std::vector<LexiconEntry> entries;
  for (int i = 0; i < 6; ++i) entries.push_back(Entry(std::string(2, static_cast<char>('a' + i))));
  const DataSplit s = MakeSplit(entries, 1, 1, 3);
  WriteSplitManifest(s, dir.path().string());
  std::ifstream in(dir.File("split_test.txt"));
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == s.test[0].spelling);
}

TEST_CASE("bundled CMU dictionary retains the expected primary count") {
  const CmuParseResult r = ParseCmuFile(std::string(LITEG2P_TEST_DATA_DIR) + "/cmudict.dict");
  const std::vector<LexiconEntry> primary = FilterPrimary(r.entries);
  MESSAGE("primary entries: " << primary.size() << ", dropped spellings: "
                              << r.dropped_spellings);
  CHECK(r.errors.empty());
  CHECK(primary.size() == 125938);
  const DataSplit s = MakeSplit(primary, 12000, 2670, 42);
  CHECK(s.train.size() == primary.size() - 14670);
}

}  // namespace
}  // namespace liteg2p
