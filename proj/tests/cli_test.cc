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

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "liteg2p/lexicon.h"
#include "test_util.h"

namespace liteg2p {
namespace {

int Run(const std::string& args) {
  const std::string cmd = std::string(LITEG2P_CLI_PATH) + " " + args;
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string Slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> Lines(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

// One tiny trained model shared by the cases below.
struct Fixture {
  testing::TempDir dir{"cli"};
  std::string cmu = dir.File("lex.dict");
  std::string run = dir.File("run");
  int train_status = 0;

  Fixture() {
    std::ofstream(cmu) << SerializeCmu(testing::SyntheticLexicon(60, 2));
    train_status = Run("train --cmu " + cmu + " --out " + run +
                       " --epochs 1 --batch-size 16 --test-size 5 --dev-size 5 > " +
                       dir.File("train.out") + " 2>&1");
  }
};

Fixture& Shared() {
  static Fixture f;
  return f;
}

TEST_CASE("usage errors exit with 2") {
  CHECK(Run("train --out /tmp/x > /dev/null 2>&1") == 2);
  CHECK(Run("nonsense > /dev/null 2>&1") == 2);
  CHECK(Run("export-mask --vocab klingon > /dev/null 2>&1") == 2);
  CHECK(Run("--help > /dev/null 2>&1") == 0);
}

TEST_CASE("train writes metrics and a final summary line") {
  Fixture& f = Shared();
  CHECK(f.train_status == 0);
  CHECK(Lines(f.run + "/metrics.jsonl").size() == 1);
  CHECK(std::filesystem::exists(f.run + "/best.ckpt"));
  const std::vector<std::string> out = Lines(f.dir.File("train.out"));
  REQUIRE_FALSE(out.empty());
  const nlohmann::json summary = nlohmann::json::parse(out.back());
  CHECK(summary.contains("best_dev_wer"));
}

TEST_CASE("size flag selects the preset") {
  Fixture& f = Shared();
  const std::string run = f.dir.File("medium");
  REQUIRE(Run("train --cmu " + f.cmu + " --out " + run +
              " --size medium --epochs 1 --batch-size 32 --test-size 5 --dev-size 5"
              " > /dev/null 2>&1") == 0);
  CHECK(Run("predict --model " + run + "/last.ckpt --word cat > /dev/null") == 0);
  std::ifstream in(run + "/last.ckpt", std::ios::binary);
  std::string head(16, '\0');
  in.read(head.data(), 16);
  uint64_t len = 0;
  for (int b = 0; b < 8; ++b) len |= static_cast<uint64_t>(static_cast<uint8_t>(head[8 + b])) << (8 * b);
  std::string meta(len, '\0');
  in.read(meta.data(), static_cast<std::streamsize>(len));
  CHECK(nlohmann::json::parse(meta).at("config").at("gru_hidden") == 192);
}

TEST_CASE("predict keeps input order and skips bad lines") {
  Fixture& f = Shared();
  const std::string model = f.run + "/best.ckpt";
  std::ofstream(f.dir.File("words.txt")) << "Cat\n  dog \nb4d\n\nextraordinary\n";
  REQUIRE(Run("predict --model " + model + " < " + f.dir.File("words.txt") + " > " +
              f.dir.File("pred.out") + " 2> " + f.dir.File("pred.err")) == 0);
  const std::vector<std::string> out = Lines(f.dir.File("pred.out"));
  REQUIRE(out.size() == 3);
  CHECK(out[0].rfind("cat\t", 0) == 0);
  CHECK(out[1].rfind("dog\t", 0) == 0);
  CHECK(out[2].rfind("extraordinary\t", 0) == 0);
  CHECK(Slurp(f.dir.File("pred.err")).find("b4d") != std::string::npos);

  CHECK(Run("predict --model " + model + " < /dev/null > " + f.dir.File("empty.out")) == 0);
  CHECK(Slurp(f.dir.File("empty.out")).empty());
}

TEST_CASE("unreadable checkpoints fail with 1") {
  Fixture& f = Shared();
  std::ofstream(f.dir.File("junk.ckpt")) << "not a checkpoint";
  CHECK(Run("predict --model " + f.dir.File("junk.ckpt") + " --word cat 2> /dev/null") == 1);
  CHECK(Run("predict --model " + f.dir.File("missing.ckpt") + " --word cat 2> /dev/null") == 1);
}

TEST_CASE("eval writes a summary and an error table") {
  Fixture& f = Shared();
  REQUIRE(Run("eval --model " + f.run + "/best.ckpt --cmu " + f.cmu + " --part dev --summary " +
              f.dir.File("summary.json") + " > /dev/null") == 0);
  const nlohmann::json j = nlohmann::json::parse(Slurp(f.dir.File("summary.json")));
  CHECK(j.at("words") == 5);
  CHECK(Lines(f.run + "/errors_dev.tsv").size() == 6);
}

TEST_CASE("bench reports every sampled word") {
  Fixture& f = Shared();
  REQUIRE(Run("bench --model " + f.run + "/best.ckpt --cmu " + f.cmu + " --n 7 --out " +
              f.dir.File("bench.json") + " > /dev/null") == 0);
  const nlohmann::json j = nlohmann::json::parse(Slurp(f.dir.File("bench.json")));
  CHECK(j.at("n") == 7);
  CHECK(j.at("words").size() == 7);
  CHECK(Run("bench --model " + f.run + "/best.ckpt --cmu " + f.cmu +
            " --n 1000 > /dev/null 2>&1") == 1);
}

TEST_CASE("export-mask writes one row per grapheme") {
  Fixture& f = Shared();
  REQUIRE(Run("export-mask --vocab base --out " + f.dir.File("mask.csv")) == 0);
  const std::vector<std::string> rows = Lines(f.dir.File("mask.csv"));
  CHECK(rows.size() == 1 + kNumGraphemes);
  CHECK(rows[0].rfind("grapheme,", 0) == 0);
}

}  // namespace
}  // namespace liteg2p
