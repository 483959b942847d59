/*
 * Copyright 2026 The dynk Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "process.hpp"

namespace {

namespace fs = std::filesystem;
using dynk::testing::Outcome;

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new fs::path(dynk::testing::scratch_dir("cli"));
    const auto synth = dynk::testing::run(DYNK_SYNTH_BIN,
                                          {"--instances", "60", "--methods", "3", "--output",
                                           (*dir_ / "corpus.jsonl").string()},
                                          *dir_);
    ASSERT_EQ(synth.exit_code, 0) << synth.err;
  }
  static void TearDownTestSuite() {
    fs::remove_all(*dir_);
    delete dir_;
  }

  static Outcome dynk(const std::vector<std::string>& args) {
    return dynk::testing::run(DYNK_CLI_BIN, args, *dir_);
  }
  static std::string path(const std::string& name) { return (*dir_ / name).string(); }
  static std::string corpus() { return path("corpus.jsonl"); }
  static void write(const std::string& name, const std::string& text) {
    std::ofstream(*dir_ / name, std::ios::binary) << text;
  }

  static fs::path* dir_;
};

fs::path* Cli::dir_ = nullptr;

TEST_F(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(dynk({}).exit_code, 1);
  EXPECT_EQ(dynk({"agree"}).exit_code, 1);
  EXPECT_EQ(dynk({"agree", "--input", corpus(), "--bogus"}).exit_code, 1);
  EXPECT_EQ(dynk({"agree", "--input", corpus(), "--k", "fixed:0"}).exit_code, 1);
  EXPECT_EQ(dynk({"agree", "--input", corpus(), "--selectors", "pair:method_1,zzz"}).exit_code, 1);
  EXPECT_EQ(dynk({"delta", "--input", corpus(), "--k", "dynamic"}).exit_code, 1);
  EXPECT_EQ(dynk({"bias", "--input", corpus(), "--bins", "thirds"}).exit_code, 1);
  EXPECT_EQ(dynk({"apd", "--input", corpus()}).exit_code, 1);
  EXPECT_EQ(dynk({"agree", "--input", corpus(), "--jobs", "0"}).exit_code, 1);
  EXPECT_EQ(dynk({"--help"}).exit_code, 0);
}

TEST_F(Cli, ValidationErrorsExitTwo) {
  write("bad.jsonl", R"({"id":"a","tokens":["x","y"],"attributions":{"g":[1]}})" "\n");
  const auto bad = dynk({"validate", "--input", path("bad.jsonl")});
  EXPECT_EQ(bad.exit_code, 2);
  EXPECT_NE(bad.err.find("line 1"), std::string::npos) << bad.err;

  write("single.jsonl", R"({"id":"a","tokens":["x","y"],"attributions":{"g":[1,2]}})" "\n");
  EXPECT_EQ(dynk({"agree", "--input", path("single.jsonl")}).exit_code, 2);
  // No annotated instance for a human comparison.
  EXPECT_EQ(dynk({"agree", "--input", path("single.jsonl"), "--selectors", "human"}).exit_code, 2);
  EXPECT_EQ(dynk({"bias", "--input", corpus(), "--bins", "edges:500"}).exit_code, 2);
}

TEST_F(Cli, IoErrorsExitThree) {
  EXPECT_EQ(dynk({"agree", "--input", path("missing.jsonl")}).exit_code, 3);
  EXPECT_EQ(dynk({"agree", "--input", corpus(), "--output", "/nonexistent/dir/out.csv"}).exit_code,
            3);
}

TEST_F(Cli, LenientSkipsBadRecords) {
  std::ifstream in(corpus());
  std::string first, second;
  std::getline(in, first);
  std::getline(in, second);
  write("mixed.jsonl", first + "\n{not json}\n" + second + "\n" + first + "\n");
  EXPECT_EQ(dynk({"validate", "--input", path("mixed.jsonl")}).exit_code, 2);
  const auto lenient = dynk({"validate", "--input", path("mixed.jsonl"), "--lenient"});
  ASSERT_EQ(lenient.exit_code, 0) << lenient.err;
  EXPECT_NE(lenient.out.find("instances,2\n"), std::string::npos);
  EXPECT_NE(lenient.out.find("skipped,2\n"), std::string::npos);
}

TEST_F(Cli, OutputsAreByteIdentical) {
  for (const std::string command : {"agree", "delta", "bias", "topk", "validate"}) {
    const auto a = dynk({command, "--input", corpus()});
    const auto b = dynk({command, "--input", corpus(), "--jobs", "4"});
    ASSERT_EQ(a.exit_code, 0) << command << ": " << a.err;
    EXPECT_FALSE(a.out.empty());
    EXPECT_EQ(a.out, b.out) << command;
  }
  const auto seeded = dynk({"agree", "--input", corpus(), "--tie", "random", "--seed", "9",
                            "--k", "fixed:3"});
  EXPECT_EQ(seeded.out, dynk({"agree", "--input", corpus(), "--tie", "random", "--seed", "9",
                              "--k", "fixed:3", "--jobs", "3"})
                            .out);

  ASSERT_EQ(dynk({"agree", "--input", corpus(), "--output", path("agree.csv")}).exit_code, 0);
  EXPECT_EQ(dynk::testing::slurp(path("agree.csv")), dynk({"agree", "--input", corpus()}).out);
}

TEST_F(Cli, IdenticalMethodsAgreePerfectlyAcrossK) {
  std::ostringstream text;
  for (int i = 0; i < 5; ++i) {
    nlohmann::json record;
    record["id"] = "s" + std::to_string(i);
    std::vector<std::string> tokens;
    std::vector<double> scores;
    for (int t = 0; t < 4 + i; ++t) {
      tokens.push_back("w" + std::to_string(t));
      scores.push_back(((t * 7 + i) % 5) * 0.25);
    }
    record["tokens"] = tokens;
    record["attributions"] = {{"left", scores}, {"right", scores}};
    text << record.dump() << "\n";
  }
  write("twins.jsonl", text.str());
  const auto result = dynk({"agree", "--input", path("twins.jsonl"), "--k", "fixed:1-5",
                            "--k", "dynamic", "--format", "json"});
  ASSERT_EQ(result.exit_code, 0) << result.err;
  const auto report = nlohmann::json::parse(result.out);
  ASSERT_EQ(report["entries"].size(), 6u);
  for (const auto& entry : report["entries"]) EXPECT_EQ(entry["mean_agreement"], 1.0);
}

TEST_F(Cli, ApdAcceptsNamedRuns) {
  for (int run = 1; run <= 3; ++run) {
    const auto synth = dynk::testing::run(
        DYNK_SYNTH_BIN,
        {"--instances", "30", "--methods", "3", "--run", std::to_string(run), "--output",
         path("run" + std::to_string(run) + ".jsonl")},
        *dir_);
    ASSERT_EQ(synth.exit_code, 0);
  }
  const auto result = dynk({"apd", "--input", "alpha=" + path("run1.jsonl"), "--input",
                            path("run2.jsonl"), "--input", path("run3.jsonl")});
  ASSERT_EQ(result.exit_code, 0) << result.err;
  EXPECT_EQ(result.out.rfind("run_id,apd\nalpha,", 0), 0u);
  EXPECT_NE(result.out.find("\nrun2,"), std::string::npos);
  EXPECT_NE(result.out.find("\nselected,"), std::string::npos);

  const auto json = dynk({"apd", "--input", path("run1.jsonl"), "--input", path("run2.jsonl"),
                          "--format", "json"});
  ASSERT_EQ(json.exit_code, 0);
  EXPECT_TRUE(nlohmann::json::parse(json.out).contains("selected"));
  EXPECT_EQ(dynk({"apd", "--input", path("run1.jsonl"), "--input", corpus()}).exit_code, 2);
}

TEST_F(Cli, SyntheticGeneratorIsDeterministic) {
  const auto generate = [](const std::string& name, const std::string& seed) {
    const auto result = dynk::testing::run(
        DYNK_SYNTH_BIN, {"--instances", "10", "--seed", seed, "--output", path(name)}, *dir_);
    EXPECT_EQ(result.exit_code, 0) << result.err;
    return dynk::testing::slurp(path(name));
  };
  const auto first = generate("s1.jsonl", "42");
  EXPECT_EQ(first, generate("s2.jsonl", "42"));
  EXPECT_NE(first, generate("s3.jsonl", "7"));
  EXPECT_EQ(dynk::testing::run(DYNK_SYNTH_BIN, {"--instances", "10"}, *dir_).exit_code, 1);
}

}  // namespace
