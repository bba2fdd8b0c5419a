// Copyright 2026 The absa-vote Authors.
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

// Drives the absa binary as a subprocess and checks exit codes.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <string>

#include "absa/io.hpp"
#include "test_util.hpp"

namespace {

using testutil::TempDir;

int RunCli(const std::string& args, const std::string& env = "") {
  const std::string cmd =
      env + " " + std::string(ABSA_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    testutil::WriteSyntheticReviews(dir_.File("reviews.json"), 30, 5);
    testutil::WriteText(dir_.File("config.json"), R"({
      "ingest": {"reviews": "reviews.json", "sample_size": 30},
      "backend": {"backoff_ms": 0, "max_attempts": 1},
      "output_dir": "out"
    })");
  }
  std::string cfg() const { return "--config " + dir_.File("config.json"); }
  TempDir dir_;
};

TEST_F(CliTest, FullPipelineSucceeds) {
  for (const char* stage : {"ingest", "annotate", "vote", "evaluate", "regress", "report"}) {
    EXPECT_EQ(RunCli(std::string(stage) + " " + cfg()), 0) << stage;
  }
  EXPECT_TRUE(absa::FileExists(dir_.File("out/report.txt")));
}

TEST_F(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(RunCli(""), 1);
  EXPECT_EQ(RunCli("frobnicate"), 1);
  EXPECT_EQ(RunCli("annotate --jobs 0 " + cfg()), 1);
  testutil::WriteText(dir_.File("bad.json"), R"({"unknown_key": true})");
  EXPECT_EQ(RunCli("ingest --config " + dir_.File("bad.json")), 1);
}

TEST_F(CliTest, DataErrorsExitTwo) {
  testutil::WriteText(dir_.File("big.json"), R"({
    "ingest": {"reviews": "reviews.json", "sample_size": 500}, "output_dir": "out"
  })");
  EXPECT_EQ(RunCli("ingest --config " + dir_.File("big.json")), 2);
  EXPECT_EQ(RunCli("vote " + cfg() + " --output-dir " + dir_.File("nothing-here")), 2);
}

TEST_F(CliTest, UnreachableBackendExitsTwo) {
  ASSERT_EQ(RunCli("ingest " + cfg()), 0);
  EXPECT_EQ(RunCli("annotate " + cfg() + " --backend-url http://127.0.0.1:1/v1/chat/completions"),
            2);
  EXPECT_EQ(RunCli("annotate --no-resume " + cfg(),
                "ABSA_BACKEND_URL=http://127.0.0.1:1/v1/chat/completions"),
            2);
}

TEST_F(CliTest, FlagsOverrideFile) {
  EXPECT_EQ(RunCli("ingest " + cfg() + " --output-dir " + dir_.File("alt") + " --seed 3"), 0);
  EXPECT_TRUE(absa::FileExists(dir_.File("alt/corpus.jsonl")));
  EXPECT_FALSE(absa::FileExists(dir_.File("out/corpus.jsonl")));
}

}  // namespace
