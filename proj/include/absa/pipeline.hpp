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

// Pipeline stages behind the CLI. Each stage reads the files written by the
// previous one from the output directory, writes its own, and records a
// manifest entry. Stage outputs depend only on (input files, config).
//
//   ingest    corpus.jsonl stats.json stats.txt
//   annotate  audit.jsonl annotations.jsonl failures.jsonl timings.jsonl
//   vote      voted.jsonl voted.csv
//   evaluate  eval.json eval.txt eval_pairs.csv
//   regress   regress.json regress.txt
//   report    report.txt

#ifndef ABSA_PIPELINE_HPP_
#define ABSA_PIPELINE_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absa/core.hpp"
#include "absa/inference.hpp"
#include "absa/ingest.hpp"
#include "absa/prompt.hpp"

namespace absa {

struct RunConfig {
  // backend
  std::string backend_kind = "mock";  // "mock" or "http"
  std::string mock_spec = "always-valid";
  BackendConfig backend;
  WorkerPlan workers;

  // prompt assets; empty means the built-in default
  std::string aspects_path;
  std::string template_path;
  std::string instruction_path;
  std::string example_path;
  std::size_t context_budget = 8192;

  // ingest
  std::string reviews_path;
  std::string business_path;
  CategoryFilter filter = CategoryFilter::Restaurants();
  std::size_t sample_size = 1000;
  std::uint64_t sample_seed = 1;

  std::string output_dir = "out";
  int jobs = 1;
  bool resume = true;
  // Stop annotate after this many newly processed reviews.
  std::optional<std::size_t> annotate_limit;

  // evaluate
  std::string baseline = "seed1";  // "seed1" or "chance"
  std::string train_path;          // labels for the chance baseline
  std::string aspect_truth_path;   // optional per-aspect ground truth
  std::uint64_t chance_seed = 7;

  // regress
  std::string y2_mode = "reuse";  // "reuse" Y1's support or "reselect"

  // Relative paths resolve against base_dir. Unknown keys are rejected.
  static RunConfig FromJson(const Json& j, const std::string& base_dir = "");
  static RunConfig Load(const std::string& path);
  OrderedJson ToJson() const;
  // Throws kConfig for invalid values and missing referenced files.
  void Validate() const;
  std::string Hash() const;
};

// Key paths used everywhere below.
struct RunPaths {
  explicit RunPaths(std::string dir) : dir(std::move(dir)) {}
  std::string File(std::string_view name) const;
  std::string dir;
};

using Logger = std::function<void(std::string_view)>;

// Everything a stage needs that is derived from the config.
struct Assets {
  AspectSet aspects;
  PromptTemplate prompt;
  OneShotExample example;  // empty unless load_example
  static Assets FromConfig(const RunConfig& config, bool load_example = false);
};

std::shared_ptr<ChatBackend> MakeBackend(const RunConfig& config,
                                         const AspectSet& aspects);

struct IngestResult {
  std::size_t loaded = 0;
  std::size_t sampled = 0;
  CorpusStats stats;
};
IngestResult RunIngest(const RunConfig& config, const Logger& log);

struct AnnotateResult {
  std::size_t skipped = 0;    // already annotated before this run
  std::size_t processed = 0;  // reviews handled in this run
  std::size_t remaining = 0;  // left after annotate_limit
  std::size_t worker_calls = 0;
  std::size_t ok_responses = 0;
  std::size_t parsed_workers = 0;
  std::size_t failures = 0;  // reviews with a failure record
  bool backend_unreachable = false;
};
// backend may be null, in which case MakeBackend(config) is used.
AnnotateResult RunAnnotate(const RunConfig& config, const Logger& log,
                           std::shared_ptr<ChatBackend> backend = nullptr);

struct VoteResult {
  std::size_t voted = 0;
  std::size_t missing = 0;  // corpus reviews without any parsed worker
  std::size_t overall_not_mentioned = 0;
};
VoteResult RunVote(const RunConfig& config, const Logger& log);

struct EvaluateResult {
  OrderedJson report;
};
EvaluateResult RunEvaluate(const RunConfig& config, const Logger& log);

struct RegressResult {
  OrderedJson report;
};
RegressResult RunRegress(const RunConfig& config, const Logger& log);

std::string RunReport(const RunConfig& config, const Logger& log);

// SHA-256 of every stage output present in the output directory, except the
// manifest and the wall-clock timing log.
std::vector<std::pair<std::string, std::string>> OutputDigests(
    const RunConfig& config);

}  // namespace absa

#endif  // ABSA_PIPELINE_HPP_
