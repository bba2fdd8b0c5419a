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

// absa: ingest, annotate, vote, evaluate, regress, report.
//
// Exit status: 0 on success, 1 for usage and configuration errors, 2 for I/O
// errors, an unreachable backend and fatal data errors.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "absa/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct Flags {
  std::string config;
  std::optional<int> jobs;
  std::optional<std::string> backend_url;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  std::optional<std::size_t> limit;
  bool resume = true;
  bool no_resume = false;
};

absa::RunConfig BuildConfig(const Flags& flags) {
  absa::RunConfig config;
  if (!flags.config.empty()) config = absa::RunConfig::Load(flags.config);
  if (const char* env = std::getenv("ABSA_BACKEND_URL"); env && *env) {
    config.backend.endpoint = env;
    config.backend_kind = "http";
  }
  if (flags.backend_url) {
    config.backend.endpoint = *flags.backend_url;
    config.backend_kind = "http";
  }
  if (flags.jobs) config.jobs = *flags.jobs;
  if (flags.seed) config.sample_seed = *flags.seed;
  if (flags.output_dir) config.output_dir = *flags.output_dir;
  if (flags.limit) config.annotate_limit = *flags.limit;
  if (flags.no_resume) config.resume = false;
  return config;
}

int ExitCodeFor(absa::ErrorCode code) {
  switch (code) {
    case absa::ErrorCode::kConfig:
    case absa::ErrorCode::kTemplate:
      return kExitConfig;
    default:
      return kExitRuntime;
  }
}

void Log(std::string_view msg) { std::cerr << msg << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Aspect-based sentiment annotation with multi-seed voting"};
  app.require_subcommand(1);
  Flags flags;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", flags.config, "JSON run configuration")
        ->check(CLI::ExistingFile);
    sub->add_option("-o,--output-dir", flags.output_dir, "Output directory");
  };

  auto* ingest = app.add_subcommand("ingest", "Load, filter and sample reviews");
  add_common(ingest);
  ingest->add_option("--seed", flags.seed, "Sampling seed");

  auto* annotate =
      app.add_subcommand("annotate", "Query every worker for each review");
  add_common(annotate);
  annotate->add_option("-j,--jobs", flags.jobs, "Reviews in flight")
      ->check(CLI::PositiveNumber);
  annotate->add_option("--backend-url", flags.backend_url,
                       "Chat-completions endpoint (also ABSA_BACKEND_URL)");
  annotate->add_option("--limit", flags.limit,
                       "Stop after this many new reviews");
  annotate->add_flag("--resume,!--no-resume", flags.resume,
                     "Skip reviews already annotated (default on)");

  auto* vote = app.add_subcommand("vote", "Aggregate worker annotations");
  add_common(vote);
  auto* evaluate =
      app.add_subcommand("evaluate", "Compare voted ratings to star ratings");
  add_common(evaluate);
  auto* regress =
      app.add_subcommand("regress", "Fit and compare the rating regressions");
  add_common(regress);
  auto* report = app.add_subcommand("report", "Summarize all stage outputs");
  add_common(report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }
  flags.no_resume = !flags.resume;

  try {
    const absa::RunConfig config = BuildConfig(flags);
    if (ingest->parsed()) {
      absa::RunIngest(config, Log);
    } else if (annotate->parsed()) {
      const auto result = absa::RunAnnotate(config, Log);
      if (result.backend_unreachable) {
        Log("annotate: error: no worker call succeeded; is the backend at " +
            config.backend.endpoint + " reachable?");
        return kExitRuntime;
      }
    } else if (vote->parsed()) {
      absa::RunVote(config, Log);
    } else if (evaluate->parsed()) {
      absa::RunEvaluate(config, Log);
    } else if (regress->parsed()) {
      absa::RunRegress(config, Log);
    } else if (report->parsed()) {
      std::cout << absa::RunReport(config, Log);
    }
  } catch (const absa::Error& e) {
    Log(std::string("error [") + std::string(absa::ErrorCodeName(e.code())) +
        "]: " + e.what());
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    Log(std::string("error: ") + e.what());
    return kExitRuntime;
  }
  return kExitOk;
}
