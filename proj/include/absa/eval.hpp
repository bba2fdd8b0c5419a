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

#ifndef ABSA_EVAL_HPP_
#define ABSA_EVAL_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absa/core.hpp"

namespace absa {

// Exact-match rate. Throws kShape on length mismatch, kPrecondition if empty.
double Accuracy(std::span<const int> pred, std::span<const int> truth);
double Rmse(std::span<const double> pred, std::span<const double> truth);
// Sample Pearson r; std::nullopt when either side has zero variance. Needs
// at least two pairs.
std::optional<double> Pearson(std::span<const double> pred,
                              std::span<const double> truth);

// n draws from the empirical label distribution of train_labels.
std::vector<int> ChanceBaseline(std::span<const int> train_labels,
                                std::size_t n, std::uint64_t seed);

struct EvalReport {
  std::size_t n = 0;        // evaluated pairs
  std::size_t missing = 0;  // pairs dropped for an absent prediction
  std::optional<double> corr;
  std::optional<double> rmse;
  std::optional<double> acc;
};

// Pairs with no prediction are excluded and counted in missing.
EvalReport Evaluate(std::span<const std::optional<int>> pred,
                    std::span<const int> truth);
EvalReport Evaluate(std::span<const int> pred, std::span<const int> truth);

// Arithmetic mean of each metric over the reports where it is defined.
EvalReport AverageReports(std::span<const EvalReport> reports);

// Ratios oriented so > 1 is an improvement over the baseline: candidate /
// baseline for corr and acc, baseline / candidate for rmse. A cell is
// std::nullopt when either side is undefined or the denominator is zero.
struct LiftRow {
  std::optional<double> corr;
  std::optional<double> rmse;
  std::optional<double> acc;
};

struct LiftReport {
  LiftRow voted;
  LiftRow per_seed_average;
  LiftRow baseline;
};

LiftRow LiftOf(const EvalReport& candidate, const EvalReport& baseline);
LiftReport Lift(const EvalReport& voted, std::span<const EvalReport> per_seed,
                const EvalReport& baseline);

OrderedJson ToJson(const EvalReport& r);
OrderedJson ToJson(const LiftRow& r);
OrderedJson ToJson(const LiftReport& r);

struct NamedReport {
  std::string name;
  EvalReport report;
};
std::string FormatEvalTable(std::span<const NamedReport> rows);
std::string FormatLiftTable(const LiftReport& lift);

}  // namespace absa

#endif  // ABSA_EVAL_HPP_
