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

#include "absa/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "absa/hash.hpp"

namespace absa {
namespace {

template <typename T>
void CheckPairs(std::span<const T> pred, std::span<const T> truth,
                std::size_t min_len) {
  if (pred.size() != truth.size()) {
    throw Error(ErrorCode::kShape,
                "prediction/truth length mismatch: " +
                    std::to_string(pred.size()) + " vs " +
                    std::to_string(truth.size()));
  }
  if (pred.size() < min_len) {
    throw Error(ErrorCode::kPrecondition,
                "need at least " + std::to_string(min_len) + " pairs");
  }
}

}  // namespace

double Accuracy(std::span<const int> pred, std::span<const int> truth) {
  CheckPairs(pred, truth, 1);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == truth[i];
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

double Rmse(std::span<const double> pred, std::span<const double> truth) {
  CheckPairs(pred, truth, 1);
  double ss = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - truth[i];
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(pred.size()));
}

std::optional<double> Pearson(std::span<const double> pred,
                              std::span<const double> truth) {
  CheckPairs(pred, truth, 2);
  const double n = static_cast<double>(pred.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    mx += pred[i];
    my += truth[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double dx = pred[i] - mx;
    const double dy = truth[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0 || syy == 0) return std::nullopt;
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

std::vector<int> ChanceBaseline(std::span<const int> train_labels,
                                std::size_t n, std::uint64_t seed) {
  if (train_labels.empty()) {
    throw Error(ErrorCode::kPrecondition, "no training labels");
  }
  std::map<int, std::size_t> counts;
  for (int label : train_labels) ++counts[label];
  std::vector<int> labels;
  std::vector<std::size_t> cumulative;
  std::size_t total = 0;
  for (const auto& [label, count] : counts) {
    labels.push_back(label);
    total += count;
    cumulative.push_back(total);
  }
  SeededRng rng(seed);
  std::vector<int> out(n);
  for (auto& p : out) {
    const std::uint64_t draw = rng.Below(total);
    std::size_t i = 0;
    while (cumulative[i] <= draw) ++i;
    p = labels[i];
  }
  return out;
}

EvalReport Evaluate(std::span<const std::optional<int>> pred,
                    std::span<const int> truth) {
  if (pred.size() != truth.size()) {
    throw Error(ErrorCode::kShape, "prediction/truth length mismatch");
  }
  std::vector<int> p_int, t_int;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!pred[i]) continue;
    p_int.push_back(*pred[i]);
    t_int.push_back(truth[i]);
  }
  EvalReport r;
  r.n = p_int.size();
  r.missing = pred.size() - r.n;
  if (r.n == 0) return r;
  const std::vector<double> p(p_int.begin(), p_int.end());
  const std::vector<double> t(t_int.begin(), t_int.end());
  r.acc = Accuracy(p_int, t_int);
  r.rmse = Rmse(p, t);
  if (r.n >= 2) r.corr = Pearson(p, t);
  return r;
}

EvalReport Evaluate(std::span<const int> pred, std::span<const int> truth) {
  std::vector<std::optional<int>> wrapped(pred.begin(), pred.end());
  return Evaluate(wrapped, truth);
}

EvalReport AverageReports(std::span<const EvalReport> reports) {
  EvalReport out;
  auto mean = [&](auto member) -> std::optional<double> {
    double sum = 0;
    int count = 0;
    for (const auto& r : reports) {
      if (const auto& v = r.*member) {
        sum += *v;
        ++count;
      }
    }
    if (count == 0) return std::nullopt;
    return sum / count;
  };
  out.corr = mean(&EvalReport::corr);
  out.rmse = mean(&EvalReport::rmse);
  out.acc = mean(&EvalReport::acc);
  std::size_t n = 0, missing = 0;
  for (const auto& r : reports) {
    n += r.n;
    missing += r.missing;
  }
  if (!reports.empty()) {
    out.n = n / reports.size();
    out.missing = missing / reports.size();
  }
  return out;
}

namespace {

std::optional<double> Ratio(std::optional<double> num,
                            std::optional<double> den) {
  if (!num || !den || *den == 0) return std::nullopt;
  return *num / *den;
}

}  // namespace

LiftRow LiftOf(const EvalReport& candidate, const EvalReport& baseline) {
  return {Ratio(candidate.corr, baseline.corr),
          Ratio(baseline.rmse, candidate.rmse),
          Ratio(candidate.acc, baseline.acc)};
}

LiftReport Lift(const EvalReport& voted, std::span<const EvalReport> per_seed,
                const EvalReport& baseline) {
  return {LiftOf(voted, baseline), LiftOf(AverageReports(per_seed), baseline),
          LiftOf(baseline, baseline)};
}

namespace {

OrderedJson Opt(const std::optional<double>& v) {
  return v ? OrderedJson(*v) : OrderedJson(nullptr);
}

std::string Cell(const std::optional<double>& v) {
  if (!v) return "      -";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%7.3f", *v);
  return buf;
}

}  // namespace

OrderedJson ToJson(const EvalReport& r) {
  OrderedJson j;
  j["n"] = r.n;
  j["missing"] = r.missing;
  j["corr"] = Opt(r.corr);
  j["rmse"] = Opt(r.rmse);
  j["acc"] = Opt(r.acc);
  return j;
}

OrderedJson ToJson(const LiftRow& r) {
  OrderedJson j;
  j["corr"] = Opt(r.corr);
  j["rmse"] = Opt(r.rmse);
  j["acc"] = Opt(r.acc);
  return j;
}

OrderedJson ToJson(const LiftReport& r) {
  OrderedJson j;
  j["voted"] = ToJson(r.voted);
  j["per_seed_average"] = ToJson(r.per_seed_average);
  j["baseline"] = ToJson(r.baseline);
  return j;
}

std::string FormatEvalTable(std::span<const NamedReport> rows) {
  std::string out;
  char buf[200];
  std::snprintf(buf, sizeof buf, "%-24s %7s %7s %7s %6s %7s\n", "", "Corr.",
                "RMSE", "Acc.", "n", "missing");
  out += buf;
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof buf, "%-24s %s %s %s %6zu %7zu\n",
                  row.name.c_str(), Cell(row.report.corr).c_str(),
                  Cell(row.report.rmse).c_str(), Cell(row.report.acc).c_str(),
                  row.report.n, row.report.missing);
    out += buf;
  }
  return out;
}

std::string FormatLiftTable(const LiftReport& lift) {
  std::string out;
  char buf[200];
  std::snprintf(buf, sizeof buf, "%-32s %7s %7s %7s\n", "Majority voting",
                "Corr.", "RMSE", "Acc.");
  out += buf;
  auto row = [&](const char* name, const LiftRow& r) {
    std::snprintf(buf, sizeof buf, "%-32s %s %s %s\n", name,
                  Cell(r.corr).c_str(), Cell(r.rmse).c_str(),
                  Cell(r.acc).c_str());
    out += buf;
  };
  row(" - is employed", lift.voted);
  row(" - in-seed average", lift.per_seed_average);
  row(" - is not employed (baseline)", lift.baseline);
  return out;
}

}  // namespace absa
