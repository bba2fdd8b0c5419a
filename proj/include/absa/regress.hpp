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

// Gaussian-identity GLM fits, exhaustive BIC subset selection and
// coefficient comparison between two fits.
//
// With the Gaussian family and identity link the IRLS fixed point is the
// least-squares solution, so a fit is one QR solve. Statistics:
//   loglik = -n/2 * (ln(2*pi*RSS/n) + 1)      (MLE variance)
//   AIC    = -2*loglik + 2p,   BIC = -2*loglik + p*ln(n)
//   SE_j   = sqrt(RSS/(n-p) * [(X'X)^-1]_jj), z_j = coef_j / SE_j
//   pseudo-R^2 = 1 - deviance / null deviance
// where p counts the coefficients, intercept included.

#ifndef ABSA_REGRESS_HPP_
#define ABSA_REGRESS_HPP_

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absa/core.hpp"

namespace absa {

enum class GlmFamily { kGaussianIdentity };

// Predictor columns exclude the intercept; it is prepended when fitting.
struct DesignMatrix {
  Eigen::MatrixXd x;
  std::vector<std::string> names;
  Eigen::VectorXd y;
  bool intercept = true;

  std::size_t rows() const { return static_cast<std::size_t>(x.rows()); }
  // Throws kShape when a name is unknown.
  std::size_t ColumnIndex(const std::string& name) const;
  DesignMatrix Select(std::span<const std::size_t> columns) const;
  DesignMatrix WithResponse(const Eigen::VectorXd& response) const;
};

inline constexpr const char kInterceptName[] = "intercept";

struct TermEstimate {
  std::string name;
  double coef = 0;
  double se = 0;
  double z = 0;
  double p = 1;  // two-sided, normal reference
};

struct RegressionFit {
  std::vector<TermEstimate> terms;  // intercept first when present
  double pseudo_r2 = 0;
  double loglik = 0;
  double aic = 0;
  double bic = 0;
  double deviance = 0;
  double null_deviance = 0;
  std::size_t n = 0;
  std::vector<std::string> selected;  // predictor columns, design order

  const TermEstimate* Find(const std::string& name) const;
  std::size_t num_params() const { return terms.size(); }
};

// Throws kInsufficientData when n <= p and kSingularDesign, naming the
// dependent columns, when the design is rank deficient.
RegressionFit FitGlm(const DesignMatrix& design,
                     GlmFamily family = GlmFamily::kGaussianIdentity);

// BIC of the least-squares fit on the given predictor columns (intercept
// added per the design flag). No rank checks; callers validate first.
double SubsetBic(const DesignMatrix& design,
                 std::span<const std::size_t> columns);

enum class ExecutionPolicy { kSerial, kParallel };

struct SubsetScore {
  std::uint64_t mask = 0;  // bit i set -> candidate i included
  double bic = 0;
  int num_terms = 0;
};

struct SelectionOptions {
  ExecutionPolicy policy = ExecutionPolicy::kParallel;
  bool keep_enumeration = false;
  std::size_t exhaustive_limit = 16;
};

struct SelectionResult {
  RegressionFit best;
  std::vector<std::string> support;  // candidates in the best model
  bool stepwise = false;
  std::size_t models_scored = 0;
  std::vector<SubsetScore> enumeration;  // filled when keep_enumeration
  std::vector<std::string> notices;
};

// Minimum-BIC subset of candidates, intercept always included. Exhaustive
// up to exhaustive_limit candidates; ties go to fewer terms, then to the
// lexicographically smaller list of candidate positions. Above the limit a
// forward-backward stepwise search is used and a notice recorded. The
// parallel policy scores subsets across OpenMP threads and merges by subset
// index, so it selects the same model as the serial one.
SelectionResult BicSelect(const DesignMatrix& design,
                          std::span<const std::string> candidates,
                          const SelectionOptions& options = {});

struct CoefDiff {
  std::string name;
  double t = 0;
};

struct CoefComparison {
  std::vector<CoefDiff> terms;
  const CoefDiff* Find(const std::string& name) const;
};

// t = (coef_a - coef_b) / sqrt(SE_a^2 + SE_b^2) for every term in both fits,
// in fit_a order. Throws kEmptyComparison when no term is shared.
CoefComparison CompareCoefficients(const RegressionFit& fit_a,
                                   const RegressionFit& fit_b);

OrderedJson ToJson(const RegressionFit& fit);
OrderedJson ToJson(const CoefComparison& cmp);

// "†" for p < 0.001, "*" for p < 0.05.
std::string SignificanceMark(double p);
std::string FormatFitTable(const RegressionFit& fit, const std::string& title);
std::string FormatComparisonTable(const RegressionFit& y1,
                                  const RegressionFit& y2,
                                  const CoefComparison& diff);

}  // namespace absa

#endif  // ABSA_REGRESS_HPP_
