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

#include "absa/regress.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

namespace absa {

std::size_t DesignMatrix::ColumnIndex(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) {
    throw Error(ErrorCode::kShape, "no design column named '" + name + "'");
  }
  return static_cast<std::size_t>(it - names.begin());
}

DesignMatrix DesignMatrix::Select(std::span<const std::size_t> columns) const {
  DesignMatrix out;
  out.x.resize(x.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    out.x.col(static_cast<Eigen::Index>(j)) =
        x.col(static_cast<Eigen::Index>(columns[j]));
    out.names.push_back(names[columns[j]]);
  }
  out.y = y;
  out.intercept = intercept;
  return out;
}

DesignMatrix DesignMatrix::WithResponse(const Eigen::VectorXd& response) const {
  DesignMatrix out = *this;
  out.y = response;
  return out;
}

const TermEstimate* RegressionFit::Find(const std::string& name) const {
  for (const auto& t : terms) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

const CoefDiff* CoefComparison::Find(const std::string& name) const {
  for (const auto& t : terms) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

namespace {

Eigen::MatrixXd FullMatrix(const DesignMatrix& d,
                           std::span<const std::size_t> columns) {
  const Eigen::Index offset = d.intercept ? 1 : 0;
  Eigen::MatrixXd m(d.x.rows(),
                    offset + static_cast<Eigen::Index>(columns.size()));
  if (d.intercept) m.col(0).setOnes();
  for (std::size_t j = 0; j < columns.size(); ++j) {
    m.col(offset + static_cast<Eigen::Index>(j)) =
        d.x.col(static_cast<Eigen::Index>(columns[j]));
  }
  return m;
}

std::vector<std::size_t> AllColumns(const DesignMatrix& d) {
  std::vector<std::size_t> cols(static_cast<std::size_t>(d.x.cols()));
  for (std::size_t j = 0; j < cols.size(); ++j) cols[j] = j;
  return cols;
}

std::vector<std::string> TermNames(const DesignMatrix& d,
                                   std::span<const std::size_t> columns) {
  std::vector<std::string> out;
  if (d.intercept) out.emplace_back(kInterceptName);
  for (auto c : columns) out.push_back(d.names[c]);
  return out;
}

void CheckSize(std::size_t n, std::size_t p) {
  if (n <= p) {
    throw Error(ErrorCode::kInsufficientData,
                "need more rows than parameters (n=" + std::to_string(n) +
                    ", p=" + std::to_string(p) + ")");
  }
}

// Throws kSingularDesign naming the columns the pivoted QR could not place.
void CheckRank(const Eigen::ColPivHouseholderQR<Eigen::MatrixXd>& qr,
               const std::vector<std::string>& term_names) {
  const auto p = static_cast<Eigen::Index>(term_names.size());
  const Eigen::Index rank = qr.rank();
  if (rank == p) return;
  std::string names;
  const auto& perm = qr.colsPermutation().indices();
  std::vector<Eigen::Index> dependent;
  for (Eigen::Index i = rank; i < p; ++i) dependent.push_back(perm(i));
  std::sort(dependent.begin(), dependent.end());
  for (auto idx : dependent) {
    if (!names.empty()) names += ", ";
    names += term_names[static_cast<std::size_t>(idx)];
  }
  throw Error(ErrorCode::kSingularDesign,
              "design has rank " + std::to_string(rank) + " < " +
                  std::to_string(p) + "; linearly dependent column(s): " +
                  names);
}

double GaussianLogLik(double rss, double n) {
  return -0.5 * n * (std::log(2.0 * std::numbers::pi * rss / n) + 1.0);
}

double TwoSidedNormalP(double z) {
  if (std::isnan(z)) return std::numeric_limits<double>::quiet_NaN();
  return std::erfc(std::abs(z) / std::numbers::sqrt2);
}

}  // namespace

RegressionFit FitGlm(const DesignMatrix& design, GlmFamily family) {
  if (family != GlmFamily::kGaussianIdentity) {
    throw Error(ErrorCode::kConfig, "unsupported GLM family");
  }
  if (design.y.size() != design.x.rows()) {
    throw Error(ErrorCode::kShape, "response length differs from design rows");
  }
  if (static_cast<std::size_t>(design.x.cols()) != design.names.size()) {
    throw Error(ErrorCode::kShape, "column names do not match design width");
  }
  const auto columns = AllColumns(design);
  const auto term_names = TermNames(design, columns);
  const std::size_t n = design.rows();
  const std::size_t p = term_names.size();
  CheckSize(n, p);

  const Eigen::MatrixXd X = FullMatrix(design, columns);
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  CheckRank(qr, term_names);

  const Eigen::VectorXd beta = qr.solve(design.y);
  const Eigen::VectorXd resid = design.y - X * beta;
  const double rss = resid.squaredNorm();

  const auto pi = static_cast<Eigen::Index>(p);
  const Eigen::MatrixXd r =
      qr.matrixR().topLeftCorner(pi, pi).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv = r.triangularView<Eigen::Upper>().solve(
      Eigen::MatrixXd::Identity(pi, pi));
  const Eigen::MatrixXd perm = qr.colsPermutation();
  const Eigen::MatrixXd gram_inv =
      perm * (r_inv * r_inv.transpose()) * perm.transpose();
  const double sigma2 = rss / static_cast<double>(n - p);

  RegressionFit fit;
  fit.n = n;
  for (std::size_t j = 0; j < p; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    TermEstimate t;
    t.name = term_names[j];
    t.coef = beta(jj);
    t.se = std::sqrt(sigma2 * gram_inv(jj, jj));
    t.z = t.coef / t.se;
    t.p = TwoSidedNormalP(t.z);
    fit.terms.push_back(std::move(t));
  }
  fit.selected = design.names;

  const double nd = static_cast<double>(n);
  fit.deviance = rss;
  fit.null_deviance = design.intercept
                          ? (design.y.array() - design.y.mean()).square().sum()
                          : design.y.squaredNorm();
  fit.pseudo_r2 =
      fit.null_deviance > 0 ? 1.0 - fit.deviance / fit.null_deviance : 0.0;
  fit.loglik = GaussianLogLik(rss, nd);
  fit.aic = -2.0 * fit.loglik + 2.0 * static_cast<double>(p);
  fit.bic = -2.0 * fit.loglik + static_cast<double>(p) * std::log(nd);
  return fit;
}

double SubsetBic(const DesignMatrix& design,
                 std::span<const std::size_t> columns) {
  const Eigen::MatrixXd X = FullMatrix(design, columns);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(X);
  // Residual sum of squares is the tail of Q'y.
  const Eigen::VectorXd qty = qr.householderQ().adjoint() * design.y;
  const Eigen::Index p = X.cols();
  const double rss = qty.tail(qty.size() - p).squaredNorm();
  const double n = static_cast<double>(X.rows());
  return -2.0 * GaussianLogLik(rss, n) + static_cast<double>(p) * std::log(n);
}

namespace {

std::vector<std::size_t> MaskColumns(std::uint64_t mask,
                                     std::span<const std::size_t> cand_cols) {
  std::vector<std::size_t> cols;
  for (std::size_t i = 0; i < cand_cols.size(); ++i) {
    if (mask >> i & 1U) cols.push_back(cand_cols[i]);
  }
  return cols;
}

// Candidate positions in a mask, ascending.
std::vector<std::size_t> MaskPositions(std::uint64_t mask, std::size_t m) {
  std::vector<std::size_t> pos;
  for (std::size_t i = 0; i < m; ++i) {
    if (mask >> i & 1U) pos.push_back(i);
  }
  return pos;
}

bool Better(const SubsetScore& a, const SubsetScore& b, std::size_t m) {
  if (a.bic != b.bic) return a.bic < b.bic;
  if (a.num_terms != b.num_terms) return a.num_terms < b.num_terms;
  return MaskPositions(a.mask, m) < MaskPositions(b.mask, m);
}

int TermCount(const DesignMatrix& d, std::uint64_t mask) {
  return (d.intercept ? 1 : 0) + std::popcount(mask);
}

SubsetScore Stepwise(const DesignMatrix& design,
                     std::span<const std::size_t> cand_cols,
                     std::size_t& models_scored) {
  const std::size_t m = cand_cols.size();
  auto score = [&](std::uint64_t mask) {
    ++models_scored;
    return SubsetScore{mask, SubsetBic(design, MaskColumns(mask, cand_cols)),
                       TermCount(design, mask)};
  };
  SubsetScore current = score(0);
  for (;;) {
    SubsetScore best_move = current;
    for (std::size_t i = 0; i < m; ++i) {
      const SubsetScore s = score(current.mask ^ (std::uint64_t{1} << i));
      if (Better(s, best_move, m)) best_move = s;
    }
    if (best_move.mask == current.mask) return current;
    current = best_move;
  }
}

}  // namespace

SelectionResult BicSelect(const DesignMatrix& design,
                          std::span<const std::string> candidates,
                          const SelectionOptions& options) {
  std::vector<std::size_t> cand_cols;
  for (const auto& name : candidates) {
    cand_cols.push_back(design.ColumnIndex(name));
  }
  const std::size_t m = cand_cols.size();
  if (m > 63) {
    throw Error(ErrorCode::kPrecondition, "at most 63 candidate columns");
  }

  // Every subset of a full-rank design is full rank, so one check suffices.
  {
    const auto term_names = TermNames(design, cand_cols);
    CheckSize(design.rows(), term_names.size());
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(
        FullMatrix(design, cand_cols));
    CheckRank(qr, term_names);
  }

  SelectionResult result;
  SubsetScore best;
  if (m > options.exhaustive_limit) {
    result.stepwise = true;
    result.notices.push_back(
        std::to_string(m) + " candidates exceed the exhaustive limit of " +
        std::to_string(options.exhaustive_limit) +
        "; using forward-backward stepwise BIC search");
    best = Stepwise(design, cand_cols, result.models_scored);
  } else {
    const std::uint64_t total = std::uint64_t{1} << m;
    std::vector<double> bics(total);
    const auto count = static_cast<std::int64_t>(total);
    if (options.policy == ExecutionPolicy::kParallel) {
#pragma omp parallel for schedule(dynamic, 32)
      for (std::int64_t mask = 0; mask < count; ++mask) {
        bics[static_cast<std::size_t>(mask)] = SubsetBic(
            design, MaskColumns(static_cast<std::uint64_t>(mask), cand_cols));
      }
    } else {
      for (std::int64_t mask = 0; mask < count; ++mask) {
        bics[static_cast<std::size_t>(mask)] = SubsetBic(
            design, MaskColumns(static_cast<std::uint64_t>(mask), cand_cols));
      }
    }
    result.models_scored = total;
    best = {0, bics[0], TermCount(design, 0)};
    for (std::uint64_t mask = 0; mask < total; ++mask) {
      const SubsetScore s{mask, bics[mask], TermCount(design, mask)};
      if (options.keep_enumeration) result.enumeration.push_back(s);
      if (Better(s, best, m)) best = s;
    }
  }

  const auto cols = MaskColumns(best.mask, cand_cols);
  result.best = FitGlm(design.Select(cols));
  for (auto c : cols) result.support.push_back(design.names[c]);
  return result;
}

CoefComparison CompareCoefficients(const RegressionFit& fit_a,
                                   const RegressionFit& fit_b) {
  CoefComparison out;
  for (const auto& a : fit_a.terms) {
    const TermEstimate* b = fit_b.Find(a.name);
    if (b == nullptr) continue;
    out.terms.push_back(
        {a.name, (a.coef - b->coef) / std::sqrt(a.se * a.se + b->se * b->se)});
  }
  if (out.terms.empty()) {
    throw Error(ErrorCode::kEmptyComparison, "fits share no terms");
  }
  return out;
}

namespace {

OrderedJson Num(double v) {
  return std::isfinite(v) ? OrderedJson(v) : OrderedJson(nullptr);
}

}  // namespace

OrderedJson ToJson(const RegressionFit& fit) {
  OrderedJson terms = OrderedJson::array();
  for (const auto& t : fit.terms) {
    OrderedJson j;
    j["name"] = t.name;
    j["coef"] = Num(t.coef);
    j["se"] = Num(t.se);
    j["z"] = Num(t.z);
    j["p"] = Num(t.p);
    terms.push_back(std::move(j));
  }
  OrderedJson j;
  j["n"] = fit.n;
  j["terms"] = std::move(terms);
  j["selected"] = fit.selected;
  j["pseudo_r2"] = Num(fit.pseudo_r2);
  j["loglik"] = Num(fit.loglik);
  j["aic"] = Num(fit.aic);
  j["bic"] = Num(fit.bic);
  j["deviance"] = Num(fit.deviance);
  j["null_deviance"] = Num(fit.null_deviance);
  return j;
}

OrderedJson ToJson(const CoefComparison& cmp) {
  OrderedJson arr = OrderedJson::array();
  for (const auto& t : cmp.terms) {
    OrderedJson j;
    j["name"] = t.name;
    j["t"] = Num(t.t);
    arr.push_back(std::move(j));
  }
  return arr;
}

std::string SignificanceMark(double p) {
  if (p < 0.001) return "†";
  if (p < 0.05) return "*";
  return "";
}

namespace {

std::string TermCells(const TermEstimate* t) {
  char buf[96];
  if (t == nullptr) {
    std::snprintf(buf, sizeof buf, "%8s %9s %8s  ", "", "", "");
  } else {
    const std::string mark = SignificanceMark(t->p);
    std::snprintf(buf, sizeof buf, "%8.3f (%7.3f) %8.3f %s", t->coef, t->se,
                  t->z, mark.empty() ? " " : mark.c_str());
  }
  return buf;
}

std::vector<std::string> UnionTerms(const RegressionFit& a,
                                    const RegressionFit& b) {
  std::vector<std::string> names;
  for (const auto& t : a.terms) names.push_back(t.name);
  for (const auto& t : b.terms) {
    if (a.Find(t.name) == nullptr) names.push_back(t.name);
  }
  return names;
}

}  // namespace

std::string FormatFitTable(const RegressionFit& fit, const std::string& title) {
  std::string out;
  char buf[200];
  std::snprintf(buf, sizeof buf, "n=%-11zu %s\n%-13s %8s %9s %8s\n", fit.n,
                title.c_str(), "", "coef.", "(SE)", "z-value");
  out += buf;
  for (const auto& t : fit.terms) {
    std::snprintf(buf, sizeof buf, "%-13s %s\n", t.name.c_str(),
                  TermCells(&t).c_str());
    out += buf;
  }
  std::snprintf(buf, sizeof buf,
                "%-13s %8.3f\n%-13s %8.3f\n%-13s %8.3f\n", "pseudo-R2",
                fit.pseudo_r2, "AIC", fit.aic, "BIC", fit.bic);
  out += buf;
  return out;
}

std::string FormatComparisonTable(const RegressionFit& y1,
                                  const RegressionFit& y2,
                                  const CoefComparison& diff) {
  std::string out;
  char buf[320];
  std::snprintf(buf, sizeof buf, "n=%-11zu %-30s   %-30s   %s\n", y1.n,
                "Y1: Actual evaluation", "Y2: Predicted evaluation", "Diff.");
  out += buf;
  std::snprintf(buf, sizeof buf, "%-13s %8s %9s %8s     %8s %9s %8s     %8s\n",
                "", "coef.", "(SE)", "z-value", "coef.", "(SE)", "z-value",
                "t-value");
  out += buf;
  for (const auto& name : UnionTerms(y1, y2)) {
    const CoefDiff* d = diff.Find(name);
    char tcell[32] = "";
    if (d != nullptr) std::snprintf(tcell, sizeof tcell, "%8.3f", d->t);
    std::snprintf(buf, sizeof buf, "%-13s %s   %s   %s\n", name.c_str(),
                  TermCells(y1.Find(name)).c_str(),
                  TermCells(y2.Find(name)).c_str(), tcell);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "%-13s %8.3f %23s %8.3f\n", "pseudo-R2",
                y1.pseudo_r2, "", y2.pseudo_r2);
  out += buf;
  std::snprintf(buf, sizeof buf, "%-13s %8.3f %23s %8.3f\n", "AIC", y1.aic, "",
                y2.aic);
  out += buf;
  std::snprintf(buf, sizeof buf, "%-13s %8.3f %23s %8.3f\n", "BIC", y1.bic, "",
                y2.bic);
  out += buf;
  out += "Note. *: p<0.05, †: p<0.001\n";
  return out;
}

}  // namespace absa
