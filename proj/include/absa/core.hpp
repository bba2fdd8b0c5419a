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

// Domain types shared by every stage of the annotation pipeline.

#ifndef ABSA_CORE_HPP_
#define ABSA_CORE_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace absa {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

enum class ErrorCode {
  kSchemaViolation,
  kIo,
  kCorpusFormat,
  kInsufficientUsers,
  kEmptyCorpus,
  kTemplate,
  kContextOverflow,
  kNoJson,
  kPrecondition,
  kShape,
  kSingularDesign,
  kInsufficientData,
  kEmptyComparison,
  kConfig,
  kAllWorkersFailed,
};

std::string_view ErrorCodeName(ErrorCode code);

// The single exception type thrown by the library. Callers that need to
// branch on the failure kind inspect code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// A per-aspect rating. 0 means "not mentioned"; 1..5 is polarity.
class SentimentValue {
 public:
  static constexpr int kNotMentioned = 0;
  static constexpr int kMax = 5;

  constexpr SentimentValue() = default;
  // Throws kSchemaViolation when raw is outside [0, 5].
  explicit SentimentValue(long long raw);

  constexpr int value() const noexcept { return value_; }
  constexpr bool mentioned() const noexcept { return value_ != 0; }

  friend constexpr bool operator==(SentimentValue, SentimentValue) = default;
  friend constexpr auto operator<=>(SentimentValue, SentimentValue) = default;

 private:
  std::uint8_t value_ = 0;
};

SentimentValue ValidateSentiment(long long raw);

struct AspectDef {
  std::string name;
  std::string description;

  friend bool operator==(const AspectDef&, const AspectDef&) = default;
};

// Ordered aspect catalog. The order defines the vector layout of every
// annotation downstream.
class AspectSet {
 public:
  AspectSet(std::vector<AspectDef> aspects, std::size_t overall_index);

  // The 14-aspect restaurant catalog.
  static AspectSet Default();
  static AspectSet FromJson(const Json& j);
  static AspectSet Load(const std::string& path);
  OrderedJson ToJson() const;

  std::size_t size() const noexcept { return aspects_.size(); }
  const AspectDef& operator[](std::size_t k) const { return aspects_[k]; }
  const std::vector<AspectDef>& aspects() const noexcept { return aspects_; }
  std::size_t overall_index() const noexcept { return overall_index_; }
  std::optional<std::size_t> IndexOf(std::string_view name) const;
  std::vector<std::string> Names() const;

  friend bool operator==(const AspectSet&, const AspectSet&) = default;

 private:
  std::vector<AspectDef> aspects_;
  std::size_t overall_index_;
};

struct ReviewRecord {
  std::string review_id;
  std::string user_id;
  std::string business_id;
  int stars = 0;
  std::string text;
  // ISO-8601 "YYYY-MM-DD[ HH:MM:SS]"; lexicographic order is time order.
  std::string posted_at;

  friend bool operator==(const ReviewRecord&, const ReviewRecord&) = default;
};

OrderedJson ToJson(const ReviewRecord& r);
// Throws kSchemaViolation on missing fields or out-of-range stars.
ReviewRecord ReviewFromJson(const Json& j);

// One virtual annotator's 0-extended sentiment vector. The mention indicator
// is derived from the values and never stored.
struct WorkerAnnotation {
  int worker_index = 1;
  std::int64_t seed = 0;
  std::vector<SentimentValue> values;

  int mention(std::size_t k) const { return values[k].mentioned() ? 1 : 0; }
  friend bool operator==(const WorkerAnnotation&,
                         const WorkerAnnotation&) = default;
};

OrderedJson ToJson(const WorkerAnnotation& a);
WorkerAnnotation WorkerAnnotationFromJson(const Json& j);

struct VotedAnnotation {
  std::vector<int> mention;
  std::vector<int> value;
  std::vector<int> sentiment;
  int worker_count_used = 0;

  friend bool operator==(const VotedAnnotation&,
                         const VotedAnnotation&) = default;
};

OrderedJson ToJson(const VotedAnnotation& v);
VotedAnnotation VotedAnnotationFromJson(const Json& j);

enum class FailureReason {
  kNoJson,
  kSchemaViolation,
  kBackendError,
  kAllWorkersFailed,
};

std::string_view FailureReasonName(FailureReason r);
FailureReason FailureReasonFromName(std::string_view name);

struct WorkerParseStatus {
  int worker_index = 1;
  std::int64_t seed = 0;
  // "parsed", "repaired", "failed", "backend-error" or "timeout".
  std::string status;
  std::optional<FailureReason> reason;
  std::string detail;
};

// Present only when at least one worker failed for a review.
struct AnnotationFailure {
  std::string review_id;
  std::vector<WorkerParseStatus> workers;
  FailureReason reason = FailureReason::kAllWorkersFailed;
};

OrderedJson ToJson(const AnnotationFailure& f);
AnnotationFailure AnnotationFailureFromJson(const Json& j);

}  // namespace absa

#endif  // ABSA_CORE_HPP_
