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

// Turns free-form model output into validated worker annotations.

#ifndef ABSA_EXTRACT_HPP_
#define ABSA_EXTRACT_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absa/core.hpp"

namespace absa {

enum class ParseStatus { kParsed, kRepaired, kFailed };

enum class DefectKind {
  kMissingKey,
  kExtraKey,
  kClampedValue,
  kNonIntegerCoerced,
  kFenceStripped,
};

std::string_view ParseStatusName(ParseStatus s);
std::string_view DefectKindName(DefectKind d);

struct Defect {
  DefectKind kind;
  std::string key;  // empty for kFenceStripped

  friend bool operator==(const Defect&, const Defect&) = default;
};

struct ParseOutcome {
  ParseStatus status = ParseStatus::kFailed;
  std::optional<WorkerAnnotation> annotation;  // present iff not failed
  std::vector<Defect> defects;                 // empty iff status parsed
  std::optional<FailureReason> failure;        // set iff failed
  std::string detail;
};

struct ExtractedJson {
  std::string text;
  bool fence_stripped = false;
};

// First balanced top-level {...} in raw, after removing a Markdown code
// fence if one is present. Brace matching skips string literals. Throws
// kNoJson when no balanced object exists.
ExtractedJson ExtractJson(std::string_view raw);

// Never throws for content problems; see ParseOutcome.
ParseOutcome ParseAnnotation(std::string_view json_text,
                             const AspectSet& aspects, int worker_index,
                             std::int64_t seed);

// ExtractJson followed by ParseAnnotation; fence removal is recorded as a
// defect.
ParseOutcome ParseResponse(std::string_view raw, const AspectSet& aspects,
                           int worker_index, std::int64_t seed);

// Canonical annotation JSON: aspect names as keys, in aspect-set order.
OrderedJson AnnotationObject(const WorkerAnnotation& a,
                             const AspectSet& aspects);
std::string SerializeAnnotation(const WorkerAnnotation& a,
                                const AspectSet& aspects);

}  // namespace absa

#endif  // ABSA_EXTRACT_HPP_
