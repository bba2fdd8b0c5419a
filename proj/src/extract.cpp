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

#include "absa/extract.hpp"

#include <algorithm>
#include <cmath>

namespace absa {

std::string_view ParseStatusName(ParseStatus s) {
  switch (s) {
    case ParseStatus::kParsed: return "parsed";
    case ParseStatus::kRepaired: return "repaired";
    case ParseStatus::kFailed: return "failed";
  }
  return "unknown";
}

std::string_view DefectKindName(DefectKind d) {
  switch (d) {
    case DefectKind::kMissingKey: return "missing-key";
    case DefectKind::kExtraKey: return "extra-key";
    case DefectKind::kClampedValue: return "clamped-value";
    case DefectKind::kNonIntegerCoerced: return "non-integer-coerced";
    case DefectKind::kFenceStripped: return "fence-stripped";
  }
  return "unknown";
}

namespace {

// Returns the end (one past '}') of the object opening at start, or npos.
std::size_t MatchObject(std::string_view s, std::size_t start) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = start; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

std::optional<std::string_view> FirstObject(std::string_view s) {
  for (std::size_t pos = s.find('{'); pos != std::string_view::npos;
       pos = s.find('{', pos + 1)) {
    const std::size_t end = MatchObject(s, pos);
    if (end != std::string_view::npos) return s.substr(pos, end - pos);
  }
  return std::nullopt;
}

// Body of the first ``` fence, without the info string line.
std::optional<std::string_view> FenceBody(std::string_view raw) {
  const std::size_t open = raw.find("```");
  if (open == std::string_view::npos) return std::nullopt;
  std::size_t body = raw.find('\n', open + 3);
  if (body == std::string_view::npos) return std::nullopt;
  ++body;
  std::size_t close = raw.find("```", body);
  if (close == std::string_view::npos) close = raw.size();
  return raw.substr(body, close - body);
}

ParseOutcome Failed(FailureReason reason, std::string detail) {
  ParseOutcome out;
  out.status = ParseStatus::kFailed;
  out.failure = reason;
  out.detail = std::move(detail);
  return out;
}

}  // namespace

ExtractedJson ExtractJson(std::string_view raw) {
  if (auto body = FenceBody(raw)) {
    if (auto obj = FirstObject(*body)) return {std::string(*obj), true};
  }
  if (auto obj = FirstObject(raw)) return {std::string(*obj), false};
  throw Error(ErrorCode::kNoJson, "no balanced JSON object in response");
}

ParseOutcome ParseAnnotation(std::string_view json_text,
                             const AspectSet& aspects, int worker_index,
                             std::int64_t seed) {
  const Json j = Json::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    return Failed(FailureReason::kSchemaViolation, "invalid JSON syntax");
  }
  if (!j.is_object()) {
    return Failed(FailureReason::kSchemaViolation, "top level is not an object");
  }

  WorkerAnnotation a;
  a.worker_index = worker_index;
  a.seed = seed;
  a.values.assign(aspects.size(), SentimentValue{});
  std::vector<bool> seen(aspects.size(), false);
  std::vector<Defect> defects;

  for (const auto& [key, val] : j.items()) {
    const auto k = aspects.IndexOf(key);
    if (!k) {
      defects.push_back({DefectKind::kExtraKey, key});
      continue;
    }
    seen[*k] = true;
    long long raw = 0;
    if (val.is_number_integer()) {
      raw = val.is_number_unsigned()
                ? static_cast<long long>(std::min<std::uint64_t>(
                      val.get<std::uint64_t>(), SentimentValue::kMax + 1))
                : val.get<long long>();
    } else if (val.is_number_float()) {
      const double d = val.get<double>();
      if (d != std::floor(d)) {
        return Failed(FailureReason::kSchemaViolation,
                      "non-integer value for '" + key + "'");
      }
      defects.push_back({DefectKind::kNonIntegerCoerced, key});
      raw = static_cast<long long>(
          std::clamp(d, -1.0, double(SentimentValue::kMax + 1)));
    } else {
      return Failed(FailureReason::kSchemaViolation,
                    "non-numeric value for '" + key + "'");
    }
    if (raw < SentimentValue::kNotMentioned || raw > SentimentValue::kMax) {
      defects.push_back({DefectKind::kClampedValue, key});
      raw = std::clamp<long long>(raw, SentimentValue::kNotMentioned,
                                  SentimentValue::kMax);
    }
    a.values[*k] = SentimentValue(raw);
  }
  for (std::size_t k = 0; k < aspects.size(); ++k) {
    if (!seen[k]) defects.push_back({DefectKind::kMissingKey, aspects[k].name});
  }

  ParseOutcome out;
  out.status = defects.empty() ? ParseStatus::kParsed : ParseStatus::kRepaired;
  out.annotation = std::move(a);
  out.defects = std::move(defects);
  return out;
}

ParseOutcome ParseResponse(std::string_view raw, const AspectSet& aspects,
                           int worker_index, std::int64_t seed) {
  ExtractedJson candidate;
  try {
    candidate = ExtractJson(raw);
  } catch (const Error& e) {
    return Failed(FailureReason::kNoJson, e.what());
  }
  ParseOutcome out =
      ParseAnnotation(candidate.text, aspects, worker_index, seed);
  if (candidate.fence_stripped && out.status != ParseStatus::kFailed) {
    out.defects.insert(out.defects.begin(),
                       Defect{DefectKind::kFenceStripped, ""});
    out.status = ParseStatus::kRepaired;
  }
  return out;
}

OrderedJson AnnotationObject(const WorkerAnnotation& a,
                             const AspectSet& aspects) {
  if (a.values.size() != aspects.size()) {
    throw Error(ErrorCode::kShape, "annotation length differs from aspect set");
  }
  OrderedJson j = OrderedJson::object();
  for (std::size_t k = 0; k < aspects.size(); ++k) {
    j[aspects[k].name] = a.values[k].value();
  }
  return j;
}

std::string SerializeAnnotation(const WorkerAnnotation& a,
                                const AspectSet& aspects) {
  return AnnotationObject(a, aspects).dump();
}

}  // namespace absa
