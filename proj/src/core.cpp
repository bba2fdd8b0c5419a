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

#include "absa/core.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "absa/default_assets.hpp"

namespace absa {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSchemaViolation: return "schema-violation";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kCorpusFormat: return "corpus-format";
    case ErrorCode::kInsufficientUsers: return "insufficient-users";
    case ErrorCode::kEmptyCorpus: return "empty-corpus";
    case ErrorCode::kTemplate: return "template";
    case ErrorCode::kContextOverflow: return "context-overflow";
    case ErrorCode::kNoJson: return "no-json";
    case ErrorCode::kPrecondition: return "precondition";
    case ErrorCode::kShape: return "shape";
    case ErrorCode::kSingularDesign: return "singular-design";
    case ErrorCode::kInsufficientData: return "insufficient-data";
    case ErrorCode::kEmptyComparison: return "empty-comparison";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kAllWorkersFailed: return "all-workers-failed";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

SentimentValue::SentimentValue(long long raw) {
  if (raw < kNotMentioned || raw > kMax) {
    throw Error(ErrorCode::kSchemaViolation,
                "sentiment value " + std::to_string(raw) +
                    " outside [0, 5]");
  }
  value_ = static_cast<std::uint8_t>(raw);
}

SentimentValue ValidateSentiment(long long raw) { return SentimentValue(raw); }

AspectSet::AspectSet(std::vector<AspectDef> aspects, std::size_t overall_index)
    : aspects_(std::move(aspects)), overall_index_(overall_index) {
  if (aspects_.empty()) {
    throw Error(ErrorCode::kSchemaViolation, "aspect set is empty");
  }
  if (overall_index_ >= aspects_.size()) {
    throw Error(ErrorCode::kSchemaViolation, "overall index out of range");
  }
  std::set<std::string> seen;
  for (const auto& a : aspects_) {
    if (a.name.empty() || a.description.empty()) {
      throw Error(ErrorCode::kSchemaViolation,
                  "aspect name and description must be non-empty");
    }
    if (!seen.insert(a.name).second) {
      throw Error(ErrorCode::kSchemaViolation,
                  "duplicate aspect name '" + a.name + "'");
    }
  }
}

AspectSet AspectSet::Default() {
  return FromJson(Json::parse(assets::kAspects));
}

AspectSet AspectSet::FromJson(const Json& j) {
  if (!j.is_object() || !j.contains("aspects") || !j["aspects"].is_array()) {
    throw Error(ErrorCode::kSchemaViolation,
                "aspect set JSON needs an \"aspects\" array");
  }
  std::vector<AspectDef> defs;
  std::optional<std::size_t> overall;
  for (const auto& item : j["aspects"]) {
    if (!item.is_object() || !item.contains("name") ||
        !item["name"].is_string() || !item.contains("description") ||
        !item["description"].is_string()) {
      throw Error(ErrorCode::kSchemaViolation,
                  "each aspect needs string \"name\" and \"description\"");
    }
    if (item.value("overall", false)) {
      if (overall) {
        throw Error(ErrorCode::kSchemaViolation,
                    "more than one aspect flagged overall");
      }
      overall = defs.size();
    }
    defs.push_back({item["name"].get<std::string>(),
                    item["description"].get<std::string>()});
  }
  if (!overall) {
    throw Error(ErrorCode::kSchemaViolation, "no aspect flagged overall");
  }
  return AspectSet(std::move(defs), *overall);
}

AspectSet AspectSet::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read aspect set " + path);
  try {
    return FromJson(Json::parse(in));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kSchemaViolation, path + ": " + e.what());
  }
}

OrderedJson AspectSet::ToJson() const {
  OrderedJson arr = OrderedJson::array();
  for (std::size_t k = 0; k < aspects_.size(); ++k) {
    OrderedJson a;
    a["name"] = aspects_[k].name;
    a["description"] = aspects_[k].description;
    if (k == overall_index_) a["overall"] = true;
    arr.push_back(std::move(a));
  }
  OrderedJson out;
  out["aspects"] = std::move(arr);
  return out;
}

std::optional<std::size_t> AspectSet::IndexOf(std::string_view name) const {
  for (std::size_t k = 0; k < aspects_.size(); ++k) {
    if (aspects_[k].name == name) return k;
  }
  return std::nullopt;
}

std::vector<std::string> AspectSet::Names() const {
  std::vector<std::string> names;
  names.reserve(aspects_.size());
  for (const auto& a : aspects_) names.push_back(a.name);
  return names;
}

OrderedJson ToJson(const ReviewRecord& r) {
  OrderedJson j;
  j["review_id"] = r.review_id;
  j["user_id"] = r.user_id;
  j["business_id"] = r.business_id;
  j["stars"] = r.stars;
  j["text"] = r.text;
  j["date"] = r.posted_at;
  return j;
}

namespace {

std::string RequireString(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw Error(ErrorCode::kSchemaViolation,
                std::string("missing string field \"") + key + "\"");
  }
  return it->get<std::string>();
}

}  // namespace

ReviewRecord ReviewFromJson(const Json& j) {
  if (!j.is_object()) {
    throw Error(ErrorCode::kSchemaViolation, "review is not a JSON object");
  }
  ReviewRecord r;
  r.review_id = RequireString(j, "review_id");
  r.user_id = RequireString(j, "user_id");
  r.business_id = RequireString(j, "business_id");
  r.text = RequireString(j, "text");
  r.posted_at = RequireString(j, "date");
  auto it = j.find("stars");
  if (it == j.end() || !it->is_number()) {
    throw Error(ErrorCode::kSchemaViolation, "missing numeric \"stars\"");
  }
  const double stars = it->get<double>();
  if (stars != std::floor(stars) || stars < 1 || stars > 5) {
    throw Error(ErrorCode::kSchemaViolation, "stars must be an integer 1-5");
  }
  r.stars = static_cast<int>(stars);
  if (r.review_id.empty() || r.text.empty()) {
    throw Error(ErrorCode::kSchemaViolation, "empty review_id or text");
  }
  return r;
}

OrderedJson ToJson(const WorkerAnnotation& a) {
  OrderedJson j;
  j["worker_index"] = a.worker_index;
  j["seed"] = a.seed;
  OrderedJson values = OrderedJson::array();
  for (auto v : a.values) values.push_back(v.value());
  j["values"] = std::move(values);
  return j;
}

WorkerAnnotation WorkerAnnotationFromJson(const Json& j) {
  WorkerAnnotation a;
  a.worker_index = j.at("worker_index").get<int>();
  a.seed = j.at("seed").get<std::int64_t>();
  for (const auto& v : j.at("values")) {
    a.values.push_back(SentimentValue(v.get<long long>()));
  }
  return a;
}

OrderedJson ToJson(const VotedAnnotation& v) {
  OrderedJson j;
  j["mention"] = v.mention;
  j["value"] = v.value;
  j["sentiment"] = v.sentiment;
  j["worker_count_used"] = v.worker_count_used;
  return j;
}

VotedAnnotation VotedAnnotationFromJson(const Json& j) {
  VotedAnnotation v;
  v.mention = j.at("mention").get<std::vector<int>>();
  v.value = j.at("value").get<std::vector<int>>();
  v.sentiment = j.at("sentiment").get<std::vector<int>>();
  v.worker_count_used = j.at("worker_count_used").get<int>();
  if (v.mention.size() != v.value.size() ||
      v.value.size() != v.sentiment.size()) {
    throw Error(ErrorCode::kSchemaViolation, "voted vectors differ in length");
  }
  return v;
}

std::string_view FailureReasonName(FailureReason r) {
  switch (r) {
    case FailureReason::kNoJson: return "no-json";
    case FailureReason::kSchemaViolation: return "schema-violation";
    case FailureReason::kBackendError: return "backend-error";
    case FailureReason::kAllWorkersFailed: return "all-workers-failed";
  }
  return "unknown";
}

FailureReason FailureReasonFromName(std::string_view name) {
  if (name == "no-json") return FailureReason::kNoJson;
  if (name == "schema-violation") return FailureReason::kSchemaViolation;
  if (name == "backend-error") return FailureReason::kBackendError;
  if (name == "all-workers-failed") return FailureReason::kAllWorkersFailed;
  throw Error(ErrorCode::kSchemaViolation,
              "unknown failure reason '" + std::string(name) + "'");
}

OrderedJson ToJson(const AnnotationFailure& f) {
  OrderedJson j;
  j["review_id"] = f.review_id;
  j["reason"] = std::string(FailureReasonName(f.reason));
  OrderedJson workers = OrderedJson::array();
  for (const auto& w : f.workers) {
    OrderedJson wj;
    wj["worker_index"] = w.worker_index;
    wj["seed"] = w.seed;
    wj["status"] = w.status;
    if (w.reason) wj["reason"] = std::string(FailureReasonName(*w.reason));
    if (!w.detail.empty()) wj["detail"] = w.detail;
    workers.push_back(std::move(wj));
  }
  j["workers"] = std::move(workers);
  return j;
}

AnnotationFailure AnnotationFailureFromJson(const Json& j) {
  AnnotationFailure f;
  f.review_id = j.at("review_id").get<std::string>();
  f.reason = FailureReasonFromName(j.at("reason").get<std::string>());
  for (const auto& wj : j.at("workers")) {
    WorkerParseStatus w;
    w.worker_index = wj.at("worker_index").get<int>();
    w.seed = wj.at("seed").get<std::int64_t>();
    w.status = wj.at("status").get<std::string>();
    if (wj.contains("reason")) {
      w.reason = FailureReasonFromName(wj["reason"].get<std::string>());
    }
    w.detail = wj.value("detail", "");
    f.workers.push_back(std::move(w));
  }
  return f;
}

}  // namespace absa
