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

#include "absa/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <future>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "absa/eval.hpp"
#include "absa/extract.hpp"
#include "absa/hash.hpp"
#include "absa/io.hpp"
#include "absa/manifest.hpp"
#include "absa/regress.hpp"
#include "absa/voting.hpp"

namespace absa {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Config

namespace {

void RejectUnknownKeys(const Json& obj, std::initializer_list<const char*> keys,
                       const std::string& where) {
  if (!obj.is_object()) {
    throw Error(ErrorCode::kConfig, where + " must be an object");
  }
  for (const auto& [key, val] : obj.items()) {
    if (std::none_of(keys.begin(), keys.end(),
                     [&](const char* k) { return key == k; })) {
      throw Error(ErrorCode::kConfig,
                  "unknown config key '" + where + "." + key + "'");
    }
  }
}

std::string ResolvePath(const std::string& base, const std::string& p) {
  if (p.empty() || base.empty() || fs::path(p).is_absolute()) return p;
  return (fs::path(base) / p).lexically_normal().string();
}

template <typename T>
void Read(const Json& obj, const char* key, T& out) {
  if (auto it = obj.find(key); it != obj.end()) {
    try {
      out = it->get<T>();
    } catch (const Json::exception&) {
      throw Error(ErrorCode::kConfig,
                  std::string("config key '") + key + "' has the wrong type");
    }
  }
}

void ReadPath(const Json& obj, const char* key, const std::string& base,
              std::string& out) {
  std::string raw;
  Read(obj, key, raw);
  if (!raw.empty()) out = ResolvePath(base, raw);
}

}  // namespace

RunConfig RunConfig::FromJson(const Json& j, const std::string& base_dir) {
  RejectUnknownKeys(j,
                    {"backend", "workers", "prompt", "ingest", "output_dir",
                     "jobs", "resume", "annotate_limit", "evaluate", "regress"},
                    "config");
  RunConfig c;
  if (auto it = j.find("backend"); it != j.end()) {
    const Json& b = *it;
    RejectUnknownKeys(b,
                      {"kind", "mock_spec", "url", "model", "temperature",
                       "max_tokens", "timeout_ms", "max_attempts", "backoff_ms",
                       "max_in_flight"},
                      "backend");
    Read(b, "kind", c.backend_kind);
    Read(b, "mock_spec", c.mock_spec);
    Read(b, "url", c.backend.endpoint);
    Read(b, "model", c.backend.model);
    Read(b, "temperature", c.backend.temperature);
    Read(b, "max_tokens", c.backend.max_tokens);
    Read(b, "max_in_flight", c.backend.max_in_flight);
    Read(b, "max_attempts", c.backend.retry.max_attempts);
    std::int64_t ms = c.backend.timeout.count();
    Read(b, "timeout_ms", ms);
    c.backend.timeout = std::chrono::milliseconds(ms);
    ms = c.backend.retry.backoff.count();
    Read(b, "backoff_ms", ms);
    c.backend.retry.backoff = std::chrono::milliseconds(ms);
  }
  if (auto it = j.find("workers"); it != j.end()) {
    RejectUnknownKeys(*it, {"seeds", "count"}, "workers");
    if (it->contains("seeds")) {
      Read(*it, "seeds", c.workers.seeds);
    } else if (it->contains("count")) {
      int count = 0;
      Read(*it, "count", count);
      if (count < 1) throw Error(ErrorCode::kConfig, "workers.count must be >= 1");
      c.workers = WorkerPlan::Sequential(count);
    }
  }
  if (auto it = j.find("prompt"); it != j.end()) {
    RejectUnknownKeys(*it,
                      {"aspects", "template", "instruction", "example",
                       "context_budget"},
                      "prompt");
    ReadPath(*it, "aspects", base_dir, c.aspects_path);
    ReadPath(*it, "template", base_dir, c.template_path);
    ReadPath(*it, "instruction", base_dir, c.instruction_path);
    ReadPath(*it, "example", base_dir, c.example_path);
    Read(*it, "context_budget", c.context_budget);
  }
  if (auto it = j.find("ingest"); it != j.end()) {
    RejectUnknownKeys(*it,
                      {"reviews", "business", "include", "exclude",
                       "sample_size", "seed"},
                      "ingest");
    ReadPath(*it, "reviews", base_dir, c.reviews_path);
    ReadPath(*it, "business", base_dir, c.business_path);
    Read(*it, "include", c.filter.include);
    Read(*it, "exclude", c.filter.exclude);
    Read(*it, "sample_size", c.sample_size);
    Read(*it, "seed", c.sample_seed);
  }
  ReadPath(j, "output_dir", base_dir, c.output_dir);
  Read(j, "jobs", c.jobs);
  Read(j, "resume", c.resume);
  if (auto it = j.find("annotate_limit"); it != j.end() && !it->is_null()) {
    std::size_t limit = 0;
    Read(j, "annotate_limit", limit);
    c.annotate_limit = limit;
  }
  if (auto it = j.find("evaluate"); it != j.end()) {
    RejectUnknownKeys(*it, {"baseline", "train", "aspect_truth", "chance_seed"},
                      "evaluate");
    Read(*it, "baseline", c.baseline);
    ReadPath(*it, "train", base_dir, c.train_path);
    ReadPath(*it, "aspect_truth", base_dir, c.aspect_truth_path);
    Read(*it, "chance_seed", c.chance_seed);
  }
  if (auto it = j.find("regress"); it != j.end()) {
    RejectUnknownKeys(*it, {"y2_mode"}, "regress");
    Read(*it, "y2_mode", c.y2_mode);
  }
  return c;
}

RunConfig RunConfig::Load(const std::string& path) {
  Json j;
  try {
    j = Json::parse(ReadFile(path));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kConfig, path + ": " + e.what());
  }
  return FromJson(j, fs::path(path).parent_path().string());
}

OrderedJson RunConfig::ToJson() const {
  OrderedJson j;
  OrderedJson b;
  b["kind"] = backend_kind;
  b["mock_spec"] = mock_spec;
  b["url"] = backend.endpoint;
  b["model"] = backend.model;
  b["temperature"] = backend.temperature;
  b["max_tokens"] = backend.max_tokens;
  b["timeout_ms"] = backend.timeout.count();
  b["max_attempts"] = backend.retry.max_attempts;
  b["backoff_ms"] = backend.retry.backoff.count();
  b["max_in_flight"] = backend.max_in_flight;
  j["backend"] = std::move(b);
  j["workers"]["seeds"] = workers.seeds;
  j["prompt"]["aspects"] = aspects_path;
  j["prompt"]["template"] = template_path;
  j["prompt"]["instruction"] = instruction_path;
  j["prompt"]["example"] = example_path;
  j["prompt"]["context_budget"] = context_budget;
  j["ingest"]["reviews"] = reviews_path;
  j["ingest"]["business"] = business_path;
  j["ingest"]["include"] = filter.include;
  j["ingest"]["exclude"] = filter.exclude;
  j["ingest"]["sample_size"] = sample_size;
  j["ingest"]["seed"] = sample_seed;
  j["output_dir"] = output_dir;
  j["jobs"] = jobs;
  j["resume"] = resume;
  j["annotate_limit"] =
      annotate_limit ? OrderedJson(*annotate_limit) : OrderedJson(nullptr);
  j["evaluate"]["baseline"] = baseline;
  j["evaluate"]["train"] = train_path;
  j["evaluate"]["aspect_truth"] = aspect_truth_path;
  j["evaluate"]["chance_seed"] = chance_seed;
  j["regress"]["y2_mode"] = y2_mode;
  return j;
}

void RunConfig::Validate() const {
  if (backend_kind != "mock" && backend_kind != "http") {
    throw Error(ErrorCode::kConfig, "backend.kind must be \"mock\" or \"http\"");
  }
  if (backend_kind == "mock") MockSpec::Parse(mock_spec);
  backend.Validate();
  workers.Validate();
  if (jobs < 1) throw Error(ErrorCode::kConfig, "jobs must be >= 1");
  if (sample_size < 1) throw Error(ErrorCode::kConfig, "sample_size must be >= 1");
  if (baseline != "seed1" && baseline != "chance") {
    throw Error(ErrorCode::kConfig,
                "evaluate.baseline must be \"seed1\" or \"chance\"");
  }
  if (y2_mode != "reuse" && y2_mode != "reselect") {
    throw Error(ErrorCode::kConfig,
                "regress.y2_mode must be \"reuse\" or \"reselect\"");
  }
  if (template_path.empty() != instruction_path.empty()) {
    throw Error(ErrorCode::kConfig,
                "prompt.template and prompt.instruction go together");
  }
  for (const auto* p : {&aspects_path, &template_path, &instruction_path,
                        &example_path, &reviews_path, &business_path,
                        &train_path, &aspect_truth_path}) {
    if (!p->empty() && !FileExists(*p)) {
      throw Error(ErrorCode::kConfig, "referenced file does not exist: " + *p);
    }
  }
}

// Execution knobs do not change stage outputs and stay out of the hash.
std::string RunConfig::Hash() const {
  OrderedJson j = ToJson();
  for (const char* key : {"output_dir", "jobs", "resume", "annotate_limit"}) {
    j.erase(key);
  }
  return Sha256Hex(j.dump());
}

std::string RunPaths::File(std::string_view name) const {
  return (fs::path(dir) / std::string(name)).string();
}

Assets Assets::FromConfig(const RunConfig& config, bool load_example) {
  AspectSet aspects = config.aspects_path.empty()
                          ? AspectSet::Default()
                          : AspectSet::Load(config.aspects_path);
  PromptTemplate prompt =
      config.template_path.empty()
          ? PromptTemplate::Default()
          : PromptTemplate::Load(config.template_path, config.instruction_path);
  OneShotExample example;
  if (load_example) {
    example = config.example_path.empty()
                  ? OneShotExample::Default(aspects)
                  : OneShotExample::Load(config.example_path, aspects);
  }
  return {std::move(aspects), std::move(prompt), std::move(example)};
}

std::shared_ptr<ChatBackend> MakeBackend(const RunConfig& config,
                                         const AspectSet& aspects) {
  if (config.backend_kind == "mock") {
    return MakeMockBackend(MockSpec::Parse(config.mock_spec), aspects);
  }
  return MakeHttpBackend(config.backend.endpoint);
}

// ---------------------------------------------------------------------------
// Shared helpers

namespace {

constexpr const char kCorpus[] = "corpus.jsonl";
constexpr const char kStatsJson[] = "stats.json";
constexpr const char kStatsTxt[] = "stats.txt";
constexpr const char kAudit[] = "audit.jsonl";
constexpr const char kAnnotations[] = "annotations.jsonl";
constexpr const char kFailures[] = "failures.jsonl";
constexpr const char kTimings[] = "timings.jsonl";
constexpr const char kVotedJsonl[] = "voted.jsonl";
constexpr const char kVotedCsv[] = "voted.csv";
constexpr const char kEvalJson[] = "eval.json";
constexpr const char kEvalTxt[] = "eval.txt";
constexpr const char kEvalPairs[] = "eval_pairs.csv";
constexpr const char kRegressJson[] = "regress.json";
constexpr const char kRegressTxt[] = "regress.txt";
constexpr const char kReportTxt[] = "report.txt";
constexpr const char kManifest[] = "manifest.json";

void Note(const Logger& log, const std::string& msg) {
  if (log) log(msg);
}

StageRecord BeginStage(const RunConfig& config, const Assets& assets,
                       std::string stage) {
  StageRecord rec;
  rec.stage = std::move(stage);
  rec.config_hash = config.Hash();
  rec.template_hash = assets.prompt.Hash();
  rec.aspects_hash = Sha256Hex(assets.aspects.ToJson().dump());
  rec.model = config.backend_kind == "mock" ? "mock:" + config.mock_spec
                                            : config.backend.model;
  rec.started_at = UtcTimestamp();
  return rec;
}

struct ParsedLines {
  std::vector<Json> records;
  std::size_t bad = 0;
};

ParsedLines ReadJsonLines(const std::string& path) {
  ParsedLines out;
  for (const auto& line : ReadLines(path)) {
    if (line.empty()) continue;
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      ++out.bad;
      continue;
    }
    out.records.push_back(std::move(j));
  }
  return out;
}

// review_id -> parsed workers, sorted by worker index.
std::unordered_map<std::string, WorkerGroup> ReadAnnotations(
    const std::string& path, std::size_t num_aspects) {
  std::unordered_map<std::string, WorkerGroup> groups;
  for (const auto& j : ReadJsonLines(path).records) {
    WorkerAnnotation a = WorkerAnnotationFromJson(j);
    if (a.values.size() != num_aspects) {
      throw Error(ErrorCode::kShape,
                  "annotation for " + j.value("review_id", "?") + " has " +
                      std::to_string(a.values.size()) + " values, expected " +
                      std::to_string(num_aspects));
    }
    groups[j.at("review_id").get<std::string>()].push_back(std::move(a));
  }
  for (auto& [id, g] : groups) {
    std::sort(g.begin(), g.end(), [](const auto& a, const auto& b) {
      return a.worker_index < b.worker_index;
    });
  }
  return groups;
}

std::unordered_map<std::string, VotedAnnotation> ReadVoted(
    const std::string& path) {
  std::unordered_map<std::string, VotedAnnotation> voted;
  for (const auto& j : ReadJsonLines(path).records) {
    voted[j.at("review_id").get<std::string>()] = VotedAnnotationFromJson(j);
  }
  return voted;
}

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string JoinLines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// ingest

IngestResult RunIngest(const RunConfig& config, const Logger& log) {
  config.Validate();
  if (config.reviews_path.empty()) {
    throw Error(ErrorCode::kConfig, "ingest.reviews is not set");
  }
  const Assets assets = Assets::FromConfig(config, true);
  StageRecord rec = BeginStage(config, assets, "ingest");
  const RunPaths paths(config.output_dir);

  BusinessCategories businesses;
  if (!config.business_path.empty()) {
    businesses = LoadBusinessCategories(config.business_path);
  }
  Corpus corpus =
      LoadReviews(config.reviews_path, config.filter,
                  config.business_path.empty() ? nullptr : &businesses);
  for (const auto& w : corpus.load.warnings) Note(log, w);

  // The one-shot review never enters the evaluated sample.
  if (!assets.example.review_id.empty()) {
    std::erase_if(corpus.records, [&](const ReviewRecord& r) {
      return r.review_id == assets.example.review_id;
    });
  }

  IngestResult result;
  result.loaded = corpus.records.size();
  const Corpus sample =
      SampleOnePerUser(corpus, config.sample_size, config.sample_seed);
  result.sampled = sample.records.size();
  result.stats = ComputeCorpusStats(sample);

  WriteCorpus(sample, paths.File(kCorpus));
  OrderedJson stats = ToJson(result.stats);
  stats["load"]["lines"] = corpus.load.lines;
  stats["load"]["malformed"] = corpus.load.malformed;
  stats["load"]["filtered_out"] = corpus.load.filtered_out;
  stats["load"]["eligible"] = result.loaded;
  WriteFileAtomic(paths.File(kStatsJson), stats.dump(2) + "\n");
  WriteFileAtomic(paths.File(kStatsTxt), FormatStatsTable(result.stats));

  rec.inputs = {config.reviews_path};
  if (!config.business_path.empty()) rec.inputs.push_back(config.business_path);
  rec.outputs = {paths.File(kCorpus), paths.File(kStatsJson),
                 paths.File(kStatsTxt)};
  RecordStage(paths.File(kManifest), rec);
  Note(log, "ingest: sampled " + std::to_string(result.sampled) + " of " +
                std::to_string(result.loaded) + " eligible reviews");
  return result;
}

// ---------------------------------------------------------------------------
// annotate

namespace {

struct ReviewOutcome {
  std::vector<std::string> annotation_lines;
  std::optional<std::string> failure_line;
  std::vector<std::string> audit_lines;
  std::vector<std::string> timing_lines;
  std::size_t ok = 0;
  std::size_t parsed = 0;
};

ReviewOutcome AnnotateReview(InferenceClient& client, const Assets& assets,
                             const RunConfig& config,
                             const ReviewRecord& review) {
  ReviewOutcome out;
  std::vector<RawWorkerResponse> responses;
  std::string prompt_error;
  try {
    PromptOptions opts;
    opts.context_budget = config.context_budget;
    const std::string prompt = BuildPrompt(assets.prompt, assets.aspects,
                                           assets.example, review, opts);
    responses = client.RunWorkers(prompt, config.workers);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kContextOverflow) throw;
    prompt_error = e.what();
    for (std::size_t w = 0; w < config.workers.size(); ++w) {
      RawWorkerResponse r;
      r.worker_index = static_cast<int>(w) + 1;
      r.seed = config.workers.seeds[w];
      r.status = ResponseStatus::kBackendError;
      r.error = prompt_error;
      responses.push_back(std::move(r));
    }
  }

  AnnotationFailure failure;
  failure.review_id = review.review_id;
  std::optional<FailureReason> first_reason;
  for (const auto& r : responses) {
    WorkerParseStatus status{r.worker_index, r.seed, "", std::nullopt, ""};
    if (r.status == ResponseStatus::kOk) {
      ++out.ok;
      const ParseOutcome parsed =
          ParseResponse(r.text, assets.aspects, r.worker_index, r.seed);
      status.status = std::string(ParseStatusName(parsed.status));
      if (parsed.annotation) {
        ++out.parsed;
        OrderedJson j;
        j["review_id"] = review.review_id;
        const OrderedJson body = ToJson(*parsed.annotation);
        for (const auto& [key, val] : body.items()) j[key] = val;
        j["status"] = status.status;
        OrderedJson defects = OrderedJson::array();
        for (const auto& d : parsed.defects) {
          OrderedJson dj;
          dj["kind"] = std::string(DefectKindName(d.kind));
          if (!d.key.empty()) dj["key"] = d.key;
          defects.push_back(std::move(dj));
        }
        j["defects"] = std::move(defects);
        out.annotation_lines.push_back(j.dump());
      } else {
        status.reason = parsed.failure;
        status.detail = parsed.detail;
      }
    } else {
      status.status = std::string(ResponseStatusName(r.status));
      status.reason = FailureReason::kBackendError;
      status.detail = r.error;
    }
    if (status.reason && !first_reason) first_reason = status.reason;
    failure.workers.push_back(std::move(status));

    out.audit_lines.push_back(AuditRecord(review.review_id, r).dump());
    OrderedJson t;
    t["review_id"] = review.review_id;
    t["worker_index"] = r.worker_index;
    t["latency_ms"] = r.latency_ms;
    t["attempts"] = r.attempts;
    out.timing_lines.push_back(t.dump());
  }
  if (first_reason) {
    failure.reason = out.parsed == 0 ? FailureReason::kAllWorkersFailed
                                     : *first_reason;
    out.failure_line = ToJson(failure).dump();
  }
  return out;
}

// Keeps only lines whose review_id is in keep; rewrites the file if anything
// was dropped.
void FilterLinesByReview(const std::string& path,
                         const std::unordered_set<std::string>& keep) {
  if (!FileExists(path)) return;
  std::vector<std::string> kept;
  bool dropped = false;
  for (auto& line : ReadLines(path)) {
    if (line.empty()) continue;
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("review_id") ||
        !keep.contains(j["review_id"].get<std::string>())) {
      dropped = true;
      continue;
    }
    kept.push_back(std::move(line));
  }
  if (dropped) WriteFileAtomic(path, JoinLines(kept));
}

}  // namespace

AnnotateResult RunAnnotate(const RunConfig& config, const Logger& log,
                           std::shared_ptr<ChatBackend> backend) {
  config.Validate();
  const Assets assets = Assets::FromConfig(config, true);
  StageRecord rec = BeginStage(config, assets, "annotate");
  const RunPaths paths(config.output_dir);
  const Corpus corpus = ReadCorpus(paths.File(kCorpus));

  if (!backend) backend = MakeBackend(config, assets.aspects);
  InferenceClient client(backend, config.backend);

  const std::string audit = paths.File(kAudit);
  const std::string annotations = paths.File(kAnnotations);
  const std::string failures = paths.File(kFailures);
  const std::string timings = paths.File(kTimings);

  // A review is done once all of its audit records are present; audit lines
  // are written last for each review.
  std::unordered_set<std::string> done;
  if (!config.resume) {
    for (const auto& f : {audit, annotations, failures, timings}) {
      std::error_code ec;
      fs::remove(f, ec);
    }
  } else if (FileExists(audit)) {
    std::unordered_map<std::string, std::set<int>> seen;
    for (const auto& j : ReadJsonLines(audit).records) {
      if (j.contains("review_id") && j.contains("worker_index")) {
        seen[j["review_id"].get<std::string>()].insert(
            j["worker_index"].get<int>());
      }
    }
    for (const auto& [id, workers] : seen) {
      if (workers.size() >= config.workers.size()) done.insert(id);
    }
    for (const auto& f : {audit, annotations, failures, timings}) {
      FilterLinesByReview(f, done);
    }
  }
  fs::create_directories(config.output_dir);
  for (const auto& f : {audit, annotations, failures, timings}) {
    AppendToFile(f, "");
  }

  AnnotateResult result;
  std::vector<const ReviewRecord*> todo;
  for (const auto& r : corpus.records) {
    if (done.contains(r.review_id)) {
      ++result.skipped;
    } else {
      todo.push_back(&r);
    }
  }
  if (config.annotate_limit && todo.size() > *config.annotate_limit) {
    result.remaining = todo.size() - *config.annotate_limit;
    todo.resize(*config.annotate_limit);
  }
  if (result.skipped > 0) {
    Note(log, "annotate: resuming, " + std::to_string(result.skipped) +
                  " review(s) already done");
  }

  const std::size_t batch = static_cast<std::size_t>(config.jobs);
  for (std::size_t start = 0; start < todo.size(); start += batch) {
    const std::size_t end = std::min(todo.size(), start + batch);
    std::vector<std::future<ReviewOutcome>> pending;
    for (std::size_t i = start; i < end; ++i) {
      pending.push_back(std::async(std::launch::async, [&, i] {
        return AnnotateReview(client, assets, config, *todo[i]);
      }));
    }
    for (auto& f : pending) {
      ReviewOutcome o = f.get();
      AppendToFile(annotations, JoinLines(o.annotation_lines));
      if (o.failure_line) {
        AppendToFile(failures, *o.failure_line + "\n");
        ++result.failures;
      }
      AppendToFile(timings, JoinLines(o.timing_lines));
      AppendToFile(audit, JoinLines(o.audit_lines));
      ++result.processed;
      result.worker_calls += o.audit_lines.size();
      result.ok_responses += o.ok;
      result.parsed_workers += o.parsed;
    }
  }
  result.backend_unreachable =
      result.processed > 0 && result.ok_responses == 0;

  rec.inputs = {paths.File(kCorpus)};
  rec.outputs = {audit, annotations, failures};
  RecordStage(paths.File(kManifest), rec);
  Note(log, "annotate: " + std::to_string(result.processed) + " review(s), " +
                std::to_string(result.worker_calls) + " worker call(s), " +
                std::to_string(result.parsed_workers) + " parsed, " +
                std::to_string(result.failures) + " with failures");
  return result;
}

// ---------------------------------------------------------------------------
// vote

VoteResult RunVote(const RunConfig& config, const Logger& log) {
  config.Validate();
  const Assets assets = Assets::FromConfig(config);
  StageRecord rec = BeginStage(config, assets, "vote");
  const RunPaths paths(config.output_dir);
  const Corpus corpus = ReadCorpus(paths.File(kCorpus));
  const std::size_t k = assets.aspects.size();
  auto groups_by_id = ReadAnnotations(paths.File(kAnnotations), k);

  std::vector<std::string> ids;
  std::vector<WorkerGroup> groups;
  VoteResult result;
  for (const auto& r : corpus.records) {
    auto it = groups_by_id.find(r.review_id);
    if (it == groups_by_id.end()) {
      ++result.missing;
      continue;
    }
    ids.push_back(r.review_id);
    groups.push_back(std::move(it->second));
  }
  if (groups.empty()) Note(log, "vote: no annotations to vote on");

  const auto voted = VoteBatch(groups, k);

  std::string jsonl;
  std::string csv = "review_id";
  for (const auto& name : assets.aspects.Names()) csv += "," + CsvField(name);
  csv += "\n";
  const std::size_t overall = assets.aspects.overall_index();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const VotedAnnotation& v = *voted[i];
    OrderedJson j;
    j["review_id"] = ids[i];
    const OrderedJson body = ToJson(v);
    for (const auto& [key, val] : body.items()) j[key] = val;
    jsonl += j.dump() + "\n";
    csv += CsvField(ids[i]);
    for (int s : v.sentiment) csv += "," + std::to_string(s);
    csv += "\n";
    if (v.mention[overall] == 0) ++result.overall_not_mentioned;
  }
  result.voted = ids.size();
  if (result.overall_not_mentioned > 0) {
    Note(log, "vote: warning: " + std::to_string(result.overall_not_mentioned) +
                  " review(s) voted the overall aspect as not mentioned");
  }
  WriteFileAtomic(paths.File(kVotedJsonl), jsonl);
  WriteFileAtomic(paths.File(kVotedCsv), csv);

  rec.inputs = {paths.File(kCorpus), paths.File(kAnnotations)};
  rec.outputs = {paths.File(kVotedJsonl), paths.File(kVotedCsv)};
  RecordStage(paths.File(kManifest), rec);
  Note(log, "vote: " + std::to_string(result.voted) + " voted, " +
                std::to_string(result.missing) + " missing");
  return result;
}

// ---------------------------------------------------------------------------
// evaluate

namespace {

struct ComparisonSet {
  EvalReport voted;
  std::vector<EvalReport> per_seed;
  EvalReport baseline;
  LiftReport lift;
};

OrderedJson ComparisonJson(const ComparisonSet& c, const WorkerPlan& plan) {
  OrderedJson j;
  j["voted"] = ToJson(c.voted);
  OrderedJson seeds = OrderedJson::array();
  for (std::size_t w = 0; w < c.per_seed.size(); ++w) {
    OrderedJson s;
    s["worker_index"] = w + 1;
    s["seed"] = plan.seeds[w];
    s["report"] = ToJson(c.per_seed[w]);
    seeds.push_back(std::move(s));
  }
  j["per_seed"] = std::move(seeds);
  j["per_seed_average"] = ToJson(AverageReports(c.per_seed));
  j["baseline"] = ToJson(c.baseline);
  j["lift"] = ToJson(c.lift);
  return j;
}

std::optional<double> MeanOf(const std::vector<LiftRow>& rows,
                             std::optional<double> LiftRow::*member) {
  double sum = 0;
  int count = 0;
  for (const auto& r : rows) {
    if (const auto& v = r.*member) {
      sum += *v;
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return sum / count;
}

LiftRow MeanLift(const std::vector<LiftRow>& rows) {
  return {MeanOf(rows, &LiftRow::corr), MeanOf(rows, &LiftRow::rmse),
          MeanOf(rows, &LiftRow::acc)};
}

}  // namespace

EvaluateResult RunEvaluate(const RunConfig& config, const Logger& log) {
  config.Validate();
  const Assets assets = Assets::FromConfig(config);
  StageRecord rec = BeginStage(config, assets, "evaluate");
  const RunPaths paths(config.output_dir);
  const Corpus corpus = ReadCorpus(paths.File(kCorpus));
  const std::size_t k = assets.aspects.size();
  const std::size_t overall = assets.aspects.overall_index();
  const auto voted = ReadVoted(paths.File(kVotedJsonl));
  const auto groups = ReadAnnotations(paths.File(kAnnotations), k);
  const std::size_t num_workers = config.workers.size();

  // Per review: voted and per-worker predictions for aspect k; 0 on the
  // overall aspect counts as no prediction.
  auto voted_pred = [&](const ReviewRecord& r,
                        std::size_t aspect) -> std::optional<int> {
    auto it = voted.find(r.review_id);
    if (it == voted.end()) return std::nullopt;
    const int s = it->second.sentiment[aspect];
    if (aspect == overall && s == 0) return std::nullopt;
    return s;
  };
  auto worker_pred = [&](const ReviewRecord& r, std::size_t w,
                         std::size_t aspect) -> std::optional<int> {
    auto it = groups.find(r.review_id);
    if (it == groups.end()) return std::nullopt;
    for (const auto& a : it->second) {
      if (a.worker_index != static_cast<int>(w) + 1) continue;
      const int v = a.values[aspect].value();
      if (aspect == overall && v == 0) return std::nullopt;
      return v;
    }
    return std::nullopt;
  };

  std::vector<int> truth;
  for (const auto& r : corpus.records) truth.push_back(r.stars);

  // Chance baseline on the overall rating.
  std::vector<int> train_labels = truth;
  if (!config.train_path.empty()) {
    const Corpus train = LoadReviews(config.train_path, CategoryFilter{});
    train_labels.clear();
    for (const auto& r : train.records) train_labels.push_back(r.stars);
  }
  EvalReport chance;
  if (!truth.empty()) {
    chance = Evaluate(
        std::span<const int>(ChanceBaseline(train_labels, truth.size(),
                                            config.chance_seed)),
        truth);
  }

  auto compare = [&](std::span<const int> truth_k, std::size_t aspect,
                     const std::vector<const ReviewRecord*>& rows) {
    ComparisonSet c;
    std::vector<std::optional<int>> vp;
    for (const auto* r : rows) vp.push_back(voted_pred(*r, aspect));
    c.voted = Evaluate(vp, truth_k);
    for (std::size_t w = 0; w < num_workers; ++w) {
      std::vector<std::optional<int>> wp;
      for (const auto* r : rows) wp.push_back(worker_pred(*r, w, aspect));
      c.per_seed.push_back(Evaluate(wp, truth_k));
    }
    return c;
  };

  std::vector<const ReviewRecord*> all_rows;
  for (const auto& r : corpus.records) all_rows.push_back(&r);

  ComparisonSet overall_set = compare(truth, overall, all_rows);
  overall_set.baseline =
      config.baseline == "chance" ? chance : overall_set.per_seed.front();
  overall_set.lift =
      Lift(overall_set.voted, overall_set.per_seed, overall_set.baseline);

  OrderedJson report;
  report["truth"] = "stars";
  report["baseline"] = config.baseline;
  report["total_pairs"] = truth.size();
  report["overall"] = ComparisonJson(overall_set, config.workers);
  report["chance"] = ToJson(chance);

  std::vector<NamedReport> rows = {{"voted", overall_set.voted}};
  for (std::size_t w = 0; w < num_workers; ++w) {
    rows.push_back({"seed " + std::to_string(config.workers.seeds[w]),
                    overall_set.per_seed[w]});
  }
  rows.push_back({"in-seed average", AverageReports(overall_set.per_seed)});
  rows.push_back({"chance level", chance});
  std::string text = "Overall rating vs stars\n" + FormatEvalTable(rows) +
                     "\nLift (baseline: " + config.baseline + ")\n" +
                     FormatLiftTable(overall_set.lift);

  // Optional per-aspect ground truth: {"review_id", "values": [K ints]}.
  if (!config.aspect_truth_path.empty()) {
    std::unordered_map<std::string, std::vector<int>> aspect_truth;
    for (const auto& j : ReadJsonLines(config.aspect_truth_path).records) {
      auto values = j.at("values").get<std::vector<int>>();
      if (values.size() != k) {
        throw Error(ErrorCode::kShape, "aspect truth row has wrong length");
      }
      aspect_truth[j.at("review_id").get<std::string>()] = std::move(values);
    }
    std::vector<const ReviewRecord*> rows_k;
    for (const auto& r : corpus.records) {
      if (aspect_truth.contains(r.review_id)) rows_k.push_back(&r);
    }
    OrderedJson per_aspect = OrderedJson::array();
    std::vector<LiftRow> voted_lifts, seed_lifts;
    for (std::size_t a = 0; a < k; ++a) {
      std::vector<int> truth_k;
      for (const auto* r : rows_k) truth_k.push_back(aspect_truth[r->review_id][a]);
      ComparisonSet c = compare(truth_k, a, rows_k);
      c.baseline = c.per_seed.front();
      if (config.baseline == "chance" && !truth_k.empty()) {
        c.baseline = Evaluate(
            std::span<const int>(ChanceBaseline(truth_k, truth_k.size(),
                                                config.chance_seed + a)),
            truth_k);
      }
      c.lift = Lift(c.voted, c.per_seed, c.baseline);
      voted_lifts.push_back(c.lift.voted);
      seed_lifts.push_back(c.lift.per_seed_average);
      OrderedJson aj = ComparisonJson(c, config.workers);
      aj["aspect"] = assets.aspects[a].name;
      per_aspect.push_back(std::move(aj));
    }
    const LiftReport mean_lift{MeanLift(voted_lifts), MeanLift(seed_lifts),
                               LiftRow{1.0, 1.0, 1.0}};
    report["aspects"]["per_aspect"] = std::move(per_aspect);
    report["aspects"]["mean_lift"] = ToJson(mean_lift);
    text += "\nLift averaged over all aspects\n" + FormatLiftTable(mean_lift);
  }

  // Per-review tuples for downstream analysis.
  std::string pairs = "review_id,truth,voted";
  for (auto seed : config.workers.seeds) pairs += ",seed_" + std::to_string(seed);
  pairs += "\n";
  for (const auto& r : corpus.records) {
    auto cell = [](std::optional<int> v) {
      return v ? std::to_string(*v) : std::string();
    };
    pairs += CsvField(r.review_id) + "," + std::to_string(r.stars) + "," +
             cell(voted_pred(r, overall));
    for (std::size_t w = 0; w < num_workers; ++w) {
      pairs += "," + cell(worker_pred(r, w, overall));
    }
    pairs += "\n";
  }

  WriteFileAtomic(paths.File(kEvalJson), report.dump(2) + "\n");
  WriteFileAtomic(paths.File(kEvalTxt), text);
  WriteFileAtomic(paths.File(kEvalPairs), pairs);

  rec.inputs = {paths.File(kCorpus), paths.File(kVotedJsonl),
                paths.File(kAnnotations)};
  rec.outputs = {paths.File(kEvalJson), paths.File(kEvalTxt),
                 paths.File(kEvalPairs)};
  RecordStage(paths.File(kManifest), rec);
  Note(log, "evaluate: " + std::to_string(overall_set.voted.n) +
                " voted pair(s), " + std::to_string(overall_set.voted.missing) +
                " missing");
  return {std::move(report)};
}

// ---------------------------------------------------------------------------
// regress

RegressResult RunRegress(const RunConfig& config, const Logger& log) {
  config.Validate();
  const Assets assets = Assets::FromConfig(config);
  StageRecord rec = BeginStage(config, assets, "regress");
  const RunPaths paths(config.output_dir);
  const Corpus corpus = ReadCorpus(paths.File(kCorpus));
  const auto voted = ReadVoted(paths.File(kVotedJsonl));
  const std::size_t overall = assets.aspects.overall_index();
  const std::size_t k = assets.aspects.size();

  std::vector<const ReviewRecord*> rows;
  std::size_t dropped = 0;
  for (const auto& r : corpus.records) {
    auto it = voted.find(r.review_id);
    if (it == voted.end() || it->second.sentiment[overall] == 0) {
      ++dropped;
      continue;
    }
    rows.push_back(&r);
  }
  if (dropped > 0) {
    Note(log, "regress: dropped " + std::to_string(dropped) +
                  " review(s) without a voted overall rating");
  }

  std::vector<std::size_t> aspect_cols;
  for (std::size_t a = 0; a < k; ++a) {
    if (a != overall) aspect_cols.push_back(a);
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  DesignMatrix design;
  design.x.resize(n, static_cast<Eigen::Index>(aspect_cols.size()));
  design.y.resize(n);
  Eigen::VectorXd y2(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto* r = rows[static_cast<std::size_t>(i)];
    const VotedAnnotation& v = voted.at(r->review_id);
    for (std::size_t j = 0; j < aspect_cols.size(); ++j) {
      design.x(i, static_cast<Eigen::Index>(j)) = v.sentiment[aspect_cols[j]];
    }
    design.y(i) = r->stars;
    y2(i) = v.sentiment[overall];
  }
  for (auto a : aspect_cols) design.names.push_back(assets.aspects[a].name);

  // Constant predictors are collinear with the intercept.
  std::vector<std::string> candidates, constant;
  for (std::size_t j = 0; j < design.names.size(); ++j) {
    const auto col = design.x.col(static_cast<Eigen::Index>(j));
    if (n > 0 && (col.array() == col(0)).all()) {
      constant.push_back(design.names[j]);
    } else {
      candidates.push_back(design.names[j]);
    }
  }
  if (!constant.empty()) {
    std::string list;
    for (const auto& c : constant) list += (list.empty() ? "" : ", ") + c;
    Note(log, "regress: dropping constant column(s): " + list);
  }

  const SelectionResult sel_y1 = BicSelect(design, candidates);
  for (const auto& notice : sel_y1.notices) Note(log, "regress: " + notice);
  const RegressionFit& y1 = sel_y1.best;

  RegressionFit y2_fit;
  std::vector<std::string> y2_support;
  const DesignMatrix design_y2 = design.WithResponse(y2);
  if (config.y2_mode == "reuse") {
    std::vector<std::size_t> cols;
    for (const auto& name : sel_y1.support) cols.push_back(design.ColumnIndex(name));
    y2_fit = FitGlm(design_y2.Select(cols));
    y2_support = sel_y1.support;
  } else {
    const SelectionResult sel_y2 = BicSelect(design_y2, candidates);
    y2_fit = sel_y2.best;
    y2_support = sel_y2.support;
  }
  const CoefComparison diff = CompareCoefficients(y1, y2_fit);

  OrderedJson report;
  report["n"] = rows.size();
  report["dropped"] = dropped;
  report["constant_columns"] = constant;
  report["candidates"] = candidates;
  report["models_scored"] = sel_y1.models_scored;
  report["stepwise"] = sel_y1.stepwise;
  report["y2_mode"] = config.y2_mode;
  report["y1"] = ToJson(y1);
  report["y2"] = ToJson(y2_fit);
  report["diff"] = ToJson(diff);

  WriteFileAtomic(paths.File(kRegressJson), report.dump(2) + "\n");
  WriteFileAtomic(paths.File(kRegressTxt), FormatComparisonTable(y1, y2_fit, diff));

  rec.inputs = {paths.File(kCorpus), paths.File(kVotedJsonl)};
  rec.outputs = {paths.File(kRegressJson), paths.File(kRegressTxt)};
  RecordStage(paths.File(kManifest), rec);
  Note(log, "regress: n=" + std::to_string(rows.size()) + ", selected " +
                std::to_string(sel_y1.support.size()) + " of " +
                std::to_string(candidates.size()) + " candidate(s)");
  return {std::move(report)};
}

// ---------------------------------------------------------------------------
// report

std::string RunReport(const RunConfig& config, const Logger& log) {
  const RunPaths paths(config.output_dir);
  std::string out = "Annotation pipeline report\n==========================\n";
  auto section = [&](const std::string& title, const std::string& file) {
    out += "\n## " + title + "\n";
    if (FileExists(paths.File(file))) {
      out += ReadFile(paths.File(file));
    } else {
      out += "(not run)\n";
    }
  };
  section("Corpus", kStatsTxt);

  out += "\n## Annotation\n";
  if (FileExists(paths.File(kAudit))) {
    const auto audit = ReadJsonLines(paths.File(kAudit)).records;
    std::size_t ok = 0;
    std::set<std::string> reviews;
    for (const auto& j : audit) {
      reviews.insert(j.value("review_id", ""));
      ok += j.value("status", "") == "ok";
    }
    const std::size_t failures =
        FileExists(paths.File(kFailures))
            ? ReadJsonLines(paths.File(kFailures)).records.size()
            : 0;
    const std::size_t parsed =
        FileExists(paths.File(kAnnotations))
            ? ReadJsonLines(paths.File(kAnnotations)).records.size()
            : 0;
    out += "reviews annotated: " + std::to_string(reviews.size()) +
           "\nworker calls:      " + std::to_string(audit.size()) +
           "\nok responses:      " + std::to_string(ok) +
           "\nparsed workers:    " + std::to_string(parsed) +
           "\nfailure records:   " + std::to_string(failures) + "\n";
  } else {
    out += "(not run)\n";
  }
  section("Evaluation", kEvalTxt);
  section("Regression", kRegressTxt);

  const Json manifest = ReadManifest(paths.File(kManifest));
  if (manifest.contains("stages")) {
    out += "\n## Manifest\n";
    for (const auto& [stage, entry] : manifest["stages"].items()) {
      out += stage + ": config " + entry.value("config_hash", "").substr(0, 12) +
             ", template " + entry.value("template_hash", "").substr(0, 12) +
             ", model " + entry.value("model", "") + "\n";
    }
  }
  WriteFileAtomic(paths.File(kReportTxt), out);
  Note(log, "report: wrote " + paths.File(kReportTxt));
  return out;
}

std::vector<std::pair<std::string, std::string>> OutputDigests(
    const RunConfig& config) {
  const RunPaths paths(config.output_dir);
  std::vector<std::pair<std::string, std::string>> out;
  for (const char* name :
       {kAnnotations, kAudit, kCorpus, kEvalJson, kEvalPairs, kEvalTxt,
        kFailures, kRegressJson, kRegressTxt, kStatsJson, kStatsTxt, kVotedCsv,
        kVotedJsonl}) {
    if (FileExists(paths.File(name))) {
      out.emplace_back(name, Sha256File(paths.File(name)));
    }
  }
  return out;
}

}  // namespace absa
