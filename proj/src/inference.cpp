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

#include "absa/inference.hpp"

#include <algorithm>
#include <charconv>
#include <future>
#include <set>
#include <thread>

#include "absa/hash.hpp"
#include "httplib.h"

namespace absa {

void BackendConfig::Validate() const {
  if (!(temperature >= 0)) {
    throw Error(ErrorCode::kConfig, "temperature must be >= 0");
  }
  if (retry.max_attempts < 1) {
    throw Error(ErrorCode::kConfig, "retry.max_attempts must be >= 1");
  }
  if (max_in_flight < 1) {
    throw Error(ErrorCode::kConfig, "max_in_flight must be >= 1");
  }
  if (max_tokens < 1) throw Error(ErrorCode::kConfig, "max_tokens must be >= 1");
}

WorkerPlan WorkerPlan::Sequential(int workers) {
  WorkerPlan plan;
  plan.seeds.clear();
  for (int w = 1; w <= workers; ++w) plan.seeds.push_back(w);
  return plan;
}

void WorkerPlan::Validate() const {
  if (seeds.empty()) throw Error(ErrorCode::kConfig, "worker plan is empty");
  std::set<std::int64_t> unique(seeds.begin(), seeds.end());
  if (unique.size() != seeds.size()) {
    throw Error(ErrorCode::kConfig, "worker seeds must be pairwise distinct");
  }
}

std::string_view ResponseStatusName(ResponseStatus s) {
  switch (s) {
    case ResponseStatus::kOk: return "ok";
    case ResponseStatus::kBackendError: return "backend-error";
    case ResponseStatus::kTimeout: return "timeout";
  }
  return "unknown";
}

ResponseStatus ResponseStatusFromName(std::string_view name) {
  if (name == "ok") return ResponseStatus::kOk;
  if (name == "timeout") return ResponseStatus::kTimeout;
  return ResponseStatus::kBackendError;
}

Json ChatRequestBody(const ChatRequest& req) {
  return Json{
      {"model", req.model},
      {"messages", Json::array({Json{{"role", "user"},
                                     {"content", req.prompt}}})},
      {"temperature", req.temperature},
      {"seed", req.seed},
      {"max_tokens", req.max_tokens},
  };
}

// ---------------------------------------------------------------------------
// HTTP backend

namespace {

class HttpChatBackend final : public ChatBackend {
 public:
  explicit HttpChatBackend(const std::string& endpoint) : endpoint_(endpoint) {
    const auto scheme = endpoint.find("://");
    if (scheme == std::string::npos) {
      throw Error(ErrorCode::kConfig, "endpoint needs a scheme: " + endpoint);
    }
    const auto path = endpoint.find('/', scheme + 3);
    base_ = endpoint.substr(0, path);
    path_ = path == std::string::npos ? "/" : endpoint.substr(path);
  }

  ChatReply Complete(const ChatRequest& request,
                     std::chrono::milliseconds timeout) override {
    httplib::Client client(base_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    const auto usecs =
        std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    const auto start = std::chrono::steady_clock::now();
    auto res = client.Post(path_, ChatRequestBody(request).dump(),
                           "application/json");
    ChatReply reply;
    if (!res) {
      const auto elapsed = std::chrono::steady_clock::now() - start;
      const auto err = res.error();
      reply.retryable = true;
      reply.error = httplib::to_string(err);
      reply.kind = (err == httplib::Error::ConnectionTimeout ||
                    (err == httplib::Error::Read && elapsed >= timeout))
                       ? ChatReply::Kind::kTimeout
                       : ChatReply::Kind::kTransportError;
      return reply;
    }
    reply.http_status = res->status;
    if (res->status < 200 || res->status >= 300) {
      reply.kind = ChatReply::Kind::kHttpError;
      reply.retryable = res->status >= 500 || res->status == 429;
      reply.error = "HTTP " + std::to_string(res->status);
      return reply;
    }
    const Json body = Json::parse(res->body, nullptr, false);
    try {
      reply.content =
          body.at("choices").at(0).at("message").at("content").get<std::string>();
      reply.kind = ChatReply::Kind::kOk;
    } catch (const Json::exception&) {
      reply.kind = ChatReply::Kind::kHttpError;
      reply.error = "reply lacks choices[0].message.content";
    }
    return reply;
  }

  std::string Describe() const override { return "http:" + endpoint_; }

 private:
  std::string endpoint_;
  std::string base_;
  std::string path_;
};

}  // namespace

std::shared_ptr<ChatBackend> MakeHttpBackend(const std::string& endpoint) {
  return std::make_shared<HttpChatBackend>(endpoint);
}

// ---------------------------------------------------------------------------
// Mock backend

MockSpec MockSpec::Parse(std::string_view spec) {
  MockSpec out;
  if (spec == "always-valid" || spec.empty()) return out;
  std::size_t start = 0;
  while (start < spec.size()) {
    std::size_t end = spec.find(',', start);
    if (end == std::string_view::npos) end = spec.size();
    const std::string_view item = spec.substr(start, end - start);
    const auto dash = item.rfind('-');
    if (dash == std::string_view::npos || item.empty() || item.back() != '%') {
      throw Error(ErrorCode::kConfig,
                  "bad mock spec item '" + std::string(item) + "'");
    }
    const std::string_view kind = item.substr(0, dash);
    const std::string_view pct = item.substr(dash + 1, item.size() - dash - 2);
    double value = 0;
    auto [ptr, ec] = std::from_chars(pct.data(), pct.data() + pct.size(), value);
    if (ec != std::errc() || ptr != pct.data() + pct.size() || value < 0 ||
        value > 100) {
      throw Error(ErrorCode::kConfig,
                  "bad percentage in mock spec '" + std::string(item) + "'");
    }
    value /= 100.0;
    if (kind == "prose") {
      out.prose = value;
    } else if (kind == "fenced") {
      out.fenced = value;
    } else if (kind == "malformed") {
      out.malformed = value;
    } else if (kind == "empty") {
      out.empty = value;
    } else if (kind == "failure") {
      out.failure = value;
    } else {
      throw Error(ErrorCode::kConfig,
                  "unknown mock response kind '" + std::string(kind) + "'");
    }
    start = end + 1;
  }
  if (out.prose + out.fenced + out.malformed + out.empty + out.failure >
      1.0 + 1e-9) {
    throw Error(ErrorCode::kConfig, "mock spec shares exceed 100%");
  }
  return out;
}

namespace {

class MockChatBackend final : public ChatBackend {
 public:
  MockChatBackend(const MockSpec& spec, AspectSet aspects)
      : spec_(spec), aspects_(std::move(aspects)) {}

  ChatReply Complete(const ChatRequest& request,
                     std::chrono::milliseconds) override {
    const std::uint64_t prompt_hash = Fnv1a64(request.prompt);
    SeededRng worker(MixSeed(prompt_hash, static_cast<std::uint64_t>(request.seed)));

    ChatReply reply;
    const double u = worker.Uniform();
    double edge = spec_.failure;
    if (u < edge) {
      reply.kind = ChatReply::Kind::kTransportError;
      reply.retryable = true;
      reply.error = "mock transport failure";
      return reply;
    }
    reply.kind = ChatReply::Kind::kOk;
    if (u < (edge += spec_.empty)) return reply;

    const std::string json = AnnotationJson(prompt_hash, worker);
    if (u < (edge += spec_.malformed)) {
      if (worker.Below(2) == 0) {
        reply.content = json.substr(0, json.size() * 3 / 5);
      } else {
        std::string broken = json;
        const auto colon = broken.find(':');
        const auto comma = broken.find_first_of(",}", colon);
        broken.replace(colon + 1, comma - colon - 1, "\"great\"");
        reply.content = broken;
      }
    } else if (u < (edge += spec_.fenced)) {
      reply.content = "```json\n" + json + "\n```";
    } else if (u < (edge += spec_.prose)) {
      reply.content = "Sure! Here is the annotation for this review:\n" +
                      json + "\nLet me know if you need anything else.";
    } else {
      reply.content = json;
    }
    return reply;
  }

  std::string Describe() const override { return "mock"; }

 private:
  std::string AnnotationJson(std::uint64_t prompt_hash, SeededRng& worker) const {
    // Shared "reading" of the review, then per-worker noise on top.
    SeededRng base(prompt_hash);
    OrderedJson obj = OrderedJson::object();
    for (std::size_t k = 0; k < aspects_.size(); ++k) {
      const double mention_p = k == aspects_.overall_index() ? 0.97 : 0.45;
      bool mentioned = base.Uniform() < mention_p;
      int value = 1 + static_cast<int>(base.Below(5));
      if (worker.Uniform() < 0.12) {
        if (!mentioned) {
          mentioned = true;
          value = 1 + static_cast<int>(worker.Below(5));
        } else if (worker.Below(3) == 0) {
          mentioned = false;
        } else {
          value = std::clamp(value + (worker.Below(2) == 0 ? -1 : 1), 1, 5);
        }
      }
      obj[aspects_[k].name] = mentioned ? value : 0;
    }
    return obj.dump();
  }

  MockSpec spec_;
  AspectSet aspects_;
};

}  // namespace

std::shared_ptr<ChatBackend> MakeMockBackend(const MockSpec& spec,
                                             const AspectSet& aspects) {
  return std::make_shared<MockChatBackend>(spec, aspects);
}

// ---------------------------------------------------------------------------
// Client

void InferenceClient::Limiter::Acquire() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [this] { return free_ > 0; });
  --free_;
}

void InferenceClient::Limiter::Release() {
  {
    std::lock_guard lock(mu_);
    ++free_;
  }
  cv_.notify_one();
}

InferenceClient::InferenceClient(std::shared_ptr<ChatBackend> backend,
                                 BackendConfig config)
    : backend_(std::move(backend)), config_(std::move(config)) {
  config_.Validate();
  limiter_ = std::make_unique<Limiter>(config_.max_in_flight);
}

RawWorkerResponse InferenceClient::AnnotateOnce(const std::string& prompt,
                                                std::int64_t seed,
                                                int worker_index) {
  const ChatRequest request{config_.model, prompt, config_.temperature, seed,
                            config_.max_tokens};
  RawWorkerResponse out;
  out.worker_index = worker_index;
  out.seed = seed;

  const auto start = std::chrono::steady_clock::now();
  for (int attempt = 1; attempt <= config_.retry.max_attempts; ++attempt) {
    if (attempt > 1 && config_.retry.backoff.count() > 0) {
      std::this_thread::sleep_for(config_.retry.backoff * (1 << (attempt - 2)));
    }
    out.attempts = attempt;
    limiter_->Acquire();
    ChatReply reply;
    try {
      reply = backend_->Complete(request, config_.timeout);
    } catch (const std::exception& e) {
      reply.kind = ChatReply::Kind::kTransportError;
      reply.error = e.what();
      reply.retryable = true;
    }
    limiter_->Release();

    if (reply.kind == ChatReply::Kind::kOk) {
      if (reply.content.empty()) {
        out.status = ResponseStatus::kBackendError;
        out.error = "empty completion";
        out.text.clear();
        break;
      }
      out.status = ResponseStatus::kOk;
      out.text = std::move(reply.content);
      out.error.clear();
      break;
    }
    out.status = reply.kind == ChatReply::Kind::kTimeout
                     ? ResponseStatus::kTimeout
                     : ResponseStatus::kBackendError;
    out.error = reply.error;
    if (!reply.retryable) break;
  }
  out.latency_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return out;
}

std::vector<RawWorkerResponse> InferenceClient::RunWorkers(
    const std::string& prompt, const WorkerPlan& plan) {
  plan.Validate();
  std::vector<std::future<RawWorkerResponse>> pending;
  pending.reserve(plan.size());
  for (std::size_t w = 0; w < plan.size(); ++w) {
    pending.push_back(std::async(std::launch::async, [this, &prompt, &plan, w] {
      return AnnotateOnce(prompt, plan.seeds[w], static_cast<int>(w) + 1);
    }));
  }
  std::vector<RawWorkerResponse> out;
  out.reserve(plan.size());
  for (auto& f : pending) out.push_back(f.get());
  return out;
}

OrderedJson AuditRecord(const std::string& review_id,
                        const RawWorkerResponse& r) {
  OrderedJson j;
  j["review_id"] = review_id;
  j["worker_index"] = r.worker_index;
  j["seed"] = r.seed;
  j["status"] = std::string(ResponseStatusName(r.status));
  j["attempts"] = r.attempts;
  j["raw"] = r.text;
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

}  // namespace absa
