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

// Seed-differentiated virtual workers on top of a chat-completion backend.
//
// The HTTP backend speaks the common local-server protocol: POST
//   {"model", "messages": [{"role", "content"}], "temperature", "seed",
//    "max_tokens"}
// and reads choices[0].message.content from the reply.

#ifndef ABSA_INFERENCE_HPP_
#define ABSA_INFERENCE_HPP_

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "absa/core.hpp"

namespace absa {

struct RetryPolicy {
  int max_attempts = 3;
  // Delay before retry i (1-based) is backoff * 2^(i-1).
  std::chrono::milliseconds backoff{250};
};

struct BackendConfig {
  std::string endpoint = "http://127.0.0.1:8080/v1/chat/completions";
  std::string model = "local-model";
  double temperature = 0.2;
  int max_tokens = 512;
  std::chrono::milliseconds timeout{120000};
  RetryPolicy retry;
  // Global bound on concurrent requests through one InferenceClient.
  int max_in_flight = 4;

  // Throws kConfig on negative temperature, max_attempts < 1 or
  // max_in_flight < 1.
  void Validate() const;
};

struct WorkerPlan {
  std::vector<std::int64_t> seeds = {1, 2, 3, 4, 5};

  static WorkerPlan Sequential(int workers);
  std::size_t size() const noexcept { return seeds.size(); }
  // Throws kConfig when empty or seeds repeat.
  void Validate() const;
};

enum class ResponseStatus { kOk, kBackendError, kTimeout };
std::string_view ResponseStatusName(ResponseStatus s);
ResponseStatus ResponseStatusFromName(std::string_view name);

struct RawWorkerResponse {
  int worker_index = 1;
  std::int64_t seed = 0;
  std::string text;  // non-empty when status is kOk
  double latency_ms = 0;
  int attempts = 0;
  ResponseStatus status = ResponseStatus::kBackendError;
  std::string error;
};

struct ChatRequest {
  std::string model;
  std::string prompt;
  double temperature = 0.2;
  std::int64_t seed = 0;
  int max_tokens = 512;
};

Json ChatRequestBody(const ChatRequest& req);

struct ChatReply {
  enum class Kind { kOk, kTransportError, kTimeout, kHttpError };
  Kind kind = Kind::kOk;
  std::string content;
  int http_status = 0;
  std::string error;
  bool retryable = false;
};

// Implementations must be safe to call from several threads at once.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual ChatReply Complete(const ChatRequest& request,
                             std::chrono::milliseconds timeout) = 0;
  virtual std::string Describe() const = 0;
};

std::shared_ptr<ChatBackend> MakeHttpBackend(const std::string& endpoint);

// Response mix for the mock backend. Each share is a probability; whatever is
// left over produces clean JSON.
struct MockSpec {
  double prose = 0;      // JSON wrapped in chatty prose
  double fenced = 0;     // JSON inside a ```json fence
  double malformed = 0;  // truncated or non-numeric JSON
  double empty = 0;      // empty completion
  double failure = 0;    // transport error on every attempt

  // "always-valid", or comma-separated "<kind>-<pct>%" items, e.g.
  // "malformed-10%" or "prose-20%,malformed-5%". Throws kConfig.
  static MockSpec Parse(std::string_view spec);
};

// Deterministic backend: the reply is a pure function of (prompt, seed).
// Valid replies are JSON objects keyed by the aspect names; workers on the
// same prompt agree on most aspects and diverge on a few.
std::shared_ptr<ChatBackend> MakeMockBackend(const MockSpec& spec,
                                             const AspectSet& aspects);

class InferenceClient {
 public:
  InferenceClient(std::shared_ptr<ChatBackend> backend, BackendConfig config);

  // One request with retries. Failures are reported in the status, never
  // thrown.
  RawWorkerResponse AnnotateOnce(const std::string& prompt, std::int64_t seed,
                                 int worker_index = 1);

  // Exactly plan.size() responses ordered by worker_index (1-based),
  // whatever the completion order.
  std::vector<RawWorkerResponse> RunWorkers(const std::string& prompt,
                                            const WorkerPlan& plan);

  const BackendConfig& config() const noexcept { return config_; }
  const ChatBackend& backend() const noexcept { return *backend_; }

 private:
  class Limiter {
   public:
    explicit Limiter(int slots) : free_(slots) {}
    void Acquire();
    void Release();

   private:
    std::mutex mu_;
    std::condition_variable cv_;
    int free_;
  };

  std::shared_ptr<ChatBackend> backend_;
  BackendConfig config_;
  std::unique_ptr<Limiter> limiter_;
};

OrderedJson AuditRecord(const std::string& review_id,
                        const RawWorkerResponse& r);

}  // namespace absa

#endif  // ABSA_INFERENCE_HPP_
