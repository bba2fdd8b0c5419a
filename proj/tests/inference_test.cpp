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

#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include "absa/extract.hpp"
#include "absa/inference.hpp"
#include "httplib.h"

namespace absa {
namespace {

using std::chrono::milliseconds;

BackendConfig FastConfig(const std::string& endpoint = "http://127.0.0.1:1/v1") {
  BackendConfig c;
  c.endpoint = endpoint;
  c.timeout = milliseconds(2000);
  c.retry.backoff = milliseconds(1);
  return c;
}

// Serves /v1/chat/completions on a random local port.
class TestServer {
 public:
  explicit TestServer(httplib::Server::Handler handler) {
    server_.Post("/v1/chat/completions", std::move(handler));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~TestServer() {
    server_.stop();
    thread_.join();
  }
  std::string endpoint() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

std::string Completion(const std::string& content) {
  return Json{{"choices", Json::array({Json{{"message", Json{{"role", "assistant"},
                                                               {"content", content}}}}})}}
      .dump();
}

// Fails for the listed seeds, answers "{}" otherwise, and tracks the peak
// number of concurrent calls.
class ScriptedBackend final : public ChatBackend {
 public:
  explicit ScriptedBackend(std::vector<std::int64_t> failing_seeds, milliseconds delay = {})
      : failing_(std::move(failing_seeds)), delay_(delay) {}

  ChatReply Complete(const ChatRequest& req, milliseconds) override {
    const int now = ++in_flight_;
    int seen = peak_.load();
    while (now > seen && !peak_.compare_exchange_weak(seen, now)) {
    }
    std::this_thread::sleep_for(delay_);
    --in_flight_;
    ++calls_;
    ChatReply r;
    if (std::find(failing_.begin(), failing_.end(), req.seed) != failing_.end()) {
      r.kind = ChatReply::Kind::kHttpError;
      r.http_status = 500;
      r.retryable = true;
      r.error = "HTTP 500";
    } else {
      r.content = "{\"seed\": " + std::to_string(req.seed) + "}";
    }
    return r;
  }
  std::string Describe() const override { return "scripted"; }

  int peak() const { return peak_; }
  int calls() const { return calls_; }

 private:
  std::vector<std::int64_t> failing_;
  milliseconds delay_;
  std::atomic<int> in_flight_{0}, peak_{0}, calls_{0};
};

TEST(ChatRequestTest, WireShape) {
  ChatRequest req{"m", "hello", 0.2, 3, 64};
  const Json body = ChatRequestBody(req);
  EXPECT_EQ(body["model"], "m");
  EXPECT_EQ(body["messages"][0]["role"], "user");
  EXPECT_EQ(body["messages"][0]["content"], "hello");
  EXPECT_EQ(body["temperature"], 0.2);
  EXPECT_EQ(body["seed"], 3);
  EXPECT_EQ(body["max_tokens"], 64);
}

TEST(MockBackendTest, DeterministicPerPromptAndSeed) {
  InferenceClient client(MakeMockBackend(MockSpec{}, AspectSet::Default()), FastConfig());
  const auto a = client.AnnotateOnce("prompt one", 1);
  const auto b = client.AnnotateOnce("prompt one", 1);
  EXPECT_EQ(a.status, ResponseStatus::kOk);
  EXPECT_EQ(a.text, b.text);
  bool any_differs = false;
  for (int i = 0; i < 20 && !any_differs; ++i) {
    const std::string p = "prompt " + std::to_string(i);
    any_differs = client.AnnotateOnce(p, 1).text != client.AnnotateOnce(p, 2).text;
  }
  EXPECT_TRUE(any_differs);
}

TEST(MockBackendTest, FrozenBytes) {
  // Guards the mock's output against accidental change; pipeline digests
  // depend on it.
  auto backend = MakeMockBackend(MockSpec{}, AspectSet({{"overall", "o"}, {"price", "p"}}, 0));
  const ChatReply r = backend->Complete({"m", "fixed prompt", 0.2, 7, 64}, milliseconds(1));
  EXPECT_EQ(r.content, R"({"overall":1,"price":0})");
}

TEST(MockBackendTest, AlwaysValidParses) {
  const AspectSet aspects = AspectSet::Default();
  auto backend = MakeMockBackend(MockSpec::Parse("always-valid"), aspects);
  for (int i = 0; i < 200; ++i) {
    const ChatReply r =
        backend->Complete({"m", "review " + std::to_string(i), 0.2, 7, 512}, milliseconds(1));
    ASSERT_EQ(r.kind, ChatReply::Kind::kOk);
    const auto o = ParseResponse(r.content, aspects, 1, 7);
    ASSERT_EQ(o.status, ParseStatus::kParsed) << r.content;
  }
}

TEST(MockBackendTest, MalformedShare) {
  const AspectSet aspects = AspectSet::Default();
  auto backend = MakeMockBackend(MockSpec::Parse("malformed-10%"), aspects);
  int failed = 0;
  for (int i = 0; i < 1000; ++i) {
    const ChatReply r =
        backend->Complete({"m", "review " + std::to_string(i), 0.2, 1, 512}, milliseconds(1));
    ASSERT_EQ(r.kind, ChatReply::Kind::kOk);
    failed += ParseResponse(r.content, aspects, 1, 1).status == ParseStatus::kFailed;
  }
  // 102 is the count over this fixed call sequence.
  EXPECT_EQ(failed, 102);
  EXPECT_GE(failed, 70);
  EXPECT_LE(failed, 130);
}

TEST(MockSpecTest, ParseErrors) {
  EXPECT_NO_THROW(MockSpec::Parse("prose-20%,malformed-5%"));
  EXPECT_THROW(MockSpec::Parse("weird-10%"), Error);
  EXPECT_THROW(MockSpec::Parse("malformed-10"), Error);
  EXPECT_THROW(MockSpec::Parse("malformed-110%"), Error);
  EXPECT_THROW(MockSpec::Parse("malformed-60%,prose-60%"), Error);
}

TEST(HttpBackendTest, UnreachableEndpointExhaustsRetries) {
  BackendConfig cfg = FastConfig("http://127.0.0.1:1/v1/chat/completions");
  cfg.retry.max_attempts = 2;
  InferenceClient client(MakeHttpBackend(cfg.endpoint), cfg);
  const auto r = client.AnnotateOnce("hi", 1);
  EXPECT_EQ(r.status, ResponseStatus::kBackendError);
  EXPECT_EQ(r.attempts, 2);
  EXPECT_FALSE(r.error.empty());
}

TEST(HttpBackendTest, SendsProtocolAndReadsContent) {
  Json seen;
  TestServer server([&](const httplib::Request& req, httplib::Response& res) {
    seen = Json::parse(req.body);
    res.set_content(Completion("{\"overall\": 4}"), "application/json");
  });
  BackendConfig cfg = FastConfig(server.endpoint());
  cfg.model = "tiny";
  InferenceClient client(MakeHttpBackend(cfg.endpoint), cfg);
  const auto r = client.AnnotateOnce("the prompt", 5, 2);
  EXPECT_EQ(r.status, ResponseStatus::kOk);
  EXPECT_EQ(r.text, "{\"overall\": 4}");
  EXPECT_EQ(r.attempts, 1);
  EXPECT_EQ(r.worker_index, 2);
  EXPECT_GE(r.latency_ms, 0.0);
  EXPECT_EQ(seen["model"], "tiny");
  EXPECT_EQ(seen["seed"], 5);
  EXPECT_EQ(seen["messages"][0]["content"], "the prompt");
}

TEST(HttpBackendTest, RetriesServerErrors) {
  std::atomic<int> hits{0};
  TestServer server([&](const httplib::Request&, httplib::Response& res) {
    if (++hits < 3) {
      res.status = 503;
      return;
    }
    res.set_content(Completion("ok"), "application/json");
  });
  InferenceClient client(MakeHttpBackend(server.endpoint()), FastConfig(server.endpoint()));
  const auto r = client.AnnotateOnce("p", 1);
  EXPECT_EQ(r.status, ResponseStatus::kOk);
  EXPECT_EQ(r.attempts, 3);
}

TEST(HttpBackendTest, ClientErrorsAreNotRetried) {
  std::atomic<int> hits{0};
  TestServer server([&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 400;
  });
  InferenceClient client(MakeHttpBackend(server.endpoint()), FastConfig(server.endpoint()));
  const auto r = client.AnnotateOnce("p", 1);
  EXPECT_EQ(r.status, ResponseStatus::kBackendError);
  EXPECT_EQ(r.attempts, 1);
  EXPECT_EQ(hits, 1);
}

TEST(HttpBackendTest, EmptyCompletionIsBackendError) {
  TestServer server([&](const httplib::Request&, httplib::Response& res) {
    res.set_content(Completion(""), "application/json");
  });
  BackendConfig cfg = FastConfig(server.endpoint());
  cfg.retry.max_attempts = 1;
  InferenceClient client(MakeHttpBackend(cfg.endpoint), cfg);
  EXPECT_EQ(client.AnnotateOnce("p", 1).status, ResponseStatus::kBackendError);
}

TEST(HttpBackendTest, SlowServerTimesOut) {
  TestServer server([&](const httplib::Request&, httplib::Response& res) {
    std::this_thread::sleep_for(milliseconds(600));
    res.set_content(Completion("late"), "application/json");
  });
  BackendConfig cfg = FastConfig(server.endpoint());
  cfg.timeout = milliseconds(150);
  cfg.retry.max_attempts = 1;
  InferenceClient client(MakeHttpBackend(cfg.endpoint), cfg);
  const auto r = client.AnnotateOnce("p", 1);
  EXPECT_EQ(r.status, ResponseStatus::kTimeout) << r.error;
}

TEST(RunWorkersTest, OrderedByWorkerIndex) {
  auto backend = std::make_shared<ScriptedBackend>(std::vector<std::int64_t>{},
                                                   milliseconds(5));
  InferenceClient client(backend, FastConfig());
  const auto rs = client.RunWorkers("p", WorkerPlan{});
  ASSERT_EQ(rs.size(), 5u);
  for (int w = 0; w < 5; ++w) {
    EXPECT_EQ(rs[w].worker_index, w + 1);
    EXPECT_EQ(rs[w].seed, w + 1);
    EXPECT_EQ(rs[w].text, "{\"seed\": " + std::to_string(w + 1) + "}");
  }
  const auto single = client.RunWorkers("p", WorkerPlan::Sequential(1));
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0].worker_index, 1);
}

TEST(RunWorkersTest, PartialFailuresAreCarried) {
  auto backend = std::make_shared<ScriptedBackend>(std::vector<std::int64_t>{2, 4});
  BackendConfig cfg = FastConfig();
  cfg.retry.max_attempts = 2;
  InferenceClient client(backend, cfg);
  const auto rs = client.RunWorkers("p", WorkerPlan{});
  int ok = 0, bad = 0;
  for (const auto& r : rs) (r.status == ResponseStatus::kOk ? ok : bad)++;
  EXPECT_EQ(ok, 3);
  EXPECT_EQ(bad, 2);
  EXPECT_EQ(rs[1].status, ResponseStatus::kBackendError);
  EXPECT_EQ(rs[1].attempts, 2);
}

TEST(RunWorkersTest, InFlightBoundHolds) {
  auto backend = std::make_shared<ScriptedBackend>(std::vector<std::int64_t>{},
                                                   milliseconds(20));
  BackendConfig cfg = FastConfig();
  cfg.max_in_flight = 2;
  InferenceClient client(backend, cfg);
  std::vector<std::thread> threads;
  for (int t = 0; t < 3; ++t) {
    threads.emplace_back([&] { client.RunWorkers("p", WorkerPlan::Sequential(5)); });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(backend->calls(), 15);
  EXPECT_LE(backend->peak(), 2);
}

TEST(WorkerPlanTest, Validation) {
  EXPECT_NO_THROW(WorkerPlan{}.Validate());
  EXPECT_THROW(WorkerPlan{{}}.Validate(), Error);
  EXPECT_THROW((WorkerPlan{{1, 1}}.Validate()), Error);
  EXPECT_EQ(WorkerPlan::Sequential(3).seeds, (std::vector<std::int64_t>{1, 2, 3}));
}

TEST(AuditRecordTest, Keys) {
  RawWorkerResponse r;
  r.worker_index = 2;
  r.seed = 2;
  r.text = "raw";
  r.attempts = 1;
  r.status = ResponseStatus::kOk;
  const OrderedJson j = AuditRecord("rev", r);
  EXPECT_EQ(j["review_id"], "rev");
  EXPECT_EQ(j["raw"], "raw");
  EXPECT_EQ(j["status"], "ok");
  EXPECT_FALSE(j.contains("latency_ms"));
}

}  // namespace
}  // namespace absa
