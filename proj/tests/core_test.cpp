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

#include "absa/core.hpp"
#include "absa/hash.hpp"
#include "test_util.hpp"

namespace absa {
namespace {

TEST(SentimentValueTest, AcceptsScaleBoundaries) {
  EXPECT_EQ(SentimentValue(0).value(), 0);
  EXPECT_FALSE(SentimentValue(0).mentioned());
  EXPECT_EQ(SentimentValue(5).value(), 5);
  EXPECT_TRUE(SentimentValue(5).mentioned());
}

TEST(SentimentValueTest, RejectsOutOfRangeWithValue) {
  try {
    SentimentValue v(6);
    FAIL() << "accepted 6";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSchemaViolation);
    EXPECT_NE(std::string(e.what()).find("6"), std::string::npos);
  }
  EXPECT_THROW(ValidateSentiment(-1), Error);
}

TEST(WorkerAnnotationTest, MentionIsDerivedFromValue) {
  const auto w = testutil::MakeWorker({0, 1, 2, 3, 4, 5});
  for (std::size_t k = 0; k < w.values.size(); ++k) {
    EXPECT_EQ(w.mention(k), w.values[k].value() != 0 ? 1 : 0);
  }
}

TEST(WorkerAnnotationTest, JsonRoundTrip) {
  auto w = testutil::MakeWorker({4, 0, 2, 3}, 3);
  w.seed = 42;
  const Json j = Json::parse(ToJson(w).dump());
  EXPECT_EQ(WorkerAnnotationFromJson(j), w);
}

TEST(AspectSetTest, DefaultCatalog) {
  const AspectSet a = AspectSet::Default();
  ASSERT_EQ(a.size(), 14u);
  EXPECT_EQ(a[a.overall_index()].name, "overall");
  EXPECT_TRUE(a.IndexOf("congestion").has_value());
  EXPECT_FALSE(a.IndexOf("parking").has_value());
}

TEST(AspectSetTest, SerializationRoundTrips) {
  const AspectSet a = AspectSet::Default();
  EXPECT_EQ(AspectSet::FromJson(Json::parse(a.ToJson().dump())), a);
  const AspectSet small({{"overall", "o"}, {"price", "p"}}, 0);
  EXPECT_EQ(AspectSet::FromJson(Json::parse(small.ToJson().dump())), small);
}

TEST(AspectSetTest, RejectsDuplicatesAndEmpty) {
  EXPECT_THROW(AspectSet({}, 0), Error);
  EXPECT_THROW(AspectSet({{"a", "x"}, {"a", "y"}}, 0), Error);
  EXPECT_THROW(AspectSet({{"a", "x"}}, 3), Error);
}

TEST(ReviewRecordTest, JsonUsesDateField) {
  ReviewRecord r{"r1", "u1", "b1", 4, "good", "2020-01-02 03:04:05"};
  const OrderedJson j = ToJson(r);
  EXPECT_EQ(j["date"], "2020-01-02 03:04:05");
  EXPECT_EQ(ReviewFromJson(Json::parse(j.dump())), r);
}

TEST(ReviewRecordTest, RejectsBadStars) {
  Json j = Json::parse(R"({"review_id":"r","user_id":"u","business_id":"b",
                          "stars":6,"text":"t","date":"2020-01-01"})");
  EXPECT_THROW(ReviewFromJson(j), Error);
  j["stars"] = 3.5;
  EXPECT_THROW(ReviewFromJson(j), Error);
  j["stars"] = 3.0;
  EXPECT_EQ(ReviewFromJson(j).stars, 3);
}

TEST(VotedAnnotationTest, JsonRoundTrip) {
  VotedAnnotation v{{1, 0}, {4, 2}, {4, 0}, 5};
  EXPECT_EQ(VotedAnnotationFromJson(Json::parse(ToJson(v).dump())), v);
}

TEST(FailureTest, JsonRoundTrip) {
  AnnotationFailure f;
  f.review_id = "r9";
  f.reason = FailureReason::kAllWorkersFailed;
  f.workers.push_back({1, 1, "failed", FailureReason::kNoJson, "no braces"});
  f.workers.push_back({2, 2, "backend-error", FailureReason::kBackendError, "503"});
  const AnnotationFailure g = AnnotationFailureFromJson(Json::parse(ToJson(f).dump()));
  EXPECT_EQ(g.review_id, "r9");
  ASSERT_EQ(g.workers.size(), 2u);
  EXPECT_EQ(g.workers[0].reason, FailureReason::kNoJson);
  EXPECT_EQ(g.workers[1].detail, "503");
  EXPECT_EQ(FailureReasonName(FailureReason::kAllWorkersFailed), "all-workers-failed");
}

TEST(HashTest, KnownSha256) {
  EXPECT_EQ(Sha256Hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(HashTest, SeededRngIsReproducible) {
  SeededRng a(99), b(99);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.Next(), b.Next());
  SeededRng c(1);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_LT(c.Below(7), 7u);
    const double u = c.Uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

}  // namespace
}  // namespace absa
