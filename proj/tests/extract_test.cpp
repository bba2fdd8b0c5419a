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

#include "absa/extract.hpp"
#include "absa/hash.hpp"
#include "test_util.hpp"

namespace absa {
namespace {

const AspectSet& Small() {
  static const AspectSet a({{"overall", "overall rating"}, {"price", "price"}}, 0);
  return a;
}

bool HasDefect(const ParseOutcome& o, DefectKind kind, const std::string& key) {
  for (const auto& d : o.defects) {
    if (d.kind == kind && d.key == key) return true;
  }
  return false;
}

TEST(ExtractJsonTest, FindsObjectInProse) {
  const auto e = ExtractJson("Here you go: {\"overall\": 4}");
  EXPECT_EQ(e.text, "{\"overall\": 4}");
  EXPECT_FALSE(e.fence_stripped);
}

TEST(ExtractJsonTest, StripsFence) {
  const auto e = ExtractJson("```json\n{\"overall\":4}\n```");
  EXPECT_EQ(e.text, "{\"overall\":4}");
  EXPECT_TRUE(e.fence_stripped);
}

TEST(ExtractJsonTest, NoBracesIsNoJson) {
  try {
    ExtractJson("no braces at all");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoJson);
  }
  EXPECT_THROW(ExtractJson("{\"overall\": 4"), Error);
}

TEST(ExtractJsonTest, BracesInsideStringsDoNotCount) {
  const auto e = ExtractJson(R"(x {"note": "a } b \" {", "overall": 3} y)");
  EXPECT_EQ(e.text, R"({"note": "a } b \" {", "overall": 3})");
}

TEST(ExtractJsonTest, Idempotent) {
  for (const char* raw : {"{\"a\":1}", "pre {\"a\":{\"b\":2}} post",
                          "```\n{\"x\": [1, {\"y\": 2}]}\n```"}) {
    const std::string once = ExtractJson(raw).text;
    EXPECT_EQ(ExtractJson(once).text, once);
  }
}

TEST(ParseAnnotationTest, IdentityCase) {
  const AspectSet aspects = AspectSet::Default();
  OrderedJson j;
  for (std::size_t k = 0; k < aspects.size(); ++k) {
    j[aspects[k].name] = static_cast<int>(k % 6);
  }
  const auto o = ParseAnnotation(j.dump(), aspects, 2, 9);
  ASSERT_EQ(o.status, ParseStatus::kParsed);
  EXPECT_TRUE(o.defects.empty());
  for (std::size_t k = 0; k < aspects.size(); ++k) {
    EXPECT_EQ(o.annotation->values[k].value(), static_cast<int>(k % 6));
  }
  EXPECT_EQ(o.annotation->worker_index, 2);
  EXPECT_EQ(o.annotation->seed, 9);
}

TEST(ParseAnnotationTest, CoercesAndClamps) {
  const auto o = ParseAnnotation(R"({"overall": 4.0, "price": 7})", Small(), 1, 1);
  ASSERT_EQ(o.status, ParseStatus::kRepaired);
  EXPECT_EQ(testutil::Values(*o.annotation), (std::vector<int>{4, 5}));
  EXPECT_TRUE(HasDefect(o, DefectKind::kNonIntegerCoerced, "overall"));
  EXPECT_TRUE(HasDefect(o, DefectKind::kClampedValue, "price"));
}

TEST(ParseAnnotationTest, NegativeClampsToZero) {
  const auto o = ParseAnnotation(R"({"overall": 3, "price": -2})", Small(), 1, 1);
  ASSERT_EQ(o.status, ParseStatus::kRepaired);
  EXPECT_EQ(testutil::Values(*o.annotation), (std::vector<int>{3, 0}));
}

TEST(ParseAnnotationTest, NonNumericFails) {
  const auto o = ParseAnnotation(R"({"overall": "great"})", Small(), 1, 1);
  EXPECT_EQ(o.status, ParseStatus::kFailed);
  EXPECT_FALSE(o.annotation.has_value());
  EXPECT_EQ(o.failure, FailureReason::kSchemaViolation);
  EXPECT_EQ(ParseAnnotation(R"({"overall": 3.5})", Small(), 1, 1).status,
            ParseStatus::kFailed);
  EXPECT_EQ(ParseAnnotation("[1, 2]", Small(), 1, 1).status, ParseStatus::kFailed);
  EXPECT_EQ(ParseAnnotation("{\"overall\": ", Small(), 1, 1).status,
            ParseStatus::kFailed);
}

TEST(ParseAnnotationTest, MissingAndExtraKeys) {
  const auto o = ParseAnnotation(R"({"overall": 2, "parking": 4})", Small(), 1, 1);
  ASSERT_EQ(o.status, ParseStatus::kRepaired);
  EXPECT_EQ(testutil::Values(*o.annotation), (std::vector<int>{2, 0}));
  EXPECT_TRUE(HasDefect(o, DefectKind::kMissingKey, "price"));
  EXPECT_TRUE(HasDefect(o, DefectKind::kExtraKey, "parking"));
}

TEST(ParseResponseTest, FenceIsADefect) {
  const auto o = ParseResponse("```json\n{\"overall\": 5, \"price\": 1}\n```",
                               Small(), 1, 1);
  ASSERT_EQ(o.status, ParseStatus::kRepaired);
  EXPECT_TRUE(HasDefect(o, DefectKind::kFenceStripped, ""));
}

TEST(ParseResponseTest, NoJsonIsAFailureNotAnException) {
  const auto o = ParseResponse("I cannot help with that.", Small(), 1, 1);
  EXPECT_EQ(o.status, ParseStatus::kFailed);
  EXPECT_EQ(o.failure, FailureReason::kNoJson);
}

TEST(ParsePropertyTest, SerializeRoundTripAndRange) {
  const AspectSet aspects = AspectSet::Default();
  SeededRng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<int> values;
    for (std::size_t k = 0; k < aspects.size(); ++k) {
      values.push_back(static_cast<int>(rng.Below(6)));
    }
    const auto a = testutil::MakeWorker(values, 3);
    const auto o = ParseAnnotation(SerializeAnnotation(a, aspects), aspects, 3, a.seed);
    ASSERT_EQ(o.status, ParseStatus::kParsed);
    ASSERT_EQ(*o.annotation, a);

    OrderedJson noisy;
    for (std::size_t k = 0; k < aspects.size(); ++k) {
      noisy[aspects[k].name] = static_cast<int>(rng.Below(21)) - 10;
    }
    const auto p = ParseAnnotation(noisy.dump(), aspects, 1, 1);
    ASSERT_NE(p.status, ParseStatus::kFailed);
    for (const auto& v : p.annotation->values) {
      ASSERT_GE(v.value(), 0);
      ASSERT_LE(v.value(), 5);
    }
  }
}

}  // namespace
}  // namespace absa
