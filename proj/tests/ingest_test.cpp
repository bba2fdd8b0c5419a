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

#include <set>

#include "absa/ingest.hpp"
#include "test_util.hpp"

namespace absa {
namespace {

using testutil::TempDir;
using testutil::WriteText;

std::string Line(const std::string& id, const std::string& user, const std::string& biz,
                 int stars, const std::string& date, const std::string& text = "tasty food") {
  Json j;
  j["review_id"] = id;
  j["user_id"] = user;
  j["business_id"] = biz;
  j["stars"] = stars;
  j["text"] = text;
  j["date"] = date;
  return j.dump() + "\n";
}

ReviewRecord Rec(const std::string& id, const std::string& user, const std::string& biz,
                 const std::string& date, const std::string& text = "t") {
  return {id, user, biz, 3, text, date};
}

TEST(CategoryFilterTest, ExcludeWins) {
  const CategoryFilter f = CategoryFilter::Restaurants();
  const std::vector<std::string> diner = {"Restaurants", "Diners"};
  const std::vector<std::string> bar = {"Restaurants", "Bars"};
  const std::vector<std::string> shop = {"Shopping"};
  EXPECT_TRUE(f.Accepts(&diner));
  EXPECT_FALSE(f.Accepts(&bar));
  EXPECT_FALSE(f.Accepts(&shop));
  EXPECT_FALSE(f.Accepts(nullptr));
  EXPECT_TRUE(CategoryFilter{}.Accepts(nullptr));
}

TEST(LoadReviewsTest, FiltersByBusinessCategory) {
  TempDir dir;
  WriteText(dir.File("r.json"), Line("a", "u1", "b1", 4, "2020-01-01") +
                                    Line("b", "u2", "b2", 3, "2020-01-01") +
                                    Line("c", "u3", "b3", 5, "2020-01-01"));
  WriteText(dir.File("b.json"),
            R"({"business_id":"b1","categories":"Restaurants, Thai"})" "\n"
            R"({"business_id":"b2","categories":"Restaurants, Bar"})" "\n"
            R"({"business_id":"b3","categories":"Restaurants"})" "\n");
  const BusinessCategories biz = LoadBusinessCategories(dir.File("b.json"));
  const CategoryFilter filter{{"Restaurants"}, {"Bar"}};
  const Corpus c = LoadReviews(dir.File("r.json"), filter, &biz);
  ASSERT_EQ(c.records.size(), 2u);
  EXPECT_EQ(c.records[0].review_id, "a");
  EXPECT_EQ(c.records[1].review_id, "c");
  EXPECT_EQ(c.load.filtered_out, 1u);
}

TEST(LoadReviewsTest, EmptyFileWarns) {
  TempDir dir;
  WriteText(dir.File("r.json"), "");
  const Corpus c = LoadReviews(dir.File("r.json"), CategoryFilter{});
  EXPECT_TRUE(c.records.empty());
  EXPECT_FALSE(c.load.warnings.empty());
}

TEST(LoadReviewsTest, SkipsTruncatedLine) {
  TempDir dir;
  WriteText(dir.File("r.json"), Line("a", "u1", "b1", 4, "2020-01-01") +
                                    "{\"review_id\": \"b\", \"user_\n" +
                                    Line("c", "u3", "b3", 5, "2020-01-01"));
  const Corpus c = LoadReviews(dir.File("r.json"), CategoryFilter{});
  EXPECT_EQ(c.records.size(), 2u);
  EXPECT_EQ(c.load.malformed, 1u);
}

TEST(LoadReviewsTest, MostlyMalformedIsFatal) {
  TempDir dir;
  WriteText(dir.File("r.json"), Line("a", "u1", "b1", 4, "2020-01-01") + "x\ny\n");
  try {
    LoadReviews(dir.File("r.json"), CategoryFilter{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCorpusFormat);
  }
  EXPECT_THROW(LoadReviews(dir.File("missing.json"), CategoryFilter{}), Error);
}

TEST(LoadReviewsTest, ParallelParseKeepsFileOrder) {
  TempDir dir;
  std::string text;
  for (int i = 0; i < 5000; ++i) {
    text += Line("r" + std::to_string(i), "u" + std::to_string(i), "b", 1 + i % 5,
                 "2020-01-01");
  }
  WriteText(dir.File("r.json"), text);
  const Corpus c = LoadReviews(dir.File("r.json"), CategoryFilter{});
  ASSERT_EQ(c.records.size(), 5000u);
  for (int i = 0; i < 5000; ++i) ASSERT_EQ(c.records[i].review_id, "r" + std::to_string(i));
}

TEST(SampleTest, KeepsOnlyLatestReviewPerBusiness) {
  Corpus c;
  c.records = {Rec("old", "A", "X", "2020-05-01"), Rec("new", "A", "X", "2022-05-01"),
               Rec("b1", "B", "Y", "2021-01-01")};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Corpus s = SampleOnePerUser(c, 2, seed);
    std::set<std::string> ids;
    for (const auto& r : s.records) ids.insert(r.review_id);
    EXPECT_TRUE(ids.contains("new"));
    EXPECT_FALSE(ids.contains("old"));
  }
}

TEST(SampleTest, ExhaustiveAndDistinct) {
  Corpus c;
  for (int u = 0; u < 5; ++u) {
    for (int b = 0; b < 3; ++b) {
      c.records.push_back(Rec("r" + std::to_string(u) + std::to_string(b),
                              "u" + std::to_string(u), "b" + std::to_string(b), "2020-01-01"));
    }
  }
  const Corpus s = SampleOnePerUser(c, 5, 42);
  std::set<std::string> users;
  for (const auto& r : s.records) users.insert(r.user_id);
  EXPECT_EQ(users.size(), 5u);
  EXPECT_EQ(s.records.size(), 5u);
}

TEST(SampleTest, DeterministicInSeed) {
  Corpus c;
  for (int i = 0; i < 200; ++i) {
    c.records.push_back(Rec("r" + std::to_string(i), "u" + std::to_string(i / 2),
                            "b" + std::to_string(i % 7), "2020-01-01"));
  }
  const Corpus a = SampleOnePerUser(c, 30, 5);
  const Corpus b = SampleOnePerUser(c, 30, 5);
  const Corpus other = SampleOnePerUser(c, 30, 6);
  EXPECT_EQ(a.records, b.records);
  EXPECT_NE(a.records, other.records);
}

TEST(SampleTest, Errors) {
  Corpus c;
  try {
    SampleOnePerUser(c, 1, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyCorpus);
  }
  c.records = {Rec("a", "u", "b", "2020"), Rec("b", "u", "c", "2021")};
  try {
    SampleOnePerUser(c, 2, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientUsers);
  }
}

TEST(StatsTest, HandArithmetic) {
  Corpus c;
  c.records = {Rec("a", "u1", "b", "2020", std::string(10, 'x')),
               Rec("b", "u2", "b", "2020", std::string(20, 'y'))};
  const CorpusStats s = ComputeCorpusStats(c);
  EXPECT_EQ(s.n, 2u);
  EXPECT_DOUBLE_EQ(s.chars.mean, 15.0);
  EXPECT_DOUBLE_EQ(s.chars.min, 10.0);
  EXPECT_DOUBLE_EQ(s.chars.max, 20.0);
  EXPECT_NEAR(s.chars.std, std::sqrt(50.0), 1e-12);
}

TEST(StatsTest, SingleRecordHasZeroStd) {
  Corpus c;
  c.records = {Rec("a", "u1", "b", "2020", "one two three")};
  const CorpusStats s = ComputeCorpusStats(c);
  EXPECT_EQ(s.tokens.std, 0.0);
  EXPECT_EQ(s.tokens.mean, 3.0);
}

TEST(StatsTest, MinMeanMaxOrdered) {
  Corpus c;
  for (int i = 0; i < 50; ++i) {
    c.records.push_back(Rec("r" + std::to_string(i), "u" + std::to_string(i), "b", "2020",
                            std::string(1 + (i * 37) % 101, 'z')));
    c.records.back().stars = 1 + i % 5;
  }
  const CorpusStats s = ComputeCorpusStats(c);
  for (const SummaryStat* st : {&s.chars, &s.tokens, &s.stars}) {
    EXPECT_LE(st->min, st->mean);
    EXPECT_LE(st->mean, st->max);
  }
  EXPECT_THROW(ComputeCorpusStats(Corpus{}), Error);
}

TEST(StatsTest, CountsCodePoints) {
  EXPECT_EQ(Utf8CodepointCount("caf\xc3\xa9"), 4u);
  EXPECT_EQ(WhitespaceTokenCount("  a\tb\nc  "), 3u);
  EXPECT_EQ(WhitespaceTokenCount(""), 0u);
}

TEST(CorpusFileTest, RoundTrips) {
  TempDir dir;
  Corpus c;
  c.records = {Rec("a", "u1", "b", "2020-01-01", "with \"quotes\" and\nnewline")};
  WriteCorpus(c, dir.File("c.jsonl"));
  EXPECT_EQ(ReadCorpus(dir.File("c.jsonl")).records, c.records);
}

}  // namespace
}  // namespace absa
