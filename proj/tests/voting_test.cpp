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

#include <algorithm>
#include <numeric>

#include "absa/hash.hpp"
#include "absa/voting.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace absa {
namespace {

using testutil::MakeWorker;

std::vector<WorkerAnnotation> Group(const std::vector<std::vector<int>>& rows) {
  std::vector<WorkerAnnotation> out;
  for (std::size_t w = 0; w < rows.size(); ++w) {
    out.push_back(MakeWorker(rows[w], static_cast<int>(w) + 1));
  }
  return out;
}

std::vector<std::vector<int>> RandomRows(SeededRng& rng, std::size_t w_count,
                                         std::size_t k_count) {
  std::vector<std::vector<int>> rows(w_count, std::vector<int>(k_count));
  const auto mode = rng.Below(8);
  for (std::size_t k = 0; k < k_count; ++k) {
    const int shared = static_cast<int>(rng.Below(6));
    for (std::size_t w = 0; w < w_count; ++w) {
      if (mode == 0) {
        rows[w][k] = 0;  // all-zero matrix
      } else if (mode == 1) {
        rows[w][k] = shared;  // all workers equal per aspect
      } else {
        rows[w][k] = static_cast<int>(rng.Below(6));
      }
    }
  }
  return rows;
}

TEST(MedianLowerTest, Examples) {
  EXPECT_EQ(MedianLower(std::vector<int>{0, 0, 0, 1, 0}), 0);
  EXPECT_EQ(MedianLower(std::vector<int>{2, 3, 3, 3, 3}), 3);
  EXPECT_EQ(MedianLower(std::vector<int>{3, 4}), 3);
  EXPECT_EQ(MedianLower(std::vector<int>{5}), 5);
  EXPECT_THROW(MedianLower(std::vector<int>{}), Error);
}

TEST(VoteTest, CongestionIsSuppressed) {
  const auto v = Vote(Group({{0}, {0}, {0}, {1}, {0}}), 1);
  EXPECT_EQ(v.mention[0], 0);
  EXPECT_EQ(v.value[0], 1);
  EXPECT_EQ(v.sentiment[0], 0);
}

TEST(VoteTest, IdenticalWorkersReproduceTheWorker) {
  const std::vector<int> row = {4, 0, 2, 3, 0, 5, 1, 0, 0, 0, 5, 0, 0, 1};
  const auto v = Vote(Group({row, row, row, row, row}), row.size());
  EXPECT_EQ(v.sentiment, row);
  for (std::size_t k = 0; k < row.size(); ++k) {
    EXPECT_EQ(v.mention[k], row[k] != 0 ? 1 : 0);
  }
  EXPECT_EQ(v.worker_count_used, 5);
}

TEST(VoteTest, ZeroWorkersIsAllWorkersFailed) {
  try {
    Vote(std::vector<WorkerAnnotation>{}, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAllWorkersFailed);
  }
}

TEST(VoteTest, ShapeMismatchThrows) {
  EXPECT_THROW(Vote(Group({{1, 2}, {1}}), 2), Error);
}

TEST(VoteTest, EvenSplitMentionIsNotMentioned) {
  const auto v = Vote(Group({{3}, {0}, {4}, {0}}), 1);
  EXPECT_EQ(v.mention[0], 0);
  EXPECT_EQ(v.value[0], 3);
  EXPECT_EQ(v.sentiment[0], 0);
}

TEST(VoteTest, MatchesLiteralOracle) {
  SeededRng rng(2024);
  for (int trial = 0; trial < 3000; ++trial) {
    const std::size_t w = 1 + rng.Below(7);
    const auto rows = RandomRows(rng, w, 14);
    const auto got = Vote(Group(rows), 14);
    const auto want = oracle::LiteralVote(rows);
    ASSERT_EQ(got.mention, want.m);
    ASSERT_EQ(got.value, want.v);
    ASSERT_EQ(got.sentiment, want.s);
    ASSERT_EQ(got.worker_count_used, static_cast<int>(w));
  }
}

TEST(VotePropertyTest, PermutationInvariance) {
  SeededRng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    auto rows = RandomRows(rng, 1 + rng.Below(7), 14);
    const auto base = Vote(Group(rows), 14);
    for (std::size_t i = rows.size(); i > 1; --i) {
      std::swap(rows[i - 1], rows[rng.Below(i)]);
    }
    ASSERT_EQ(Vote(Group(rows), 14), base);
  }
}

TEST(VotePropertyTest, RangeAndFactorization) {
  SeededRng rng(12);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto v = Vote(Group(RandomRows(rng, 1 + rng.Below(7), 14)), 14);
    for (std::size_t k = 0; k < 14; ++k) {
      ASSERT_TRUE(v.mention[k] == 0 || v.mention[k] == 1);
      ASSERT_GE(v.value[k], 0);
      ASSERT_LE(v.value[k], 5);
      ASSERT_EQ(v.sentiment[k], v.mention[k] * v.value[k]);
      if (v.mention[k] == 0) ASSERT_EQ(v.sentiment[k], 0);
    }
  }
}

TEST(VotePropertyTest, Consensus) {
  for (int value = 0; value <= 5; ++value) {
    for (int w = 1; w <= 7; ++w) {
      const auto v = Vote(Group(std::vector<std::vector<int>>(w, {value})), 1);
      EXPECT_EQ(v.sentiment[0], value);
    }
  }
}

TEST(VotePropertyTest, ConditionalMonotonicity) {
  SeededRng rng(13);
  for (int trial = 0; trial < 2000; ++trial) {
    auto rows = RandomRows(rng, 1 + rng.Below(7), 1);
    std::vector<std::size_t> nonzero;
    for (std::size_t w = 0; w < rows.size(); ++w) {
      if (rows[w][0] != 0) nonzero.push_back(w);
    }
    if (nonzero.empty()) continue;
    const std::size_t w = nonzero[rng.Below(nonzero.size())];
    if (rows[w][0] == 5) continue;
    const int before = Vote(Group(rows), 1).value[0];
    rows[w][0] += 1 + static_cast<int>(rng.Below(5 - rows[w][0]));
    ASSERT_GE(Vote(Group(rows), 1).value[0], before);
  }
}

TEST(VotePropertyTest, MajorityMentionExhaustive) {
  for (int pattern = 0; pattern < 32; ++pattern) {
    std::vector<std::vector<int>> rows;
    int mentions = 0;
    for (int w = 0; w < 5; ++w) {
      const bool m = pattern >> w & 1;
      mentions += m;
      rows.push_back({m ? 1 + w % 5 : 0});
    }
    EXPECT_EQ(Vote(Group(rows), 1).mention[0], mentions > 5 / 2.0 ? 1 : 0)
        << "pattern " << pattern;
  }
}

TEST(VoteBatchTest, ParallelMatchesSerial) {
  SeededRng rng(14);
  std::vector<WorkerGroup> groups;
  for (int i = 0; i < 2000; ++i) {
    if (i % 97 == 0) {
      groups.emplace_back();  // a review with no usable workers
    } else {
      groups.push_back(Group(RandomRows(rng, 1 + rng.Below(7), 14)));
    }
  }
  const auto serial = VoteBatchSerial(groups, 14);
  const auto parallel = VoteBatch(groups, 14);
  ASSERT_EQ(serial.size(), groups.size());
  EXPECT_EQ(serial, parallel);
  EXPECT_FALSE(serial[0].has_value());
  EXPECT_TRUE(serial[1].has_value());
}

TEST(VoteBatchTest, ShapeErrorsSurface) {
  std::vector<WorkerGroup> groups = {Group({{1, 2}}), Group({{1}})};
  EXPECT_THROW(VoteBatch(groups, 2), Error);
  EXPECT_THROW(VoteBatchSerial(groups, 2), Error);
}

}  // namespace
}  // namespace absa
