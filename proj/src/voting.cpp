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

#include "absa/voting.hpp"

#include <algorithm>
#include <array>

namespace absa {

int MedianLower(std::span<const int> values) {
  if (values.empty()) {
    throw Error(ErrorCode::kPrecondition, "median of an empty list");
  }
  std::vector<int> v(values.begin(), values.end());
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>((v.size() - 1) / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

namespace {

constexpr int kLevels = SentimentValue::kMax + 1;

// Lower median from a histogram over 0..5 holding total > 0 samples.
int HistogramMedianLower(const std::array<int, kLevels>& hist, int first_level,
                         int total) {
  const int rank = (total - 1) / 2;  // 0-based rank of the lower median
  int seen = 0;
  for (int level = first_level; level < kLevels; ++level) {
    seen += hist[level];
    if (seen > rank) return level;
  }
  return kLevels - 1;  // not reached for consistent input
}

void VoteInto(std::span<const WorkerAnnotation> workers,
              std::size_t num_aspects, VotedAnnotation& out) {
  const int w = static_cast<int>(workers.size());
  out.mention.assign(num_aspects, 0);
  out.value.assign(num_aspects, 0);
  out.sentiment.assign(num_aspects, 0);
  out.worker_count_used = w;

  for (std::size_t k = 0; k < num_aspects; ++k) {
    std::array<int, kLevels> hist{};
    for (const auto& worker : workers) ++hist[worker.values[k].value()];
    const int mentioned = w - hist[0];

    // Stage 1: lower median of the binary mention indicators. Sorted, the
    // indicators are hist[0] zeros followed by ones.
    const int mention = (w - 1) / 2 >= hist[0] ? 1 : 0;
    // Stage 2: lower median over the nonzero values only.
    const int value =
        mentioned > 0 ? HistogramMedianLower(hist, 1, mentioned) : 0;

    out.mention[k] = mention;
    out.value[k] = value;
    out.sentiment[k] = mention * value;
  }
}

void CheckShape(std::span<const WorkerAnnotation> workers,
                std::size_t num_aspects) {
  if (workers.empty()) {
    throw Error(ErrorCode::kAllWorkersFailed, "no workers to vote over");
  }
  for (const auto& worker : workers) {
    if (worker.values.size() != num_aspects) {
      throw Error(ErrorCode::kShape,
                  "worker " + std::to_string(worker.worker_index) + " has " +
                      std::to_string(worker.values.size()) +
                      " values, expected " + std::to_string(num_aspects));
    }
  }
}

}  // namespace

VotedAnnotation Vote(std::span<const WorkerAnnotation> workers,
                     std::size_t num_aspects) {
  CheckShape(workers, num_aspects);
  VotedAnnotation out;
  VoteInto(workers, num_aspects, out);
  return out;
}

VotedAnnotation Vote(std::span<const WorkerAnnotation> workers,
                     const AspectSet& aspects) {
  return Vote(workers, aspects.size());
}

std::vector<std::optional<VotedAnnotation>> VoteBatchSerial(
    std::span<const WorkerGroup> groups, std::size_t num_aspects) {
  std::vector<std::optional<VotedAnnotation>> out(groups.size());
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (groups[i].empty()) continue;
    out[i] = Vote(groups[i], num_aspects);
  }
  return out;
}

std::vector<std::optional<VotedAnnotation>> VoteBatch(
    std::span<const WorkerGroup> groups, std::size_t num_aspects) {
  // Validate up front so no exception escapes the parallel region.
  for (const auto& g : groups) {
    if (!g.empty()) CheckShape(g, num_aspects);
  }
  std::vector<std::optional<VotedAnnotation>> out(groups.size());
  const auto n = static_cast<std::ptrdiff_t>(groups.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& g = groups[static_cast<std::size_t>(i)];
    if (g.empty()) continue;
    VotedAnnotation v;
    VoteInto(g, num_aspects, v);
    out[static_cast<std::size_t>(i)] = std::move(v);
  }
  return out;
}

}  // namespace absa
