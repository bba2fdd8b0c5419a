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

// Two-stage median voting over virtual workers.
//
// For each aspect k, with per-worker values v_w (0 = not mentioned):
//   mention m   = lower median of [v_w != 0] over workers
//   value   v   = lower median of the nonzero v_w, or 0 if all are zero
//   sentiment s = m * v
// The lower median of an even-length list is the smaller middle element, so
// results stay in the integer label set.

#ifndef ABSA_VOTING_HPP_
#define ABSA_VOTING_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "absa/core.hpp"

namespace absa {

// Throws kPrecondition on an empty list.
int MedianLower(std::span<const int> values);

// Throws kAllWorkersFailed when workers is empty and kShape when a worker's
// vector length differs from num_aspects.
VotedAnnotation Vote(std::span<const WorkerAnnotation> workers,
                     std::size_t num_aspects);
VotedAnnotation Vote(std::span<const WorkerAnnotation> workers,
                     const AspectSet& aspects);

using WorkerGroup = std::vector<WorkerAnnotation>;

// One result per group; std::nullopt where a group has no workers.
// VoteBatchSerial is the reference; VoteBatch splits groups across OpenMP
// threads and returns identical results.
std::vector<std::optional<VotedAnnotation>> VoteBatchSerial(
    std::span<const WorkerGroup> groups, std::size_t num_aspects);
std::vector<std::optional<VotedAnnotation>> VoteBatch(
    std::span<const WorkerGroup> groups, std::size_t num_aspects);

}  // namespace absa

#endif  // ABSA_VOTING_HPP_
