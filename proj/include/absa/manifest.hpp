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

// Run manifest: one entry per stage with the hashes that pin down what the
// stage saw and produced.

#ifndef ABSA_MANIFEST_HPP_
#define ABSA_MANIFEST_HPP_

#include <string>
#include <vector>

#include "absa/core.hpp"

namespace absa {

struct StageRecord {
  std::string stage;
  std::string config_hash;
  std::string template_hash;
  std::string aspects_hash;
  std::string model;
  std::vector<std::string> inputs;   // file paths; digested on record
  std::vector<std::string> outputs;  // file paths; digested on record
  std::string started_at;
};

std::string UtcTimestamp();

// Reads the manifest (if any), replaces the entry for record.stage and
// rewrites the file atomically.
void RecordStage(const std::string& manifest_path, const StageRecord& record);
Json ReadManifest(const std::string& manifest_path);

}  // namespace absa

#endif  // ABSA_MANIFEST_HPP_
