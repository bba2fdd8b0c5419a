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

#include "absa/manifest.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>

#include "absa/hash.hpp"
#include "absa/io.hpp"

namespace absa {

std::string UtcTimestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json ReadManifest(const std::string& manifest_path) {
  if (!FileExists(manifest_path)) return Json::object();
  Json j = Json::parse(ReadFile(manifest_path), nullptr, false);
  return j.is_object() ? j : Json::object();
}

void RecordStage(const std::string& manifest_path, const StageRecord& record) {
  auto digests = [](const std::vector<std::string>& paths) {
    OrderedJson out = OrderedJson::object();
    for (const auto& p : paths) {
      const std::string key = std::filesystem::path(p).filename().string();
      out[key] = FileExists(p) ? OrderedJson(Sha256File(p)) : OrderedJson(nullptr);
    }
    return out;
  };
  OrderedJson entry;
  entry["config_hash"] = record.config_hash;
  entry["template_hash"] = record.template_hash;
  entry["aspects_hash"] = record.aspects_hash;
  entry["model"] = record.model;
  entry["inputs"] = digests(record.inputs);
  entry["outputs"] = digests(record.outputs);
  entry["started_at"] = record.started_at;
  entry["finished_at"] = UtcTimestamp();

  Json manifest = ReadManifest(manifest_path);
  if (!manifest.contains("stages") || !manifest["stages"].is_object()) {
    manifest["stages"] = Json::object();
  }
  manifest["stages"][record.stage] = Json::parse(entry.dump());
  WriteFileAtomic(manifest_path, manifest.dump(2) + "\n");
}

}  // namespace absa
