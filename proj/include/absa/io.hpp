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

#ifndef ABSA_IO_HPP_
#define ABSA_IO_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace absa {

// All helpers throw Error(kIo) on failure.
std::string ReadFile(const std::string& path);
std::vector<std::string> ReadLines(const std::string& path);
// Writes to a sibling temp file and renames it over path.
void WriteFileAtomic(const std::string& path, std::string_view contents);
void AppendToFile(const std::string& path, std::string_view contents);
bool FileExists(const std::string& path);

}  // namespace absa

#endif  // ABSA_IO_HPP_
