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

// Digests and portable seeded randomness. Everything random in the pipeline
// draws from SeededRng so results do not depend on the standard library's
// distribution implementations.

#ifndef ABSA_HASH_HPP_
#define ABSA_HASH_HPP_

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace absa {

// Lowercase hex SHA-256.
std::string Sha256Hex(std::string_view data);
// Throws kIo if the file cannot be read.
std::string Sha256File(const std::string& path);

std::uint64_t Fnv1a64(std::string_view data);

class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t Next() { return engine_(); }
  // Uniform in [0, 1) with 53 bits.
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t Below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

// Mixes two 64-bit values into one; used to derive per-call seeds.
std::uint64_t MixSeed(std::uint64_t a, std::uint64_t b);

}  // namespace absa

#endif  // ABSA_HASH_HPP_
