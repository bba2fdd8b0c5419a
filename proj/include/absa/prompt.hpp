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

#ifndef ABSA_PROMPT_HPP_
#define ABSA_PROMPT_HPP_

#include <cstddef>
#include <string>
#include <string_view>

#include "absa/core.hpp"
#include "absa/ingest.hpp"

namespace absa {

// A worked review with its gold annotation. The review must not appear in
// the evaluated corpus.
struct OneShotExample {
  std::string review_id;
  std::string text;
  WorkerAnnotation answer;

  // {"review_id", "text", "answer": {aspect: 0..5}}; every aspect required.
  static OneShotExample FromJson(const Json& j, const AspectSet& aspects);
  static OneShotExample Load(const std::string& path, const AspectSet& aspects);
  static OneShotExample Default(const AspectSet& aspects);
};

// Plain UTF-8 text with the placeholders {{instruction}}, {{aspects}},
// {{schema}}, {{example}} and {{review}}, each exactly once and in that order.
class PromptTemplate {
 public:
  PromptTemplate(std::string text, std::string instruction);

  static PromptTemplate Default();
  static PromptTemplate Load(const std::string& template_path,
                             const std::string& instruction_path);

  const std::string& text() const noexcept { return text_; }
  const std::string& instruction() const noexcept { return instruction_; }
  // SHA-256 over template and instruction; recorded in run manifests.
  std::string Hash() const;

 private:
  std::string text_;
  std::string instruction_;
};

struct PromptOptions {
  std::size_t context_budget = 8192;
  TokenCounter counter = WhitespaceTokenCount;
};

std::size_t EstimateTokens(std::string_view text,
                           const TokenCounter& counter = WhitespaceTokenCount);

std::string RenderAspectList(const AspectSet& aspects);
std::string RenderSchema(const AspectSet& aspects);

// Throws kTemplate on a missing, repeated, unknown or out-of-order
// placeholder and kContextOverflow when the rendered prompt exceeds the
// token budget.
std::string BuildPrompt(const PromptTemplate& tmpl, const AspectSet& aspects,
                        const OneShotExample& example,
                        const ReviewRecord& review,
                        const PromptOptions& options = {});

}  // namespace absa

#endif  // ABSA_PROMPT_HPP_
