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

#include "absa/prompt.hpp"

#include <array>

#include "absa/default_assets.hpp"
#include "absa/extract.hpp"
#include "absa/hash.hpp"
#include "absa/io.hpp"

namespace absa {
namespace {

constexpr std::array<std::string_view, 5> kPlaceholders = {
    "instruction", "aspects", "schema", "example", "review"};

struct Slot {
  std::size_t begin;
  std::size_t end;
  std::size_t which;
};

// Locates every {{name}} and checks the five required names appear once each
// and in order.
std::vector<Slot> ScanPlaceholders(std::string_view text) {
  std::vector<Slot> slots;
  std::size_t pos = 0;
  while ((pos = text.find("{{", pos)) != std::string_view::npos) {
    const std::size_t close = text.find("}}", pos + 2);
    if (close == std::string_view::npos) {
      throw Error(ErrorCode::kTemplate, "unterminated placeholder at offset " +
                                            std::to_string(pos));
    }
    const std::string_view name = text.substr(pos + 2, close - pos - 2);
    std::size_t which = kPlaceholders.size();
    for (std::size_t i = 0; i < kPlaceholders.size(); ++i) {
      if (kPlaceholders[i] == name) which = i;
    }
    if (which == kPlaceholders.size()) {
      throw Error(ErrorCode::kTemplate,
                  "unresolved placeholder {{" + std::string(name) + "}}");
    }
    slots.push_back({pos, close + 2, which});
    pos = close + 2;
  }
  if (slots.size() != kPlaceholders.size()) {
    throw Error(ErrorCode::kTemplate,
                "template needs each of {{instruction}}, {{aspects}}, "
                "{{schema}}, {{example}}, {{review}} exactly once");
  }
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].which != i) {
      throw Error(ErrorCode::kTemplate,
                  "placeholder {{" + std::string(kPlaceholders[i]) +
                      "}} missing or out of order");
    }
  }
  return slots;
}

std::string Trimmed(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == ' ')) s.pop_back();
  return s;
}

}  // namespace

OneShotExample OneShotExample::FromJson(const Json& j,
                                        const AspectSet& aspects) {
  if (!j.is_object() || !j.contains("text") || !j["text"].is_string() ||
      !j.contains("answer") || !j["answer"].is_object()) {
    throw Error(ErrorCode::kSchemaViolation,
                "one-shot example needs \"text\" and an \"answer\" object");
  }
  OneShotExample ex;
  ex.review_id = j.value("review_id", "");
  ex.text = j["text"].get<std::string>();
  ex.answer.worker_index = 0;
  ex.answer.values.resize(aspects.size());
  const Json& answer = j["answer"];
  for (std::size_t k = 0; k < aspects.size(); ++k) {
    auto it = answer.find(aspects[k].name);
    if (it == answer.end() || !it->is_number_integer()) {
      throw Error(ErrorCode::kSchemaViolation,
                  "one-shot answer lacks an integer for '" + aspects[k].name +
                      "'");
    }
    ex.answer.values[k] = SentimentValue(it->get<long long>());
  }
  for (const auto& [key, val] : answer.items()) {
    if (!aspects.IndexOf(key)) {
      throw Error(ErrorCode::kSchemaViolation,
                  "one-shot answer has unknown aspect '" + key + "'");
    }
  }
  return ex;
}

OneShotExample OneShotExample::Load(const std::string& path,
                                    const AspectSet& aspects) {
  try {
    return FromJson(Json::parse(ReadFile(path)), aspects);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kSchemaViolation, path + ": " + e.what());
  }
}

OneShotExample OneShotExample::Default(const AspectSet& aspects) {
  return FromJson(Json::parse(assets::kOneShotExample), aspects);
}

PromptTemplate::PromptTemplate(std::string text, std::string instruction)
    : text_(std::move(text)), instruction_(Trimmed(std::move(instruction))) {
  ScanPlaceholders(text_);
}

PromptTemplate PromptTemplate::Default() {
  return PromptTemplate(assets::kPromptTemplate, assets::kInstruction);
}

PromptTemplate PromptTemplate::Load(const std::string& template_path,
                                    const std::string& instruction_path) {
  return PromptTemplate(ReadFile(template_path), ReadFile(instruction_path));
}

std::string PromptTemplate::Hash() const {
  return Sha256Hex(text_ + '\0' + instruction_);
}

std::size_t EstimateTokens(std::string_view text, const TokenCounter& counter) {
  return counter(text);
}

std::string RenderAspectList(const AspectSet& aspects) {
  std::string out;
  for (const auto& a : aspects.aspects()) {
    out += "- ";
    out += a.name;
    out += ": ";
    out += a.description;
    out += '\n';
  }
  return Trimmed(std::move(out));
}

std::string RenderSchema(const AspectSet& aspects) {
  OrderedJson schema = OrderedJson::object();
  for (const auto& a : aspects.aspects()) schema[a.name] = "<0-5>";
  return schema.dump(2);
}

std::string BuildPrompt(const PromptTemplate& tmpl, const AspectSet& aspects,
                        const OneShotExample& example,
                        const ReviewRecord& review,
                        const PromptOptions& options) {
  const std::string& text = tmpl.text();
  const auto slots = ScanPlaceholders(text);

  const std::array<std::string, 5> values = {
      tmpl.instruction(),
      RenderAspectList(aspects),
      RenderSchema(aspects),
      "Review: " + example.text +
          "\nAnswer: " + SerializeAnnotation(example.answer, aspects),
      review.text,
  };

  std::string out;
  std::size_t cursor = 0;
  for (const auto& slot : slots) {
    out.append(text, cursor, slot.begin - cursor);
    out += values[slot.which];
    cursor = slot.end;
  }
  out.append(text, cursor, std::string::npos);

  const std::size_t tokens = EstimateTokens(out, options.counter);
  if (tokens > options.context_budget) {
    throw Error(ErrorCode::kContextOverflow,
                "prompt is " + std::to_string(tokens) +
                    " tokens, budget is " +
                    std::to_string(options.context_budget));
  }
  return out;
}

}  // namespace absa
