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

#include "absa/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <unordered_set>

#include "absa/hash.hpp"
#include "absa/io.hpp"

namespace absa {

CategoryFilter CategoryFilter::Restaurants() {
  return {{"Restaurants"}, {"Fast Food", "Food Trucks", "Nightlife", "Bars"}};
}

bool CategoryFilter::Accepts(const std::vector<std::string>* tags) const {
  if (tags == nullptr) return include.empty();
  auto has = [tags](const std::string& t) {
    return std::find(tags->begin(), tags->end(), t) != tags->end();
  };
  // Excluded tags win over included ones.
  if (std::any_of(exclude.begin(), exclude.end(), has)) return false;
  return include.empty() || std::any_of(include.begin(), include.end(), has);
}

std::vector<std::string> SplitCategories(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t end = s.find(',', start);
    if (end == std::string_view::npos) end = s.size();
    std::string_view tok = s.substr(start, end - start);
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    if (!tok.empty()) out.emplace_back(tok);
    start = end + 1;
  }
  return out;
}

namespace {

std::optional<std::vector<std::string>> CategoriesOf(const Json& j) {
  auto it = j.find("categories");
  if (it == j.end()) return std::nullopt;
  if (it->is_string()) return SplitCategories(it->get<std::string>());
  if (it->is_array()) {
    std::vector<std::string> tags;
    for (const auto& t : *it) {
      if (t.is_string()) tags.push_back(t.get<std::string>());
    }
    return tags;
  }
  return std::vector<std::string>{};  // null categories
}

bool IsBlank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) {
    return c == ' ' || c == '\t' || c == '\r';
  });
}

}  // namespace

BusinessCategories LoadBusinessCategories(const std::string& path) {
  BusinessCategories out;
  for (const auto& line : ReadLines(path)) {
    if (IsBlank(line)) continue;
    Json j = Json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object() || !j.contains("business_id") ||
        !j["business_id"].is_string()) {
      continue;
    }
    out[j["business_id"].get<std::string>()] =
        CategoriesOf(j).value_or(std::vector<std::string>{});
  }
  return out;
}

Corpus LoadReviews(const std::string& path, const CategoryFilter& filter,
                   const BusinessCategories* businesses) {
  const std::vector<std::string> lines = ReadLines(path);

  struct Parsed {
    ReviewRecord record;
    std::optional<std::vector<std::string>> inline_tags;
  };
  std::vector<std::optional<Parsed>> parsed(lines.size());
  std::vector<char> blank(lines.size(), 0);

#pragma omp parallel for schedule(dynamic, 256)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(lines.size());
       ++i) {
    const auto& line = lines[static_cast<std::size_t>(i)];
    if (IsBlank(line)) {
      blank[static_cast<std::size_t>(i)] = 1;
      continue;
    }
    Json j = Json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) continue;
    try {
      parsed[static_cast<std::size_t>(i)] =
          Parsed{ReviewFromJson(j), CategoriesOf(j)};
    } catch (const Error&) {
    }
  }

  Corpus corpus;
  corpus.source = path;
  std::unordered_set<std::string> ids;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (blank[i]) continue;
    ++corpus.load.lines;
    if (!parsed[i] || !ids.insert(parsed[i]->record.review_id).second) {
      ++corpus.load.malformed;
      continue;
    }
    const std::vector<std::string>* tags = nullptr;
    if (businesses != nullptr) {
      auto it = businesses->find(parsed[i]->record.business_id);
      if (it != businesses->end()) tags = &it->second;
    }
    if (tags == nullptr && parsed[i]->inline_tags) {
      tags = &*parsed[i]->inline_tags;
    }
    if (!filter.Accepts(tags)) {
      ++corpus.load.filtered_out;
      continue;
    }
    corpus.records.push_back(std::move(parsed[i]->record));
  }

  if (corpus.load.lines == 0) {
    corpus.load.warnings.push_back("review file " + path + " is empty");
  } else if (corpus.load.malformed * 2 > corpus.load.lines) {
    throw Error(ErrorCode::kCorpusFormat,
                path + ": " + std::to_string(corpus.load.malformed) + " of " +
                    std::to_string(corpus.load.lines) +
                    " lines are malformed");
  }
  if (corpus.load.malformed > 0) {
    corpus.load.warnings.push_back(
        "skipped " + std::to_string(corpus.load.malformed) +
        " malformed line(s)");
  }
  return corpus;
}

Corpus SampleOnePerUser(const Corpus& corpus, std::size_t n,
                        std::uint64_t seed) {
  if (corpus.records.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "cannot sample an empty corpus");
  }

  // (user, business) -> index of the latest review.
  std::map<std::pair<std::string, std::string>, std::size_t> latest;
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    const auto& r = corpus.records[i];
    auto [it, inserted] = latest.try_emplace({r.user_id, r.business_id}, i);
    if (inserted) continue;
    const auto& cur = corpus.records[it->second];
    if (r.posted_at > cur.posted_at ||
        (r.posted_at == cur.posted_at && r.review_id < cur.review_id)) {
      it->second = i;
    }
  }

  // user -> eligible indices, in input order. std::map keeps users sorted so
  // the draw sequence does not depend on hashing.
  std::map<std::string, std::vector<std::size_t>> pools;
  for (const auto& [key, idx] : latest) pools[key.first].push_back(idx);
  for (auto& [user, pool] : pools) std::sort(pool.begin(), pool.end());

  if (n > pools.size()) {
    throw Error(ErrorCode::kInsufficientUsers,
                "requested " + std::to_string(n) + " reviews but corpus has " +
                    std::to_string(pools.size()) + " distinct users");
  }

  SeededRng rng(seed);
  std::vector<std::size_t> candidates;
  candidates.reserve(pools.size());
  for (const auto& [user, pool] : pools) {
    candidates.push_back(pool[rng.Below(pool.size())]);
  }
  // Partial Fisher-Yates: the first n slots are the sample.
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + rng.Below(candidates.size() - i);
    std::swap(candidates[i], candidates[j]);
  }
  candidates.resize(n);
  std::sort(candidates.begin(), candidates.end());

  Corpus out;
  out.source = corpus.source;
  out.records.reserve(n);
  for (auto idx : candidates) out.records.push_back(corpus.records[idx]);
  return out;
}

std::size_t WhitespaceTokenCount(std::string_view text) {
  std::size_t count = 0;
  bool in_token = false;
  for (unsigned char c : text) {
    const bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r' ||
                       c == '\f' || c == '\v';
    if (!space && !in_token) ++count;
    in_token = !space;
  }
  return count;
}

std::size_t Utf8CodepointCount(std::string_view text) {
  return static_cast<std::size_t>(
      std::count_if(text.begin(), text.end(), [](char c) {
        return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
      }));
}

SummaryStat Summarize(const std::vector<double>& xs) {
  if (xs.empty()) throw Error(ErrorCode::kEmptyCorpus, "no values");
  SummaryStat s;
  s.min = *std::min_element(xs.begin(), xs.end());
  s.max = *std::max_element(xs.begin(), xs.end());
  double sum = 0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  // Rounding can nudge the mean a hair outside [min, max] for constant data.
  s.mean = std::clamp(s.mean, s.min, s.max);
  return s;
}

CorpusStats ComputeCorpusStats(const Corpus& corpus,
                               const TokenCounter& counter) {
  if (corpus.records.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "corpus has no records");
  }
  std::vector<double> chars, tokens, stars;
  for (const auto& r : corpus.records) {
    chars.push_back(static_cast<double>(Utf8CodepointCount(r.text)));
    tokens.push_back(static_cast<double>(counter(r.text)));
    stars.push_back(r.stars);
  }
  return {corpus.records.size(), Summarize(chars), Summarize(tokens),
          Summarize(stars)};
}

namespace {

OrderedJson StatJson(const SummaryStat& s) {
  OrderedJson j;
  j["mean"] = s.mean;
  j["std"] = s.std;
  j["min"] = s.min;
  j["max"] = s.max;
  return j;
}

}  // namespace

OrderedJson ToJson(const CorpusStats& s) {
  OrderedJson j;
  j["n"] = s.n;
  j["characters"] = StatJson(s.chars);
  j["tokens"] = StatJson(s.tokens);
  j["stars"] = StatJson(s.stars);
  return j;
}

std::string FormatStatsTable(const CorpusStats& s) {
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "n = %zu\n%-12s %10s %10s %8s %8s\n", s.n, "",
                "Mean", "Std", "Min.", "Max.");
  out << buf;
  auto row = [&](const char* name, const SummaryStat& st) {
    std::snprintf(buf, sizeof buf, "%-12s %10.3f %10.3f %8.0f %8.0f\n", name,
                  st.mean, st.std, st.min, st.max);
    out << buf;
  };
  row("#Characters", s.chars);
  row("#Tokens", s.tokens);
  row("#Stars", s.stars);
  return out.str();
}

void WriteCorpus(const Corpus& corpus, const std::string& path) {
  std::string out;
  for (const auto& r : corpus.records) {
    out += ToJson(r).dump();
    out += '\n';
  }
  WriteFileAtomic(path, out);
}

Corpus ReadCorpus(const std::string& path) {
  Corpus corpus;
  corpus.source = path;
  std::unordered_set<std::string> ids;
  std::size_t line_no = 0;
  for (const auto& line : ReadLines(path)) {
    ++line_no;
    if (IsBlank(line)) continue;
    try {
      corpus.records.push_back(ReviewFromJson(Json::parse(line)));
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kCorpusFormat,
                  path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!ids.insert(corpus.records.back().review_id).second) {
      throw Error(ErrorCode::kCorpusFormat,
                  path + ": duplicate review_id " +
                      corpus.records.back().review_id);
    }
  }
  corpus.load.lines = corpus.records.size();
  return corpus;
}

}  // namespace absa
