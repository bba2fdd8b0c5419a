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

// Review corpus loading, per-user sampling and summary statistics.
//
// Input is Yelp-style line-delimited JSON: one review object per line with
// review_id, user_id, business_id, stars, text and date. Category tags come
// from a business file (business_id -> "categories") or, when a review line
// carries its own "categories" field, from the review itself.

#ifndef ABSA_INGEST_HPP_
#define ABSA_INGEST_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "absa/core.hpp"

namespace absa {

struct CategoryFilter {
  std::vector<std::string> include;
  std::vector<std::string> exclude;

  // Restaurants, minus fast food, food trucks, nightlife and bars.
  static CategoryFilter Restaurants();

  // A record passes when it has any include tag (or include is empty) and
  // no exclude tag. Untagged records pass only when include is empty.
  bool Accepts(const std::vector<std::string>* tags) const;
};

struct LoadStats {
  std::size_t lines = 0;
  std::size_t malformed = 0;
  std::size_t filtered_out = 0;
  std::vector<std::string> warnings;
};

struct Corpus {
  std::vector<ReviewRecord> records;
  std::string source;
  LoadStats load;
};

using BusinessCategories =
    std::unordered_map<std::string, std::vector<std::string>>;

// Splits Yelp's comma-separated category string.
std::vector<std::string> SplitCategories(std::string_view s);

BusinessCategories LoadBusinessCategories(const std::string& path);

// Throws kIo when the file cannot be opened and kCorpusFormat when more than
// half of the non-blank lines are malformed.
Corpus LoadReviews(const std::string& path, const CategoryFilter& filter,
                   const BusinessCategories* businesses = nullptr);

// At most one review per user. For each (user, business) only the latest
// review is eligible (ties: smallest review_id); one eligible review is then
// drawn per user and n users are drawn without replacement. Output keeps the
// input order. Pure in (corpus, n, seed).
Corpus SampleOnePerUser(const Corpus& corpus, std::size_t n,
                        std::uint64_t seed);

using TokenCounter = std::function<std::size_t(std::string_view)>;

std::size_t WhitespaceTokenCount(std::string_view text);
std::size_t Utf8CodepointCount(std::string_view text);

struct SummaryStat {
  double mean = 0;
  double std = 0;  // sample standard deviation; 0 for a single value
  double min = 0;
  double max = 0;
};

struct CorpusStats {
  std::size_t n = 0;
  SummaryStat chars;
  SummaryStat tokens;
  SummaryStat stars;
};

SummaryStat Summarize(const std::vector<double>& xs);
CorpusStats ComputeCorpusStats(const Corpus& corpus,
                               const TokenCounter& counter =
                                   WhitespaceTokenCount);
OrderedJson ToJson(const CorpusStats& s);
std::string FormatStatsTable(const CorpusStats& s);

void WriteCorpus(const Corpus& corpus, const std::string& path);
// Strict reader for corpora written by WriteCorpus.
Corpus ReadCorpus(const std::string& path);

}  // namespace absa

#endif  // ABSA_INGEST_HPP_
