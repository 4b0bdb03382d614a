// Copyright 2026 The bookpair Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bookpair/types.hpp"

namespace bookpair {

struct MatchCounts {
  long true_positives = 0;
  long false_positives = 0;
  long false_negatives = 0;

  friend bool operator==(const MatchCounts&, const MatchCounts&) = default;
};

struct PairEvalResult {
  long true_positives = 0;
  long false_positives = 0;
  long false_negatives = 0;
  double precision = 1.0;
  double recall = 1.0;
  double f1 = 1.0;
  std::map<std::string, MatchCounts> per_page;
};

// precision = TP/(TP+FP), 1 when nothing was predicted; recall likewise
// over TP+FN; f1 is the harmonic mean, 0 when both are 0.
PairEvalResult score_counts(long tp, long fp, long fn);

enum class TextMatch { Exact, Normalized };

std::string_view to_string(TextMatch m);
TextMatch text_match_from_string(std::string_view s);

// Lower-cases ASCII letters and collapses runs of whitespace (ASCII and
// U+3000) to one space, trimming both ends.
std::string normalize_caption(std::string_view s);

// A prediction is a true positive when an unused truth pair on the same page
// has illustration IoU >= iou_threshold and a matching caption. Candidates
// are consumed greedily by descending IoU.
PairEvalResult eval_pairs(const std::vector<ImageTextPair>& predicted,
                          const std::vector<ImageTextPair>& truth, double iou_threshold = 0.5,
                          TextMatch text_match = TextMatch::Normalized);

// One-to-one greedy box matching at a fixed IoU threshold.
PairEvalResult eval_detections(const std::vector<BBox>& predicted,
                               const std::vector<BBox>& truth, double iou_threshold = 0.5);

// N x D embedding matrix with one id per row.
class EmbeddingSet {
 public:
  EmbeddingSet() = default;
  // Throws DimensionMismatchError if values.size() != ids.size() * dim,
  // ZeroNormVectorError for an all-zero (or non-finite) row and
  // SchemaError for duplicate ids.
  EmbeddingSet(std::vector<std::string> ids, std::size_t dim, std::vector<double> values);

  std::size_t size() const { return ids_.size(); }
  std::size_t dim() const { return dim_; }
  const std::vector<std::string>& ids() const { return ids_; }
  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * dim_, dim_};
  }
  const std::vector<double>& values() const { return values_; }

  friend bool operator==(const EmbeddingSet&, const EmbeddingSet&) = default;

 private:
  std::vector<std::string> ids_;
  std::size_t dim_ = 0;
  std::vector<double> values_;
};

// Text format: "bookpair-embeddings v1 N D" then N lines "id v1 ... vD".
EmbeddingSet parse_embeddings(std::string_view text);
std::string write_embeddings(const EmbeddingSet& set);

struct RetrievalResult {
  std::map<long, double> recall_at;
  std::size_t n_queries = 0;
};

double cosine_similarity(std::span<const double> a, std::span<const double> b);

// Query i's correct answer is the gallery row carrying the same id. Gallery
// rows are ranked by cosine similarity, ties going to the lower row index.
//
// Throws DimensionMismatchError when D differs, IdMismatchError when the id
// sets differ, std::invalid_argument for a non-positive K.
RetrievalResult recall_at_k(const EmbeddingSet& queries, const EmbeddingSet& gallery,
                            const std::vector<long>& ks);

// n rows drawn without replacement, returned sorted by id. Throws
// SampleTooLargeError when n > set.size().
EmbeddingSet sample_eval_subset(const EmbeddingSet& set, std::size_t n, std::uint64_t seed);

// Rows of `set` whose ids appear in `ids`, sorted by id.
EmbeddingSet restrict_to_ids(const EmbeddingSet& set, const std::vector<std::string>& ids);

}  // namespace bookpair
