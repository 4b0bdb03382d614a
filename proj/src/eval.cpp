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

#include "bookpair/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

#include "bookpair/errors.hpp"
#include "bookpair/random.hpp"

namespace bookpair {

PairEvalResult score_counts(long tp, long fp, long fn) {
  PairEvalResult r;
  r.true_positives = tp;
  r.false_positives = fp;
  r.false_negatives = fn;
  r.precision = tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  r.recall = tp + fn == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  r.f1 = r.precision + r.recall == 0.0
             ? 0.0
             : 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

std::string_view to_string(TextMatch m) { return m == TextMatch::Exact ? "exact" : "normalized"; }

TextMatch text_match_from_string(std::string_view s) {
  if (s == "exact") return TextMatch::Exact;
  if (s == "normalized") return TextMatch::Normalized;
  throw ConfigError("unknown text match mode '" + std::string(s) + "'");
}

std::string normalize_caption(std::string_view s) {
  static constexpr std::string_view kIdeographicSpace = "\xE3\x80\x80";
  std::string out;
  bool pending_space = false;
  for (std::size_t i = 0; i < s.size();) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
      pending_space = true;
      ++i;
      continue;
    }
    if (s.substr(i, kIdeographicSpace.size()) == kIdeographicSpace) {
      pending_space = true;
      i += kIdeographicSpace.size();
      continue;
    }
    if (pending_space && !out.empty()) out += ' ';
    pending_space = false;
    out += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
    ++i;
  }
  return out;
}

namespace {

struct Candidate {
  double overlap;
  std::size_t pred;
  std::size_t truth;
};

// Greedy one-to-one consumption, highest IoU first; ties by prediction
// index then truth index. Returns the number of matches.
long greedy_match(std::vector<Candidate>& candidates, std::size_t n_pred, std::size_t n_truth) {
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return std::make_tuple(-a.overlap, a.pred, a.truth) <
           std::make_tuple(-b.overlap, b.pred, b.truth);
  });
  std::vector<bool> pred_used(n_pred, false);
  std::vector<bool> truth_used(n_truth, false);
  long matched = 0;
  for (const Candidate& c : candidates) {
    if (pred_used[c.pred] || truth_used[c.truth]) continue;
    pred_used[c.pred] = true;
    truth_used[c.truth] = true;
    ++matched;
  }
  return matched;
}

}  // namespace

PairEvalResult eval_pairs(const std::vector<ImageTextPair>& predicted,
                          const std::vector<ImageTextPair>& truth, double iou_threshold,
                          TextMatch text_match) {
  std::map<std::string, std::pair<std::vector<const ImageTextPair*>,
                                  std::vector<const ImageTextPair*>>>
      pages;
  for (const ImageTextPair& p : predicted) pages[p.page_id].first.push_back(&p);
  for (const ImageTextPair& t : truth) pages[t.page_id].second.push_back(&t);

  auto caption_key = [text_match](const std::string& s) {
    return text_match == TextMatch::Exact ? s : normalize_caption(s);
  };

  long tp = 0;
  long fp = 0;
  long fn = 0;
  std::map<std::string, MatchCounts> per_page;
  for (const auto& [page_id, lists] : pages) {
    const auto& [preds, truths] = lists;
    std::vector<std::string> truth_keys;
    for (const ImageTextPair* t : truths) truth_keys.push_back(caption_key(t->caption_text));
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      const std::string key = caption_key(preds[i]->caption_text);
      for (std::size_t j = 0; j < truths.size(); ++j) {
        const double o = iou(preds[i]->illustration_bbox, truths[j]->illustration_bbox);
        if (o >= iou_threshold && key == truth_keys[j]) candidates.push_back({o, i, j});
      }
    }
    const long m = greedy_match(candidates, preds.size(), truths.size());
    MatchCounts c{m, static_cast<long>(preds.size()) - m, static_cast<long>(truths.size()) - m};
    tp += c.true_positives;
    fp += c.false_positives;
    fn += c.false_negatives;
    per_page[page_id] = c;
  }
  PairEvalResult r = score_counts(tp, fp, fn);
  r.per_page = std::move(per_page);
  return r;
}

PairEvalResult eval_detections(const std::vector<BBox>& predicted, const std::vector<BBox>& truth,
                               double iou_threshold) {
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    for (std::size_t j = 0; j < truth.size(); ++j) {
      const double o = iou(predicted[i], truth[j]);
      if (o >= iou_threshold) candidates.push_back({o, i, j});
    }
  }
  const long m = greedy_match(candidates, predicted.size(), truth.size());
  return score_counts(m, static_cast<long>(predicted.size()) - m,
                      static_cast<long>(truth.size()) - m);
}

EmbeddingSet::EmbeddingSet(std::vector<std::string> ids, std::size_t dim,
                           std::vector<double> values)
    : ids_(std::move(ids)), dim_(dim), values_(std::move(values)) {
  if (dim_ == 0 && !ids_.empty()) throw DimensionMismatchError("embedding dimension must be > 0");
  if (values_.size() != ids_.size() * dim_) {
    throw DimensionMismatchError("embedding matrix has " + std::to_string(values_.size()) +
                                 " values, expected " + std::to_string(ids_.size() * dim_));
  }
  std::set<std::string_view> seen;
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!seen.insert(ids_[i]).second) throw SchemaError("duplicate embedding id '" + ids_[i] + "'");
    double sq = 0;
    for (double v : row(i)) sq += v * v;
    if (!(sq > 0.0) || !std::isfinite(sq)) {
      throw ZeroNormVectorError("embedding '" + ids_[i] + "' has zero or non-finite norm");
    }
  }
}

EmbeddingSet parse_embeddings(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("embeddings: empty file");
  std::istringstream header(line);
  std::string magic;
  std::string version;
  long long n = -1;
  long long d = -1;
  std::string extra;
  if (!(header >> magic >> version >> n >> d) || magic != "bookpair-embeddings" ||
      version != "v1" || n < 0 || d <= 0 || (header >> extra)) {
    throw SchemaError("embeddings line 1: expected 'bookpair-embeddings v1 N D'");
  }
  std::vector<std::string> ids;
  std::vector<double> values;
  ids.reserve(static_cast<std::size_t>(n));
  values.reserve(static_cast<std::size_t>(n * d));
  std::size_t line_no = 1;
  while (static_cast<long long>(ids.size()) < n) {
    if (!std::getline(in, line)) {
      throw SchemaError("embeddings: expected " + std::to_string(n) + " rows, found " +
                        std::to_string(ids.size()));
    }
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string where = "embeddings line " + std::to_string(line_no);
    std::istringstream row(line);
    std::string id;
    if (!(row >> id)) throw SchemaError(where + ": missing id");
    std::string tok;
    long long count = 0;
    while (row >> tok) {
      double v = 0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw SchemaError(where + ": bad number '" + tok + "'");
      }
      values.push_back(v);
      ++count;
    }
    if (count != d) {
      throw SchemaError(where + ": expected " + std::to_string(d) + " values, found " +
                        std::to_string(count));
    }
    ids.push_back(std::move(id));
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") != std::string::npos) {
      throw SchemaError("embeddings line " + std::to_string(line_no) + ": unexpected extra row");
    }
  }
  return EmbeddingSet(std::move(ids), static_cast<std::size_t>(d), std::move(values));
}

std::string write_embeddings(const EmbeddingSet& set) {
  std::string out = "bookpair-embeddings v1 " + std::to_string(set.size()) + " " +
                    std::to_string(set.dim()) + "\n";
  char buf[64];
  for (std::size_t i = 0; i < set.size(); ++i) {
    out += set.ids()[i];
    for (double v : set.row(i)) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
      out += ' ';
      out.append(buf, ptr);
    }
    out += '\n';
  }
  return out;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  double dot = 0;
  double na = 0;
  double nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

RetrievalResult recall_at_k(const EmbeddingSet& queries, const EmbeddingSet& gallery,
                            const std::vector<long>& ks) {
  if (queries.size() > 0 && gallery.size() > 0 && queries.dim() != gallery.dim()) {
    throw DimensionMismatchError("query dimension " + std::to_string(queries.dim()) +
                                 " differs from gallery dimension " +
                                 std::to_string(gallery.dim()));
  }
  for (long k : ks) {
    if (k <= 0) throw std::invalid_argument("recall_at_k: K must be positive");
  }
  std::unordered_map<std::string_view, std::size_t> gallery_index;
  for (std::size_t j = 0; j < gallery.size(); ++j) gallery_index.emplace(gallery.ids()[j], j);
  if (queries.size() != gallery.size()) {
    throw IdMismatchError("query and gallery sets have different sizes");
  }
  std::vector<std::size_t> truth(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    auto it = gallery_index.find(queries.ids()[i]);
    if (it == gallery_index.end()) {
      throw IdMismatchError("query id '" + queries.ids()[i] + "' missing from gallery");
    }
    truth[i] = it->second;
  }

  // rank[i] = number of gallery rows ordered ahead of query i's true row.
  std::vector<std::size_t> rank(queries.size(), 0);
  std::vector<double> sims(gallery.size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    for (std::size_t j = 0; j < gallery.size(); ++j) {
      sims[j] = cosine_similarity(queries.row(i), gallery.row(j));
    }
    const std::size_t t = truth[i];
    std::size_t ahead = 0;
    for (std::size_t j = 0; j < gallery.size(); ++j) {
      if (sims[j] > sims[t] || (sims[j] == sims[t] && j < t)) ++ahead;
    }
    rank[i] = ahead;
  }

  RetrievalResult result;
  result.n_queries = queries.size();
  for (long k : ks) {
    std::size_t hits = 0;
    for (std::size_t r : rank) hits += r < static_cast<std::size_t>(k) ? 1 : 0;
    result.recall_at[k] = queries.size() == 0
                              ? 1.0
                              : static_cast<double>(hits) / static_cast<double>(queries.size());
  }
  return result;
}

namespace {

EmbeddingSet take_rows_sorted_by_id(const EmbeddingSet& set, std::vector<std::size_t> rows) {
  std::sort(rows.begin(), rows.end(),
            [&](std::size_t a, std::size_t b) { return set.ids()[a] < set.ids()[b]; });
  std::vector<std::string> ids;
  std::vector<double> values;
  ids.reserve(rows.size());
  values.reserve(rows.size() * set.dim());
  for (std::size_t r : rows) {
    ids.push_back(set.ids()[r]);
    auto row = set.row(r);
    values.insert(values.end(), row.begin(), row.end());
  }
  return EmbeddingSet(std::move(ids), set.dim(), std::move(values));
}

}  // namespace

EmbeddingSet sample_eval_subset(const EmbeddingSet& set, std::size_t n, std::uint64_t seed) {
  if (n > set.size()) {
    throw SampleTooLargeError("cannot sample " + std::to_string(n) + " rows from " +
                              std::to_string(set.size()));
  }
  // Partial Fisher-Yates over row indices.
  std::vector<std::size_t> idx(set.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(idx.size()) - 1));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(n);
  return take_rows_sorted_by_id(set, std::move(idx));
}

EmbeddingSet restrict_to_ids(const EmbeddingSet& set, const std::vector<std::string>& ids) {
  std::set<std::string_view> wanted(ids.begin(), ids.end());
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (wanted.contains(set.ids()[i])) rows.push_back(i);
  }
  return take_rows_sorted_by_id(set, std::move(rows));
}

}  // namespace bookpair
