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
#include <string>
#include <vector>

#include "bookpair/emit.hpp"
#include "bookpair/pairing.hpp"
#include "bookpair/types.hpp"

namespace bookpair {

struct IntRange {
  long min = 0;
  long max = 0;

  friend bool operator==(const IntRange&, const IntRange&) = default;
};

struct GenConfig {
  std::uint64_t seed = 42;
  long n_pages = 10;
  long page_width = 1200;
  long page_height = 1800;
  IntRange illustrations_per_page{1, 3};
  IntRange fragments_per_caption{1, 3};
  IntRange distractor_regions_per_page{0, 6};
  long caption_gap_px = 12;
  // Every planted fragment is nearer its own illustration than any other
  // illustration on the page by more than this factor.
  double separation_margin = 2.0;
  // Chance that a page also carries one table-like illustration.
  double table_like_prob = 0.3;

  // Throws ConfigError for out-of-range fields.
  void validate() const;

  friend bool operator==(const GenConfig&, const GenConfig&) = default;
};

// Planted truth for one generated page.
struct PlantedPage {
  std::string page_id;
  std::string book_id;
  // text_regions index of each caption fragment -> illustration index.
  std::map<std::size_t, std::size_t> fragment_owner;
  // Illustration indices of the table-like (dense) regions.
  std::vector<std::size_t> table_like;
  // What a correct extraction with the default PipelineConfig returns.
  PageExtraction expected;
};

struct GroundTruth {
  std::vector<ImageTextPair> pairs;
  std::vector<PlantedPage> pages;

  PageExtractions extractions() const;
};

struct GeneratedCorpus {
  std::vector<PageAnnotation> pages;
  GroundTruth truth;
};

// Caption strings planted by the generator.
const std::vector<std::string>& caption_phrase_bank();

// Deterministic metadata records (prefecture, year, category labels).
std::vector<BookMetadata> default_meta_pool(std::size_t n_books);

// Deterministic in cfg and meta_pool. Pages are independent: page i draws
// from a substream seeded by (cfg.seed, i).
//
// Throws ConfigError for invalid configs or when the page is too small to
// hold the layout, and std::invalid_argument for an empty meta_pool with
// n_pages > 0.
GeneratedCorpus generate(const GenConfig& cfg, const std::vector<BookMetadata>& meta_pool);

// Moves every region by a uniform integer offset in [-jitter_px, jitter_px]
// per axis (clamped to the page) and relabels each caption as a random
// non-caption class with probability class_flip_prob.
std::vector<PageAnnotation> perturb(const std::vector<PageAnnotation>& pages, std::uint64_t seed,
                                    long jitter_px, double class_flip_prob);

}  // namespace bookpair
