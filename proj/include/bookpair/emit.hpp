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

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bookpair/pairing.hpp"
#include "bookpair/types.hpp"

namespace bookpair {

inline constexpr std::string_view kManifestFormat = "bookpair-manifest";
inline constexpr int kManifestVersion = 1;

struct ManifestStats {
  long n_pages = 0;
  long n_pairs = 0;
  // Keyed by reason string; every known reason is present, zero or not.
  std::map<std::string, long> excluded_illustrations;
  std::map<std::string, long> discarded_fragments;
  // label key -> label value -> number of pairs carrying it.
  std::map<std::string, std::map<std::string, long>> label_histogram;

  friend bool operator==(const ManifestStats&, const ManifestStats&) = default;
};

struct DatasetManifest {
  int version = kManifestVersion;
  PipelineConfig config;
  // Sorted by (page_id, pair ordinal).
  std::vector<ImageTextPair> pairs;
  ManifestStats stats;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

using PageExtractions = std::vector<std::pair<std::string, PageExtraction>>;

// Throws DuplicatePairIdError if two pairs share an id.
DatasetManifest build_manifest(const PageExtractions& extractions, const PipelineConfig& cfg);

// Header line followed by one pair per line.
std::string write_manifest(const DatasetManifest& manifest);

// Throws SchemaError naming the 1-based line that failed to parse.
DatasetManifest parse_manifest(std::string_view text);

struct CropRecord {
  std::string pair_id;
  std::optional<std::string> image_path;
  BBox bbox;
  std::optional<std::string> flag;

  friend bool operator==(const CropRecord&, const CropRecord&) = default;
};

inline constexpr std::string_view kNoSourceImage = "no_source_image";

// One record per pair, in manifest order. `image_paths` maps page_id to the
// page's source image; missing or empty entries produce a flagged record.
std::vector<CropRecord> crop_list(const DatasetManifest& manifest,
                                  const std::map<std::string, std::optional<std::string>>& image_paths);
std::string write_crop_list(const std::vector<CropRecord>& records);

// Line-delimited record of everything the pipeline dropped, one line per
// excluded illustration or discarded fragment, ordered by page_id.
struct ExclusionRecord {
  std::string page_id;
  std::string kind;  // "illustration" or "fragment"
  BBox bbox;
  std::string reason;
  std::optional<std::string> text;

  friend bool operator==(const ExclusionRecord&, const ExclusionRecord&) = default;
};

std::vector<ExclusionRecord> exclusion_records(const PageExtractions& extractions);
std::string write_exclusions(const std::vector<ExclusionRecord>& records);
std::vector<ExclusionRecord> parse_exclusions(std::string_view text);

}  // namespace bookpair
