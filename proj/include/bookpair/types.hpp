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

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bookpair/geometry.hpp"

namespace bookpair {

// Structural role assigned to a text region by the layout analyzer.
enum class LayoutClass {
  Caption,
  Headline,
  BodyText,
  PageNumber,
  InFigureText,
  Note,
  Header,
  Background,
};

inline constexpr std::array<LayoutClass, 8> kAllLayoutClasses = {
    LayoutClass::Caption,      LayoutClass::Headline, LayoutClass::BodyText,
    LayoutClass::PageNumber,   LayoutClass::InFigureText, LayoutClass::Note,
    LayoutClass::Header,       LayoutClass::Background,
};

std::string_view to_string(LayoutClass c);
// Returns nullopt for strings outside the closed set.
std::optional<LayoutClass> layout_class_from_string(std::string_view s);

struct TextRegion {
  BBox bbox;
  std::string text;
  LayoutClass layout_class = LayoutClass::Background;
  double confidence = 1.0;

  friend bool operator==(const TextRegion&, const TextRegion&) = default;
};

struct IllustrationRegion {
  BBox bbox;
  double confidence = 1.0;

  friend bool operator==(const IllustrationRegion&, const IllustrationRegion&) = default;
};

// Detector and OCR output for one scanned page.
struct PageAnnotation {
  std::string page_id;
  std::string book_id;
  double width_px = 0;
  double height_px = 0;
  std::optional<std::string> image_path;
  std::vector<TextRegion> text_regions;
  std::vector<IllustrationRegion> illustration_regions;

  friend bool operator==(const PageAnnotation&, const PageAnnotation&) = default;
};

using Labels = std::map<std::string, std::string>;

struct BookMetadata {
  std::string book_id;
  std::optional<std::string> title;
  Labels labels;

  friend bool operator==(const BookMetadata&, const BookMetadata&) = default;
};

struct ImageTextPair {
  std::string pair_id;
  std::string page_id;
  std::string book_id;
  BBox illustration_bbox;
  std::string caption_text;
  // Reading order used to build caption_text.
  std::vector<BBox> fragment_bboxes;
  Labels labels;

  friend bool operator==(const ImageTextPair&, const ImageTextPair&) = default;
};

enum class ReadingOrder { HorizontalLTR, VerticalRTL };

std::string_view to_string(ReadingOrder r);
ReadingOrder reading_order_from_string(std::string_view s);

// Every threshold and tie-break rule of the extraction pipeline.
struct PipelineConfig {
  // An illustration whose interior text load exceeds this is excluded.
  long text_density_max_chars = 30;
  long min_caption_chars = 4;
  std::string join_delimiter = " ";
  double row_overlap_fraction = 0.5;
  DistanceMetric distance_metric = DistanceMetric::EdgeToEdge;
  ReadingOrder reading_order = ReadingOrder::HorizontalLTR;

  // Throws ConfigError when a field is out of range.
  void validate() const;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

// Number of Unicode code points in a UTF-8 string. Invalid lead bytes are
// counted as one character each.
std::size_t utf8_length(std::string_view s);

// Throws GeometryError unless every region lies inside the page.
void validate_page_geometry(const PageAnnotation& page);

// Strict weak orders used to canonicalize region lists: top edge, then left
// edge, then size, then the remaining fields.
bool canonical_less(const IllustrationRegion& a, const IllustrationRegion& b);
bool canonical_less(const TextRegion& a, const TextRegion& b);

// Copy of the page with both region lists sorted by canonical_less.
PageAnnotation canonicalized(PageAnnotation page);

}  // namespace bookpair
