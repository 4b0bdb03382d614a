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

#include "bookpair/types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

#include "bookpair/errors.hpp"

namespace bookpair {

std::string_view to_string(LayoutClass c) {
  switch (c) {
    case LayoutClass::Caption:
      return "caption";
    case LayoutClass::Headline:
      return "headline";
    case LayoutClass::BodyText:
      return "body_text";
    case LayoutClass::PageNumber:
      return "page_number";
    case LayoutClass::InFigureText:
      return "in_figure_text";
    case LayoutClass::Note:
      return "note";
    case LayoutClass::Header:
      return "header";
    case LayoutClass::Background:
      return "background";
  }
  return "background";
}

std::optional<LayoutClass> layout_class_from_string(std::string_view s) {
  for (LayoutClass c : kAllLayoutClasses) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

std::string_view to_string(ReadingOrder r) {
  return r == ReadingOrder::HorizontalLTR ? "horizontal_ltr" : "vertical_rtl";
}

ReadingOrder reading_order_from_string(std::string_view s) {
  if (s == "horizontal_ltr") return ReadingOrder::HorizontalLTR;
  if (s == "vertical_rtl") return ReadingOrder::VerticalRTL;
  throw ConfigError("unknown reading order '" + std::string(s) + "'");
}

void PipelineConfig::validate() const {
  if (text_density_max_chars < 0) {
    throw ConfigError("text_density_max_chars must be non-negative");
  }
  if (min_caption_chars < 1) throw ConfigError("min_caption_chars must be positive");
  if (!(row_overlap_fraction > 0.0 && row_overlap_fraction <= 1.0)) {
    throw ConfigError("row_overlap_fraction must lie in (0, 1]");
  }
}

std::size_t utf8_length(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

void validate_page_geometry(const PageAnnotation& page) {
  if (!(page.width_px > 0) || !(page.height_px > 0)) {
    throw GeometryError("page '" + page.page_id + "' has non-positive size");
  }
  auto check = [&](const BBox& b, const char* what, std::size_t index) {
    if (b.right() > page.width_px || b.bottom() > page.height_px) {
      std::ostringstream os;
      os << "page '" << page.page_id << "': " << what << " " << index
         << " extends outside the page";
      throw GeometryError(os.str());
    }
  };
  for (std::size_t i = 0; i < page.text_regions.size(); ++i) {
    check(page.text_regions[i].bbox, "text region", i);
  }
  for (std::size_t i = 0; i < page.illustration_regions.size(); ++i) {
    check(page.illustration_regions[i].bbox, "illustration region", i);
  }
}

namespace {

auto ill_key(const IllustrationRegion& r) {
  return std::make_tuple(r.bbox.y(), r.bbox.x(), r.bbox.h(), r.bbox.w(), r.confidence);
}

auto text_key(const TextRegion& r) {
  return std::tuple<double, double, double, double, LayoutClass, const std::string&, double>(
      r.bbox.y(), r.bbox.x(), r.bbox.h(), r.bbox.w(), r.layout_class, r.text, r.confidence);
}

}  // namespace

bool canonical_less(const IllustrationRegion& a, const IllustrationRegion& b) {
  return ill_key(a) < ill_key(b);
}

bool canonical_less(const TextRegion& a, const TextRegion& b) {
  return text_key(a) < text_key(b);
}

PageAnnotation canonicalized(PageAnnotation page) {
  auto by_text = [](const TextRegion& a, const TextRegion& b) { return canonical_less(a, b); };
  auto by_ill = [](const IllustrationRegion& a, const IllustrationRegion& b) {
    return canonical_less(a, b);
  };
  std::stable_sort(page.text_regions.begin(), page.text_regions.end(), by_text);
  std::stable_sort(page.illustration_regions.begin(), page.illustration_regions.end(), by_ill);
  return page;
}

}  // namespace bookpair
