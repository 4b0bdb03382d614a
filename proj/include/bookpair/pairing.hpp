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
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "bookpair/types.hpp"

namespace bookpair {

// One OCR piece of a caption. source_index points into the text_regions of
// the page the fragment was taken from.
struct CaptionFragment {
  BBox bbox;
  std::string text;
  std::size_t source_index = 0;

  friend bool operator==(const CaptionFragment&, const CaptionFragment&) = default;
};

enum class IllustrationExclusion {
  TextDense,        // interior text load above text_density_max_chars
  NoCaption,        // no caption fragment was assigned
  CaptionTooShort,  // merged caption below min_caption_chars
};

enum class FragmentDiscard {
  NoIllustration,  // page had no surviving illustration
  TooShort,        // merged caption below min_caption_chars
};

std::string_view to_string(IllustrationExclusion r);
std::string_view to_string(FragmentDiscard r);
IllustrationExclusion illustration_exclusion_from_string(std::string_view s);
FragmentDiscard fragment_discard_from_string(std::string_view s);

struct ExcludedIllustration {
  IllustrationRegion region;
  IllustrationExclusion reason;

  friend bool operator==(const ExcludedIllustration&, const ExcludedIllustration&) = default;
};

struct DiscardedFragment {
  CaptionFragment fragment;
  FragmentDiscard reason;

  friend bool operator==(const DiscardedFragment&, const DiscardedFragment&) = default;
};

struct PageExtraction {
  std::vector<ImageTextPair> pairs;
  std::vector<ExcludedIllustration> excluded_illustrations;
  std::vector<DiscardedFragment> discarded_fragments;

  friend bool operator==(const PageExtraction&, const PageExtraction&) = default;
};

struct IllustrationFilterResult {
  std::vector<IllustrationRegion> kept;
  std::vector<ExcludedIllustration> excluded;
};

struct MergedCaption {
  std::string text;
  std::vector<BBox> ordered_bboxes;
};

// Caption-class regions with non-empty text, in page order.
std::vector<CaptionFragment> filter_captions(const PageAnnotation& page);

// Sum of character counts of the non-background text regions whose box
// center lies inside `area`.
long interior_text_load(const PageAnnotation& page, const BBox& area);

// Drops illustrations whose interior text load exceeds
// cfg.text_density_max_chars (likely tables or graphs).
IllustrationFilterResult filter_illustrations(const PageAnnotation& page,
                                              const PipelineConfig& cfg);

// Maps each fragment to the nearest illustration; equal distances go to the
// lower illustration index. Keys are indices into `illustrations`; each
// value lists fragments in input order. Empty when there are no
// illustrations.
std::map<std::size_t, std::vector<CaptionFragment>> assign_fragments(
    const std::vector<CaptionFragment>& fragments,
    const std::vector<IllustrationRegion>& illustrations, const PipelineConfig& cfg);

// Joins the fragments of one caption in reading order. The result does not
// depend on the order of `fragments`. Throws std::invalid_argument when
// `fragments` is empty.
MergedCaption merge_fragments(const std::vector<CaptionFragment>& fragments,
                              const PipelineConfig& cfg);

// Character count of a merged caption, i.e. the fragment texts without the
// inserted delimiters.
long caption_char_count(const std::vector<CaptionFragment>& fragments);

// Full per-page pipeline. The page's region lists are put in canonical order
// first, so the result is independent of how the input lists were ordered.
// Throws BookMismatchError when meta.book_id differs from page.book_id.
PageExtraction extract_page(const PageAnnotation& page, const BookMetadata& meta,
                            const PipelineConfig& cfg);

}  // namespace bookpair
