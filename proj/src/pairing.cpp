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

#include "bookpair/pairing.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include "bookpair/errors.hpp"

namespace bookpair {

std::string_view to_string(IllustrationExclusion r) {
  switch (r) {
    case IllustrationExclusion::TextDense:
      return "text_dense";
    case IllustrationExclusion::NoCaption:
      return "no_caption";
    case IllustrationExclusion::CaptionTooShort:
      return "caption_too_short";
  }
  return "text_dense";
}

std::string_view to_string(FragmentDiscard r) {
  return r == FragmentDiscard::NoIllustration ? "no_illustration" : "too_short";
}

IllustrationExclusion illustration_exclusion_from_string(std::string_view s) {
  if (s == "text_dense") return IllustrationExclusion::TextDense;
  if (s == "no_caption") return IllustrationExclusion::NoCaption;
  if (s == "caption_too_short") return IllustrationExclusion::CaptionTooShort;
  throw SchemaError("unknown illustration exclusion reason '" + std::string(s) + "'");
}

FragmentDiscard fragment_discard_from_string(std::string_view s) {
  if (s == "no_illustration") return FragmentDiscard::NoIllustration;
  if (s == "too_short") return FragmentDiscard::TooShort;
  throw SchemaError("unknown fragment discard reason '" + std::string(s) + "'");
}

std::vector<CaptionFragment> filter_captions(const PageAnnotation& page) {
  std::vector<CaptionFragment> out;
  for (std::size_t i = 0; i < page.text_regions.size(); ++i) {
    const TextRegion& r = page.text_regions[i];
    if (r.layout_class == LayoutClass::Caption && !r.text.empty()) {
      out.push_back(CaptionFragment{r.bbox, r.text, i});
    }
  }
  return out;
}

long interior_text_load(const PageAnnotation& page, const BBox& area) {
  long load = 0;
  for (const TextRegion& r : page.text_regions) {
    if (r.layout_class == LayoutClass::Background) continue;
    if (area.contains_point(r.bbox.center_x(), r.bbox.center_y())) {
      load += static_cast<long>(utf8_length(r.text));
    }
  }
  return load;
}

IllustrationFilterResult filter_illustrations(const PageAnnotation& page,
                                              const PipelineConfig& cfg) {
  IllustrationFilterResult result;
  for (const IllustrationRegion& ill : page.illustration_regions) {
    if (interior_text_load(page, ill.bbox) > cfg.text_density_max_chars) {
      result.excluded.push_back({ill, IllustrationExclusion::TextDense});
    } else {
      result.kept.push_back(ill);
    }
  }
  return result;
}

std::map<std::size_t, std::vector<CaptionFragment>> assign_fragments(
    const std::vector<CaptionFragment>& fragments,
    const std::vector<IllustrationRegion>& illustrations, const PipelineConfig& cfg) {
  std::map<std::size_t, std::vector<CaptionFragment>> out;
  if (illustrations.empty()) return out;
  for (const CaptionFragment& frag : fragments) {
    std::size_t best = 0;
    double best_d = rect_distance(frag.bbox, illustrations[0].bbox, cfg.distance_metric);
    for (std::size_t i = 1; i < illustrations.size(); ++i) {
      const double d = rect_distance(frag.bbox, illustrations[i].bbox, cfg.distance_metric);
      if (d < best_d) {
        best = i;
        best_d = d;
      }
    }
    out[best].push_back(frag);
  }
  return out;
}

namespace {

bool fragment_less(const CaptionFragment& a, const CaptionFragment& b) {
  return std::tie(a.bbox, a.text) < std::tie(b.bbox, b.text);
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

struct Line {
  std::vector<CaptionFragment> members;
  double mean_key = 0;  // mean top-y for rows, mean left-x for columns
  double min_cross = 0;  // min left-x for rows, min top-y for columns
};

}  // namespace

MergedCaption merge_fragments(const std::vector<CaptionFragment>& fragments,
                              const PipelineConfig& cfg) {
  if (fragments.empty()) throw std::invalid_argument("merge_fragments: empty fragment list");
  const bool horizontal = cfg.reading_order == ReadingOrder::HorizontalLTR;

  // Everything below runs on a content-sorted copy so the caller's ordering
  // cannot leak into sums or tie-breaks.
  std::vector<CaptionFragment> frags = fragments;
  std::sort(frags.begin(), frags.end(), fragment_less);

  DisjointSets sets(frags.size());
  for (std::size_t i = 0; i < frags.size(); ++i) {
    for (std::size_t j = i + 1; j < frags.size(); ++j) {
      const BBox& a = frags[i].bbox;
      const BBox& b = frags[j].bbox;
      const double overlap = horizontal ? interval_overlap(a.y(), a.h(), b.y(), b.h())
                                        : interval_overlap(a.x(), a.w(), b.x(), b.w());
      const double extent = horizontal ? std::min(a.h(), b.h()) : std::min(a.w(), b.w());
      if (overlap >= cfg.row_overlap_fraction * extent) sets.unite(i, j);
    }
  }

  std::map<std::size_t, Line> by_root;
  for (std::size_t i = 0; i < frags.size(); ++i) by_root[sets.find(i)].members.push_back(frags[i]);

  std::vector<Line> lines;
  for (auto& [root, line] : by_root) {
    double sum = 0;
    line.min_cross = horizontal ? line.members.front().bbox.x() : line.members.front().bbox.y();
    for (const CaptionFragment& f : line.members) {
      sum += horizontal ? f.bbox.y() : f.bbox.x();
      line.min_cross = std::min(line.min_cross, horizontal ? f.bbox.x() : f.bbox.y());
    }
    line.mean_key = sum / static_cast<double>(line.members.size());
    if (horizontal) {
      std::stable_sort(line.members.begin(), line.members.end(),
                       [](const CaptionFragment& a, const CaptionFragment& b) {
                         return std::make_tuple(a.bbox.x(), a.bbox.y()) <
                                std::make_tuple(b.bbox.x(), b.bbox.y());
                       });
    } else {
      std::stable_sort(line.members.begin(), line.members.end(),
                       [](const CaptionFragment& a, const CaptionFragment& b) {
                         return std::make_tuple(a.bbox.y(), -a.bbox.x()) <
                                std::make_tuple(b.bbox.y(), -b.bbox.x());
                       });
    }
    lines.push_back(std::move(line));
  }

  // Rows run top to bottom; vertical columns run right to left.
  std::stable_sort(lines.begin(), lines.end(), [horizontal](const Line& a, const Line& b) {
    if (horizontal) {
      return std::make_tuple(a.mean_key, a.min_cross) < std::make_tuple(b.mean_key, b.min_cross);
    }
    return std::make_tuple(-a.mean_key, a.min_cross) < std::make_tuple(-b.mean_key, b.min_cross);
  });

  MergedCaption merged;
  for (const Line& line : lines) {
    for (const CaptionFragment& f : line.members) {
      if (!merged.ordered_bboxes.empty()) merged.text += cfg.join_delimiter;
      merged.text += f.text;
      merged.ordered_bboxes.push_back(f.bbox);
    }
  }
  return merged;
}

long caption_char_count(const std::vector<CaptionFragment>& fragments) {
  long n = 0;
  for (const CaptionFragment& f : fragments) n += static_cast<long>(utf8_length(f.text));
  return n;
}

PageExtraction extract_page(const PageAnnotation& page, const BookMetadata& meta,
                            const PipelineConfig& cfg) {
  if (meta.book_id != page.book_id) {
    throw BookMismatchError("page '" + page.page_id + "' belongs to book '" + page.book_id +
                            "' but metadata is for '" + meta.book_id + "'");
  }

  // Canonical region order; remember where each text region came from so
  // source_index still refers to the caller's page.
  std::vector<std::size_t> text_order(page.text_regions.size());
  std::iota(text_order.begin(), text_order.end(), std::size_t{0});
  std::stable_sort(text_order.begin(), text_order.end(), [&](std::size_t a, std::size_t b) {
    return canonical_less(page.text_regions[a], page.text_regions[b]);
  });
  PageAnnotation canon = page;
  for (std::size_t i = 0; i < text_order.size(); ++i) {
    canon.text_regions[i] = page.text_regions[text_order[i]];
  }
  std::stable_sort(canon.illustration_regions.begin(), canon.illustration_regions.end(),
                   [](const IllustrationRegion& a, const IllustrationRegion& b) {
                     return canonical_less(a, b);
                   });

  std::vector<CaptionFragment> fragments = filter_captions(canon);
  for (CaptionFragment& f : fragments) f.source_index = text_order[f.source_index];

  IllustrationFilterResult filtered = filter_illustrations(canon, cfg);
  PageExtraction out;
  out.excluded_illustrations = std::move(filtered.excluded);

  if (filtered.kept.empty()) {
    for (CaptionFragment& f : fragments) {
      out.discarded_fragments.push_back({std::move(f), FragmentDiscard::NoIllustration});
    }
    return out;
  }

  auto assignment = assign_fragments(fragments, filtered.kept, cfg);
  for (std::size_t i = 0; i < filtered.kept.size(); ++i) {
    const IllustrationRegion& ill = filtered.kept[i];
    auto it = assignment.find(i);
    if (it == assignment.end()) {
      out.excluded_illustrations.push_back({ill, IllustrationExclusion::NoCaption});
      continue;
    }
    const std::vector<CaptionFragment>& frags = it->second;
    if (caption_char_count(frags) < cfg.min_caption_chars) {
      out.excluded_illustrations.push_back({ill, IllustrationExclusion::CaptionTooShort});
      for (const CaptionFragment& f : frags) {
        out.discarded_fragments.push_back({f, FragmentDiscard::TooShort});
      }
      continue;
    }
    MergedCaption merged = merge_fragments(frags, cfg);
    out.pairs.push_back(ImageTextPair{
        .pair_id = page.page_id + "#" + std::to_string(i),
        .page_id = page.page_id,
        .book_id = page.book_id,
        .illustration_bbox = ill.bbox,
        .caption_text = std::move(merged.text),
        .fragment_bboxes = std::move(merged.ordered_bboxes),
        .labels = meta.labels,
    });
  }
  return out;
}

}  // namespace bookpair
