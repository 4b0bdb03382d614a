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

#include <algorithm>
#include <limits>

#include <doctest.h>

#include "bookpair/errors.hpp"
#include "bookpair/pairing.hpp"
#include "bookpair/random.hpp"
#include "bookpair/synthgen.hpp"
#include "test_support.hpp"

using namespace bookpair;
using testing::frag;
using testing::ill;
using testing::make_page;
using testing::text;

namespace {

const BookMetadata kBook{"b1", "Album", {{"prefecture", "Tokyo"}}};

// Coarse integer grid so equal distances (ties) actually happen.
PageAnnotation random_layout(Rng& rng, long max_ills, long max_caps, long max_other) {
  auto box = [&] {
    return BBox(double(rng.uniform_int(0, 40) * 10), double(rng.uniform_int(0, 40) * 10),
                double(rng.uniform_int(1, 20) * 10), double(rng.uniform_int(1, 8) * 10));
  };
  PageAnnotation p = make_page("pg", {}, {});
  p.width_px = 700;
  p.height_px = 700;
  const long n_ill = rng.uniform_int(0, max_ills);
  for (long i = 0; i < n_ill; ++i) p.illustration_regions.push_back({box(), 0.9});
  static const std::vector<std::string> words = {"A", "No.7", "FUJI", "KYOTO STATION", "富士山",
                                                 "TEMPLE GATE", "x"};
  const long n_cap = rng.uniform_int(0, max_caps);
  for (long i = 0; i < n_cap; ++i) {
    p.text_regions.push_back({box(), words[std::size_t(rng.uniform_int(0, words.size() - 1))],
                              LayoutClass::Caption, 0.9});
  }
  const long n_other = rng.uniform_int(0, max_other);
  for (long i = 0; i < n_other; ++i) {
    const auto cls = kAllLayoutClasses[std::size_t(rng.uniform_int(1, 7))];
    p.text_regions.push_back({box(), std::string(std::size_t(rng.uniform_int(1, 40)), 'q'), cls, 0.9});
  }
  return p;
}

template <typename T>
void shuffle(Rng& rng, std::vector<T>& v) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[std::size_t(rng.uniform_int(0, long(i) - 1))]);
  }
}

// Same extraction ignoring source_index, which legitimately follows the
// input order.
void check_same_extraction(PageExtraction a, PageExtraction b) {
  for (auto* ex : {&a, &b}) {
    for (DiscardedFragment& d : ex->discarded_fragments) d.fragment.source_index = 0;
  }
  CHECK(a == b);
}

}  // namespace

TEST_CASE("filter_captions") {
  const PageAnnotation page = make_page(
      "p", {text(0, 0, 10, 10, "A"), text(0, 20, 10, 10, "B", LayoutClass::BodyText),
            text(0, 40, 10, 10, "C")},
      {});
  const auto frags = filter_captions(page);
  REQUIRE(frags.size() == 2);
  CHECK(frags[0].text == "A");
  CHECK(frags[0].source_index == 0);
  CHECK(frags[1].text == "C");
  CHECK(frags[1].source_index == 2);

  CHECK(filter_captions(make_page("p", {text(0, 0, 5, 5, "B", LayoutClass::Headline)}, {})).empty());
  CHECK(filter_captions(make_page("p", {text(0, 0, 5, 5, "")}, {})).empty());
}

TEST_CASE("filter_illustrations: interior text load") {
  PipelineConfig cfg;
  SUBCASE("no interior text") {
    const auto r = filter_illustrations(make_page("p", {}, {ill(0, 0, 400, 400)}), cfg);
    CHECK(r.kept.size() == 1);
    CHECK(r.excluded.empty());
  }
  SUBCASE("20 + 25 + 10 = 55 characters > 30") {
    const PageAnnotation page = make_page(
        "p",
        {text(10, 10, 100, 20, std::string(20, 'a'), LayoutClass::InFigureText),
         text(10, 50, 100, 20, std::string(25, 'b'), LayoutClass::BodyText),
         text(10, 90, 100, 20, std::string(10, 'c'), LayoutClass::Caption)},
        {ill(0, 0, 400, 400)});
    CHECK(interior_text_load(page, page.illustration_regions[0].bbox) == 55);
    const auto r = filter_illustrations(page, cfg);
    CHECK(r.kept.empty());
    REQUIRE(r.excluded.size() == 1);
    CHECK(r.excluded[0].reason == IllustrationExclusion::TextDense);
  }
  SUBCASE("40-character region whose center lies outside") {
    // Center (420, 200) is right of the box edge at x = 400.
    const PageAnnotation page = make_page(
        "p", {text(360, 190, 120, 20, std::string(40, 'z'), LayoutClass::BodyText)},
        {ill(0, 0, 400, 400)});
    CHECK(interior_text_load(page, page.illustration_regions[0].bbox) == 0);
    CHECK(filter_illustrations(page, cfg).kept.size() == 1);
  }
  SUBCASE("background text never counts") {
    const PageAnnotation page = make_page(
        "p", {text(10, 10, 100, 20, std::string(100, 'z'), LayoutClass::Background)},
        {ill(0, 0, 400, 400)});
    CHECK(filter_illustrations(page, cfg).kept.size() == 1);
  }
  SUBCASE("load equal to the threshold is kept") {
    const PageAnnotation page = make_page(
        "p", {text(10, 10, 100, 20, std::string(30, 'z'), LayoutClass::BodyText)},
        {ill(0, 0, 400, 400)});
    CHECK(filter_illustrations(page, cfg).kept.size() == 1);
  }
  SUBCASE("characters are code points, not bytes") {
    // 12 characters, 36 bytes.
    const PageAnnotation page = make_page(
        "p", {text(10, 10, 100, 20, "東京東京東京東京東京東京", LayoutClass::BodyText)},
        {ill(0, 0, 400, 400)});
    CHECK(interior_text_load(page, page.illustration_regions[0].bbox) == 12);
  }
}

TEST_CASE("assign_fragments") {
  PipelineConfig cfg;
  SUBCASE("single candidate") {
    const auto m = assign_fragments({frag(0, 500, 10, 10, "A")}, {ill(0, 0, 100, 100)}, cfg);
    REQUIRE(m.size() == 1);
    CHECK(m.at(0).size() == 1);
  }
  SUBCASE("nearest by edge distance: 50 vs 120") {
    const auto m = assign_fragments({frag(100, 200, 80, 20, "A")},
                                    {ill(100, 50, 100, 100), ill(300, 200, 100, 100)}, cfg);
    CHECK(m.size() == 1);
    CHECK(m.count(0) == 1);
  }
  SUBCASE("center metric can disagree with edge metric") {
    // Wide photo above: edge distance 10, center distance about 410.
    // Small photo to the right: edge distance 40, center distance about 90.
    const std::vector<IllustrationRegion> ills = {ill(0, 0, 1000, 300), ill(140, 310, 40, 40)};
    const std::vector<CaptionFragment> frags = {frag(50, 310, 50, 20, "A")};
    CHECK(assign_fragments(frags, ills, cfg).count(0) == 1);
    PipelineConfig center = cfg;
    center.distance_metric = DistanceMetric::CenterToCenter;
    CHECK(assign_fragments(frags, ills, center).count(1) == 1);
  }
  SUBCASE("ties go to the lower index") {
    // Distance 20 to both index 0 (below) and index 2 (above).
    const auto m = assign_fragments(
        {frag(100, 100, 10, 10, "A")},
        {ill(100, 130, 10, 10), ill(500, 500, 10, 10), ill(100, 70, 10, 10)}, cfg);
    CHECK(m.count(0) == 1);
    CHECK(m.count(2) == 0);
  }
  SUBCASE("no illustrations") {
    CHECK(assign_fragments({frag(0, 0, 5, 5, "A")}, {}, cfg).empty());
  }
}

TEST_CASE("merge_fragments: horizontal reading order") {
  PipelineConfig cfg;
  SUBCASE("single fragment") {
    const auto m = merge_fragments({frag(10, 10, 40, 14, "FUJI")}, cfg);
    CHECK(m.text == "FUJI");
    CHECK(m.ordered_bboxes == std::vector<BBox>{BBox(10, 10, 40, 14)});
  }
  SUBCASE("two rows, left to right inside a row") {
    const std::vector<CaptionFragment> frags = {frag(100, 500, 50, 14, "MOUNT"),
                                                frag(160, 500, 40, 14, "FUJI"),
                                                frag(100, 520, 40, 14, "VIEW")};
    const auto m = merge_fragments(frags, cfg);
    CHECK(m.text == "MOUNT FUJI VIEW");
    CHECK(m.ordered_bboxes ==
          std::vector<BBox>{BBox(100, 500, 50, 14), BBox(160, 500, 40, 14), BBox(100, 520, 40, 14)});

    const std::vector<CaptionFragment> reversed(frags.rbegin(), frags.rend());
    const auto r = merge_fragments(reversed, cfg);
    CHECK(r.text == m.text);
    CHECK(r.ordered_bboxes == m.ordered_bboxes);
  }
  SUBCASE("slightly misaligned baselines still share a row") {
    // Overlap 10 of min height 14 >= 0.5 * 14.
    const auto m = merge_fragments({frag(200, 504, 40, 14, "B"), frag(100, 500, 40, 14, "A")}, cfg);
    CHECK(m.text == "A B");
  }
  SUBCASE("overlap below the fraction starts a new row") {
    // Overlap 4 < 7: the left fragment is on the lower row.
    const auto m = merge_fragments({frag(100, 510, 40, 14, "LOW"), frag(300, 500, 40, 14, "HIGH")}, cfg);
    CHECK(m.text == "HIGH LOW");
  }
  SUBCASE("custom delimiter") {
    cfg.join_delimiter = "/";
    CHECK(merge_fragments({frag(0, 0, 10, 10, "A"), frag(20, 0, 10, 10, "B")}, cfg).text == "A/B");
  }
  SUBCASE("empty input") {
    CHECK_THROWS_AS(merge_fragments({}, cfg), std::invalid_argument);
  }
}

TEST_CASE("merge_fragments: vertical right-to-left reading order") {
  PipelineConfig cfg;
  cfg.reading_order = ReadingOrder::VerticalRTL;
  // Right column holds two fragments stacked, left column one.
  const std::vector<CaptionFragment> frags = {frag(100, 10, 20, 60, "C"), frag(200, 80, 20, 50, "B"),
                                              frag(202, 10, 20, 60, "A")};
  CHECK(merge_fragments(frags, cfg).text == "A B C");
}

TEST_CASE("merge_fragments is invariant under input permutation") {
  Rng rng(99);
  PipelineConfig cfg;
  for (int trial = 0; trial < 300; ++trial) {
    cfg.reading_order = trial % 2 ? ReadingOrder::VerticalRTL : ReadingOrder::HorizontalLTR;
    std::vector<CaptionFragment> frags;
    const long n = rng.uniform_int(1, 7);
    for (long i = 0; i < n; ++i) {
      frags.push_back(frag(double(rng.uniform_int(0, 30) * 7), double(rng.uniform_int(0, 30) * 7),
                           double(rng.uniform_int(1, 10) * 5), double(rng.uniform_int(1, 10) * 3),
                           std::string(1, char('a' + i)), std::size_t(i)));
    }
    const MergedCaption base = merge_fragments(frags, cfg);
    for (int p = 0; p < 5; ++p) {
      shuffle(rng, frags);
      const MergedCaption m = merge_fragments(frags, cfg);
      CHECK(m.text == base.text);
      CHECK(m.ordered_bboxes == base.ordered_bboxes);
    }
  }
}

TEST_CASE("extract_page") {
  PipelineConfig cfg;
  SUBCASE("straight-line path") {
    const PageAnnotation page =
        make_page("p1", {text(100, 412, 200, 30, "KAMEIDO TENMANGU")}, {ill(100, 100, 400, 300)});
    const PageExtraction ex = extract_page(page, kBook, cfg);
    REQUIRE(ex.pairs.size() == 1);
    const ImageTextPair& pair = ex.pairs[0];
    CHECK(pair.pair_id == "p1#0");
    CHECK(pair.page_id == "p1");
    CHECK(pair.book_id == "b1");
    CHECK(pair.caption_text == "KAMEIDO TENMANGU");
    CHECK(pair.illustration_bbox == BBox(100, 100, 400, 300));
    CHECK(pair.fragment_bboxes == std::vector<BBox>{BBox(100, 412, 200, 30)});
    CHECK(pair.labels == kBook.labels);
    CHECK(ex.excluded_illustrations.empty());
    CHECK(ex.discarded_fragments.empty());
  }
  SUBCASE("caption shorter than the minimum") {
    cfg.min_caption_chars = 5;
    const PageAnnotation page =
        make_page("p1", {text(100, 412, 60, 30, "No.7")}, {ill(100, 100, 400, 300)});
    const PageExtraction ex = extract_page(page, kBook, cfg);
    CHECK(ex.pairs.empty());
    REQUIRE(ex.discarded_fragments.size() == 1);
    CHECK(ex.discarded_fragments[0].reason == FragmentDiscard::TooShort);
    CHECK(ex.discarded_fragments[0].fragment.text == "No.7");
    REQUIRE(ex.excluded_illustrations.size() == 1);
    CHECK(ex.excluded_illustrations[0].reason == IllustrationExclusion::CaptionTooShort);
  }
  SUBCASE("the default minimum keeps a four-character caption") {
    const PageAnnotation page =
        make_page("p1", {text(100, 412, 60, 30, "No.7")}, {ill(100, 100, 400, 300)});
    CHECK(extract_page(page, kBook, cfg).pairs.size() == 1);
  }
  SUBCASE("delimiters do not count towards the minimum") {
    cfg.min_caption_chars = 3;
    const PageAnnotation page = make_page(
        "p1", {text(100, 412, 20, 30, "A"), text(130, 412, 20, 30, "B")}, {ill(100, 100, 400, 300)});
    CHECK(extract_page(page, kBook, cfg).pairs.empty());
    cfg.min_caption_chars = 2;
    const PageExtraction ex = extract_page(page, kBook, cfg);
    REQUIRE(ex.pairs.size() == 1);
    CHECK(ex.pairs[0].caption_text == "A B");
  }
  SUBCASE("illustration without caption and captions without illustration") {
    const PageExtraction a = extract_page(make_page("p1", {}, {ill(0, 0, 100, 100)}), kBook, cfg);
    REQUIRE(a.excluded_illustrations.size() == 1);
    CHECK(a.excluded_illustrations[0].reason == IllustrationExclusion::NoCaption);

    const PageExtraction b =
        extract_page(make_page("p1", {text(0, 0, 50, 20, "LONELY CAPTION")}, {}), kBook, cfg);
    CHECK(b.pairs.empty());
    REQUIRE(b.discarded_fragments.size() == 1);
    CHECK(b.discarded_fragments[0].reason == FragmentDiscard::NoIllustration);
  }
  SUBCASE("captions of a dense illustration move to the surviving one") {
    const PageAnnotation page = make_page(
        "p1",
        {text(10, 10, 100, 20, std::string(40, 'n'), LayoutClass::BodyText),
         text(10, 210, 100, 20, "TABLE OF EXPORTS"), text(10, 710, 100, 20, "HARBOUR")},
        {ill(0, 0, 400, 200), ill(0, 500, 400, 200)});
    const PageExtraction ex = extract_page(page, kBook, cfg);
    REQUIRE(ex.pairs.size() == 1);
    CHECK(ex.pairs[0].pair_id == "p1#0");
    CHECK(ex.pairs[0].illustration_bbox == BBox(0, 500, 400, 200));
    CHECK(ex.pairs[0].caption_text == "TABLE OF EXPORTS HARBOUR");
  }
  SUBCASE("book mismatch") {
    const PageAnnotation page = make_page("p1", {}, {}, "b2");
    CHECK_THROWS_AS(extract_page(page, kBook, cfg), BookMismatchError);
  }
  SUBCASE("source_index refers to the caller's region order") {
    const PageAnnotation page = make_page(
        "p1", {text(0, 900, 50, 20, "LATER"), text(0, 100, 50, 20, "EARLIER")}, {});
    const PageExtraction ex = extract_page(page, kBook, cfg);
    REQUIRE(ex.discarded_fragments.size() == 2);
    for (const DiscardedFragment& d : ex.discarded_fragments) {
      CHECK(page.text_regions[d.fragment.source_index].text == d.fragment.text);
    }
  }
}

TEST_CASE("extract_page recovers a generated two-illustration page exactly") {
  GenConfig g;
  g.n_pages = 40;
  g.illustrations_per_page = {2, 2};
  g.table_like_prob = 0.0;
  const GeneratedCorpus corpus = generate(g, default_meta_pool(3));
  const auto books = default_meta_pool(3);
  int checked = 0;
  for (std::size_t i = 0; i < corpus.pages.size(); ++i) {
    const PlantedPage& planted = corpus.truth.pages[i];
    if (planted.fragment_owner.size() != 3) continue;
    const PageAnnotation& page = corpus.pages[i];
    const auto meta = std::find_if(books.begin(), books.end(),
                                   [&](const BookMetadata& b) { return b.book_id == page.book_id; });
    const PageExtraction ex = extract_page(page, *meta, PipelineConfig{});
    CHECK(ex.pairs == planted.expected.pairs);
    ++checked;
  }
  CHECK(checked > 0);
}

TEST_CASE("pairing invariants on random pages") {
  Rng rng(31337);
  PipelineConfig cfg;
  for (int trial = 0; trial < 500; ++trial) {
    cfg.distance_metric = trial % 3 == 0 ? DistanceMetric::CenterToCenter : DistanceMetric::EdgeToEdge;
    cfg.min_caption_chars = rng.uniform_int(1, 8);
    const PageAnnotation page = random_layout(rng, 4, 6, 4);
    const PageExtraction ex = extract_page(page, kBook, cfg);

    // Conservation: every caption fragment is in exactly one pair or discarded.
    std::size_t in_pairs = 0;
    for (const ImageTextPair& p : ex.pairs) in_pairs += p.fragment_bboxes.size();
    CHECK(filter_captions(page).size() == in_pairs + ex.discarded_fragments.size());

    // Exclusivity: illustrations appear in at most one pair, and every
    // illustration is either paired or excluded.
    CHECK(ex.pairs.size() + ex.excluded_illustrations.size() == page.illustration_regions.size());

    // Every pair satisfies the pair invariants.
    for (const ImageTextPair& p : ex.pairs) {
      CHECK_FALSE(p.caption_text.empty());
      CHECK_FALSE(p.fragment_bboxes.empty());
      CHECK(p.labels == kBook.labels);
    }

    // Determinism under permutation of both region lists.
    PageAnnotation shuffled = page;
    shuffle(rng, shuffled.text_regions);
    shuffle(rng, shuffled.illustration_regions);
    check_same_extraction(ex, extract_page(shuffled, kBook, cfg));

    // Monotone density filter.
    PipelineConfig looser = cfg;
    looser.text_density_max_chars = cfg.text_density_max_chars + rng.uniform_int(0, 60);
    const auto tight = filter_illustrations(page, cfg).kept;
    const auto loose = filter_illustrations(page, looser).kept;
    for (const IllustrationRegion& r : tight) {
      CHECK(std::find(loose.begin(), loose.end(), r) != loose.end());
    }
  }
}

TEST_CASE("assign_fragments agrees with exhaustive enumeration on small pages") {
  Rng rng(4242);
  PipelineConfig cfg;
  int nontrivial = 0;
  for (int trial = 0; trial < 400; ++trial) {
    cfg.distance_metric = trial % 2 ? DistanceMetric::CenterToCenter : DistanceMetric::EdgeToEdge;
    const PageAnnotation page = random_layout(rng, 3, 5, 0);
    const std::vector<CaptionFragment> frags = filter_captions(page);
    const std::vector<IllustrationRegion>& ills = page.illustration_regions;
    const auto got = assign_fragments(frags, ills, cfg);
    if (ills.empty()) {
      CHECK(got.empty());
      continue;
    }

    // Enumerate every assignment vector; keep the lexicographically first
    // one among those with minimal total distance.
    const std::size_t n = frags.size();
    const std::size_t k = ills.size();
    std::vector<std::size_t> choice(n, 0);
    std::vector<std::size_t> best;
    double best_total = std::numeric_limits<double>::infinity();
    while (true) {
      double total = 0;
      for (std::size_t f = 0; f < n; ++f) {
        total += rect_distance(frags[f].bbox, ills[choice[f]].bbox, cfg.distance_metric);
      }
      if (total < best_total) {
        best_total = total;
        best = choice;
      }
      std::size_t pos = n;
      while (pos > 0) {
        --pos;
        if (++choice[pos] < k) break;
        choice[pos] = 0;
        if (pos == 0) {
          pos = n + 1;
          break;
        }
      }
      if (n == 0 || pos == n + 1) break;
    }

    std::vector<std::size_t> actual(n, k);
    for (const auto& [ill_index, assigned] : got) {
      for (const CaptionFragment& f : assigned) {
        for (std::size_t i = 0; i < n; ++i) {
          if (frags[i].source_index == f.source_index) actual[i] = ill_index;
        }
      }
    }
    CHECK(actual == best);
    if (n > 0 && k > 1) ++nontrivial;
  }
  CHECK(nontrivial > 50);
}
