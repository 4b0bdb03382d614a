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

#include "bookpair/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "bookpair/errors.hpp"
#include "bookpair/random.hpp"

namespace bookpair {

namespace {

// Page furniture, in pixels.
constexpr long kMarginX = 60;
constexpr long kTopBand = 110;
constexpr long kBottomBand = 100;
constexpr long kLineHeight = 28;
constexpr long kLineGap = 6;
constexpr long kCharWidth = 12;
constexpr long kFragmentPad = 4;
constexpr long kWordSpace = 16;
constexpr long kMinIllustrationHeight = 60;
constexpr long kMinTableHeight = 110;
constexpr long kMinTableWidth = 220;
// Extra spacing on top of the separation requirement so that small
// positional noise cannot flip an assignment.
constexpr long kSpacingSlack = 24;

const std::vector<std::string> kPhrases = {
    "KAMEIDO TENMANGU",
    "MOUNT FUJI FROM LAKE KAWAGUCHI",
    "KINKAKU-JI TEMPLE",
    "KAMO RIVER AT SANJO",
    "NIKKO",
    "ATAMI",
    "OSAKA CASTLE",
    "NAGOYA CASTLE KEEP",
    "ITSUKUSHIMA SHRINE GATE",
    "KEGON FALLS",
    "HAKODATE HARBOUR",
    "SAPPORO CLOCK TOWER",
    "NARA PARK DEER",
    "TODAI-JI GREAT BUDDHA HALL",
    "HIMEJI CASTLE",
    "GINZA STREET AT NIGHT",
    "NIHONBASHI BRIDGE",
    "ASAKUSA KANNON TEMPLE",
    "KOBE PORT",
    "NAGASAKI HARBOUR VIEW",
    "SHURI CASTLE GATE",
    "MATSUSHIMA BAY",
    "LAKE BIWA FROM OTSU",
    "KUMAMOTO CASTLE TOWER",
    "DOGO HOT SPRING",
    "SAKURAJIMA VOLCANO",
    "AMANOHASHIDATE",
    "IZUMO GRAND SHRINE",
    "KENROKU-EN GARDEN IN WINTER",
    "TOYAMA BAY FISHING BOATS",
    "ZENKO-JI TEMPLE",
    "亀戸天満宮",
    "富士山と河口湖",
    "嚴島神社 大鳥居",
};

const std::vector<std::string> kHeadlines = {
    "PHOTOGRAPHIC ALBUM OF JAPAN", "FAMOUS PLACES", "SCENERY OF THE PROVINCES",
    "CHAPTER III", "TEMPLES AND SHRINES",
};

const std::vector<std::string> kNotes = {
    "Photograph by the author", "Reproduced with permission", "See plate opposite",
    "Taken in spring",
};

const std::vector<std::string> kBodyText = {
    "The town lies at the foot of the hills and is reached by rail in about two hours.",
    "Pilgrims visit the shrine throughout the year, most of all during the spring festival.",
    "The castle was rebuilt after the fire and now houses a small collection of armour.",
    "Fishing boats return to the harbour at dusk, and the market opens before dawn.",
};

const std::vector<std::string> kInFigureText = {"FIG. 3", "No. 12", "PLATE 7", "A", "B-2"};

const std::vector<std::string> kPrefectures = {
    "Tokyo", "Osaka", "Kyoto", "Hokkaido", "Kanagawa", "Shizuoka",
    "Hiroshima", "Nagasaki", "Okinawa", "Toyama", "Saga", "Tochigi",
};

constexpr LayoutClass kNonCaption[] = {
    LayoutClass::Headline, LayoutClass::BodyText, LayoutClass::PageNumber,
    LayoutClass::InFigureText, LayoutClass::Note, LayoutClass::Header, LayoutClass::Background,
};

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[static_cast<std::size_t>(rng.uniform_int(0, static_cast<long>(v.size()) - 1))];
}

template <typename T>
void shuffle(Rng& rng, std::vector<T>& v) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<long>(i) - 1));
    std::swap(v[i - 1], v[j]);
  }
}

long fragment_width(const std::string& text) {
  return static_cast<long>(utf8_length(text)) * kCharWidth + 2 * kFragmentPad;
}

long row_width(const std::vector<std::string>& texts, std::size_t first, std::size_t last) {
  long w = 0;
  for (std::size_t i = first; i < last; ++i) w += fragment_width(texts[i]);
  return w + kWordSpace * static_cast<long>(last - first - (last > first ? 1 : 0));
}

std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

std::string join(const std::vector<std::string>& words, std::size_t first, std::size_t last) {
  std::string out;
  for (std::size_t i = first; i < last; ++i) {
    if (i > first) out += ' ';
    out += words[i];
  }
  return out;
}

std::string table_cell_text(Rng& rng) {
  const long year = rng.uniform_int(1890, 1940);
  const long value = rng.uniform_int(1000, 99999);
  std::ostringstream os;
  os << year << "  " << value / 1000 << ',' << std::setw(3) << std::setfill('0') << value % 1000;
  return os.str();
}

std::string page_id_for(long index) {
  std::ostringstream os;
  os << "page-" << std::setw(6) << std::setfill('0') << index;
  return os.str();
}

struct PlannedCaption {
  std::string phrase;
  std::vector<std::string> texts;  // in reading order
  std::size_t first_row_count = 0;
};

PlannedCaption plan_caption(Rng& rng, const GenConfig& cfg, long max_width) {
  PlannedCaption cap;
  cap.phrase = pick(rng, kPhrases);
  const std::vector<std::string> words = split_words(cap.phrase);
  const long wanted = rng.uniform_int(cfg.fragments_per_caption.min, cfg.fragments_per_caption.max);
  const std::size_t k = std::clamp<std::size_t>(static_cast<std::size_t>(wanted), 1, words.size());

  std::vector<std::size_t> cuts(words.size() - 1);
  std::iota(cuts.begin(), cuts.end(), std::size_t{1});
  shuffle(rng, cuts);
  cuts.resize(k - 1);
  std::sort(cuts.begin(), cuts.end());
  std::size_t start = 0;
  for (std::size_t c : cuts) {
    cap.texts.push_back(join(words, start, c));
    start = c;
  }
  cap.texts.push_back(join(words, start, words.size()));

  cap.first_row_count = k;
  if (k > 1) {
    const auto b = static_cast<std::size_t>(rng.uniform_int(0, static_cast<long>(k) - 1));
    if (b > 0) cap.first_row_count = b;
  }
  if (row_width(cap.texts, 0, cap.first_row_count) > max_width && k > 1) {
    cap.first_row_count = std::max<std::size_t>(1, k / 2);
  }
  if (row_width(cap.texts, 0, cap.first_row_count) > max_width ||
      row_width(cap.texts, cap.first_row_count, k) > max_width) {
    throw ConfigError("page too narrow for caption '" + cap.phrase + "'");
  }
  return cap;
}

struct PlacedIllustration {
  IllustrationRegion region;
  bool table_like = false;
  std::string caption;
  std::vector<std::size_t> fragments;  // indices into the page's text regions, reading order
};

struct Slot {
  BBox box;
  bool body;
};

}  // namespace

void GenConfig::validate() const {
  auto range_ok = [](const IntRange& r) { return r.min >= 0 && r.min <= r.max; };
  if (n_pages < 0) throw ConfigError("n_pages must be non-negative");
  if (page_width <= 0 || page_height <= 0) throw ConfigError("page_size must be positive");
  if (!range_ok(illustrations_per_page) || !range_ok(fragments_per_caption) ||
      !range_ok(distractor_regions_per_page)) {
    throw ConfigError("integer ranges must satisfy 0 <= min <= max");
  }
  if (fragments_per_caption.min < 1) throw ConfigError("fragments_per_caption.min must be >= 1");
  if (caption_gap_px <= 0) throw ConfigError("caption_gap_px must be positive");
  if (!(separation_margin > 1.0)) throw ConfigError("separation_margin must be > 1");
  if (!(table_like_prob >= 0.0 && table_like_prob <= 1.0)) {
    throw ConfigError("table_like_prob must lie in [0, 1]");
  }
}

const std::vector<std::string>& caption_phrase_bank() { return kPhrases; }

std::vector<BookMetadata> default_meta_pool(std::size_t n_books) {
  std::vector<BookMetadata> pool;
  for (std::size_t i = 0; i < n_books; ++i) {
    std::ostringstream id;
    id << "book-" << std::setw(3) << std::setfill('0') << i;
    const std::string& pref = kPrefectures[i % kPrefectures.size()];
    pool.push_back(BookMetadata{
        .book_id = id.str(),
        .title = "Photographs of " + pref,
        .labels = {{"category", "photo_book"},
                   {"prefecture", pref},
                   {"year", std::to_string(1890 + (i * 7) % 56)}},
    });
  }
  return pool;
}

PageExtractions GroundTruth::extractions() const {
  PageExtractions out;
  out.reserve(pages.size());
  for (const PlantedPage& p : pages) out.emplace_back(p.page_id, p.expected);
  return out;
}

GeneratedCorpus generate(const GenConfig& cfg, const std::vector<BookMetadata>& meta_pool) {
  cfg.validate();
  GeneratedCorpus corpus;
  if (cfg.n_pages == 0) return corpus;
  if (meta_pool.empty()) throw std::invalid_argument("generate: empty metadata pool");

  const long own_max = cfg.caption_gap_px + kLineHeight + kLineGap;
  const long spacing =
      static_cast<long>(std::ceil(cfg.separation_margin * static_cast<double>(own_max))) +
      kSpacingSlack;
  const long caption_reserve = cfg.caption_gap_px + 2 * kLineHeight + kLineGap;
  const long content_w = cfg.page_width - 2 * kMarginX;
  const long col_w = (content_w - spacing) / 2;
  const long content_h = cfg.page_height - kTopBand - kBottomBand;
  if (col_w < kMinTableWidth || content_h <= 0) {
    throw ConfigError("page size too small for the generator layout");
  }

  for (long page_index = 0; page_index < cfg.n_pages; ++page_index) {
    Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(page_index)));
    const BookMetadata& book = pick(rng, meta_pool);

    PageAnnotation page;
    page.page_id = page_id_for(page_index);
    page.book_id = book.book_id;
    page.width_px = static_cast<double>(cfg.page_width);
    page.height_px = static_cast<double>(cfg.page_height);
    page.image_path = "images/" + page.page_id + ".png";

    const long n_ill =
        rng.uniform_int(cfg.illustrations_per_page.min, cfg.illustrations_per_page.max);
    const bool with_table = rng.bernoulli(cfg.table_like_prob);
    const long n_items = n_ill + (with_table ? 1 : 0);
    const long table_pos = with_table ? rng.uniform_int(0, n_items - 1) : -1;
    const long n_rows = n_items == 0 ? 0 : rng.uniform_int((n_items + 1) / 2, n_items);

    std::vector<long> per_row(static_cast<std::size_t>(n_rows), 1);
    {
      std::vector<std::size_t> rows(per_row.size());
      std::iota(rows.begin(), rows.end(), std::size_t{0});
      shuffle(rng, rows);
      for (long e = 0; e < n_items - n_rows; ++e) per_row[rows[static_cast<std::size_t>(e)]] = 2;
    }

    const long row_h = n_rows > 0 ? content_h / n_rows : content_h;
    const long max_h = row_h - caption_reserve - spacing;
    if (n_rows > 0 && (max_h < kMinIllustrationHeight || (with_table && max_h < kMinTableHeight))) {
      throw ConfigError("page too short for " + std::to_string(n_items) + " illustrations");
    }

    std::vector<PlacedIllustration> placed;
    std::vector<Slot> slots;
    for (long s = 0; s < 3; ++s) {
      slots.push_back({BBox(double(kMarginX + s * (content_w / 3)), 30, double(content_w / 3 - 20), 30), false});
      slots.push_back({BBox(double(kMarginX + s * (content_w / 3)),
                            double(cfg.page_height - 70), double(content_w / 3 - 20), 28),
                       false});
    }

    long item = 0;
    for (long r = 0; r < n_rows; ++r) {
      const long row_top = kTopBand + r * row_h;
      struct Area {
        long x;
        long w;
      };
      std::vector<Area> areas;
      if (per_row[static_cast<std::size_t>(r)] == 2) {
        areas = {{kMarginX, col_w}, {kMarginX + col_w + spacing, col_w}};
      } else {
        switch (rng.uniform_int(0, 2)) {
          case 0:
            areas = {{kMarginX, content_w}};
            break;
          case 1:
            areas = {{kMarginX, col_w}};
            slots.push_back({BBox(double(kMarginX + col_w + spacing + 10), double(row_top),
                                  double(col_w - 20), double(std::min(max_h, 150L))),
                             true});
            break;
          default:
            areas = {{kMarginX + col_w + spacing, col_w}};
            slots.push_back({BBox(double(kMarginX + 10), double(row_top), double(col_w - 20),
                                  double(std::min(max_h, 150L))),
                             true});
            break;
        }
      }

      for (const Area& area : areas) {
        const bool is_table = item == table_pos;
        ++item;
        PlacedIllustration ill{IllustrationRegion{BBox(1, 1, 1, 1), 1.0}, is_table, {}, {}};
        const double conf = static_cast<double>(rng.uniform_int(80, 99)) / 100.0;
        if (is_table) {
          const long w = rng.uniform_int(std::max(kMinTableWidth, area.w * 55 / 100), area.w);
          const long h = rng.uniform_int(std::max(kMinTableHeight, max_h * 6 / 10), max_h);
          const long x = area.x + rng.uniform_int(0, area.w - w);
          ill.region = {BBox(double(x), double(row_top), double(w), double(h)), conf};
          // 3 x 2 grid of numeric cells, at least 66 characters in total.
          const long cell_w = (w - 30) / 2;
          const long pitch = (h - 20) / 3;
          for (long cr = 0; cr < 3; ++cr) {
            for (long cc = 0; cc < 2; ++cc) {
              page.text_regions.push_back(TextRegion{
                  .bbox = BBox(double(x + 10 + cc * (cell_w + 10)), double(row_top + 10 + cr * pitch),
                               double(cell_w), 22),
                  .text = table_cell_text(rng),
                  .layout_class = rng.bernoulli(0.5) ? LayoutClass::InFigureText
                                                     : LayoutClass::BodyText,
                  .confidence = static_cast<double>(rng.uniform_int(70, 99)) / 100.0,
              });
            }
          }
        } else {
          PlannedCaption cap = plan_caption(rng, cfg, area.w);
          const long need = std::max(row_width(cap.texts, 0, cap.first_row_count),
                                     row_width(cap.texts, cap.first_row_count, cap.texts.size()));
          const long w = rng.uniform_int(std::min(area.w, std::max(need, area.w * 55 / 100)), area.w);
          const long h = rng.uniform_int(std::max(kMinIllustrationHeight, max_h * 6 / 10), max_h);
          const long x = area.x + rng.uniform_int(0, area.w - w);
          ill.region = {BBox(double(x), double(row_top), double(w), double(h)), conf};
          ill.caption = cap.phrase;

          for (int line = 0; line < 2; ++line) {
            const std::size_t first = line == 0 ? 0 : cap.first_row_count;
            const std::size_t last = line == 0 ? cap.first_row_count : cap.texts.size();
            if (first == last) continue;
            const long top = row_top + h + cfg.caption_gap_px + line * (kLineHeight + kLineGap);
            long fx = x + rng.uniform_int(0, w - row_width(cap.texts, first, last));
            for (std::size_t f = first; f < last; ++f) {
              const long fw = fragment_width(cap.texts[f]);
              ill.fragments.push_back(page.text_regions.size());
              page.text_regions.push_back(TextRegion{
                  .bbox = BBox(double(fx), double(top), double(fw), double(kLineHeight)),
                  .text = cap.texts[f],
                  .layout_class = LayoutClass::Caption,
                  .confidence = static_cast<double>(rng.uniform_int(70, 99)) / 100.0,
              });
              fx += fw + kWordSpace;
            }
          }

          if (rng.bernoulli(0.3)) {
            const std::string& label = pick(rng, kInFigureText);
            const long tw = static_cast<long>(utf8_length(label)) * 10 + 8;
            page.text_regions.push_back(TextRegion{
                .bbox = BBox(double(x + (w - tw) / 2), double(row_top + (h - 20) / 2), double(tw), 20),
                .text = label,
                .layout_class = LayoutClass::InFigureText,
                .confidence = 0.9,
            });
          }
        }
        placed.push_back(std::move(ill));
      }
    }

    // Distractors go into free slots only, so their centers never fall
    // inside an illustration.
    {
      const long n_distractors = rng.uniform_int(cfg.distractor_regions_per_page.min,
                                                 cfg.distractor_regions_per_page.max);
      shuffle(rng, slots);
      const auto used = std::min<std::size_t>(slots.size(), static_cast<std::size_t>(n_distractors));
      for (std::size_t s = 0; s < used; ++s) {
        TextRegion region{slots[s].box, {}, LayoutClass::BodyText, 0.95};
        if (slots[s].body) {
          region.text = pick(rng, kBodyText);
        } else {
          switch (rng.uniform_int(0, 3)) {
            case 0:
              region.layout_class = LayoutClass::Header;
              region.text = book.title.value_or("PHOTO ALBUM");
              break;
            case 1:
              region.layout_class = LayoutClass::Headline;
              region.text = pick(rng, kHeadlines);
              break;
            case 2:
              region.layout_class = LayoutClass::Note;
              region.text = pick(rng, kNotes);
              break;
            default:
              region.layout_class = LayoutClass::PageNumber;
              region.text = std::to_string(page_index + 1);
              break;
          }
        }
        page.text_regions.push_back(std::move(region));
      }
    }

    // The planted geometry must make nearest-neighbor assignment exact.
    for (std::size_t i = 0; i < placed.size(); ++i) {
      for (std::size_t f : placed[i].fragments) {
        const BBox& fb = page.text_regions[f].bbox;
        const double own = rect_distance(fb, placed[i].region.bbox);
        for (std::size_t j = 0; j < placed.size(); ++j) {
          if (j == i) continue;
          if (!(rect_distance(fb, placed[j].region.bbox) > cfg.separation_margin * own)) {
            throw ConfigError(page.page_id + ": cannot keep captions separated at margin " +
                              std::to_string(cfg.separation_margin));
          }
        }
      }
    }

    std::stable_sort(placed.begin(), placed.end(),
                     [](const PlacedIllustration& a, const PlacedIllustration& b) {
                       return canonical_less(a.region, b.region);
                     });

    // Shuffle text regions; the pipeline must not depend on their order.
    std::vector<std::size_t> perm(page.text_regions.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    shuffle(rng, perm);
    std::vector<std::size_t> new_index(perm.size());
    std::vector<TextRegion> shuffled;
    shuffled.reserve(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
      new_index[perm[i]] = i;
      shuffled.push_back(page.text_regions[perm[i]]);
    }
    page.text_regions = std::move(shuffled);

    PlantedPage planted;
    planted.page_id = page.page_id;
    planted.book_id = page.book_id;
    long ordinal = 0;
    for (std::size_t i = 0; i < placed.size(); ++i) {
      PlacedIllustration& ill = placed[i];
      page.illustration_regions.push_back(ill.region);
      if (ill.table_like) {
        planted.table_like.push_back(i);
        planted.expected.excluded_illustrations.push_back(
            {ill.region, IllustrationExclusion::TextDense});
        continue;
      }
      ImageTextPair pair{
          .pair_id = page.page_id + "#" + std::to_string(ordinal++),
          .page_id = page.page_id,
          .book_id = page.book_id,
          .illustration_bbox = ill.region.bbox,
          .caption_text = ill.caption,
          .fragment_bboxes = {},
          .labels = book.labels,
      };
      for (std::size_t f : ill.fragments) {
        const std::size_t idx = new_index[f];
        planted.fragment_owner[idx] = i;
        pair.fragment_bboxes.push_back(page.text_regions[idx].bbox);
      }
      corpus.truth.pairs.push_back(pair);
      planted.expected.pairs.push_back(std::move(pair));
    }

    validate_page_geometry(page);
    corpus.pages.push_back(std::move(page));
    corpus.truth.pages.push_back(std::move(planted));
  }
  return corpus;
}

std::vector<PageAnnotation> perturb(const std::vector<PageAnnotation>& pages, std::uint64_t seed,
                                    long jitter_px, double class_flip_prob) {
  if (jitter_px < 0) throw std::invalid_argument("perturb: negative jitter");
  if (!(class_flip_prob >= 0.0 && class_flip_prob <= 1.0)) {
    throw std::invalid_argument("perturb: class_flip_prob outside [0, 1]");
  }
  std::vector<PageAnnotation> out;
  out.reserve(pages.size());
  for (std::size_t p = 0; p < pages.size(); ++p) {
    Rng rng(mix_seed(seed, p));
    PageAnnotation page = pages[p];
    auto jitter = [&](const BBox& b) {
      if (jitter_px == 0) return b;
      const double dx = static_cast<double>(rng.uniform_int(-jitter_px, jitter_px));
      const double dy = static_cast<double>(rng.uniform_int(-jitter_px, jitter_px));
      const double x = std::clamp(b.x() + dx, 0.0, std::max(0.0, page.width_px - b.w()));
      const double y = std::clamp(b.y() + dy, 0.0, std::max(0.0, page.height_px - b.h()));
      return BBox(x, y, b.w(), b.h());
    };
    for (IllustrationRegion& r : page.illustration_regions) r.bbox = jitter(r.bbox);
    for (TextRegion& r : page.text_regions) {
      r.bbox = jitter(r.bbox);
      if (r.layout_class == LayoutClass::Caption && class_flip_prob > 0.0 &&
          rng.bernoulli(class_flip_prob)) {
        r.layout_class = kNonCaption[rng.uniform_int(0, std::size(kNonCaption) - 1)];
      }
    }
    out.push_back(std::move(page));
  }
  return out;
}

}  // namespace bookpair
