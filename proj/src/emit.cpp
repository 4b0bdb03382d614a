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

#include "bookpair/emit.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>
#include <tuple>

#include "bookpair/errors.hpp"
#include "bookpair/json_codec.hpp"

namespace bookpair {

using json_codec::Json;

namespace {

long pair_ordinal(const std::string& pair_id) {
  const auto hash = pair_id.rfind('#');
  if (hash == std::string::npos) return -1;
  long v = -1;
  const char* first = pair_id.data() + hash + 1;
  const char* last = pair_id.data() + pair_id.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) return -1;
  return v;
}

ManifestStats empty_stats() {
  ManifestStats s;
  for (auto r : {IllustrationExclusion::TextDense, IllustrationExclusion::NoCaption,
                 IllustrationExclusion::CaptionTooShort}) {
    s.excluded_illustrations[std::string(to_string(r))] = 0;
  }
  for (auto r : {FragmentDiscard::NoIllustration, FragmentDiscard::TooShort}) {
    s.discarded_fragments[std::string(to_string(r))] = 0;
  }
  return s;
}

Json stats_to_json(const ManifestStats& s) {
  Json j = Json::object();
  j["n_pages"] = s.n_pages;
  j["n_pairs"] = s.n_pairs;
  Json ex = Json::object();
  for (const auto& [k, v] : s.excluded_illustrations) ex[k] = v;
  j["excluded_illustrations"] = std::move(ex);
  Json dis = Json::object();
  for (const auto& [k, v] : s.discarded_fragments) dis[k] = v;
  j["discarded_fragments"] = std::move(dis);
  Json hist = Json::object();
  for (const auto& [key, values] : s.label_histogram) {
    Json inner = Json::object();
    for (const auto& [value, count] : values) inner[value] = count;
    hist[key] = std::move(inner);
  }
  j["label_histogram"] = std::move(hist);
  return j;
}

std::map<std::string, long> counts_from_json(const Json& j, std::string_view where) {
  if (!j.is_object()) throw SchemaError(std::string(where) + " must be an object");
  std::map<std::string, long> out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_number_integer()) {
      throw SchemaError(std::string(where) + " entries must be integers");
    }
    out[it.key()] = it.value().get<long>();
  }
  return out;
}

long count_field(const Json& j, std::string_view key, std::string_view where) {
  const Json& v = json_codec::required(j, key, where);
  if (!v.is_number_integer()) {
    throw SchemaError(std::string(where) + ": " + std::string(key) + " must be an integer");
  }
  return v.get<long>();
}

ManifestStats stats_from_json(const Json& j) {
  constexpr std::string_view where = "stats";
  ManifestStats s;
  s.n_pages = count_field(j, "n_pages", where);
  s.n_pairs = count_field(j, "n_pairs", where);
  s.excluded_illustrations =
      counts_from_json(json_codec::required(j, "excluded_illustrations", where),
                       "excluded_illustrations");
  s.discarded_fragments = counts_from_json(
      json_codec::required(j, "discarded_fragments", where), "discarded_fragments");
  const Json& hist = json_codec::required(j, "label_histogram", where);
  if (!hist.is_object()) throw SchemaError("label_histogram must be an object");
  for (auto it = hist.begin(); it != hist.end(); ++it) {
    s.label_histogram[it.key()] = counts_from_json(it.value(), "label_histogram");
  }
  return s;
}

}  // namespace

DatasetManifest build_manifest(const PageExtractions& extractions, const PipelineConfig& cfg) {
  DatasetManifest m;
  m.config = cfg;
  m.stats = empty_stats();
  m.stats.n_pages = static_cast<long>(extractions.size());

  std::set<std::string> ids;
  for (const auto& [page_id, ex] : extractions) {
    for (const ImageTextPair& p : ex.pairs) {
      if (!ids.insert(p.pair_id).second) {
        throw DuplicatePairIdError("duplicate pair_id '" + p.pair_id + "'");
      }
      m.pairs.push_back(p);
      for (const auto& [key, value] : p.labels) ++m.stats.label_histogram[key][value];
    }
    for (const ExcludedIllustration& e : ex.excluded_illustrations) {
      ++m.stats.excluded_illustrations[std::string(to_string(e.reason))];
    }
    for (const DiscardedFragment& d : ex.discarded_fragments) {
      ++m.stats.discarded_fragments[std::string(to_string(d.reason))];
    }
  }
  std::stable_sort(m.pairs.begin(), m.pairs.end(),
                   [](const ImageTextPair& a, const ImageTextPair& b) {
                     return std::make_tuple(std::cref(a.page_id), pair_ordinal(a.pair_id)) <
                            std::make_tuple(std::cref(b.page_id), pair_ordinal(b.pair_id));
                   });
  m.stats.n_pairs = static_cast<long>(m.pairs.size());
  return m;
}

std::string write_manifest(const DatasetManifest& manifest) {
  Json header = Json::object();
  header["format"] = std::string(kManifestFormat);
  header["version"] = manifest.version;
  header["config"] = json_codec::to_json(manifest.config);
  header["stats"] = stats_to_json(manifest.stats);
  std::string out = header.dump() + "\n";
  for (const ImageTextPair& p : manifest.pairs) out += json_codec::to_json(p).dump() + "\n";
  return out;
}

DatasetManifest parse_manifest(std::string_view text) {
  DatasetManifest m;
  std::set<std::string> ids;
  std::size_t line_no = 0;
  bool have_header = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const std::string where = "manifest line " + std::to_string(line_no);
    try {
      const Json j = json_codec::parse(line, where);
      if (!have_header) {
        if (json_codec::string_field(j, "format", where) != kManifestFormat) {
          throw SchemaError(where + ": not a bookpair manifest");
        }
        m.version = static_cast<int>(count_field(j, "version", where));
        if (m.version != kManifestVersion) {
          throw SchemaError(where + ": unsupported manifest version");
        }
        m.config = PipelineConfig{};
        json_codec::merge_config(json_codec::required(j, "config", where), m.config);
        m.stats = stats_from_json(json_codec::required(j, "stats", where));
        have_header = true;
        continue;
      }
      ImageTextPair p = json_codec::pair_from_json(j, where);
      if (!ids.insert(p.pair_id).second) {
        throw SchemaError(where + ": duplicate pair_id '" + p.pair_id + "'");
      }
      m.pairs.push_back(std::move(p));
    } catch (const SchemaError&) {
      throw;
    } catch (const Error& e) {
      throw SchemaError(where + ": " + e.what());
    }
  }
  if (!have_header) throw SchemaError("manifest is empty (missing header line)");
  if (m.stats.n_pairs != static_cast<long>(m.pairs.size())) {
    throw SchemaError("manifest header declares " + std::to_string(m.stats.n_pairs) +
                      " pairs but " + std::to_string(m.pairs.size()) + " follow");
  }
  return m;
}

std::vector<CropRecord> crop_list(
    const DatasetManifest& manifest,
    const std::map<std::string, std::optional<std::string>>& image_paths) {
  std::vector<CropRecord> out;
  out.reserve(manifest.pairs.size());
  for (const ImageTextPair& p : manifest.pairs) {
    CropRecord r{p.pair_id, std::nullopt, p.illustration_bbox, std::nullopt};
    if (auto it = image_paths.find(p.page_id);
        it != image_paths.end() && it->second && !it->second->empty()) {
      r.image_path = it->second;
    } else {
      r.flag = std::string(kNoSourceImage);
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string write_crop_list(const std::vector<CropRecord>& records) {
  std::string out;
  for (const CropRecord& r : records) {
    Json j = Json::object();
    j["pair_id"] = r.pair_id;
    if (r.image_path) j["image_path"] = *r.image_path;
    j["bbox"] = json_codec::to_json(r.bbox);
    if (r.flag) j["flag"] = *r.flag;
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<ExclusionRecord> exclusion_records(const PageExtractions& extractions) {
  std::vector<const std::pair<std::string, PageExtraction>*> order;
  for (const auto& e : extractions) order.push_back(&e);
  std::stable_sort(order.begin(), order.end(),
                   [](auto* a, auto* b) { return a->first < b->first; });
  std::vector<ExclusionRecord> out;
  for (const auto* e : order) {
    for (const ExcludedIllustration& x : e->second.excluded_illustrations) {
      out.push_back({e->first, "illustration", x.region.bbox, std::string(to_string(x.reason)),
                     std::nullopt});
    }
    for (const DiscardedFragment& d : e->second.discarded_fragments) {
      out.push_back({e->first, "fragment", d.fragment.bbox, std::string(to_string(d.reason)),
                     d.fragment.text});
    }
  }
  return out;
}

std::string write_exclusions(const std::vector<ExclusionRecord>& records) {
  std::string out;
  for (const ExclusionRecord& r : records) {
    Json j = Json::object();
    j["page_id"] = r.page_id;
    j["kind"] = r.kind;
    j["bbox"] = json_codec::to_json(r.bbox);
    j["reason"] = r.reason;
    if (r.text) j["text"] = *r.text;
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<ExclusionRecord> parse_exclusions(std::string_view text) {
  std::vector<ExclusionRecord> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = "exclusions line " + std::to_string(line_no);
    const Json j = json_codec::parse(line, where);
    ExclusionRecord r{
        json_codec::string_field(j, "page_id", where),
        json_codec::string_field(j, "kind", where),
        json_codec::bbox_from_json(json_codec::required(j, "bbox", where), where),
        json_codec::string_field(j, "reason", where),
        std::nullopt,
    };
    if (j.contains("text")) r.text = json_codec::string_field(j, "text", where);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace bookpair
