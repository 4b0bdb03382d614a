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

#include "bookpair/json_codec.hpp"

#include <cmath>
#include <cstdint>

#include "bookpair/errors.hpp"

namespace bookpair::json_codec {

namespace {

std::string prefix(std::string_view where) {
  return where.empty() ? std::string() : std::string(where) + ": ";
}

}  // namespace

Json number(double v) {
  if (std::isfinite(v) && std::trunc(v) == v && std::fabs(v) < 9.0e15) {
    return static_cast<std::int64_t>(v);
  }
  return v;
}

Json to_json(const BBox& b) {
  return Json::array({number(b.x()), number(b.y()), number(b.w()), number(b.h())});
}

Json to_json(const Labels& labels) {
  Json j = Json::object();
  for (const auto& [k, v] : labels) j[k] = v;
  return j;
}

Json to_json(const PipelineConfig& cfg) {
  Json j = Json::object();
  j["text_density_max_chars"] = cfg.text_density_max_chars;
  j["min_caption_chars"] = cfg.min_caption_chars;
  j["join_delimiter"] = cfg.join_delimiter;
  j["row_overlap_fraction"] = number(cfg.row_overlap_fraction);
  j["distance_metric"] = std::string(to_string(cfg.distance_metric));
  j["reading_order"] = std::string(to_string(cfg.reading_order));
  return j;
}

Json to_json(const ImageTextPair& pair) {
  Json j = Json::object();
  j["pair_id"] = pair.pair_id;
  j["page_id"] = pair.page_id;
  j["book_id"] = pair.book_id;
  j["illustration_bbox"] = to_json(pair.illustration_bbox);
  j["caption_text"] = pair.caption_text;
  Json frags = Json::array();
  for (const BBox& b : pair.fragment_bboxes) frags.push_back(to_json(b));
  j["fragment_bboxes"] = std::move(frags);
  j["labels"] = to_json(pair.labels);
  return j;
}

const Json& required(const Json& obj, std::string_view key, std::string_view where) {
  if (!obj.is_object()) throw SchemaError(prefix(where) + "expected a JSON object");
  auto it = obj.find(std::string(key));
  if (it == obj.end()) {
    throw SchemaError(prefix(where) + "missing required field '" + std::string(key) + "'");
  }
  return *it;
}

double number_field(const Json& obj, std::string_view key, std::string_view where) {
  const Json& v = required(obj, key, where);
  if (!v.is_number()) {
    throw SchemaError(prefix(where) + "field '" + std::string(key) + "' must be a number");
  }
  return v.get<double>();
}

std::string string_field(const Json& obj, std::string_view key, std::string_view where) {
  const Json& v = required(obj, key, where);
  if (!v.is_string()) {
    throw SchemaError(prefix(where) + "field '" + std::string(key) + "' must be a string");
  }
  return v.get<std::string>();
}

BBox bbox_from_json(const Json& j, std::string_view where) {
  if (!j.is_array() || j.size() != 4) {
    throw SchemaError(prefix(where) + "bbox must be an array [x, y, w, h]");
  }
  for (const Json& v : j) {
    if (!v.is_number()) throw SchemaError(prefix(where) + "bbox entries must be numbers");
  }
  return BBox(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>());
}

Labels labels_from_json(const Json& j, std::string_view where) {
  if (!j.is_object()) throw SchemaError(prefix(where) + "labels must be an object");
  Labels out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_string()) {
      throw SchemaError(prefix(where) + "label '" + it.key() + "' must be a string");
    }
    if (!out.emplace(it.key(), it.value().get<std::string>()).second) {
      throw SchemaError(prefix(where) + "duplicate label key '" + it.key() + "'");
    }
  }
  return out;
}

ImageTextPair pair_from_json(const Json& j, std::string_view where) {
  const Json& frags = required(j, "fragment_bboxes", where);
  if (!frags.is_array()) throw SchemaError(prefix(where) + "fragment_bboxes must be an array");
  std::vector<BBox> boxes;
  boxes.reserve(frags.size());
  for (const Json& f : frags) boxes.push_back(bbox_from_json(f, where));
  return ImageTextPair{
      .pair_id = string_field(j, "pair_id", where),
      .page_id = string_field(j, "page_id", where),
      .book_id = string_field(j, "book_id", where),
      .illustration_bbox = bbox_from_json(required(j, "illustration_bbox", where), where),
      .caption_text = string_field(j, "caption_text", where),
      .fragment_bboxes = std::move(boxes),
      .labels = labels_from_json(required(j, "labels", where), where),
  };
}

void merge_config(const Json& j, PipelineConfig& cfg) {
  if (!j.is_object()) throw ConfigError("pipeline config must be a JSON object");
  auto integer = [&](const char* key, long& dst) {
    if (auto it = j.find(key); it != j.end()) {
      if (!it->is_number_integer()) throw ConfigError(std::string(key) + " must be an integer");
      dst = it->get<long>();
    }
  };
  integer("text_density_max_chars", cfg.text_density_max_chars);
  integer("min_caption_chars", cfg.min_caption_chars);
  if (auto it = j.find("join_delimiter"); it != j.end()) {
    if (!it->is_string()) throw ConfigError("join_delimiter must be a string");
    cfg.join_delimiter = it->get<std::string>();
  }
  if (auto it = j.find("row_overlap_fraction"); it != j.end()) {
    if (!it->is_number()) throw ConfigError("row_overlap_fraction must be a number");
    cfg.row_overlap_fraction = it->get<double>();
  }
  if (auto it = j.find("distance_metric"); it != j.end()) {
    if (!it->is_string()) throw ConfigError("distance_metric must be a string");
    cfg.distance_metric = distance_metric_from_string(it->get<std::string>());
  }
  if (auto it = j.find("reading_order"); it != j.end()) {
    if (!it->is_string()) throw ConfigError("reading_order must be a string");
    cfg.reading_order = reading_order_from_string(it->get<std::string>());
  }
  cfg.validate();
}

Json parse(std::string_view bytes, std::string_view where) {
  try {
    return Json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(prefix(where) + "malformed JSON (" + e.what() + ")");
  }
}

}  // namespace bookpair::json_codec
