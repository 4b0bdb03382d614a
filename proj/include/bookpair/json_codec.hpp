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

// JSON encoding of the core types shared by the ingest, emit and synthgen
// document formats. Every writer uses insertion-ordered objects so output
// bytes follow the documented field order.

#include <string>
#include <string_view>

#include <json.hpp>

#include "bookpair/types.hpp"

namespace bookpair::json_codec {

using Json = nlohmann::ordered_json;

// Integral values are written as JSON integers, everything else as the
// shortest round-tripping double.
Json number(double v);

Json to_json(const BBox& b);
Json to_json(const PipelineConfig& cfg);
Json to_json(const ImageTextPair& pair);
Json to_json(const Labels& labels);

// Readers throw SchemaError on missing fields or wrong types; `where`
// prefixes the message. Box construction errors surface as GeometryError.
double number_field(const Json& obj, std::string_view key, std::string_view where);
std::string string_field(const Json& obj, std::string_view key, std::string_view where);
const Json& required(const Json& obj, std::string_view key, std::string_view where);
BBox bbox_from_json(const Json& j, std::string_view where);
Labels labels_from_json(const Json& j, std::string_view where);
ImageTextPair pair_from_json(const Json& j, std::string_view where);

// Fields absent from `j` keep the values already in `cfg`.
void merge_config(const Json& j, PipelineConfig& cfg);

// Parses one JSON document; syntax errors become SchemaError.
Json parse(std::string_view bytes, std::string_view where);

}  // namespace bookpair::json_codec
