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

#include "bookpair/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "bookpair/errors.hpp"
#include "bookpair/json_codec.hpp"

namespace bookpair {

namespace fs = std::filesystem;
using json_codec::Json;

namespace {

double confidence_field(const Json& obj, std::string_view where) {
  const double c = json_codec::number_field(obj, "confidence", where);
  if (!(c >= 0.0 && c <= 1.0)) {
    throw SchemaError(std::string(where) + ": confidence must lie in [0, 1]");
  }
  return c;
}

const Json& array_field(const Json& obj, std::string_view key, std::string_view where) {
  const Json& v = json_codec::required(obj, key, where);
  if (!v.is_array()) {
    throw SchemaError(std::string(where) + ": field '" + std::string(key) +
                      "' must be an array");
  }
  return v;
}

}  // namespace

PageAnnotation load_page(std::string_view bytes, std::vector<std::string>& diagnostics) {
  const Json doc = json_codec::parse(bytes, "page");
  PageAnnotation page;
  page.page_id = json_codec::string_field(doc, "page_id", "page");
  const std::string where = "page '" + page.page_id + "'";
  page.book_id = json_codec::string_field(doc, "book_id", where);
  if (page.page_id.empty()) throw SchemaError("page: page_id must be non-empty");
  if (page.book_id.empty()) throw SchemaError(where + ": book_id must be non-empty");
  page.width_px = json_codec::number_field(doc, "width_px", where);
  page.height_px = json_codec::number_field(doc, "height_px", where);
  if (auto it = doc.find("image_path"); it != doc.end() && !it->is_null()) {
    if (!it->is_string()) throw SchemaError(where + ": image_path must be a string");
    page.image_path = it->get<std::string>();
  }

  const Json& texts = array_field(doc, "text_regions", where);
  page.text_regions.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const std::string rwhere = where + " text_regions[" + std::to_string(i) + "]";
    const Json& r = texts[i];
    const std::string cls = json_codec::string_field(r, "layout_class", rwhere);
    TextRegion region{
        .bbox = json_codec::bbox_from_json(json_codec::required(r, "bbox", rwhere), rwhere),
        .text = json_codec::string_field(r, "text", rwhere),
        .layout_class = LayoutClass::Background,
        .confidence = confidence_field(r, rwhere),
    };
    if (auto parsed = layout_class_from_string(cls)) {
      region.layout_class = *parsed;
    } else {
      diagnostics.push_back(rwhere + ": unknown layout_class '" + cls + "' mapped to background");
    }
    if (region.text.empty() && region.layout_class != LayoutClass::Background) {
      diagnostics.push_back(rwhere + ": empty text on " +
                            std::string(to_string(region.layout_class)) +
                            " region mapped to background");
      region.layout_class = LayoutClass::Background;
    }
    page.text_regions.push_back(std::move(region));
  }

  const Json& ills = array_field(doc, "illustration_regions", where);
  page.illustration_regions.reserve(ills.size());
  for (std::size_t i = 0; i < ills.size(); ++i) {
    const std::string rwhere = where + " illustration_regions[" + std::to_string(i) + "]";
    const Json& r = ills[i];
    page.illustration_regions.push_back(IllustrationRegion{
        .bbox = json_codec::bbox_from_json(json_codec::required(r, "bbox", rwhere), rwhere),
        .confidence = confidence_field(r, rwhere),
    });
  }

  validate_page_geometry(page);
  return page;
}

PageAnnotation load_page(std::string_view bytes) {
  std::vector<std::string> ignored;
  return load_page(bytes, ignored);
}

std::string serialize_page(const PageAnnotation& page) {
  Json doc = Json::object();
  doc["page_id"] = page.page_id;
  doc["book_id"] = page.book_id;
  doc["width_px"] = json_codec::number(page.width_px);
  doc["height_px"] = json_codec::number(page.height_px);
  if (page.image_path) doc["image_path"] = *page.image_path;
  Json texts = Json::array();
  for (const TextRegion& r : page.text_regions) {
    Json t = Json::object();
    t["bbox"] = json_codec::to_json(r.bbox);
    t["text"] = r.text;
    t["layout_class"] = std::string(to_string(r.layout_class));
    t["confidence"] = json_codec::number(r.confidence);
    texts.push_back(std::move(t));
  }
  doc["text_regions"] = std::move(texts);
  Json ills = Json::array();
  for (const IllustrationRegion& r : page.illustration_regions) {
    Json t = Json::object();
    t["bbox"] = json_codec::to_json(r.bbox);
    t["confidence"] = json_codec::number(r.confidence);
    ills.push_back(std::move(t));
  }
  doc["illustration_regions"] = std::move(ills);
  return doc.dump() + "\n";
}

std::vector<BookMetadata> load_metadata(std::string_view bytes, Strictness strictness,
                                        std::vector<std::string>* diagnostics) {
  const Json doc = json_codec::parse(bytes, "metadata");
  const Json& books = array_field(doc, "books", "metadata");
  std::vector<BookMetadata> out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < books.size(); ++i) {
    const std::string where = "metadata books[" + std::to_string(i) + "]";
    const Json& b = books[i];
    BookMetadata meta;
    meta.book_id = json_codec::string_field(b, "book_id", where);
    if (meta.book_id.empty()) throw SchemaError(where + ": book_id must be non-empty");
    if (auto it = b.find("title"); it != b.end() && !it->is_null()) {
      if (!it->is_string()) throw SchemaError(where + ": title must be a string");
      meta.title = it->get<std::string>();
    }
    if (auto it = b.find("labels"); it != b.end()) {
      meta.labels = json_codec::labels_from_json(*it, where);
    }
    if (!seen.insert(meta.book_id).second) {
      if (strictness == Strictness::Strict) {
        throw DuplicateBookError("duplicate book_id '" + meta.book_id + "' in metadata");
      }
      if (diagnostics) diagnostics->push_back(where + ": duplicate book_id '" + meta.book_id + "' ignored");
      continue;
    }
    out.push_back(std::move(meta));
  }
  return out;
}

std::string serialize_metadata(const std::vector<BookMetadata>& books) {
  Json arr = Json::array();
  for (const BookMetadata& b : books) {
    Json j = Json::object();
    j["book_id"] = b.book_id;
    if (b.title) j["title"] = *b.title;
    j["labels"] = json_codec::to_json(b.labels);
    arr.push_back(std::move(j));
  }
  Json doc = Json::object();
  doc["books"] = std::move(arr);
  return doc.dump(2) + "\n";
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error while reading '" + path.string() + "'");
  return ss.str();
}

void write_file(const fs::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("error while writing '" + path.string() + "'");
}

Corpus load_corpus(const CorpusSource& src) {
  std::error_code ec;
  if (!fs::is_directory(src.pages_dir, ec)) {
    throw IoError("pages directory '" + src.pages_dir.string() + "' does not exist");
  }
  const bool strict = src.strictness == Strictness::Strict;

  Corpus corpus;
  std::vector<std::string> meta_diags;
  for (BookMetadata& m :
       load_metadata(read_file(src.metadata_path), src.strictness, &meta_diags)) {
    std::string id = m.book_id;
    corpus.metadata.emplace(std::move(id), std::move(m));
  }
  for (std::string& d : meta_diags) {
    corpus.report.diagnostics.push_back({src.metadata_path.filename().string(), std::move(d)});
  }

  // Filesystem enumeration order is unspecified; sort names first so the
  // "first file wins" rule for duplicate page_ids is stable.
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(src.pages_dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  if (ec) throw IoError("cannot list '" + src.pages_dir.string() + "': " + ec.message());
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });

  std::set<std::string> page_ids;
  for (const fs::path& file : files) {
    const std::string name = file.filename().string();
    auto skip = [&](std::string reason) {
      if (strict) throw ValidationError(name + ": " + reason);
      ++corpus.report.pages_skipped;
      corpus.report.diagnostics.push_back({name, std::move(reason)});
    };
    std::vector<std::string> diags;
    PageAnnotation page;
    try {
      page = load_page(read_file(file), diags);
    } catch (const SchemaError& e) {
      skip(e.what());
      continue;
    } catch (const GeometryError& e) {
      skip(e.what());
      continue;
    } catch (const IoError& e) {
      skip(e.what());
      continue;
    }
    if (!page_ids.insert(page.page_id).second) {
      skip("duplicate page_id '" + page.page_id + "'");
      continue;
    }
    if (!corpus.metadata.contains(page.book_id)) {
      if (strict) {
        throw MissingMetadataError(name + ": no metadata for book '" + page.book_id + "'");
      }
      diags.push_back("no metadata for book '" + page.book_id + "'");
    }
    for (std::string& d : diags) corpus.report.diagnostics.push_back({name, std::move(d)});
    ++corpus.report.pages_loaded;
    corpus.pages.push_back(std::move(page));
  }

  std::sort(corpus.pages.begin(), corpus.pages.end(),
            [](const PageAnnotation& a, const PageAnnotation& b) { return a.page_id < b.page_id; });
  return corpus;
}

}  // namespace bookpair
