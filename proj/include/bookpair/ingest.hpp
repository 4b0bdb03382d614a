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

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "bookpair/types.hpp"

namespace bookpair {

enum class Strictness { Strict, Lenient };

struct Diagnostic {
  std::string file;
  std::string reason;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

struct CorpusSource {
  std::filesystem::path pages_dir;
  std::filesystem::path metadata_path;
  Strictness strictness = Strictness::Strict;
};

struct IngestReport {
  std::size_t pages_loaded = 0;
  std::size_t pages_skipped = 0;
  std::vector<Diagnostic> diagnostics;
};

struct Corpus {
  // Sorted ascending by page_id.
  std::vector<PageAnnotation> pages;
  std::map<std::string, BookMetadata> metadata;
  IngestReport report;
};

// Parses one page-annotation document. Unknown layout classes, and
// non-background regions with empty text, are downgraded to Background and
// reported through `diagnostics`.
//
// Throws SchemaError for missing or mistyped fields and GeometryError for
// boxes that are degenerate or leave the page.
PageAnnotation load_page(std::string_view bytes, std::vector<std::string>& diagnostics);
PageAnnotation load_page(std::string_view bytes);

// Compact single-line JSON in the page-annotation schema, newline terminated.
std::string serialize_page(const PageAnnotation& page);

// Strict mode rejects a repeated book_id with DuplicateBookError; lenient
// mode keeps the first record and reports the rest.
std::vector<BookMetadata> load_metadata(std::string_view bytes,
                                        Strictness strictness = Strictness::Strict,
                                        std::vector<std::string>* diagnostics = nullptr);

std::string serialize_metadata(const std::vector<BookMetadata>& books);

// Reads every *.json file in pages_dir plus the metadata document.
//
// Strict mode throws ValidationError on the first malformed page, duplicate
// page_id, or page whose book has no metadata (MissingMetadataError).
// Lenient mode skips malformed pages and records diagnostics instead.
// Throws IoError when pages_dir or the metadata file cannot be read.
Corpus load_corpus(const CorpusSource& src);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace bookpair
