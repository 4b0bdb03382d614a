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
#include <filesystem>

#include <doctest.h>

#include "bookpair/errors.hpp"
#include "bookpair/ingest.hpp"
#include "test_support.hpp"

using namespace bookpair;
using bookpair::testing::TempDir;

namespace {

constexpr const char* kMinimalPage = R"({
  "page_id": "p1", "book_id": "b1", "width_px": 1000, "height_px": 1500,
  "text_regions": [
    {"bbox": [100, 420, 200, 30], "text": "KAMEIDO TENMANGU", "layout_class": "caption", "confidence": 0.9}
  ],
  "illustration_regions": [ {"bbox": [100, 100, 400, 300], "confidence": 0.95} ]
})";

std::string page_json(const std::string& page_id, const std::string& book_id) {
  return R"({"page_id": ")" + page_id + R"(", "book_id": ")" + book_id +
         R"(", "width_px": 800, "height_px": 800, "text_regions": [], "illustration_regions": []})";
}

}  // namespace

TEST_CASE("load_page: minimal well-formed document") {
  std::vector<std::string> diags;
  const PageAnnotation page = load_page(kMinimalPage, diags);
  CHECK(page.page_id == "p1");
  CHECK(page.book_id == "b1");
  REQUIRE(page.text_regions.size() == 1);
  REQUIRE(page.illustration_regions.size() == 1);
  CHECK(page.text_regions[0].layout_class == LayoutClass::Caption);
  CHECK(page.text_regions[0].bbox == BBox(100, 420, 200, 30));
  CHECK_FALSE(page.image_path.has_value());
  CHECK(diags.empty());
}

TEST_CASE("load_page: illustration beyond the page width is a GeometryError") {
  std::string doc = kMinimalPage;
  doc.replace(doc.find("[100, 100, 400, 300]"), 20, "[700, 100, 400, 300]");
  CHECK_THROWS_AS(load_page(doc), GeometryError);
}

TEST_CASE("load_page: non-positive extent is a GeometryError") {
  std::string doc = kMinimalPage;
  doc.replace(doc.find("[100, 100, 400, 300]"), 20, "[100, 100, 0, 300]");
  CHECK_THROWS_AS(load_page(doc), GeometryError);
}

TEST_CASE("load_page: unknown layout class degrades to background with a diagnostic") {
  std::string doc = kMinimalPage;
  doc.replace(doc.find("\"caption\""), 9, "\"figure_note\"");
  std::vector<std::string> diags;
  const PageAnnotation page = load_page(doc, diags);
  REQUIRE(page.text_regions.size() == 1);
  CHECK(page.text_regions[0].layout_class == LayoutClass::Background);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].find("figure_note") != std::string::npos);
}

TEST_CASE("load_page: empty caption text degrades to background") {
  std::string doc = kMinimalPage;
  doc.replace(doc.find("\"KAMEIDO TENMANGU\""), 18, "\"\"");
  std::vector<std::string> diags;
  const PageAnnotation page = load_page(doc, diags);
  CHECK(page.text_regions[0].layout_class == LayoutClass::Background);
  CHECK(diags.size() == 1);
}

TEST_CASE("load_page: schema errors") {
  CHECK_THROWS_AS(load_page("{not json"), SchemaError);
  CHECK_THROWS_AS(load_page("[]"), SchemaError);
  CHECK_THROWS_AS(load_page(R"({"page_id": "p", "book_id": "b", "width_px": 10})"), SchemaError);

  std::string wrong_type = kMinimalPage;
  wrong_type.replace(wrong_type.find("1000"), 4, "\"1000\"");
  CHECK_THROWS_AS(load_page(wrong_type), SchemaError);

  std::string bad_conf = kMinimalPage;
  bad_conf.replace(bad_conf.find("0.95"), 4, "1.5");
  CHECK_THROWS_AS(load_page(bad_conf), SchemaError);

  std::string short_bbox = kMinimalPage;
  short_bbox.replace(short_bbox.find("[100, 420, 200, 30]"), 19, "[100, 420, 200]");
  CHECK_THROWS_AS(load_page(short_bbox), SchemaError);

  CHECK_THROWS_AS(load_page(page_json("p", "")), SchemaError);
}

TEST_CASE("layout class strings are exact") {
  for (LayoutClass c : kAllLayoutClasses) CHECK(layout_class_from_string(to_string(c)) == c);
  CHECK(to_string(LayoutClass::BodyText) == "body_text");
  CHECK(to_string(LayoutClass::InFigureText) == "in_figure_text");
  CHECK_FALSE(layout_class_from_string("Caption").has_value());
}

TEST_CASE("load_page . serialize_page is the identity on random valid pages") {
  Rng rng(2024);
  for (int i = 0; i < 300; ++i) {
    const PageAnnotation page = testing::random_valid_page(rng, "page-" + std::to_string(i));
    const std::string bytes = serialize_page(page);
    CHECK(load_page(bytes) == page);
    CHECK(serialize_page(load_page(bytes)) == bytes);
  }
}

TEST_CASE("load_metadata") {
  SUBCASE("single record") {
    const auto books = load_metadata(R"({"books": [{"book_id": "b1", "labels": {"prefecture": "Tokyo"}}]})");
    REQUIRE(books.size() == 1);
    CHECK(books[0] == BookMetadata{"b1", std::nullopt, {{"prefecture", "Tokyo"}}});
  }
  SUBCASE("empty list") { CHECK(load_metadata(R"({"books": []})").empty()); }
  SUBCASE("duplicate book in strict mode") {
    const char* doc = R"({"books": [{"book_id": "b1", "labels": {}}, {"book_id": "b1", "labels": {}}]})";
    CHECK_THROWS_AS(load_metadata(doc, Strictness::Strict), DuplicateBookError);
    std::vector<std::string> diags;
    CHECK(load_metadata(doc, Strictness::Lenient, &diags).size() == 1);
    CHECK(diags.size() == 1);
  }
  SUBCASE("schema errors") {
    CHECK_THROWS_AS(load_metadata(R"({"records": []})"), SchemaError);
    CHECK_THROWS_AS(load_metadata(R"({"books": [{"labels": {}}]})"), SchemaError);
    CHECK_THROWS_AS(load_metadata(R"({"books": [{"book_id": "b", "labels": {"year": 1930}}]})"),
                    SchemaError);
  }
  SUBCASE("round trip") {
    const std::vector<BookMetadata> books = {
        {"b1", "Album", {{"prefecture", "Kyoto"}, {"year", "1930"}}}, {"b2", std::nullopt, {}}};
    CHECK(load_metadata(serialize_metadata(books)) == books);
  }
}

TEST_CASE("load_corpus") {
  TempDir dir;
  const auto pages = dir / "pages";
  std::filesystem::create_directories(pages);
  write_file(dir / "meta.json", R"({"books": [{"book_id": "b1", "labels": {"prefecture": "Tokyo"}}]})");

  SUBCASE("three well-formed pages") {
    for (const char* id : {"p1", "p2", "p3"}) write_file(pages / (std::string(id) + ".json"), page_json(id, "b1"));
    const Corpus c = load_corpus({pages, dir / "meta.json", Strictness::Strict});
    CHECK(c.pages.size() == 3);
    CHECK(c.report.pages_loaded == 3);
    CHECK(c.report.pages_skipped == 0);
    CHECK(c.metadata.at("b1").labels.at("prefecture") == "Tokyo");
  }

  SUBCASE("one malformed page") {
    write_file(pages / "p1.json", page_json("p1", "b1"));
    write_file(pages / "p2.json", "{ broken");
    write_file(pages / "p3.json", page_json("p3", "b1"));
    write_file(pages / "notes.txt", "ignored");
    const Corpus c = load_corpus({pages, dir / "meta.json", Strictness::Lenient});
    CHECK(c.pages.size() == 2);
    CHECK(c.report.pages_loaded == 2);
    CHECK(c.report.pages_skipped == 1);
    REQUIRE(c.report.diagnostics.size() == 1);
    CHECK(c.report.diagnostics[0].file == "p2.json");
    CHECK_THROWS_AS(load_corpus({pages, dir / "meta.json", Strictness::Strict}), ValidationError);
  }

  SUBCASE("output is sorted by page_id whatever the file names") {
    // File names sort in the reverse of page_id order.
    write_file(pages / "a.json", page_json("p3", "b1"));
    write_file(pages / "b.json", page_json("p2", "b1"));
    write_file(pages / "c.json", page_json("p1", "b1"));
    const Corpus c = load_corpus({pages, dir / "meta.json", Strictness::Strict});
    REQUIRE(c.pages.size() == 3);
    CHECK(c.pages[0].page_id == "p1");
    CHECK(c.pages[1].page_id == "p2");
    CHECK(c.pages[2].page_id == "p3");
  }

  SUBCASE("missing metadata") {
    write_file(pages / "p1.json", page_json("p1", "b1"));
    write_file(pages / "p2.json", page_json("p2", "unknown-book"));
    CHECK_THROWS_AS(load_corpus({pages, dir / "meta.json", Strictness::Strict}), MissingMetadataError);
    const Corpus c = load_corpus({pages, dir / "meta.json", Strictness::Lenient});
    CHECK(c.pages.size() == 2);
    CHECK(c.report.diagnostics.size() == 1);
  }

  SUBCASE("duplicate page ids") {
    write_file(pages / "x.json", page_json("p1", "b1"));
    write_file(pages / "y.json", page_json("p1", "b1"));
    CHECK_THROWS_AS(load_corpus({pages, dir / "meta.json", Strictness::Strict}), ValidationError);
    const Corpus c = load_corpus({pages, dir / "meta.json", Strictness::Lenient});
    CHECK(c.pages.size() == 1);
    CHECK(c.report.pages_skipped == 1);
  }

  SUBCASE("missing directory or metadata file") {
    CHECK_THROWS_AS(load_corpus({dir / "nope", dir / "meta.json", Strictness::Lenient}), IoError);
    CHECK_THROWS_AS(load_corpus({pages, dir / "nope.json", Strictness::Lenient}), IoError);
  }
}
