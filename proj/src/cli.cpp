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

#include "bookpair/cli.hpp"

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>

#include <CLI11.hpp>

#include "bookpair/emit.hpp"
#include "bookpair/errors.hpp"
#include "bookpair/eval.hpp"
#include "bookpair/ingest.hpp"
#include "bookpair/json_codec.hpp"
#include "bookpair/pairing.hpp"
#include "bookpair/random.hpp"

namespace bookpair::cli {

namespace fs = std::filesystem;
using json_codec::Json;

namespace {

IntRange range_from_json(const Json& j, const char* key) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
    throw ConfigError(std::string(key) + " must be [min, max] integers");
  }
  return {j[0].get<long>(), j[1].get<long>()};
}

void merge_generator(const Json& j, ConfigFile& cfg) {
  if (!j.is_object()) throw ConfigError("generator config must be a JSON object");
  GenConfig& g = cfg.generator;
  auto integer = [&](const char* key, long& dst) {
    if (auto it = j.find(key); it != j.end()) {
      if (!it->is_number_integer()) throw ConfigError(std::string(key) + " must be an integer");
      dst = it->get<long>();
    }
  };
  if (auto it = j.find("seed"); it != j.end()) {
    if (!it->is_number_integer()) throw ConfigError("seed must be an integer");
    g.seed = it->is_number_unsigned() ? it->get<std::uint64_t>()
                                      : static_cast<std::uint64_t>(it->get<std::int64_t>());
  }
  integer("n_pages", g.n_pages);
  integer("caption_gap_px", g.caption_gap_px);
  integer("n_books", cfg.n_books);
  if (auto it = j.find("page_size"); it != j.end()) {
    const IntRange r = range_from_json(*it, "page_size");
    g.page_width = r.min;
    g.page_height = r.max;
  }
  if (auto it = j.find("illustrations_per_page"); it != j.end()) {
    g.illustrations_per_page = range_from_json(*it, "illustrations_per_page");
  }
  if (auto it = j.find("fragments_per_caption"); it != j.end()) {
    g.fragments_per_caption = range_from_json(*it, "fragments_per_caption");
  }
  if (auto it = j.find("distractor_regions_per_page"); it != j.end()) {
    g.distractor_regions_per_page = range_from_json(*it, "distractor_regions_per_page");
  }
  auto real = [&](const char* key, double& dst) {
    if (auto it = j.find(key); it != j.end()) {
      if (!it->is_number()) throw ConfigError(std::string(key) + " must be a number");
      dst = it->get<double>();
    }
  };
  real("separation_margin", g.separation_margin);
  real("table_like_prob", g.table_like_prob);
  if (auto it = j.find("books"); it != j.end()) {
    Json wrapped = Json::object();
    wrapped["books"] = *it;
    cfg.books = load_metadata(wrapped.dump());
  }
}

Json generator_to_json(const ConfigFile& cfg, const std::vector<BookMetadata>& books) {
  const GenConfig& g = cfg.generator;
  Json j = Json::object();
  j["seed"] = g.seed;
  j["n_pages"] = g.n_pages;
  j["page_size"] = Json::array({g.page_width, g.page_height});
  j["illustrations_per_page"] =
      Json::array({g.illustrations_per_page.min, g.illustrations_per_page.max});
  j["fragments_per_caption"] =
      Json::array({g.fragments_per_caption.min, g.fragments_per_caption.max});
  j["distractor_regions_per_page"] =
      Json::array({g.distractor_regions_per_page.min, g.distractor_regions_per_page.max});
  j["caption_gap_px"] = g.caption_gap_px;
  j["separation_margin"] = json_codec::number(g.separation_margin);
  j["table_like_prob"] = json_codec::number(g.table_like_prob);
  j["n_books"] = static_cast<long>(books.size());
  return j;
}

std::string fixed3(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << v;
  return os.str();
}

fs::path sibling(const fs::path& manifest, const std::string& suffix) {
  fs::path stem = manifest.filename();
  std::string name = stem.string();
  for (const char* ext : {".manifest.jsonl", ".jsonl", ".json"}) {
    const std::string e = ext;
    if (name.size() > e.size() && name.compare(name.size() - e.size(), e.size(), e) == 0) {
      name.resize(name.size() - e.size());
      break;
    }
  }
  return manifest.parent_path() / (name + suffix);
}

Json stats_json(const ManifestStats& s) {
  // Reuse the manifest writer so the two encodings never drift apart.
  DatasetManifest m;
  m.stats = s;
  const std::string header = write_manifest(m);
  return Json::parse(header.substr(0, header.find('\n')))["stats"];
}

void print_stats(std::ostream& out, const ManifestStats& s) {
  out << "pages                 " << s.n_pages << "\n";
  out << "pairs                 " << s.n_pairs << "\n";
  out << "excluded illustrations";
  for (const auto& [k, v] : s.excluded_illustrations) out << "  " << k << "=" << v;
  out << "\n";
  out << "discarded fragments   ";
  for (const auto& [k, v] : s.discarded_fragments) out << "  " << k << "=" << v;
  out << "\n";
  for (const auto& [key, values] : s.label_histogram) {
    out << "label " << key << "\n";
    for (const auto& [value, count] : values) {
      out << "  " << std::left << std::setw(20) << value << std::right << count << "\n";
    }
  }
}

struct Options {
  std::string config_path;
  std::string format = "text";
  bool strict = false;
  std::string out_path;
  std::optional<std::uint64_t> seed;

  // extract
  std::string pages_dir;
  std::string metadata_path;
  std::optional<long> min_caption_chars;
  std::optional<long> density_threshold;
  std::optional<std::string> distance_metric;
  std::optional<std::string> reading_order;
  std::optional<std::string> delimiter;

  // gen
  std::optional<long> n_pages;

  // eval-pairs
  std::string predicted_path;
  std::string truth_path;
  double iou_threshold = 0.5;
  std::string text_match = "normalized";

  // eval-retrieval
  std::string queries_path;
  std::string gallery_path;
  std::vector<long> ks{1, 10, 50, 100};
  std::optional<std::size_t> sample_n;
  long repeats = 1;

  // stats
  std::string manifest_path;
};

ConfigFile effective_config(const Options& o) {
  ConfigFile cfg = o.config_path.empty() ? ConfigFile{} : load_config_file(o.config_path);
  PipelineConfig& p = cfg.pipeline;
  if (o.min_caption_chars) p.min_caption_chars = *o.min_caption_chars;
  if (o.density_threshold) p.text_density_max_chars = *o.density_threshold;
  if (o.distance_metric) p.distance_metric = distance_metric_from_string(*o.distance_metric);
  if (o.reading_order) p.reading_order = reading_order_from_string(*o.reading_order);
  if (o.delimiter) p.join_delimiter = *o.delimiter;
  p.validate();
  if (o.seed) cfg.generator.seed = *o.seed;
  if (o.n_pages) cfg.generator.n_pages = *o.n_pages;
  cfg.generator.validate();
  return cfg;
}

int cmd_extract(const Options& o, std::ostream& out, std::ostream& err) {
  const ConfigFile cfg = effective_config(o);
  const Corpus corpus = load_corpus(CorpusSource{
      o.pages_dir, o.metadata_path, o.strict ? Strictness::Strict : Strictness::Lenient});
  for (const Diagnostic& d : corpus.report.diagnostics) {
    err << "warning: " << d.file << ": " << d.reason << "\n";
  }

  PageExtractions extractions;
  std::map<std::string, std::optional<std::string>> image_paths;
  extractions.reserve(corpus.pages.size());
  for (const PageAnnotation& page : corpus.pages) {
    auto it = corpus.metadata.find(page.book_id);
    const BookMetadata meta =
        it != corpus.metadata.end() ? it->second : BookMetadata{page.book_id, std::nullopt, {}};
    extractions.emplace_back(page.page_id, extract_page(page, meta, cfg.pipeline));
    image_paths[page.page_id] = page.image_path;
  }
  const DatasetManifest manifest = build_manifest(extractions, cfg.pipeline);

  const fs::path manifest_path = o.out_path;
  const fs::path crops_path = sibling(manifest_path, ".crops.jsonl");
  const fs::path exclusions_path = sibling(manifest_path, ".exclusions.jsonl");
  write_file(manifest_path, write_manifest(manifest));
  write_file(crops_path, write_crop_list(crop_list(manifest, image_paths)));
  write_file(exclusions_path, write_exclusions(exclusion_records(extractions)));

  if (o.format == "json") {
    Json j = Json::object();
    j["command"] = "extract";
    j["pages_loaded"] = corpus.report.pages_loaded;
    j["pages_skipped"] = corpus.report.pages_skipped;
    j["n_pairs"] = manifest.stats.n_pairs;
    j["manifest"] = manifest_path.string();
    j["crops"] = crops_path.string();
    j["exclusions"] = exclusions_path.string();
    j["config"] = json_codec::to_json(cfg.pipeline);
    j["stats"] = stats_json(manifest.stats);
    out << j.dump() << "\n";
  } else {
    out << "loaded " << corpus.report.pages_loaded << " pages (" << corpus.report.pages_skipped
        << " skipped)\n";
    print_stats(out, manifest.stats);
    out << "manifest   " << manifest_path.string() << "\n";
    out << "crops      " << crops_path.string() << "\n";
    out << "exclusions " << exclusions_path.string() << "\n";
  }
  return kOk;
}

int cmd_gen(const Options& o, std::ostream& out) {
  const ConfigFile cfg = effective_config(o);
  const std::vector<BookMetadata> books =
      cfg.books.empty() ? default_meta_pool(static_cast<std::size_t>(std::max(1L, cfg.n_books)))
                        : cfg.books;
  const GeneratedCorpus corpus = generate(cfg.generator, books);

  const fs::path root = o.out_path;
  const fs::path pages_dir = root / "pages";
  std::error_code ec;
  fs::create_directories(pages_dir, ec);
  if (ec) throw IoError("cannot create '" + pages_dir.string() + "': " + ec.message());
  // Stale page files from an earlier run would leak into the corpus.
  for (const auto& entry : fs::directory_iterator(pages_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") fs::remove(entry.path());
  }
  for (const PageAnnotation& page : corpus.pages) {
    write_file(pages_dir / (page.page_id + ".json"), serialize_page(page));
  }
  write_file(root / "metadata.json", serialize_metadata(books));
  const PageExtractions truth = corpus.truth.extractions();
  const DatasetManifest manifest = build_manifest(truth, PipelineConfig{});
  write_file(root / "truth.manifest.jsonl", write_manifest(manifest));
  write_file(root / "truth.exclusions.jsonl", write_exclusions(exclusion_records(truth)));
  Json echo = Json::object();
  echo["generator"] = generator_to_json(cfg, books);
  write_file(root / "gen_config.json", echo.dump(2) + "\n");

  if (o.format == "json") {
    Json j = Json::object();
    j["command"] = "gen";
    j["out"] = root.string();
    j["n_pages"] = corpus.pages.size();
    j["n_books"] = books.size();
    j["n_truth_pairs"] = corpus.truth.pairs.size();
    j["stats"] = stats_json(manifest.stats);
    out << j.dump() << "\n";
  } else {
    out << "generated " << corpus.pages.size() << " pages from " << books.size()
        << " books into " << root.string() << "\n";
    out << "ground truth pairs " << corpus.truth.pairs.size() << ", table-like illustrations "
        << manifest.stats.excluded_illustrations.at("text_dense") << "\n";
  }
  return kOk;
}

int cmd_eval_pairs(const Options& o, std::ostream& out) {
  const DatasetManifest predicted = parse_manifest(read_file(o.predicted_path));
  const DatasetManifest truth = parse_manifest(read_file(o.truth_path));
  const PairEvalResult r = eval_pairs(predicted.pairs, truth.pairs, o.iou_threshold,
                                      text_match_from_string(o.text_match));
  if (o.format == "json") {
    Json j = Json::object();
    j["true_positives"] = r.true_positives;
    j["false_positives"] = r.false_positives;
    j["false_negatives"] = r.false_negatives;
    j["precision"] = r.precision;
    j["recall"] = r.recall;
    j["f1"] = r.f1;
    j["iou_threshold"] = o.iou_threshold;
    j["text_match"] = o.text_match;
    Json pages = Json::object();
    for (const auto& [page, c] : r.per_page) {
      pages[page] = Json::array({c.true_positives, c.false_positives, c.false_negatives});
    }
    j["per_page"] = std::move(pages);
    out << j.dump() << "\n";
  } else {
    out << "true positives   " << r.true_positives << "\n";
    out << "false positives  " << r.false_positives << "\n";
    out << "false negatives  " << r.false_negatives << "\n";
    out << "precision        " << fixed3(r.precision) << "\n";
    out << "recall           " << fixed3(r.recall) << "\n";
    out << "f1               " << fixed3(r.f1) << "\n";
  }
  return kOk;
}

int cmd_eval_retrieval(const Options& o, std::ostream& out) {
  const EmbeddingSet queries = parse_embeddings(read_file(o.queries_path));
  const EmbeddingSet gallery = parse_embeddings(read_file(o.gallery_path));
  const std::uint64_t seed = o.seed.value_or(0);

  std::map<long, double> sums;
  long runs = 0;
  std::size_t n_queries = 0;
  if (o.sample_n) {
    if (o.repeats < 1) throw ConfigError("--repeats must be >= 1");
    for (long r = 0; r < o.repeats; ++r) {
      const EmbeddingSet q =
          sample_eval_subset(queries, *o.sample_n, mix_seed(seed, static_cast<std::uint64_t>(r)));
      const EmbeddingSet g = restrict_to_ids(gallery, q.ids());
      const RetrievalResult res = recall_at_k(q, g, o.ks);
      for (const auto& [k, v] : res.recall_at) sums[k] += v;
      n_queries = res.n_queries;
      ++runs;
    }
  } else {
    const RetrievalResult res = recall_at_k(queries, gallery, o.ks);
    sums = res.recall_at;
    n_queries = res.n_queries;
    runs = 1;
  }

  if (o.format == "json") {
    Json j = Json::object();
    j["n_queries"] = n_queries;
    j["repeats"] = runs;
    if (o.sample_n) j["sample_n"] = *o.sample_n;
    j["seed"] = seed;
    Json rec = Json::object();
    for (const auto& [k, v] : sums) rec[std::to_string(k)] = v / static_cast<double>(runs);
    j["recall_at"] = std::move(rec);
    out << j.dump() << "\n";
  } else {
    out << "queries " << n_queries << ", runs " << runs << "\n";
    for (const auto& [k, v] : sums) {
      out << "Recall@" << std::left << std::setw(6) << k << std::right
          << fixed3(v / static_cast<double>(runs)) << "\n";
    }
  }
  return kOk;
}

int cmd_stats(const Options& o, std::ostream& out) {
  const DatasetManifest m = parse_manifest(read_file(o.manifest_path));
  if (o.format == "json") {
    out << stats_json(m.stats).dump() << "\n";
  } else {
    print_stats(out, m.stats);
  }
  return kOk;
}

}  // namespace

ConfigFile load_config_file(const std::string& path) {
  const Json j = json_codec::parse(read_file(path), path);
  if (!j.is_object()) throw SchemaError(path + ": config must be a JSON object");
  ConfigFile cfg;
  if (auto it = j.find("pipeline"); it != j.end()) json_codec::merge_config(*it, cfg.pipeline);
  if (auto it = j.find("generator"); it != j.end()) merge_generator(*it, cfg);
  return cfg;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Build labeled image-text pair datasets from page layout annotations", "bookpair"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "JSON config file (pipeline/generator sections)");
    sub->add_option("--format", o.format, "Output format")
        ->check(CLI::IsMember({"text", "json"}));
  };

  CLI::App* extract = app.add_subcommand("extract", "Extract image-text pairs from a corpus");
  add_common(extract);
  extract->add_option("--pages", o.pages_dir, "Directory of page annotation files")->required();
  extract->add_option("--metadata", o.metadata_path, "Book metadata document")->required();
  extract->add_option("--out", o.out_path, "Manifest path")->required();
  extract->add_flag("--strict", o.strict, "Fail on any malformed page or missing metadata");
  extract->add_option("--min-caption-chars", o.min_caption_chars,
                      "Minimum caption length in characters");
  extract->add_option("--density-threshold", o.density_threshold,
                      "Maximum interior text characters of a kept illustration");
  extract->add_option("--distance-metric", o.distance_metric)
      ->check(CLI::IsMember({"edge_to_edge", "center_to_center"}));
  extract->add_option("--reading-order", o.reading_order)
      ->check(CLI::IsMember({"horizontal_ltr", "vertical_rtl"}));
  extract->add_option("--delimiter", o.delimiter, "Caption fragment delimiter");

  CLI::App* gen = app.add_subcommand("gen", "Generate a synthetic corpus with ground truth");
  add_common(gen);
  gen->add_option("--out", o.out_path, "Output directory")->required();
  gen->add_option("--seed", o.seed);
  gen->add_option("--pages", o.n_pages, "Number of pages");

  CLI::App* eval_p = app.add_subcommand("eval-pairs", "Score a manifest against ground truth");
  add_common(eval_p);
  eval_p->add_option("predicted", o.predicted_path)->required();
  eval_p->add_option("truth", o.truth_path)->required();
  eval_p->add_option("--iou", o.iou_threshold, "IoU threshold")->check(CLI::Range(0.0, 1.0));
  eval_p->add_option("--text-match", o.text_match)
      ->check(CLI::IsMember({"exact", "normalized"}));

  CLI::App* eval_r = app.add_subcommand("eval-retrieval", "Recall@K over embedding files");
  add_common(eval_r);
  eval_r->add_option("queries", o.queries_path)->required();
  eval_r->add_option("gallery", o.gallery_path)->required();
  eval_r->add_option("--ks", o.ks, "Comma separated K values")->delimiter(',');
  eval_r->add_option("--sample-n", o.sample_n, "Rows per random subsample");
  eval_r->add_option("--repeats", o.repeats, "Number of subsamples to average");
  eval_r->add_option("--seed", o.seed);

  CLI::App* stats = app.add_subcommand("stats", "Print manifest statistics");
  add_common(stats);
  stats->add_option("manifest", o.manifest_path)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kIoOrSchemaError;
  }

  try {
    if (extract->parsed()) return cmd_extract(o, out, err);
    if (gen->parsed()) return cmd_gen(o, out);
    if (eval_p->parsed()) return cmd_eval_pairs(o, out);
    if (eval_r->parsed()) return cmd_eval_retrieval(o, out);
    if (stats->parsed()) return cmd_stats(o, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const IdMismatchError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const DimensionMismatchError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const SampleTooLargeError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const BookMismatchError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << "\n";
    return kIoOrSchemaError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIoOrSchemaError;
  } catch (const GeometryError& e) {
    err << "error: " << e.what() << "\n";
    return kIoOrSchemaError;
  } catch (const ZeroNormVectorError& e) {
    err << "error: " << e.what() << "\n";
    return kIoOrSchemaError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kIoOrSchemaError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kInternalError;
}

}  // namespace bookpair::cli
