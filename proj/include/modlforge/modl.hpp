// Copyright 2026 The modl-forge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Library packaging: pattern annotations, the index ontology and name
// queries over it.

#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "modlforge/acquisition.hpp"
#include "modlforge/consolidation.hpp"
#include "modlforge/parallel.hpp"
#include "modlforge/rdf.hpp"
#include "modlforge/turtle.hpp"

namespace modlforge {

namespace ann {

inline const std::string kLibrary = iri("Library");
inline const std::string kVersion = iri("version");
inline const std::string kHasPattern = iri("hasPattern");
inline const std::string kSlug = iri("slug");
inline const std::string kFile = iri("file");
inline const std::string kKeyClassName = iri("keyClassName");
inline const std::string kClassName = iri("className");
inline const std::string kPropertyName = iri("propertyName");

}  // namespace ann

struct LibraryMeta {
  std::string base{kDefaultLibraryBase};
  std::string version = "0.1.0";
  std::string model_id;
  std::string generated_on;
};

inline std::string library_iri(std::string_view base) { return std::string(base) + "/index"; }

// Replaces any previous annotation, so annotating twice is a no-op.
inline Micropattern annotate(Micropattern p, const LibraryMeta& meta) {
  p.annotation = PatternAnnotation{pattern_iri(p.base, p.noun.slug), p.key_class, p.noun.label,
                                   meta.model_id, meta.generated_on, meta.version};
  return p;
}

struct IndexEntry {
  std::string pattern_iri;
  std::string slug;
  std::string file;  // relative to the pattern directory
  std::string key_class;
  std::set<std::string> class_names;
  std::set<std::string> property_names;
  std::vector<PropertyTuple> tuples;

  bool operator==(const IndexEntry&) const = default;
};

struct ModlIndex {
  std::string library_iri;
  std::string version;
  std::vector<IndexEntry> entries;  // sorted by slug
};

struct Exclusion {
  std::string file;
  std::string reason;
};

struct IndexBuild {
  ModlIndex index;
  std::vector<Exclusion> excluded;
  std::vector<std::string> warnings;
};

inline std::string local_part(std::string_view iri) {
  return std::string(consolidation_detail::local_name(iri));
}

// Reads one emitted pattern document. Throws RdfError when it does not
// parse strictly or carries no pattern annotation.
inline IndexEntry read_pattern(std::string_view turtle, std::string file) {
  ParseOptions options;
  options.mode = ParseMode::strict;
  options.provenance = file;
  auto parsed = parse_turtle(turtle, options);
  if (!parsed.ok()) {
    const auto& d = parsed.diagnostics.front();
    throw RdfError("line " + std::to_string(d.line) + ": " + d.message);
  }
  const Graph& g = parsed.graph;
  IndexEntry e;
  e.file = std::move(file);
  for (const auto& t : g) {
    if (t.predicate.value == vocab::kType && t.object.is_iri() && t.object.value == ann::kPattern &&
        t.subject.is_iri()) {
      if (!e.pattern_iri.empty()) throw RdfError("more than one pattern annotation");
      e.pattern_iri = t.subject.value;
    }
  }
  if (e.pattern_iri.empty()) throw RdfError("no pattern annotation");
  std::string key;
  for (const auto& t : g) {
    if (t.subject.value == e.pattern_iri && t.predicate.value == ann::kKeyClass) key = t.object.value;
  }
  const auto classes = declared_classes(g);
  if (!classes.contains(key)) throw RdfError("key class is not declared in the pattern");
  e.key_class = local_part(key);
  e.slug = local_part(e.pattern_iri);
  for (const auto& c : classes) e.class_names.insert(local_part(c));
  e.tuples = extract_tuples(g).tuples;
  for (const auto& t : e.tuples) e.property_names.insert(local_part(t.property));
  return e;
}

// Parses every *.ttl file of `dir` in parallel; files that fail are
// excluded and reported, never fatal.
inline IndexBuild build_index(const std::filesystem::path& dir, const LibraryMeta& meta,
                              std::size_t jobs = default_jobs()) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw ConfigError("pattern directory unreadable: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& item : fs::directory_iterator(dir)) {
    if (item.is_regular_file() && item.path().extension() == ".ttl") files.push_back(item.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<std::optional<IndexEntry>> entries(files.size());
  std::vector<std::string> errors(files.size());
  parallel_for(files.size(), jobs, [&](std::size_t i) {
    try {
      entries[i] = read_pattern(text::read_file(files[i]), files[i].filename().string());
    } catch (const std::exception& ex) {
      errors[i] = ex.what();
    }
  });

  IndexBuild out;
  out.index.library_iri = library_iri(meta.base);
  out.index.version = meta.version;
  std::set<std::string> slugs;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const auto name = files[i].filename().string();
    if (!entries[i]) {
      out.excluded.push_back({name, errors[i]});
    } else if (!slugs.insert(entries[i]->slug).second) {
      out.excluded.push_back({name, "duplicate slug " + entries[i]->slug});
    } else {
      out.index.entries.push_back(std::move(*entries[i]));
    }
  }
  std::sort(out.index.entries.begin(), out.index.entries.end(),
            [](const IndexEntry& a, const IndexEntry& b) { return a.slug < b.slug; });
  if (files.empty()) out.warnings.push_back("no pattern files in " + dir.string());
  return out;
}

inline Graph index_graph(const ModlIndex& index) {
  Graph g;
  g.prefixes().declare("ann", std::string(ann::kNs));
  const Term lib = Term::iri(index.library_iri);
  const Term type = Term::iri(vocab::kType);
  g.insert({lib, type, Term::iri(ann::kLibrary)});
  g.insert({lib, Term::iri(ann::kVersion), Term::literal(index.version)});
  for (const auto& e : index.entries) {
    const Term pat = Term::iri(e.pattern_iri);
    g.insert({lib, Term::iri(ann::kHasPattern), pat});
    g.insert({pat, type, Term::iri(ann::kPattern)});
    g.insert({pat, Term::iri(ann::kSlug), Term::literal(e.slug)});
    g.insert({pat, Term::iri(ann::kFile), Term::literal(e.file)});
    g.insert({pat, Term::iri(ann::kKeyClassName), Term::literal(e.key_class)});
    for (const auto& c : e.class_names) g.insert({pat, Term::iri(ann::kClassName), Term::literal(c)});
    for (const auto& p : e.property_names) g.insert({pat, Term::iri(ann::kPropertyName), Term::literal(p)});
  }
  return g;
}

inline std::string index_turtle(const ModlIndex& index) { return serialize_turtle(index_graph(index)); }

// Rebuilds a ModlIndex from index.ttl; tuples are re-read from the listed
// pattern files, which must exist and parse.
inline ModlIndex load_index(const std::filesystem::path& index_file, const std::filesystem::path& pattern_dir) {
  ParseOptions options;
  options.mode = ParseMode::strict;
  auto parsed = parse_turtle(text::read_file(index_file), options);
  if (!parsed.ok()) throw ConfigError("index does not parse: " + parsed.diagnostics.front().message);
  ModlIndex index;
  std::vector<std::string> files;
  for (const auto& t : parsed.graph) {
    if (t.predicate.value == vocab::kType && t.object.value == ann::kLibrary) index.library_iri = t.subject.value;
    if (t.predicate.value == ann::kVersion) index.version = t.object.value;
    if (t.predicate.value == ann::kFile) files.push_back(t.object.value);
  }
  if (index.library_iri.empty()) throw ConfigError("index has no library node");
  for (const auto& f : files) {
    try {
      index.entries.push_back(read_pattern(text::read_file(pattern_dir / f), f));
    } catch (const std::exception& ex) {
      throw ConfigError("indexed pattern " + f + ": " + ex.what());
    }
  }
  std::sort(index.entries.begin(), index.entries.end(),
            [](const IndexEntry& a, const IndexEntry& b) { return a.slug < b.slug; });
  return index;
}

inline bool contains_ci(std::string_view haystack, std::string_view needle) {
  return text::lower(haystack).find(text::lower(needle)) != std::string::npos;
}

// Exact (case-insensitive) class-name matches first, then substring ones;
// index order within each group.
inline std::vector<std::string> query_by_class(const ModlIndex& index, std::string_view name) {
  std::vector<std::string> exact;
  std::vector<std::string> partial;
  const std::string q = text::lower(text::trim(name));
  if (q.empty()) return {};
  for (const auto& e : index.entries) {
    bool is_exact = false;
    bool is_partial = false;
    for (const auto& c : e.class_names) {
      const std::string lc = text::lower(c);
      is_exact = is_exact || lc == q;
      is_partial = is_partial || lc.find(q) != std::string::npos;
    }
    if (is_exact) {
      exact.push_back(e.pattern_iri);
    } else if (is_partial) {
      partial.push_back(e.pattern_iri);
    }
  }
  exact.insert(exact.end(), partial.begin(), partial.end());
  return exact;
}

struct PropertyMatch {
  std::string pattern_iri;
  std::vector<PropertyTuple> tuples;

  bool operator==(const PropertyMatch&) const = default;
};

// Case-insensitive substring match on property local names.
inline std::vector<PropertyMatch> query_by_property(const ModlIndex& index, std::string_view name) {
  const auto q = text::trim(name);
  if (q.empty()) throw ConfigError("blank query rejected");
  std::vector<PropertyMatch> out;
  for (const auto& e : index.entries) {
    PropertyMatch m{e.pattern_iri, {}};
    for (const auto& t : e.tuples) {
      if (contains_ci(local_part(t.property), q)) m.tuples.push_back(t);
    }
    if (!m.tuples.empty()) out.push_back(std::move(m));
  }
  return out;
}

}  // namespace modlforge
