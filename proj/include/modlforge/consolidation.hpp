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

// Integration of harvested graphs into one RDFS micropattern per noun:
// individual stripping, name canonicalization, tuple extraction and voting.

#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "json.hpp"
#include "modlforge/acquisition.hpp"
#include "modlforge/rdf.hpp"

namespace modlforge {

namespace ann {

inline constexpr std::string_view kNs = "https://w3id.org/modlforge/ann#";
inline std::string iri(std::string_view local) { return std::string(kNs) + std::string(local); }

inline const std::string kPattern = iri("Pattern");
inline const std::string kKeyClass = iri("keyClass");
inline const std::string kSourceModel = iri("sourceModel");
inline const std::string kGeneratedOn = iri("generatedOn");
inline const std::string kPropertyTuple = iri("PropertyTuple");
inline const std::string kProperty = iri("property");
inline const std::string kDomain = iri("domain");
inline const std::string kRange = iri("range");
inline const std::string kVotes = iri("votes");

}  // namespace ann

inline constexpr std::string_view kDefaultLibraryBase = "https://example.org/modl";

inline std::string pattern_namespace(std::string_view base, std::string_view slug) {
  return std::string(base) + "/patterns/" + std::string(slug) + "#";
}

inline std::string pattern_iri(std::string_view base, std::string_view slug) {
  return std::string(base) + "/patterns/" + std::string(slug);
}

struct PropertyTuple {
  std::string property;
  std::string domain;
  std::string range;
  int votes = 1;

  auto key() const { return std::tie(property, domain, range); }
  bool operator==(const PropertyTuple&) const = default;
};

inline bool tuple_less(const PropertyTuple& a, const PropertyTuple& b) { return a.key() < b.key(); }

namespace consolidation_detail {

inline const Term& type_term() {
  static const Term t = Term::iri(vocab::kType);
  return t;
}

inline bool is_class_type(const Term& o) {
  return o.is_iri() && (o.value == vocab::kClass || o.value == vocab::owl("Class"));
}

inline bool is_property_type(const Term& o) {
  return o.is_iri() && (o.value == vocab::kProperty || o.value == vocab::owl("ObjectProperty") ||
                        o.value == vocab::owl("DatatypeProperty"));
}

inline bool is_datatype_type(const Term& o) { return o.is_iri() && o.value == vocab::rdfs("Datatype"); }

inline bool is_schema_predicate(const Term& p) {
  return p.value == vocab::kDomain || p.value == vocab::kRange || p.value == vocab::kSubClassOf;
}

// Everything after the last '#', '/' or ':' once trailing separators are gone.
inline std::string_view local_name(std::string_view iri) {
  while (!iri.empty() && (iri.back() == '/' || iri.back() == '#')) iri.remove_suffix(1);
  const auto cut = iri.find_last_of("#/:");
  return cut == std::string_view::npos ? iri : iri.substr(cut + 1);
}

inline std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::string current;
  for (const char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c >= 0x80) {
      current += ch;
    } else if (!current.empty()) {
      out.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

}  // namespace consolidation_detail

inline std::string upper_camel(std::string_view name) {
  std::string out;
  for (auto w : consolidation_detail::words(name)) {
    w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
    out += w;
  }
  return out.empty() ? "Unnamed" : out;
}

// "HasHumidity" -> "hasHumidity", "URLField" -> "urlField", "AGE" -> "age".
inline std::string lower_camel(std::string_view name) {
  std::string out = upper_camel(name);
  std::size_t run = 0;
  while (run < out.size() && std::isupper(static_cast<unsigned char>(out[run]))) ++run;
  const std::size_t n = run == out.size() ? run : (run > 1 ? run - 1 : run);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = static_cast<char>(std::tolower(static_cast<unsigned char>(out[i])));
  }
  return out;
}

// A node is schema when it declares a class, property or datatype, takes
// part in a domain/range/subClassOf statement, or is a reserved IRI. Every
// other subject is an individual; triples touching one are dropped.
inline std::set<Term> individuals(const Graph& g) {
  using namespace consolidation_detail;
  std::set<Term> schema;
  std::set<Term> subjects;
  for (const auto& t : g) {
    subjects.insert(t.subject);
    if (t.predicate == type_term() &&
        (is_class_type(t.object) || is_property_type(t.object) || is_datatype_type(t.object))) {
      schema.insert(t.subject);
    }
    if (is_schema_predicate(t.predicate)) {
      schema.insert(t.subject);
      schema.insert(t.object);
    }
  }
  std::set<Term> out;
  for (const auto& s : subjects) {
    if (schema.contains(s) || (s.is_iri() && vocab::is_reserved(s.value))) continue;
    out.insert(s);
  }
  return out;
}

inline Graph strip_individuals(const Graph& g) {
  const auto inds = individuals(g);
  return g.filtered([&](const Triple& t) { return !inds.contains(t.subject) && !inds.contains(t.object); });
}

enum class NodeRole { cls, property };

inline std::map<std::string, NodeRole> node_roles(const Graph& g) {
  using namespace consolidation_detail;
  std::map<std::string, NodeRole> roles;
  auto mark = [&](const Term& t, NodeRole r) {
    if (!t.is_iri() || vocab::is_reserved(t.value)) return;
    auto [it, inserted] = roles.emplace(t.value, r);
    if (!inserted && r == NodeRole::property) it->second = r;
  };
  for (const auto& t : g) {
    if (t.predicate == type_term()) {
      mark(t.subject, is_property_type(t.object) ? NodeRole::property : NodeRole::cls);
      mark(t.object, NodeRole::cls);
    } else if (t.predicate.value == vocab::kDomain || t.predicate.value == vocab::kRange) {
      mark(t.subject, NodeRole::property);
      mark(t.object, NodeRole::cls);
    } else if (t.predicate.value == vocab::kSubClassOf) {
      mark(t.subject, NodeRole::cls);
      mark(t.object, NodeRole::cls);
    } else {
      mark(t.predicate, NodeRole::property);
      mark(t.subject, NodeRole::cls);
      mark(t.object, NodeRole::cls);
    }
  }
  return roles;
}

// Rewrites every non-reserved IRI into the pattern namespace of `noun`.
// The class named after the noun becomes the key class and is always
// declared.
inline Graph canonicalize(const Graph& g, const NounEntry& noun,
                          std::string_view base = kDefaultLibraryBase) {
  const std::string ns = pattern_namespace(base, noun.slug);
  const std::string key_local = upper_camel(noun.label);
  const std::string key = ns + key_local;
  const auto roles = node_roles(g);

  std::map<std::string, std::string> renamed;
  for (const auto& [iri, role] : roles) {
    const auto local = consolidation_detail::local_name(iri);
    std::string canon = role == NodeRole::property ? lower_camel(local) : upper_camel(local);
    if (role == NodeRole::cls && text::lower(canon) == text::lower(key_local)) canon = key_local;
    renamed.emplace(iri, ns + canon);
  }
  auto rewrite = [&](const Term& t) {
    if (!t.is_iri()) return t;
    auto it = renamed.find(t.value);
    return it == renamed.end() ? t : Term::iri(it->second);
  };

  Graph out(g.provenance());
  out.prefixes().declare("", ns);
  for (const auto& t : g) out.insert({rewrite(t.subject), rewrite(t.predicate), rewrite(t.object)});
  out.insert({Term::iri(key), Term::iri(vocab::kType), Term::iri(vocab::kClass)});
  return out;
}

inline bool is_datatype_iri(std::string_view iri) {
  if (vocab::in_namespace(iri, vocab::kXsd)) return true;
  return iri == vocab::rdfs("Literal") || iri == vocab::kLangString || iri == vocab::rdf("PlainLiteral") ||
         iri == vocab::rdf("XMLLiteral") || iri == vocab::rdf("HTML") || iri == vocab::rdf("JSON");
}

struct TupleExtraction {
  std::vector<PropertyTuple> tuples;  // sorted, unique
  std::vector<std::string> warnings;
};

struct ExtractOptions {
  std::optional<std::string> key_class;
  bool default_domain_to_key = true;
};

namespace consolidation_detail {

inline std::optional<std::vector<PropertyTuple>> tuple_records(const Graph& g) {
  std::map<Term, PropertyTuple> records;
  std::set<Term> subjects;
  for (const auto& t : g) {
    if (t.predicate == type_term() && t.object.is_iri() && t.object.value == ann::kPropertyTuple) {
      subjects.insert(t.subject);
    }
  }
  if (subjects.empty()) return std::nullopt;
  for (const auto& t : g) {
    if (!subjects.contains(t.subject)) continue;
    auto& r = records[t.subject];
    if (t.predicate.value == ann::kProperty) r.property = t.object.value;
    if (t.predicate.value == ann::kDomain) r.domain = t.object.value;
    if (t.predicate.value == ann::kRange) r.range = t.object.value;
    if (t.predicate.value == ann::kVotes) r.votes = text::to_int(t.object.value).value_or(1);
  }
  std::vector<PropertyTuple> out;
  for (auto& [_, r] : records) {
    if (!r.property.empty() && !r.domain.empty() && !r.range.empty()) out.push_back(std::move(r));
  }
  return out;
}

inline void normalize(std::vector<PropertyTuple>& v) {
  std::sort(v.begin(), v.end(), tuple_less);
  v.erase(std::unique(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.key() == b.key(); }),
          v.end());
}

}  // namespace consolidation_detail

// One tuple per domain x range of each property, votes 1. Emitted patterns
// carry explicit tuple records, which take precedence when present.
inline TupleExtraction extract_tuples(const Graph& g, const ExtractOptions& options = {}) {
  using namespace consolidation_detail;
  TupleExtraction out;
  if (auto records = tuple_records(g)) {
    out.tuples = std::move(*records);
    normalize(out.tuples);
    return out;
  }

  std::map<std::string, std::set<std::string>> domains;
  std::map<std::string, std::set<std::string>> ranges;
  std::set<std::string> properties;
  for (const auto& t : g) {
    const bool dom = t.predicate.value == vocab::kDomain;
    const bool rng = t.predicate.value == vocab::kRange;
    if (t.predicate == type_term() && is_property_type(t.object) && t.subject.is_iri()) {
      properties.insert(t.subject.value);
    }
    if (!dom && !rng) continue;
    if (!t.subject.is_iri()) continue;
    properties.insert(t.subject.value);
    if (!t.object.is_iri()) {
      out.warnings.push_back("ignored non-IRI " + std::string(dom ? "domain" : "range") + " of " +
                             t.subject.value);
      continue;
    }
    (dom ? domains : ranges)[t.subject.value].insert(t.object.value);
  }

  for (const auto& p : properties) {
    auto r = ranges.find(p);
    if (r == ranges.end()) {
      out.warnings.push_back("dropped " + p + ": no range");
      continue;
    }
    std::set<std::string> ds;
    if (auto d = domains.find(p); d != domains.end()) {
      ds = d->second;
    } else if (options.default_domain_to_key && options.key_class) {
      ds.insert(*options.key_class);
    } else {
      out.warnings.push_back("dropped " + p + ": no domain");
      continue;
    }
    for (const auto& d : ds) {
      for (const auto& rr : r->second) out.tuples.push_back({p, d, rr, 1});
    }
  }
  normalize(out.tuples);
  return out;
}

// Votes count the responses containing a tuple; repeats inside one
// response count once.
inline std::vector<PropertyTuple> vote(const std::vector<std::vector<PropertyTuple>>& lists, int threshold = 1) {
  if (threshold < 1) throw ConfigError("vote threshold must be >= 1, got " + std::to_string(threshold));
  std::map<std::tuple<std::string, std::string, std::string>, int> counts;
  for (const auto& list : lists) {
    std::set<std::tuple<std::string, std::string, std::string>> seen;
    for (const auto& t : list) seen.emplace(t.property, t.domain, t.range);
    for (const auto& k : seen) ++counts[k];
  }
  std::vector<PropertyTuple> out;
  for (const auto& [k, n] : counts) {
    if (n >= threshold) out.push_back({std::get<0>(k), std::get<1>(k), std::get<2>(k), n});
  }
  return out;
}

struct PatternAnnotation {
  std::string pattern_iri;
  std::string key_class_iri;
  std::string label;
  std::string source_model;
  std::string generated_on;
  std::string library_version;

  bool operator==(const PatternAnnotation&) const = default;
};

struct Micropattern {
  NounEntry noun;
  std::string base{kDefaultLibraryBase};
  std::string key_class;
  std::set<std::string> classes;
  std::set<std::string> datatypes;  // non-xsd datatype ranges
  std::set<std::pair<std::string, std::string>> subclass_edges;  // (child, parent)
  std::vector<PropertyTuple> tuples;
  std::string model_id;
  std::size_t responses_used = 0;
  std::string generated_on;
  std::optional<PatternAnnotation> annotation;
  std::vector<std::string> warnings;
};

struct ConsolidationOptions {
  std::string base{kDefaultLibraryBase};
  int threshold = 1;
  bool default_domain_to_key = true;
  std::string model_id;
  std::string generated_on;
};

// Empty when no graph was usable.
inline std::optional<Micropattern> build_micropattern(const NounEntry& noun, const std::vector<Graph>& graphs,
                                                      const ConsolidationOptions& options = {}) {
  using namespace consolidation_detail;
  if (options.threshold < 1) {
    throw ConfigError("vote threshold must be >= 1, got " + std::to_string(options.threshold));
  }
  if (graphs.empty()) return std::nullopt;

  Micropattern p;
  p.noun = noun;
  p.base = options.base;
  p.key_class = pattern_namespace(options.base, noun.slug) + upper_camel(noun.label);
  p.model_id = options.model_id;
  p.generated_on = options.generated_on;
  p.responses_used = graphs.size();

  std::vector<std::vector<PropertyTuple>> lists;
  std::set<std::pair<std::string, std::string>> edges;
  std::set<std::string> declared_datatypes;
  ExtractOptions extract{p.key_class, options.default_domain_to_key};
  for (const auto& g : graphs) {
    const Graph canon = canonicalize(strip_individuals(g), noun, options.base);
    auto extracted = extract_tuples(canon, extract);
    for (auto& w : extracted.warnings) p.warnings.push_back(g.provenance() + ": " + w);
    lists.push_back(std::move(extracted.tuples));
    for (const auto& t : canon) {
      if (t.subject.is_iri() && t.predicate == type_term() && is_datatype_type(t.object)) {
        declared_datatypes.insert(t.subject.value);
      }
      if (t.predicate.value == vocab::kSubClassOf && t.subject.is_iri() && t.object.is_iri() &&
          !vocab::is_reserved(t.subject.value) && !vocab::is_reserved(t.object.value) &&
          t.subject != t.object) {
        edges.emplace(t.subject.value, t.object.value);
      }
    }
  }
  p.tuples = vote(lists, options.threshold);

  p.classes.insert(p.key_class);
  for (const auto& t : p.tuples) {
    p.classes.insert(t.domain);
    if (is_datatype_iri(t.range)) continue;
    if (declared_datatypes.contains(t.range)) {
      p.datatypes.insert(t.range);
      p.warnings.push_back("non-xsd datatype range " + t.range);
      continue;
    }
    p.classes.insert(t.range);
  }
  // Subclass edges connected to the retained classes, to a fixpoint.
  for (bool grew = true; grew;) {
    grew = false;
    for (const auto& e : edges) {
      if (p.subclass_edges.contains(e)) continue;
      if (p.classes.contains(e.first) || p.classes.contains(e.second)) {
        p.subclass_edges.insert(e);
        p.classes.insert(e.first);
        p.classes.insert(e.second);
        grew = true;
      }
    }
  }
  return p;
}

// Schema triples, tuple records and (when present) the annotation.
inline Graph pattern_graph(const Micropattern& p) {
  Graph g(p.noun.slug);
  g.prefixes().declare("", pattern_namespace(p.base, p.noun.slug));
  g.prefixes().declare("ann", std::string(ann::kNs));
  const Term type = Term::iri(vocab::kType);
  for (const auto& c : p.classes) g.insert({Term::iri(c), type, Term::iri(vocab::kClass)});
  for (const auto& d : p.datatypes) g.insert({Term::iri(d), type, Term::iri(vocab::rdfs("Datatype"))});
  for (const auto& [child, parent] : p.subclass_edges) {
    g.insert({Term::iri(child), Term::iri(vocab::kSubClassOf), Term::iri(parent)});
  }
  std::size_t n = 0;
  for (const auto& t : p.tuples) {
    const Term prop = Term::iri(t.property);
    g.insert({prop, type, Term::iri(vocab::kProperty)});
    g.insert({prop, Term::iri(vocab::kDomain), Term::iri(t.domain)});
    g.insert({prop, Term::iri(vocab::kRange), Term::iri(t.range)});
    const Term rec = Term::blank("t" + std::to_string(++n));
    g.insert({rec, type, Term::iri(ann::kPropertyTuple)});
    g.insert({rec, Term::iri(ann::kProperty), prop});
    g.insert({rec, Term::iri(ann::kDomain), Term::iri(t.domain)});
    g.insert({rec, Term::iri(ann::kRange), Term::iri(t.range)});
    g.insert({rec, Term::iri(ann::kVotes), Term::literal(std::to_string(t.votes), vocab::kInteger)});
  }
  if (const auto& a = p.annotation) {
    const Term pat = Term::iri(a->pattern_iri);
    g.insert({pat, type, Term::iri(ann::kPattern)});
    g.insert({pat, Term::iri(ann::kKeyClass), Term::iri(a->key_class_iri)});
    g.insert({pat, Term::iri(vocab::kLabel), Term::literal(a->label)});
    g.insert({pat, Term::iri(ann::kSourceModel), Term::literal(a->source_model)});
    g.insert({pat, Term::iri(ann::kGeneratedOn), Term::literal(a->generated_on)});
  }
  return g;
}

inline std::string emit_pattern_turtle(const Micropattern& p) { return serialize_turtle(pattern_graph(p)); }

// Classes declared in a pattern document.
inline std::set<std::string> declared_classes(const Graph& g) {
  std::set<std::string> out;
  for (const auto& t : g) {
    if (t.subject.is_iri() && t.predicate.value == vocab::kType && consolidation_detail::is_class_type(t.object)) {
      out.insert(t.subject.value);
    }
  }
  return out;
}

struct ResponseStats {
  std::size_t total = 0;
  std::size_t usable = 0;
  std::map<std::string, std::size_t> status;  // repair status -> count
};

inline nlohmann::ordered_json report_json(const Micropattern& p, const ResponseStats& stats, int threshold) {
  nlohmann::ordered_json j;
  j["noun"] = p.noun.label;
  j["slug"] = p.noun.slug;
  j["key_class"] = p.key_class;
  j["threshold"] = threshold;
  j["responses"] = {{"total", stats.total}, {"usable", stats.usable}, {"status", stats.status}};
  auto& tuples = j["tuples"] = nlohmann::ordered_json::array();
  for (const auto& t : p.tuples) {
    tuples.push_back({{"property", t.property}, {"domain", t.domain}, {"range", t.range}, {"votes", t.votes}});
  }
  j["classes"] = p.classes;
  auto& edges = j["subclass_edges"] = nlohmann::ordered_json::array();
  for (const auto& [c, s] : p.subclass_edges) edges.push_back({c, s});
  j["warnings"] = p.warnings;
  return j;
}

}  // namespace modlforge
