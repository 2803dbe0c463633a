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

// RDF data model shared by every pipeline stage: terms, triples, prefix
// environments, set-semantics graphs and a deterministic Turtle writer.

#pragma once

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace modlforge {

namespace vocab {

inline constexpr std::string_view kRdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kRdfs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view kOwl = "http://www.w3.org/2002/07/owl#";
inline constexpr std::string_view kXsd = "http://www.w3.org/2001/XMLSchema#";

inline std::string rdf(std::string_view local) { return std::string(kRdf) + std::string(local); }
inline std::string rdfs(std::string_view local) { return std::string(kRdfs) + std::string(local); }
inline std::string owl(std::string_view local) { return std::string(kOwl) + std::string(local); }
inline std::string xsd(std::string_view local) { return std::string(kXsd) + std::string(local); }

inline const std::string kType = rdf("type");
inline const std::string kProperty = rdf("Property");
inline const std::string kLangString = rdf("langString");
inline const std::string kClass = rdfs("Class");
inline const std::string kSubClassOf = rdfs("subClassOf");
inline const std::string kDomain = rdfs("domain");
inline const std::string kRange = rdfs("range");
inline const std::string kLabel = rdfs("label");
inline const std::string kString = xsd("string");
inline const std::string kInteger = xsd("integer");
inline const std::string kDecimal = xsd("decimal");
inline const std::string kDouble = xsd("double");
inline const std::string kBoolean = xsd("boolean");

inline bool in_namespace(std::string_view iri, std::string_view ns) {
  return iri.size() > ns.size() && iri.substr(0, ns.size()) == ns;
}

// rdf, rdfs, owl and xsd are never rewritten or treated as individuals.
inline bool is_reserved(std::string_view iri) {
  return in_namespace(iri, kRdf) || in_namespace(iri, kRdfs) || in_namespace(iri, kOwl) ||
         in_namespace(iri, kXsd);
}

}  // namespace vocab

class RdfError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An IRI has a scheme: ALPHA *( ALPHA / DIGIT / "+" / "-" / "." ) ":".
inline bool is_absolute_iri(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const char c = s[i];
    if (c == ':') return true;
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.') {
      return false;
    }
  }
  return false;
}

struct Term {
  enum class Kind { iri, blank, literal };

  Kind kind = Kind::iri;
  std::string value;     // iri text, blank label (without "_:"), or lexical form
  std::string datatype;  // literals only
  std::string language;  // literals only, lowercase not enforced

  static Term iri(std::string v) { return Term{Kind::iri, std::move(v), {}, {}}; }
  static Term blank(std::string label) { return Term{Kind::blank, std::move(label), {}, {}}; }
  static Term literal(std::string lexical, std::string datatype = vocab::kString) {
    return Term{Kind::literal, std::move(lexical), std::move(datatype), {}};
  }
  static Term lang_literal(std::string lexical, std::string lang) {
    return Term{Kind::literal, std::move(lexical), vocab::kLangString, std::move(lang)};
  }

  bool is_iri() const { return kind == Kind::iri; }
  bool is_blank() const { return kind == Kind::blank; }
  bool is_literal() const { return kind == Kind::literal; }

  auto operator<=>(const Term&) const = default;
  bool operator==(const Term&) const = default;
};

struct Triple {
  Term subject;
  Term predicate;
  Term object;

  auto operator<=>(const Triple&) const = default;
  bool operator==(const Triple&) const = default;
};

// Returns an empty string when the triple is well formed, otherwise the reason.
inline std::string validate_triple(const Triple& t) {
  if (t.subject.is_literal()) return "literal in subject position";
  if (!t.predicate.is_iri()) return "predicate is not an IRI";
  for (const Term* term : {&t.subject, &t.predicate, &t.object}) {
    if (term->is_iri() && !is_absolute_iri(term->value)) {
      return "relative IRI <" + term->value + ">";
    }
    if (term->is_blank() && term->value.empty()) return "empty blank node label";
  }
  return {};
}

class PrefixEnv {
 public:
  // Later declarations shadow earlier ones; a changed mapping is recorded.
  void declare(const std::string& label, const std::string& ns) {
    auto [it, inserted] = map_.try_emplace(label, ns);
    if (!inserted && it->second != ns) {
      warnings_.push_back("prefix '" + label + ":' redeclared from <" + it->second + "> to <" +
                          ns + ">");
      it->second = ns;
    }
  }

  std::optional<std::string> lookup(const std::string& label) const {
    auto it = map_.find(label);
    if (it == map_.end()) return std::nullopt;
    return it->second;
  }

  void set_base(std::string base) { base_ = std::move(base); }
  const std::optional<std::string>& base() const { return base_; }

  const std::map<std::string, std::string>& mappings() const { return map_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  void merge_from(const PrefixEnv& other) {
    for (const auto& [label, ns] : other.map_) declare(label, ns);
    warnings_.insert(warnings_.end(), other.warnings_.begin(), other.warnings_.end());
    if (!base_ && other.base_) base_ = other.base_;
  }

  bool operator==(const PrefixEnv& o) const { return map_ == o.map_ && base_ == o.base_; }

 private:
  std::map<std::string, std::string> map_;
  std::optional<std::string> base_;
  std::vector<std::string> warnings_;
};

class Graph {
 public:
  using const_iterator = std::set<Triple>::const_iterator;

  Graph() = default;
  explicit Graph(std::string provenance) : provenance_(std::move(provenance)) {}

  // Returns true when the triple was absent. Throws RdfError on a malformed triple.
  bool insert(Triple t) {
    if (auto why = validate_triple(t); !why.empty()) throw RdfError("rejected triple: " + why);
    return triples_.insert(std::move(t)).second;
  }

  bool erase(const Triple& t) { return triples_.erase(t) > 0; }
  bool contains(const Triple& t) const { return triples_.contains(t); }
  std::size_t size() const { return triples_.size(); }
  bool empty() const { return triples_.empty(); }
  const_iterator begin() const { return triples_.begin(); }
  const_iterator end() const { return triples_.end(); }
  const std::set<Triple>& triples() const { return triples_; }

  PrefixEnv& prefixes() { return prefixes_; }
  const PrefixEnv& prefixes() const { return prefixes_; }

  const std::string& provenance() const { return provenance_; }
  void set_provenance(std::string p) { provenance_ = std::move(p); }

  // Triple-set equality; prefixes and provenance are presentation data.
  bool same_triples(const Graph& o) const { return triples_ == o.triples_; }

  template <typename Pred>
  Graph filtered(Pred&& keep) const {
    Graph out(provenance_);
    out.prefixes_ = prefixes_;
    for (const auto& t : triples_) {
      if (keep(t)) out.triples_.insert(t);
    }
    return out;
  }

 private:
  std::set<Triple> triples_;
  PrefixEnv prefixes_;
  std::string provenance_;
};

inline Graph graph_insert(Graph g, Triple t) {
  g.insert(std::move(t));
  return g;
}

// Set union of the triples. Prefixes of `b` shadow those of `a` with warnings.
inline Graph graph_merge(const Graph& a, const Graph& b) {
  Graph out = a;
  if (out.provenance().empty()) out.set_provenance(b.provenance());
  out.prefixes().merge_from(b.prefixes());
  for (const auto& t : b) out.insert(t);
  return out;
}

namespace detail {

inline bool is_pn_char(unsigned char c) {
  return std::isalnum(c) || c == '_' || c == '-' || c >= 0x80;
}

inline bool valid_prefix_label(std::string_view label) {
  if (label.empty()) return true;
  if (!std::isalpha(static_cast<unsigned char>(label.front()))) return false;
  if (label.back() == '.') return false;
  return std::all_of(label.begin(), label.end(), [](char c) {
    return is_pn_char(static_cast<unsigned char>(c)) || c == '.';
  });
}

inline bool valid_local_name(std::string_view local) {
  if (local.empty()) return true;
  const auto first = static_cast<unsigned char>(local.front());
  if (!(std::isalnum(first) || first == '_' || first >= 0x80)) return false;
  if (local.back() == '.') return false;
  return std::all_of(local.begin(), local.end(), [](char c) {
    return is_pn_char(static_cast<unsigned char>(c)) || c == '.';
  });
}

inline std::string escape_string(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (const char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    switch (ch) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20 || c == 0x7f) {
          static constexpr char kHex[] = "0123456789ABCDEF";
          out += "\\u00";
          out += kHex[c >> 4];
          out += kHex[c & 0xF];
        } else {
          out += ch;
        }
    }
  }
  return out;
}

inline std::string escape_iri(std::string_view s) {
  std::string out;
  for (const char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    if (c <= 0x20 || ch == '<' || ch == '>' || ch == '"' || ch == '{' || ch == '}' ||
        ch == '|' || ch == '^' || ch == '`' || ch == '\\') {
      static constexpr char kHex[] = "0123456789ABCDEF";
      out += "\\u00";
      out += kHex[c >> 4];
      out += kHex[c & 0xF];
    } else {
      out += ch;
    }
  }
  return out;
}

inline bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(),
                                   [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

inline std::string_view strip_sign(std::string_view s) {
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) s.remove_prefix(1);
  return s;
}

inline bool integer_shape(std::string_view s) { return all_digits(strip_sign(s)); }

inline bool decimal_shape(std::string_view s) {
  s = strip_sign(s);
  const auto dot = s.find('.');
  if (dot == std::string_view::npos) return false;
  const auto whole = s.substr(0, dot);
  const auto frac = s.substr(dot + 1);
  return (whole.empty() || all_digits(whole)) && all_digits(frac);
}

inline bool double_shape(std::string_view s) {
  s = strip_sign(s);
  const auto e = s.find_first_of("eE");
  if (e == std::string_view::npos) return false;
  const auto mantissa = s.substr(0, e);
  const auto exponent = strip_sign(s.substr(e + 1));
  if (!all_digits(exponent)) return false;
  const auto dot = mantissa.find('.');
  if (dot == std::string_view::npos) return all_digits(mantissa);
  const auto whole = mantissa.substr(0, dot);
  const auto frac = mantissa.substr(dot + 1);
  if (whole.empty() && frac.empty()) return false;
  return (whole.empty() || all_digits(whole)) && (frac.empty() || all_digits(frac));
}

class TermWriter {
 public:
  explicit TermWriter(const PrefixEnv& env) {
    auto add = [&](const std::string& label, const std::string& ns) {
      if (!valid_prefix_label(label) || ns.empty()) return;
      for (const auto& [l, n] : table_) {
        if (l == label || n == ns) return;
      }
      table_.emplace_back(label, ns);
    };
    add("rdf", std::string(vocab::kRdf));
    add("rdfs", std::string(vocab::kRdfs));
    add("xsd", std::string(vocab::kXsd));
    add("owl", std::string(vocab::kOwl));
    for (const auto& [label, ns] : env.mappings()) add(label, ns);
  }

  std::string iri(const std::string& value) {
    const std::pair<std::string, std::string>* best = nullptr;
    for (const auto& entry : table_) {
      const auto& ns = entry.second;
      if (value.size() < ns.size() || value.compare(0, ns.size(), ns) != 0) continue;
      if (!valid_local_name(std::string_view(value).substr(ns.size()))) continue;
      if (!best || ns.size() > best->second.size() ||
          (ns.size() == best->second.size() && entry.first < best->first)) {
        best = &entry;
      }
    }
    if (!best) return "<" + escape_iri(value) + ">";
    used_.insert(best->first);
    return best->first + ":" + value.substr(best->second.size());
  }

  std::string term(const Term& t) {
    switch (t.kind) {
      case Term::Kind::iri:
        return iri(t.value);
      case Term::Kind::blank:
        return "_:" + t.value;
      case Term::Kind::literal:
        break;
    }
    if (!t.language.empty()) return "\"" + escape_string(t.value) + "\"@" + t.language;
    if (t.datatype == vocab::kString) return "\"" + escape_string(t.value) + "\"";
    if ((t.datatype == vocab::kInteger && integer_shape(t.value)) ||
        (t.datatype == vocab::kDecimal && decimal_shape(t.value)) ||
        (t.datatype == vocab::kDouble && double_shape(t.value)) ||
        (t.datatype == vocab::kBoolean && (t.value == "true" || t.value == "false"))) {
      return t.value;
    }
    return "\"" + escape_string(t.value) + "\"^^" + iri(t.datatype);
  }

  // Always-emitted prefixes plus any used one, sorted by label.
  std::string header() const {
    std::map<std::string, std::string> out;
    for (const auto& [label, ns] : table_) {
      const bool standard = label == "rdf" || label == "rdfs" || label == "xsd" || label == "owl";
      if (standard || used_.contains(label)) out.emplace(label, ns);
    }
    std::string text;
    for (const auto& [label, ns] : out) {
      text += "@prefix " + label + ": <" + escape_iri(ns) + "> .\n";
    }
    return text;
  }

 private:
  std::vector<std::pair<std::string, std::string>> table_;
  std::set<std::string> used_;
};

}  // namespace detail

// Deterministic Turtle: sorted prefixes, one block per subject in term
// order, rdf:type first within a block, `;` between predicates and `,`
// between objects.
inline std::string serialize_turtle(const Graph& g) {
  detail::TermWriter writer(g.prefixes());
  std::string body;

  const Term type = Term::iri(vocab::kType);
  auto it = g.begin();
  while (it != g.end()) {
    const Term& subject = it->subject;
    std::vector<const Triple*> block;
    for (; it != g.end() && it->subject == subject; ++it) block.push_back(&*it);
    std::stable_partition(block.begin(), block.end(),
                          [&](const Triple* t) { return t->predicate == type; });

    body += writer.term(subject);
    const Term* current = nullptr;
    for (const Triple* t : block) {
      if (current && *current == t->predicate) {
        body += " , ";
      } else {
        body += current ? " ;\n    " : " ";
        body += t->predicate == type ? std::string("a") : writer.term(t->predicate);
        body += " ";
        current = &t->predicate;
      }
      body += writer.term(t->object);
    }
    body += " .\n\n";
  }

  std::string out = writer.header();
  if (!body.empty()) {
    out += "\n";
    body.pop_back();
    out += body;
  }
  return out;
}

}  // namespace modlforge
