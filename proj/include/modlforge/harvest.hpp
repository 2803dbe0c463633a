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

// Locating RDF inside free-text responses and repairing it until it parses.

#pragma once

#include <array>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "modlforge/acquisition.hpp"
#include "modlforge/rdf.hpp"
#include "modlforge/turtle.hpp"

namespace modlforge {

enum class CandidateMethod { fenced, prefix_anchored, whole_text };

inline std::string_view to_string(CandidateMethod m) {
  switch (m) {
    case CandidateMethod::fenced: return "fenced";
    case CandidateMethod::prefix_anchored: return "prefix-anchored";
    case CandidateMethod::whole_text: return "whole-text";
  }
  return "?";
}

struct RdfCandidate {
  std::size_t begin = 0;  // byte span in the response text
  std::size_t end = 0;
  CandidateMethod method = CandidateMethod::whole_text;
  std::string text;
};

namespace harvest_detail {

struct Line {
  std::size_t begin;
  std::size_t end;  // excludes the separator
};

// A response with no real newline that contains escaped ones (as stored in
// the TSV) is split at the two-character `\n` escapes instead.
inline std::vector<Line> split_lines(std::string_view s) {
  std::vector<Line> lines;
  std::size_t start = 0;
  if (s.find('\n') != std::string_view::npos) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '\n') {
        lines.push_back({start, i});
        start = i + 1;
      }
    }
  } else {
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      if (s[i] != '\\') continue;
      if (s[i + 1] == 'n') {
        lines.push_back({start, i});
        start = i + 2;
      }
      ++i;
    }
  }
  lines.push_back({start, s.size()});
  return lines;
}

inline std::string_view view(std::string_view s, const Line& l) { return s.substr(l.begin, l.end - l.begin); }

inline std::string_view ltrim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

inline bool starts_with_ci(std::string_view s, std::string_view word) {
  if (s.size() < word.size()) return false;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[i])) != std::tolower(static_cast<unsigned char>(word[i]))) {
      return false;
    }
  }
  return true;
}

inline bool is_fence(std::string_view line) { return ltrim(line).starts_with("```"); }

inline bool is_prefix_line(std::string_view line) {
  const auto t = ltrim(line);
  return t.starts_with("@prefix") ||
         (starts_with_ci(t, "prefix") && t.size() > 6 && (t[6] == ' ' || t[6] == '\t'));
}

inline bool looks_like_turtle(std::string_view line);

// Last line ending in '.', extended over Turtle-looking lines that follow it
// so an unterminated final statement stays in the candidate.
inline std::size_t anchored_end(std::string_view s, const std::vector<Line>& lines, std::size_t first) {
  std::size_t last = lines.size() - 1;
  for (std::size_t j = lines.size(); j-- > first;) {
    const auto t = text::trim(view(s, lines[j]));
    if (!t.empty() && t.back() == '.') {
      last = j;
      break;
    }
  }
  for (std::size_t j = last + 1; j < lines.size(); ++j) {
    const auto t = text::trim(view(s, lines[j]));
    if (t.empty()) continue;
    if (!looks_like_turtle(t)) break;
    last = j;
  }
  return last;
}

}  // namespace harvest_detail

// Fenced blocks first; failing that, the run from the first prefix line to
// the last line ending in '.'; failing that, the whole text.
inline std::vector<RdfCandidate> extract_candidates(std::string_view response) {
  using namespace harvest_detail;
  std::vector<RdfCandidate> out;
  if (text::trim(response).empty()) return out;
  const auto lines = split_lines(response);

  auto add = [&](std::size_t first, std::size_t last, CandidateMethod m) {
    const std::size_t b = lines[first].begin, e = lines[last].end;
    if (text::trim(response.substr(b, e - b)).empty()) return;
    out.push_back({b, e, m, std::string(response.substr(b, e - b))});
  };

  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!is_fence(view(response, lines[i]))) continue;
    std::size_t close = i + 1;
    while (close < lines.size() && !is_fence(view(response, lines[close]))) ++close;
    if (close > i + 1) add(i + 1, close - 1, CandidateMethod::fenced);
    i = close;
  }
  if (!out.empty()) return out;

  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!is_prefix_line(view(response, lines[i]))) continue;
    add(i, anchored_end(response, lines, i), CandidateMethod::prefix_anchored);
    return out;
  }

  out.push_back({0, response.size(), CandidateMethod::whole_text, std::string(response)});
  return out;
}

enum class RepairRule { unescape = 0, strip_prose, split_comment, inject_prefixes, terminate };

inline constexpr std::array<RepairRule, 5> kRepairOrder = {
    RepairRule::unescape, RepairRule::strip_prose, RepairRule::split_comment,
    RepairRule::inject_prefixes, RepairRule::terminate};

inline std::string_view rule_id(RepairRule r) {
  static constexpr std::array<std::string_view, 5> ids = {"R1", "R2", "R3", "R4", "R5"};
  return ids[static_cast<std::size_t>(r)];
}

inline std::optional<RepairRule> parse_rule_id(std::string_view id) {
  for (const auto r : kRepairOrder) {
    if (rule_id(r) == id) return r;
  }
  return std::nullopt;
}

using NamespaceTable = std::map<std::string, std::string>;

inline NamespaceTable parse_namespace_table(std::string_view content) {
  NamespaceTable out;
  for (const auto raw : text::split(content, '\n')) {
    const auto line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto cols = text::split(line, '\t');
    if (cols.size() != 2 || text::trim(cols[1]).empty()) {
      throw ConfigError("namespace table: expected 'label<TAB>iri', got '" + std::string(line) + "'");
    }
    out[std::string(text::trim(cols[0]))] = std::string(text::trim(cols[1]));
  }
  return out;
}

inline NamespaceTable default_namespaces() {
  return {{"rdf", std::string(vocab::kRdf)},   {"rdfs", std::string(vocab::kRdfs)},
          {"owl", std::string(vocab::kOwl)},   {"xsd", std::string(vocab::kXsd)},
          {"schema", "http://schema.org/"},    {"foaf", "http://xmlns.com/foaf/0.1/"},
          {"ex", "http://example.org/"}};
}

struct RepairConfig {
  std::array<bool, 5> enabled = {true, true, true, true, true};
  NamespaceTable namespaces = default_namespaces();

  bool on(RepairRule r) const { return enabled[static_cast<std::size_t>(r)]; }

  // Newline restoration, markdown/prose stripping and comment splitting only.
  static RepairConfig minimal() {
    RepairConfig c;
    c.enabled = {true, true, true, false, false};
    return c;
  }
};

struct RepairStep {
  std::string rule;  // "R1".."R5"
  std::string location;
  std::string description;
};

enum class RepairStatus { clean, repaired, unusable };

inline std::string_view to_string(RepairStatus s) {
  switch (s) {
    case RepairStatus::clean: return "clean";
    case RepairStatus::repaired: return "repaired";
    case RepairStatus::unusable: return "unusable";
  }
  return "?";
}

struct RepairReport {
  std::vector<RepairStep> steps;
  RepairStatus status = RepairStatus::unusable;
  std::size_t triples_before = 0;
  std::size_t triples_after = 0;
};

struct RepairResult {
  std::string text;
  RepairReport report;
};

namespace harvest_detail {

struct RuleOutput {
  std::string text;
  std::string location;
  std::string description;
};

inline std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += '\n';
    out += lines[i];
  }
  return out;
}

inline std::vector<std::string> real_lines(std::string_view s) {
  std::vector<std::string> out;
  for (const auto l : text::split(s, '\n')) out.emplace_back(l);
  return out;
}

// R1: the candidate still carries the store's escaping (no real newline
// but at least one `\n` escape).
inline std::optional<RuleOutput> rule_unescape(std::string_view s) {
  if (s.find('\n') != std::string_view::npos) return std::nullopt;
  bool escaped_newline = false;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    if (s[i] == '\\') {
      if (s[i + 1] == 'n') escaped_newline = true;
      ++i;
    }
  }
  if (!escaped_newline) return std::nullopt;
  return RuleOutput{tsv_unescape(s), "line 1", "restored escaped newlines and tabs"};
}

inline bool has_prefixed_name(std::string_view s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != ':' || i + 1 >= s.size()) continue;
    const auto next = static_cast<unsigned char>(s[i + 1]);
    if (!(std::isalnum(next) || next == '_')) continue;
    std::size_t j = i;
    while (j > 0 && (std::isalnum(static_cast<unsigned char>(s[j - 1])) || s[j - 1] == '_' ||
                     s[j - 1] == '-' || s[j - 1] == '.')) {
      --j;
    }
    if (j == i) {
      if (j == 0 || std::isspace(static_cast<unsigned char>(s[j - 1])) || s[j - 1] == '[' ||
          s[j - 1] == '(' || s[j - 1] == ',' || s[j - 1] == ';') {
        return true;
      }
      continue;
    }
    if (!std::isalpha(static_cast<unsigned char>(s[j]))) continue;
    if (j == 0 || std::isspace(static_cast<unsigned char>(s[j - 1])) || s[j - 1] == '[' ||
        s[j - 1] == '(' || s[j - 1] == ',' || s[j - 1] == ';' || s[j - 1] == '^') {
      // "http://" in prose is not a prefixed name.
      if (s.substr(i + 1).starts_with("//")) continue;
      return true;
    }
  }
  return false;
}

inline bool has_iri_ref(std::string_view s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '<') continue;
    std::size_t j = i + 1;
    while (j < s.size() && s[j] != '>' && !std::isspace(static_cast<unsigned char>(s[j])) && s[j] != '<') ++j;
    if (j < s.size() && s[j] == '>') return true;
  }
  return false;
}

// True for lines carrying Turtle syntax; blank lines are neither.
inline bool looks_like_turtle(std::string_view line) {
  const auto t = text::trim(line);
  if (t.empty()) return false;
  if (t.front() == '#' || t.front() == '@' || t.front() == '"' || t.front() == '\'' ||
      t.front() == '[' || t.front() == ']' || t.front() == '(' || t.front() == ')') {
    return true;
  }
  if (starts_with_ci(t, "prefix ") || starts_with_ci(t, "base ")) return true;
  if (t.find_first_not_of(".;,[]() ") == std::string_view::npos) return true;
  return t.find("_:") != std::string_view::npos || has_iri_ref(t) || has_prefixed_name(t);
}

inline bool is_prose(std::string_view line) {
  return is_fence(line) || (!text::trim(line).empty() && !looks_like_turtle(line));
}

// R2: fence lines anywhere, prose before the first and after the last
// Turtle-looking line.
inline std::optional<RuleOutput> rule_strip_prose(std::string_view s) {
  auto lines = real_lines(s);
  std::size_t first = lines.size(), last = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!is_fence(lines[i]) && looks_like_turtle(lines[i])) {
      if (first == lines.size()) first = i;
      last = i;
    }
  }
  if (first == lines.size()) return std::nullopt;  // nothing to anchor on
  std::vector<std::string> kept;
  std::size_t removed = 0, first_removed = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const bool edge = i < first || i > last;
    if (is_fence(lines[i]) || (edge && is_prose(lines[i]))) {
      if (removed++ == 0) first_removed = i + 1;
      continue;
    }
    kept.push_back(std::move(lines[i]));
  }
  if (removed == 0) return std::nullopt;
  return RuleOutput{join_lines(kept), "line " + std::to_string(first_removed),
                    "removed " + std::to_string(removed) + " fence/prose line(s)"};
}

// Offset of the '#' starting a comment, ignoring IRIs and strings.
inline std::optional<std::size_t> comment_start(std::string_view line) {
  char quote = 0;
  bool in_iri = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quote) {
      if (c == '\\') {
        ++i;
      } else if (c == quote) {
        quote = 0;
      }
    } else if (in_iri) {
      if (c == '>' || std::isspace(static_cast<unsigned char>(c))) in_iri = false;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '<') {
      in_iri = true;
    } else if (c == '#') {
      return i;
    }
  }
  return std::nullopt;
}

inline bool term_like(std::string_view word) {
  if (word.empty()) return false;
  const char last = word.back();
  if (last == '>' || last == '"' || last == '\'' || last == ']' || last == ')') return true;
  if (word.front() == '@') return true;
  if (word == "true" || word == "false" || word == "a") return true;
  if (std::all_of(word.begin(), word.end(), [](char c) {
        return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '+';
      })) {
    return true;
  }
  return word.find(':') != std::string_view::npos;
}

// Start of the first Turtle term inside a comment body, provided a
// statement terminator (or a `;` continuing the statement) follows a term
// later on the same line.
inline std::optional<std::size_t> swallowed_statement(std::string_view body) {
  auto starts_term = [](std::string_view w) {
    return w.starts_with("@prefix") || w.starts_with("_:") || has_prefixed_name(w) || has_iri_ref(w);
  };
  std::optional<std::size_t> first_term;
  std::string_view previous;
  std::size_t i = 0;
  while (i < body.size()) {
    while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
    const std::size_t start = i;
    while (i < body.size() && !std::isspace(static_cast<unsigned char>(body[i]))) ++i;
    const std::string_view word = body.substr(start, i - start);
    if (word.empty()) break;
    if (!first_term && starts_term(word)) first_term = start;
    if (first_term) {
      if ((word == "." || word == ";") && term_like(previous)) return first_term;
      // `ex:Air.` or `<...>.` directly followed by the end of the word
      if (word.size() > 1 && (word.back() == '.' || word.back() == ';')) {
        const auto stem = word.substr(0, word.size() - 1);
        if (stem.find(':') != std::string_view::npos || stem.back() == '>') return first_term;
      }
    }
    previous = word;
  }
  return std::nullopt;
}

// R3: a comment that swallowed the statements following it on one line.
inline std::optional<RuleOutput> rule_split_comment(std::string_view s) {
  auto lines = real_lines(s);
  std::size_t splits = 0, first_line = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto hash = comment_start(lines[i]);
    if (!hash) continue;
    const std::string_view body = std::string_view(lines[i]).substr(*hash + 1);
    const auto at = swallowed_statement(body);
    if (!at) continue;
    const std::size_t cut = *hash + 1 + *at;
    std::string head = lines[i].substr(0, cut);
    while (!head.empty() && (head.back() == ' ' || head.back() == '\t')) head.pop_back();
    std::string tail = lines[i].substr(cut);
    lines[i] = std::move(head);
    lines.insert(lines.begin() + static_cast<std::ptrdiff_t>(i) + 1, std::move(tail));
    if (splits++ == 0) first_line = i + 1;
  }
  if (splits == 0) return std::nullopt;
  return RuleOutput{join_lines(lines), "line " + std::to_string(first_line),
                    "split " + std::to_string(splits) + " comment(s) hiding statements"};
}

struct PrefixUsage {
  std::set<std::string> used;
  std::set<std::string> declared;
};

inline PrefixUsage prefix_usage(std::string_view s) {
  using turtle_detail::Tok;
  PrefixUsage u;
  const auto tokens = turtle_detail::Lexer(s).run();
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    if (t.kind != Tok::pname_ns && t.kind != Tok::pname_ln) continue;
    const bool declaration = i > 0 && (tokens[i - 1].kind == Tok::at_prefix ||
                                       tokens[i - 1].kind == Tok::sparql_prefix);
    (declaration ? u.declared : u.used).insert(t.prefix);
  }
  return u;
}

// R4: declarations for well-known prefixes that are used but never declared.
inline std::optional<RuleOutput> rule_inject_prefixes(std::string_view s, const NamespaceTable& table) {
  const auto usage = prefix_usage(s);
  std::string header, names;
  for (const auto& label : usage.used) {
    if (usage.declared.contains(label)) continue;
    const auto it = table.find(label);
    if (it == table.end()) continue;
    header += "@prefix " + label + ": <" + it->second + "> .\n";
    names += (names.empty() ? "" : ", ") + label;
  }
  if (header.empty()) return std::nullopt;
  return RuleOutput{header + std::string(s), "line 1", "declared " + names};
}

// R5: drop repeated prefix lines and terminate the final statement.
inline std::optional<RuleOutput> rule_terminate(std::string_view s) {
  using turtle_detail::Tok;
  auto lines = real_lines(s);
  std::set<std::string> seen;
  std::vector<std::string> kept;
  std::size_t dropped = 0;
  for (auto& l : lines) {
    if (is_prefix_line(l) && !seen.insert(std::string(text::trim(l))).second) {
      ++dropped;
      continue;
    }
    kept.push_back(std::move(l));
  }
  std::string out = join_lines(kept);
  std::string description;
  if (dropped) description = "dropped " + std::to_string(dropped) + " duplicate prefix line(s)";

  const auto tokens = turtle_detail::Lexer(out).run();
  std::string location = "line 1";
  if (tokens.size() >= 2) {
    const std::size_t n = tokens.size() - 1;  // tokens[n] is eof
    const auto& last = tokens[n - 1];
    const bool sparql_directive =
        (n >= 3 && tokens[n - 3].kind == Tok::sparql_prefix) ||
        (n >= 2 && tokens[n - 2].kind == Tok::sparql_base);
    if (last.kind != Tok::dot && !sparql_directive) {
      out.insert(last.end, " .");
      location = "line " + std::to_string(1 + std::count(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(last.end), '\n'));
      description += std::string(description.empty() ? "" : "; ") + "terminated final statement";
    }
  }
  if (description.empty()) return std::nullopt;
  return RuleOutput{std::move(out), location, description};
}

inline std::optional<RuleOutput> apply(RepairRule rule, std::string_view s, const RepairConfig& config) {
  switch (rule) {
    case RepairRule::unescape: return rule_unescape(s);
    case RepairRule::strip_prose: return rule_strip_prose(s);
    case RepairRule::split_comment: return rule_split_comment(s);
    case RepairRule::inject_prefixes: return rule_inject_prefixes(s, config.namespaces);
    case RepairRule::terminate: return rule_terminate(s);
  }
  return std::nullopt;
}

struct ParseScore {
  std::size_t triples;
  std::size_t diagnostics;
};

inline ParseScore score(std::string_view s) {
  const auto out = parse_turtle(s, ParseMode::recover);
  return {out.graph.size(), out.diagnostics.size()};
}

}  // namespace harvest_detail

// Applies the enabled rules once each, in order. A rule only takes effect
// when it adds triples, or keeps the count without adding diagnostics.
inline RepairResult repair(std::string_view candidate, const RepairConfig& config = {}) {
  using namespace harvest_detail;
  RepairResult result{std::string(candidate), {}};
  ParseScore current = score(candidate);
  result.report.triples_before = current.triples;
  for (const auto rule : kRepairOrder) {
    if (!config.on(rule)) continue;
    auto out = apply(rule, result.text, config);
    if (!out) continue;
    const ParseScore next = score(out->text);
    const bool gains = next.triples > current.triples;
    const bool neutral = next.triples == current.triples && next.diagnostics <= current.diagnostics;
    if (!gains && !neutral) continue;
    result.text = std::move(out->text);
    result.report.steps.push_back({std::string(rule_id(rule)), std::move(out->location),
                                   std::move(out->description)});
    current = next;
  }
  result.report.triples_after = current.triples;
  if (current.triples == 0) {
    result.report.status = RepairStatus::unusable;
  } else {
    result.report.status = result.report.steps.empty() ? RepairStatus::clean : RepairStatus::repaired;
  }
  return result;
}

// Re-applies the recorded rules to the original candidate.
inline std::string replay(std::string_view original, const RepairReport& report,
                          const RepairConfig& config = {}) {
  std::string text(original);
  for (const auto& step : report.steps) {
    const auto rule = parse_rule_id(step.rule);
    if (!rule) throw ConfigError("unknown repair rule " + step.rule);
    if (auto out = harvest_detail::apply(*rule, text, config)) text = std::move(out->text);
  }
  return text;
}

struct HarvestResult {
  std::optional<Graph> graph;  // empty when the response is unusable
  RepairReport report;
  std::optional<RdfCandidate> candidate;
  std::string repaired_text;
  std::size_t candidates = 0;

  bool usable() const { return graph.has_value(); }
};

// Keeps the single largest graph among the candidates; ties go to the
// earliest span.
inline HarvestResult harvest_response(const ResponseRecord& record, const RepairConfig& config = {}) {
  HarvestResult best;
  const auto candidates = extract_candidates(record.response_text);
  best.candidates = candidates.size();
  std::size_t best_triples = 0;
  bool have_report = false;
  ParseOptions options;
  options.provenance = record.id();
  for (const auto& c : candidates) {
    RepairResult fixed = repair(c.text, config);
    ParseOutcome parsed = parse_turtle(fixed.text, options);
    const std::size_t n = parsed.graph.size();
    if (!have_report || n > best_triples) {
      have_report = true;
      best.report = std::move(fixed.report);
      best.candidate = c;
      best.repaired_text = std::move(fixed.text);
      best_triples = n;
      if (n > 0) {
        best.graph = std::move(parsed.graph);
      }
    }
  }
  if (!best.graph) best.report.status = RepairStatus::unusable;
  return best;
}

}  // namespace modlforge
