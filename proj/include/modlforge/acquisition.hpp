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

// Prompt battery expansion and the TSV response store.

#pragma once

#include <algorithm>
#include <cctype>
#include <chrono>
#include <compare>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace modlforge {

// Bad configuration or input files; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StoreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kNounPlaceholder = "[noun]";
inline constexpr std::string_view kTurtleInstruction =
    "Provide it in valid Turtle/RDF format, excluding any extra text.";

namespace text {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline std::optional<int> to_int(std::string_view s) {
  if (s.empty() || s.size() > 9) return std::nullopt;
  int v = 0;
  for (const char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    v = v * 10 + (c - '0');
  }
  return v;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes a sibling temp file and renames it over `path`.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw StoreError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out.flush()) throw StoreError("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace text

struct NounEntry {
  std::string label;
  std::string slug;
  int rank = 0;

  bool operator==(const NounEntry&) const = default;
};

// Lowercase ASCII letters and digits; any other run becomes one '-'.
inline std::string slugify(std::string_view label) {
  std::string out;
  bool dash = false;
  for (const char ch : label) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      if (dash && !out.empty()) out += '-';
      dash = false;
      out += static_cast<char>(std::tolower(c));
    } else {
      dash = true;
    }
  }
  return out;
}

inline std::vector<NounEntry> parse_nouns(std::string_view content) {
  std::vector<NounEntry> nouns;
  std::set<std::string> seen;
  for (const auto raw : text::split(content, '\n')) {
    const auto line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    NounEntry entry{std::string(line), slugify(line), static_cast<int>(nouns.size()) + 1};
    if (entry.slug.empty()) throw ConfigError("noun '" + entry.label + "' has an empty slug");
    if (!seen.insert(entry.slug).second) throw ConfigError("duplicate noun slug '" + entry.slug + "'");
    nouns.push_back(std::move(entry));
  }
  return nouns;
}

inline std::vector<NounEntry> load_nouns(const std::filesystem::path& path) {
  return parse_nouns(text::read_file(path));
}

struct PromptTemplate {
  int base_id = 1;
  int variant_id = 0;
  std::string text;
  bool canonical = false;  // reference wording rather than an authored variant
};

inline void validate_template(const PromptTemplate& t) {
  const auto first = t.text.find(kNounPlaceholder);
  if (first == std::string::npos) {
    throw ConfigError("template " + std::to_string(t.base_id) + "/" + std::to_string(t.variant_id) +
                      " has no [noun] placeholder");
  }
  if (t.text.find(kNounPlaceholder, first + 1) != std::string::npos) {
    throw ConfigError("template " + std::to_string(t.base_id) + "/" + std::to_string(t.variant_id) +
                      " has more than one [noun] placeholder");
  }
}

// Lines of `base <TAB> variant <TAB> origin <TAB> template`; '#' starts a comment.
inline std::vector<PromptTemplate> parse_templates(std::string_view content) {
  std::vector<PromptTemplate> out;
  std::set<std::pair<int, int>> seen;
  std::size_t lineno = 0;
  for (const auto raw : text::split(content, '\n')) {
    ++lineno;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (text::trim(line).empty() || text::trim(line).front() == '#') continue;
    const auto cols = text::split(line, '\t');
    const auto where = "prompt template line " + std::to_string(lineno);
    if (cols.size() != 4) throw ConfigError(where + ": expected 4 tab-separated columns");
    const auto base = text::to_int(cols[0]);
    const auto variant = text::to_int(cols[1]);
    if (!base || !variant) throw ConfigError(where + ": ids must be non-negative integers");
    if (cols[2] != "canonical" && cols[2] != "authored") {
      throw ConfigError(where + ": origin must be 'canonical' or 'authored'");
    }
    PromptTemplate t{*base, *variant, std::string(cols[3]), cols[2] == "canonical"};
    validate_template(t);
    if (!seen.emplace(t.base_id, t.variant_id).second) throw ConfigError(where + ": duplicate ids");
    out.push_back(std::move(t));
  }
  return out;
}

inline std::vector<PromptTemplate> load_templates(const std::filesystem::path& path) {
  return parse_templates(text::read_file(path));
}

struct PromptKey {
  int base_id = 1;
  int variant_id = 0;
  bool turtle = false;  // the Turtle instruction suffix was appended

  // b<base>-v<variant>-<t|n>, also used as a file stem.
  std::string str() const {
    return "b" + std::to_string(base_id) + "-v" + std::to_string(variant_id) + (turtle ? "-t" : "-n");
  }

  static std::optional<PromptKey> parse(std::string_view s) {
    const auto parts = text::split(s, '-');
    if (parts.size() != 3 || parts[0].size() < 2 || parts[0][0] != 'b' || parts[1].size() < 2 ||
        parts[1][0] != 'v' || (parts[2] != "t" && parts[2] != "n")) {
      return std::nullopt;
    }
    const auto b = text::to_int(parts[0].substr(1));
    const auto v = text::to_int(parts[1].substr(1));
    if (!b || !v) return std::nullopt;
    return PromptKey{*b, *v, parts[2] == "t"};
  }

  auto operator<=>(const PromptKey&) const = default;
  bool operator==(const PromptKey&) const = default;
};

struct ExpandedPrompt {
  PromptKey key;
  std::string text;
};

inline std::string instantiate(const PromptTemplate& t, std::string_view label) {
  std::string out = t.text;
  const auto at = out.find(kNounPlaceholder);
  if (at != std::string::npos) out.replace(at, kNounPlaceholder.size(), label);
  return out;
}

// Every template with and without the Turtle instruction, in template order.
inline std::vector<ExpandedPrompt> expand_prompts(const NounEntry& noun,
                                                  const std::vector<PromptTemplate>& templates) {
  std::vector<ExpandedPrompt> out;
  out.reserve(templates.size() * 2);
  for (const auto& t : templates) {
    validate_template(t);
    const std::string base = instantiate(t, noun.label);
    out.push_back({PromptKey{t.base_id, t.variant_id, false}, base});
    out.push_back({PromptKey{t.base_id, t.variant_id, true}, base + " " + std::string(kTurtleInstruction)});
  }
  return out;
}

// Store fields never hold raw tabs or newlines: backslash, LF, CR and TAB
// are written as \\, \n, \r and \t.
inline std::string tsv_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (const char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string tsv_unescape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\' || i + 1 == s.size()) {
      out += s[i];
      continue;
    }
    switch (s[++i]) {
      case '\\': out += '\\'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      case 't': out += '\t'; break;
      default:
        out += '\\';
        out += s[i];
    }
  }
  return out;
}

inline std::string utc_timestamp(std::chrono::system_clock::time_point tp) {
  const std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// One stored answer. prompt_text and response_text are kept in escaped
// form; harvesting undoes the escaping.
struct ResponseRecord {
  std::string noun_slug;
  PromptKey key;
  std::string prompt_text;
  std::string response_text;
  std::string model_id;
  std::string timestamp;

  std::string id() const { return noun_slug + "/" + key.str(); }

  static ResponseRecord from_raw(std::string noun_slug, PromptKey key, std::string_view prompt,
                                 std::string_view response, std::string model_id,
                                 std::string timestamp) {
    return ResponseRecord{std::move(noun_slug), key, tsv_escape(prompt), tsv_escape(response),
                          std::move(model_id), std::move(timestamp)};
  }

  bool operator==(const ResponseRecord&) const = default;
};

inline constexpr std::string_view kStoreHeader =
    "noun_slug\tbase_id\tvariant_id\tturtle_flag\tprompt_text\tresponse_text\tmodel_id\ttimestamp";

inline std::string format_record(const ResponseRecord& r) {
  const std::string_view fields[] = {r.noun_slug, r.prompt_text, r.response_text, r.model_id,
                                     r.timestamp};
  for (const auto f : fields) {
    if (f.find_first_of("\t\n\r") != std::string_view::npos) {
      throw StoreError("record " + r.id() + " holds an unescaped tab or newline");
    }
  }
  return r.noun_slug + "\t" + std::to_string(r.key.base_id) + "\t" + std::to_string(r.key.variant_id) +
         "\t" + (r.key.turtle ? "1" : "0") + "\t" + r.prompt_text + "\t" + r.response_text + "\t" +
         r.model_id + "\t" + r.timestamp + "\n";
}

struct StoreDiagnostic {
  std::size_t line = 0;
  std::string message;
};

struct StoreContents {
  std::vector<ResponseRecord> records;
  std::vector<StoreDiagnostic> diagnostics;
};

// Malformed rows are reported and skipped. A wrong header is fatal.
inline StoreContents parse_store(std::string_view content) {
  StoreContents out;
  auto lines = text::split(content, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) return out;
  if (lines.front() != kStoreHeader) throw StoreError("store header mismatch");
  std::set<std::pair<std::string, PromptKey>> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    const auto cols = text::split(lines[i], '\t');
    if (cols.size() != 8) {
      out.diagnostics.push_back({lineno, "expected 8 columns, found " + std::to_string(cols.size())});
      continue;
    }
    const auto base = text::to_int(cols[1]);
    const auto variant = text::to_int(cols[2]);
    if (!base || !variant || (cols[3] != "0" && cols[3] != "1") || cols[0].empty()) {
      out.diagnostics.push_back({lineno, "malformed key columns"});
      continue;
    }
    ResponseRecord r{std::string(cols[0]), PromptKey{*base, *variant, cols[3] == "1"},
                     std::string(cols[4]), std::string(cols[5]), std::string(cols[6]),
                     std::string(cols[7])};
    if (!seen.emplace(r.noun_slug, r.key).second) {
      out.diagnostics.push_back({lineno, "duplicate key " + r.id()});
      continue;
    }
    out.records.push_back(std::move(r));
  }
  return out;
}

inline StoreContents load_store(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StoreError("cannot open store " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_store(ss.str());
}

// Single owner of the append handle; append() is safe to call from workers.
class StoreWriter {
 public:
  explicit StoreWriter(const std::filesystem::path& path) {
    const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    out_.open(path, std::ios::binary | std::ios::app);
    if (!out_) throw StoreError("cannot open store " + path.string() + " for writing");
    if (fresh) out_ << kStoreHeader << '\n';
    out_.flush();
  }

  void append(const ResponseRecord& r) {
    const std::string row = format_record(r);
    std::lock_guard lock(mu_);
    out_ << row;
    out_.flush();
  }

 private:
  std::mutex mu_;
  std::ofstream out_;
};

inline void write_store(const std::filesystem::path& path, const std::vector<ResponseRecord>& records) {
  std::filesystem::remove(path);
  StoreWriter w(path);
  for (const auto& r : records) w.append(r);
}

}  // namespace modlforge
