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

// Pipeline configuration and the stages behind each CLI subcommand. Every
// stage reads its inputs from disk and replaces its own outputs wholesale.

#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "modlforge/acquisition.hpp"
#include "modlforge/collect.hpp"
#include "modlforge/consolidation.hpp"
#include "modlforge/harvest.hpp"
#include "modlforge/modl.hpp"
#include "modlforge/parallel.hpp"

#ifndef MODLFORGE_VERSION
#define MODLFORGE_VERSION "0.0.0"
#endif

namespace modlforge {

namespace fs = std::filesystem;

struct PipelineConfig {
  fs::path nouns = "data/nouns.txt";
  fs::path prompts = "data/prompts.tsv";
  fs::path namespaces;  // empty: built-in table
  fs::path store = "responses.tsv";
  fs::path out = "out";
  std::string base{kDefaultLibraryBase};
  int threshold = 1;
  bool default_domain = true;
  RepairConfig repair;
  EndpointConfig endpoint;
  std::size_t jobs = default_jobs();
  double rate = 2.0;
  int max_attempts = 4;
  std::string library_version = MODLFORGE_VERSION;

  fs::path work_dir() const { return out / "work"; }
  fs::path modl_dir() const { return out / "modl"; }
  fs::path pattern_dir() const { return modl_dir() / "patterns"; }
  fs::path report_dir() const { return modl_dir() / "reports"; }
  fs::path index_file() const { return modl_dir() / "index.ttl"; }
  fs::path repairs_file() const { return work_dir() / "repairs.jsonl"; }
};

inline bool parse_bool(const std::string& key, std::string_view v) {
  const auto l = text::lower(text::trim(v));
  if (l == "1" || l == "true" || l == "yes" || l == "on") return true;
  if (l == "0" || l == "false" || l == "no" || l == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + std::string(v) + "'");
}

inline int parse_int(const std::string& key, std::string_view v) {
  const auto t = text::trim(v);
  bool negative = !t.empty() && t.front() == '-';
  const auto n = text::to_int(negative ? t.substr(1) : t);
  if (!n) throw ConfigError(key + ": expected an integer, got '" + std::string(v) + "'");
  return negative ? -*n : *n;
}

inline double parse_double(const std::string& key, std::string_view v) {
  try {
    std::size_t used = 0;
    const std::string s(text::trim(v));
    const double d = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return d;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + std::string(v) + "'");
  }
}

// Comma-separated rule ids, e.g. "R1,R2,R3".
inline std::array<bool, 5> parse_rule_set(std::string_view v) {
  std::array<bool, 5> enabled{};
  for (const auto part : text::split(v, ',')) {
    const auto id = text::trim(part);
    if (id.empty()) continue;
    const auto rule = parse_rule_id(id);
    if (!rule) throw ConfigError("rules: unknown rule '" + std::string(id) + "'");
    enabled[static_cast<std::size_t>(*rule)] = true;
  }
  return enabled;
}

// Applies one key=value setting. Relative paths resolve against `dir`.
inline void apply_setting(PipelineConfig& c, const std::string& key, const std::string& value, const fs::path& dir) {
  auto path = [&] { return fs::path(value).is_absolute() ? fs::path(value) : dir / value; };
  if (key == "nouns") c.nouns = path();
  else if (key == "prompts") c.prompts = path();
  else if (key == "namespaces") c.namespaces = path();
  else if (key == "store") c.store = path();
  else if (key == "out") c.out = path();
  else if (key == "base") c.base = value;
  else if (key == "threshold") c.threshold = parse_int(key, value);
  else if (key == "default_domain") c.default_domain = parse_bool(key, value);
  else if (key == "strict_repair") {
    if (parse_bool(key, value)) c.repair.enabled = RepairConfig::minimal().enabled;
  } else if (key == "rules") c.repair.enabled = parse_rule_set(value);
  else if (key == "endpoint") c.endpoint.base_url = value;
  else if (key == "model") c.endpoint.model = value;
  else if (key == "temperature") c.endpoint.temperature = parse_double(key, value);
  else if (key == "jobs") c.jobs = static_cast<std::size_t>(std::max(1, parse_int(key, value)));
  else if (key == "rate") c.rate = parse_double(key, value);
  else if (key == "max_attempts") c.max_attempts = parse_int(key, value);
  else if (key == "library_version") c.library_version = value;
  else throw ConfigError("unknown config key '" + key + "'");
}

// key = value lines; '#' starts a comment line.
inline void load_config_file(PipelineConfig& c, const fs::path& file) {
  const auto content = text::read_file(file);
  const fs::path dir = fs::absolute(file).parent_path();
  std::size_t lineno = 0;
  for (const auto raw : text::split(content, '\n')) {
    ++lineno;
    const auto line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(file.string() + ":" + std::to_string(lineno) + ": expected key = value");
    }
    apply_setting(c, std::string(text::trim(line.substr(0, eq))), std::string(text::trim(line.substr(eq + 1))), dir);
  }
}

inline void validate(PipelineConfig& c) {
  if (c.threshold < 1) throw ConfigError("threshold must be >= 1, got " + std::to_string(c.threshold));
  if (c.max_attempts < 1) throw ConfigError("max_attempts must be >= 1");
  for (fs::path* p : {&c.nouns, &c.prompts, &c.store, &c.out}) *p = fs::absolute(*p).lexically_normal();
  if (!c.namespaces.empty()) {
    c.namespaces = fs::absolute(c.namespaces).lexically_normal();
    c.repair.namespaces = parse_namespace_table(text::read_file(c.namespaces));
  }
}

// Writes into `<target>.next`, then swaps it in place of `target`.
class StagedDirectory {
 public:
  explicit StagedDirectory(fs::path target) : target_(std::move(target)), staging_(target_) {
    staging_ += ".next";
    fs::remove_all(staging_);
    fs::create_directories(staging_);
  }
  const fs::path& path() const { return staging_; }
  void commit() {
    fs::remove_all(target_);
    fs::rename(staging_, target_);
  }

 private:
  fs::path target_;
  fs::path staging_;
};

struct StageResult {
  int exit_code = 0;
  std::vector<std::string> problems;  // affected (noun, prompt-key) pairs and causes
};

inline const NounEntry* find_noun(const std::vector<NounEntry>& nouns, std::string_view name) {
  const std::string want = slugify(name);
  for (const auto& n : nouns) {
    if (n.slug == want) return &n;
  }
  return nullptr;
}

// ---- harvest ---------------------------------------------------------------

inline nlohmann::ordered_json repair_row(const ResponseRecord& r, const HarvestResult& h) {
  nlohmann::ordered_json rules = nlohmann::ordered_json::array();
  for (const auto& s : h.report.steps) {
    rules.push_back({{"rule", s.rule}, {"location", s.location}, {"description", s.description}});
  }
  return {{"noun", r.noun_slug},
          {"prompt_key", r.key.str()},
          {"model_id", r.model_id},
          {"timestamp", r.timestamp},
          {"candidates", h.candidates},
          {"method", h.candidate ? std::string(to_string(h.candidate->method)) : std::string()},
          {"status", std::string(to_string(h.report.status))},
          {"triples_before", h.report.triples_before},
          {"triples_after", h.graph ? h.graph->size() : 0},
          {"rules", rules}};
}

struct HarvestSummary {
  std::size_t records = 0;
  std::size_t usable = 0;
  std::map<std::string, std::size_t> status;
};

inline StageResult run_harvest(const PipelineConfig& c, std::ostream& log, HarvestSummary* summary = nullptr) {
  StageResult result;
  auto store = load_store(c.store);
  for (const auto& d : store.diagnostics) {
    result.problems.push_back("store line " + std::to_string(d.line) + ": " + d.message);
  }
  auto& records = store.records;
  std::sort(records.begin(), records.end(),
            [](const ResponseRecord& a, const ResponseRecord& b) { return a.id() < b.id(); });

  std::vector<HarvestResult> harvested(records.size());
  parallel_for(records.size(), c.jobs, [&](std::size_t i) { harvested[i] = harvest_response(records[i], c.repair); });

  StagedDirectory work(c.work_dir());
  std::string jsonl;
  HarvestSummary s;
  s.records = records.size();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const auto& h = harvested[i];
    jsonl += repair_row(r, h).dump() + "\n";
    ++s.status[std::string(to_string(h.report.status))];
    if (!h.usable()) continue;
    ++s.usable;
    text::write_file_atomic(work.path() / r.noun_slug / (r.key.str() + ".ttl"), serialize_turtle(*h.graph));
  }
  text::write_file_atomic(work.path() / "repairs.jsonl", jsonl);
  work.commit();

  log << "harvest: " << s.records << " responses, " << s.usable << " usable";
  for (const auto& [k, n] : s.status) log << ", " << k << " " << n;
  log << "\n";
  if (s.usable == 0) result.problems.push_back("0 usable responses");
  if (!result.problems.empty()) result.exit_code = 1;
  if (summary) *summary = s;
  return result;
}

// ---- consolidate -----------------------------------------------------------

struct WorkRow {
  std::string noun;
  std::string prompt_key;
  std::string model_id;
  std::string timestamp;
  std::string status;
};

inline std::vector<WorkRow> read_repairs(const PipelineConfig& c) {
  if (!fs::exists(c.repairs_file())) throw ConfigError("no harvest output in " + c.work_dir().string() + "; run harvest first");
  std::vector<WorkRow> out;
  const std::string content = text::read_file(c.repairs_file());
  for (const auto line : text::split(content, '\n')) {
    if (text::trim(line).empty()) continue;
    const auto j = nlohmann::json::parse(line);
    out.push_back({j.at("noun"), j.at("prompt_key"), j.at("model_id"), j.at("timestamp"), j.at("status")});
  }
  return out;
}

inline std::string join(const std::set<std::string>& items, std::string_view sep) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += sep;
    out += s;
  }
  return out;
}

inline StageResult run_consolidate(const PipelineConfig& c, const std::vector<NounEntry>& nouns, std::ostream& log) {
  StageResult result;
  const auto rows = read_repairs(c);
  std::map<std::string, std::vector<const WorkRow*>> by_noun;
  for (const auto& r : rows) by_noun[r.noun].push_back(&r);

  struct Job {
    const NounEntry* noun;
    std::vector<const WorkRow*> rows;
    std::optional<Micropattern> pattern;
    ResponseStats stats;
    std::string error;
  };
  std::vector<Job> jobs;
  for (const auto& [slug, list] : by_noun) {
    const NounEntry* noun = find_noun(nouns, slug);
    if (!noun) {
      result.problems.push_back(slug + ": not in the noun list");
      continue;
    }
    jobs.push_back({noun, list, std::nullopt, {}, {}});
  }

  parallel_for(jobs.size(), c.jobs, [&](std::size_t i) {
    Job& job = jobs[i];
    std::vector<Graph> graphs;
    std::set<std::string> models;
    std::string latest;
    for (const WorkRow* r : job.rows) {
      ++job.stats.total;
      ++job.stats.status[r->status];
      models.insert(r->model_id);
      latest = std::max(latest, r->timestamp);
      const fs::path file = c.work_dir() / r->noun / (r->prompt_key + ".ttl");
      if (r->status == "unusable") continue;
      ParseOptions options;
      options.provenance = r->noun + "/" + r->prompt_key;
      auto parsed = parse_turtle(text::read_file(file), options);
      ++job.stats.usable;
      graphs.push_back(std::move(parsed.graph));
    }
    ConsolidationOptions options;
    options.base = c.base;
    options.threshold = c.threshold;
    options.default_domain_to_key = c.default_domain;
    options.model_id = join(models, " ");
    options.generated_on = latest.substr(0, 10);
    job.pattern = build_micropattern(*job.noun, graphs, options);
    if (job.pattern) {
      LibraryMeta meta{c.base, c.library_version, options.model_id, options.generated_on};
      job.pattern = annotate(std::move(*job.pattern), meta);
    }
  });

  StagedDirectory patterns(c.pattern_dir());
  StagedDirectory reports(c.report_dir());
  std::size_t written = 0;
  for (const auto& job : jobs) {
    const auto& slug = job.noun->slug;
    nlohmann::ordered_json report;
    if (job.pattern) {
      text::write_file_atomic(patterns.path() / (slug + ".ttl"), emit_pattern_turtle(*job.pattern));
      report = report_json(*job.pattern, job.stats, c.threshold);
      report["status"] = "ok";
      ++written;
    } else {
      report = {{"noun", job.noun->label}, {"slug", slug}, {"status", "no-pattern"}, {"threshold", c.threshold},
                {"responses", {{"total", job.stats.total}, {"usable", 0}, {"status", job.stats.status}}}};
      std::set<std::string> keys;
      for (const WorkRow* r : job.rows) keys.insert(r->prompt_key);
      result.problems.push_back(slug + ": no-pattern, 0 usable responses (" + join(keys, ", ") + ")");
    }
    text::write_file_atomic(reports.path() / (slug + ".json"), report.dump(2) + "\n");
  }
  patterns.commit();
  reports.commit();
  log << "consolidate: " << written << " patterns from " << jobs.size() << " nouns (threshold " << c.threshold << ")\n";
  if (written == 0) result.problems.push_back("0 usable responses");
  if (!result.problems.empty()) result.exit_code = 1;
  return result;
}

// ---- index -----------------------------------------------------------------

inline constexpr std::string_view kLibraryNotice =
    "The pattern files in this directory were generated by modl-forge from\n"
    "language-model responses and are provided under the Apache License,\n"
    "Version 2.0 (http://www.apache.org/licenses/LICENSE-2.0), WITHOUT\n"
    "WARRANTIES OR CONDITIONS OF ANY KIND. Review patterns before reuse.\n";

inline StageResult run_index(const PipelineConfig& c, std::ostream& log) {
  StageResult result;
  LibraryMeta meta{c.base, c.library_version, "", ""};
  const auto built = build_index(c.pattern_dir(), meta, c.jobs);
  for (const auto& w : built.warnings) log << "warning: " << w << "\n";
  for (const auto& e : built.excluded) result.problems.push_back("excluded " + e.file + ": " + e.reason);
  text::write_file_atomic(c.index_file(), index_turtle(built.index));

  std::set<std::string> models;
  for (const auto& e : built.index.entries) {
    const auto parsed = parse_turtle(text::read_file(c.pattern_dir() / e.file), ParseMode::strict);
    for (const auto& t : parsed.graph) {
      if (t.predicate.value == ann::kSourceModel) {
        for (const auto part : text::split(t.object.value, ' ')) {
          if (!part.empty()) models.emplace(part);
        }
      }
    }
  }
  nlohmann::ordered_json manifest = {{"name", "modl-forge pattern library"},
                                     {"version", c.library_version},
                                     {"library", built.index.library_iri},
                                     {"model_id", join(models, " ")},
                                     {"noun_count", built.index.entries.size()},
                                     {"excluded", built.excluded.size()}};
  text::write_file_atomic(c.modl_dir() / "manifest.json", manifest.dump(2) + "\n");
  text::write_file_atomic(c.modl_dir() / "LICENSE", kLibraryNotice);
  log << "index: " << built.index.entries.size() << " patterns, " << built.excluded.size() << " excluded\n";
  if (!result.problems.empty()) result.exit_code = 1;
  return result;
}

}  // namespace modlforge
