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

// Command-line front end. Exit codes: 0 success, 1 partial failure, 2
// configuration error.

#pragma once

#include <algorithm>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "modlforge/pipeline.hpp"

namespace modlforge {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;
inline constexpr int kExitConfig = 2;

struct CliFlags {
  std::optional<std::string> config, nouns, prompts, namespaces, store, out, base, endpoint, model;
  std::optional<int> threshold, jobs;
  bool strict_repair = false;
};

// Bundled noun and prompt lists: ./data first, then the installed copy.
inline void default_data_paths(PipelineConfig& c) {
#ifdef MODLFORGE_DATA_DIR
  const fs::path installed = MODLFORGE_DATA_DIR;
  if (!fs::exists(c.nouns)) c.nouns = installed / "nouns.txt";
  if (!fs::exists(c.prompts)) c.prompts = installed / "prompts.tsv";
#else
  (void)c;
#endif
}

inline PipelineConfig resolve_config(const CliFlags& f) {
  PipelineConfig c;
  default_data_paths(c);
  if (f.config) load_config_file(c, *f.config);
  const fs::path cwd = fs::current_path();
  auto set = [&](const char* key, const std::optional<std::string>& v) {
    if (v) apply_setting(c, key, *v, cwd);
  };
  set("nouns", f.nouns);
  set("prompts", f.prompts);
  set("namespaces", f.namespaces);
  set("store", f.store);
  set("out", f.out);
  set("base", f.base);
  set("endpoint", f.endpoint);
  set("model", f.model);
  if (f.threshold) c.threshold = *f.threshold;
  if (f.jobs) c.jobs = static_cast<std::size_t>(std::max(1, *f.jobs));
  if (f.strict_repair) c.repair.enabled = RepairConfig::minimal().enabled;
  validate(c);
  return c;
}

inline int finish(const StageResult& r, std::ostream& err, std::string_view stage) {
  if (r.problems.empty()) return kExitOk;
  err << stage << ": " << r.problems.size() << " problem(s)\n";
  for (const auto& p : r.problems) err << "  " << p << "\n";
  return r.exit_code;
}

inline int cmd_prompts(const PipelineConfig& c, const std::optional<std::string>& noun, std::ostream& out) {
  auto nouns = load_nouns(c.nouns);
  const auto templates = load_templates(c.prompts);
  if (noun) {
    const NounEntry* n = find_noun(nouns, *noun);
    if (!n) throw ConfigError("unknown noun '" + *noun + "'");
    nouns = {*n};
  }
  std::string buffer;
  for (const auto& n : nouns) {
    for (const auto& p : expand_prompts(n, templates)) {
      buffer += n.slug + "\t" + p.key.str() + "\t" + tsv_escape(p.text) + "\n";
    }
  }
  out << buffer;
  return kExitOk;
}

inline int cmd_collect(const PipelineConfig& c, const std::optional<std::string>& noun, std::ostream& out,
                       std::ostream& err) {
  auto nouns = load_nouns(c.nouns);
  if (noun) {
    const NounEntry* n = find_noun(nouns, *noun);
    if (!n) throw ConfigError("unknown noun '" + *noun + "'");
    nouns = {*n};
  }
  HttpChatEndpoint endpoint(c.endpoint.with_environment());
  CollectOptions options;
  options.max_in_flight = c.jobs;
  options.requests_per_second = c.rate;
  options.max_attempts = c.max_attempts;
  options.model_id = c.endpoint.model;
  const auto s = collect(nouns, load_templates(c.prompts), c.store, endpoint, options);
  out << "collect: " << s.written << " new, " << s.skipped_existing << " already stored, " << s.requests
      << " requests, " << s.failures.size() << " failed\n";
  StageResult r;
  for (const auto& f : s.failures) {
    r.problems.push_back(f.id + ": " + f.error + " after " + std::to_string(f.attempts) + " attempts");
  }
  r.exit_code = r.problems.empty() ? kExitOk : kExitPartial;
  return finish(r, err, "collect");
}

inline int cmd_harvest(const PipelineConfig& c, std::ostream& out, std::ostream& err) {
  return finish(run_harvest(c, out), err, "harvest");
}

inline int cmd_consolidate(const PipelineConfig& c, std::ostream& out, std::ostream& err) {
  return finish(run_consolidate(c, load_nouns(c.nouns), out), err, "consolidate");
}

inline int cmd_build(const PipelineConfig& c, std::ostream& out, std::ostream& err) {
  const auto nouns = load_nouns(c.nouns);
  const auto h = run_harvest(c, out);
  const auto k = run_consolidate(c, nouns, out);
  const auto i = run_index(c, out);
  StageResult all;
  for (const auto* r : {&h, &k, &i}) {
    all.problems.insert(all.problems.end(), r->problems.begin(), r->problems.end());
    all.exit_code = std::max(all.exit_code, r->exit_code);
  }
  return finish(all, err, "build");
}

inline int cmd_query(const PipelineConfig& c, const std::string& kind, const std::string& name, std::ostream& out) {
  if (!fs::exists(c.index_file())) throw ConfigError("no library index at " + c.index_file().string() + "; run build first");
  const auto index = load_index(c.index_file(), c.pattern_dir());
  if (kind == "class") {
    for (const auto& iri : query_by_class(index, name)) out << iri << "\n";
  } else {
    for (const auto& m : query_by_property(index, name)) {
      out << m.pattern_iri << "\n";
      for (const auto& t : m.tuples) {
        out << "  " << t.property << "\t" << t.domain << "\t" << t.range << "\t" << t.votes << "\n";
      }
    }
  }
  return kExitOk;
}

// Per-noun usability, repair and vote histograms from the work and library
// directories.
inline int cmd_stats(const PipelineConfig& c, std::ostream& out) {
  struct Row {
    std::size_t responses = 0, usable = 0;
    std::map<std::string, std::size_t> status, rules;
  };
  std::map<std::string, Row> rows;
  const std::string content = text::read_file(c.repairs_file());
  for (const auto line : text::split(content, '\n')) {
    if (text::trim(line).empty()) continue;
    const auto j = nlohmann::json::parse(line);
    Row& r = rows[j.at("noun").get<std::string>()];
    ++r.responses;
    const std::string status = j.at("status");
    ++r.status[status];
    if (status != "unusable") ++r.usable;
    for (const auto& step : j.at("rules")) ++r.rules[step.at("rule").get<std::string>()];
  }
  auto hist = [](const std::map<std::string, std::size_t>& m) {
    std::string s;
    for (const auto& [k, n] : m) s += (s.empty() ? "" : " ") + k + ":" + std::to_string(n);
    return s.empty() ? std::string("-") : s;
  };
  out << "noun\tresponses\tusable\tclean\trepaired\tunusable\trules\ttuples\tvotes\n";
  for (const auto& [noun, r] : rows) {
    std::size_t tuples = 0;
    std::map<std::string, std::size_t> votes;
    const fs::path report = c.report_dir() / (noun + ".json");
    if (fs::exists(report)) {
      const auto j = nlohmann::json::parse(text::read_file(report));
      for (const auto& t : j.value("tuples", nlohmann::json::array())) {
        ++tuples;
        ++votes[std::to_string(t.at("votes").get<int>())];
      }
    }
    auto count = [&](const char* k) {
      auto it = r.status.find(k);
      return it == r.status.end() ? std::size_t{0} : it->second;
    };
    out << noun << "\t" << r.responses << "\t" << r.usable << "\t" << count("clean") << "\t" << count("repaired")
        << "\t" << count("unusable") << "\t" << hist(r.rules) << "\t" << tuples << "\t" << hist(votes) << "\n";
  }
  return kExitOk;
}

// `args` excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"modl-forge: LLM responses to a library of ontology micropatterns", "modlforge"};
  app.set_version_flag("--version", std::string(MODLFORGE_VERSION));
  app.require_subcommand(1);
  app.fallthrough();

  CliFlags f;
  app.add_option("--config", f.config, "key = value configuration file");
  app.add_option("--nouns", f.nouns, "noun list, one per line");
  app.add_option("--prompts", f.prompts, "prompt template table");
  app.add_option("--namespaces", f.namespaces, "prefix table for missing-prefix repair");
  app.add_option("--store", f.store, "TSV response store");
  app.add_option("--out", f.out, "output directory (work/ and modl/)");
  app.add_option("--base", f.base, "library base IRI");
  app.add_option("--threshold", f.threshold, "minimum votes per tuple (>= 1)");
  app.add_option("--jobs", f.jobs, "worker limit");
  app.add_flag("--strict-repair", f.strict_repair, "only rules R1-R3");
  app.add_option("--endpoint", f.endpoint, "chat-completion base URL");
  app.add_option("--model", f.model, "model id sent to the endpoint");

  std::optional<std::string> noun;
  auto* prompts = app.add_subcommand("prompts", "print the expanded prompt battery");
  prompts->add_option("--noun", noun, "a single noun");
  auto* collect_cmd = app.add_subcommand("collect", "fill the store from the chat endpoint");
  collect_cmd->add_option("--noun", noun, "a single noun");
  auto* harvest = app.add_subcommand("harvest", "extract and repair RDF from every stored response");
  auto* consolidate = app.add_subcommand("consolidate", "build one micropattern per noun from harvested graphs");
  auto* build = app.add_subcommand("build", "harvest, consolidate, annotate and index in one pass");
  std::string kind, name;
  auto* query = app.add_subcommand("query", "find patterns by class or property name");
  query->add_option("kind", kind, "class | property")->required()->check(CLI::IsMember({"class", "property"}));
  query->add_option("name", name, "name or substring")->required();
  auto* stats = app.add_subcommand("stats", "per-noun usability, repair and vote histograms");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    const PipelineConfig c = resolve_config(f);
    if (prompts->parsed()) return cmd_prompts(c, noun, out);
    if (collect_cmd->parsed()) return cmd_collect(c, noun, out, err);
    if (harvest->parsed()) return cmd_harvest(c, out, err);
    if (consolidate->parsed()) return cmd_consolidate(c, out, err);
    if (build->parsed()) return cmd_build(c, out, err);
    if (query->parsed()) return cmd_query(c, kind, name, out);
    if (stats->parsed()) return cmd_stats(c, out);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const StoreError& e) {
    err << "store error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitPartial;
  }
  return kExitConfig;
}

}  // namespace modlforge
