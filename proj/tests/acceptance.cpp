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

// Acceptance suite: one PASS/FAIL line per criterion, each with its time
// budget. Exits non-zero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "modlforge/cli.hpp"
#include "test_support.hpp"

namespace modlforge {
namespace {

namespace t = testing;

struct Verdict {
  bool ok = true;
  std::string detail;

  void check(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<Verdict()> run;
};

int cli(std::vector<std::string> args, std::string* out = nullptr) {
  std::ostringstream o, e;
  const int code = run_cli(args, o, e);
  if (out) *out = o.str();
  return code;
}

std::vector<std::string> base_args(const fs::path& out) {
  return {"--nouns", t::data_file("nouns.txt").string(), "--prompts", t::data_file("prompts.tsv").string(),
          "--out", out.string()};
}

std::vector<std::string> with(std::vector<std::string> head, const std::vector<std::string>& tail) {
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

std::map<std::string, std::string> library_files(const fs::path& modl) {
  std::map<std::string, std::string> files;
  files["index.ttl"] = t::slurp(modl / "index.ttl");
  for (const auto& f : fs::directory_iterator(modl / "patterns")) {
    files["patterns/" + f.path().filename().string()] = t::slurp(f.path());
  }
  return files;
}

std::vector<std::pair<std::string, std::string>> corpus() {
  std::vector<fs::path> paths;
  for (const auto& e : fs::directory_iterator(t::fixture("repair_corpus"))) {
    if (e.path().extension() == ".txt") paths.push_back(e.path());
  }
  std::sort(paths.begin(), paths.end());
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& p : paths) out.emplace_back(p.filename().string(), t::slurp(p));
  return out;
}

Verdict prompt_arithmetic() {
  Verdict v;
  t::TempDir dir("acc1");
  std::string one, all;
  v.check(cli(with({"prompts", "--noun", "air"}, base_args(dir / "out")), &one) == 0, "prompts --noun air failed");
  v.check(cli(with({"prompts"}, base_args(dir / "out")), &all) == 0, "prompts failed");
  auto keys = [](const std::string& s) {
    std::set<std::string> k;
    std::size_t rows = 0;
    std::istringstream in(s);
    for (std::string line; std::getline(in, line); ++rows) k.insert(line.substr(0, line.find('\t', line.find('\t') + 1)));
    return std::make_pair(rows, k.size());
  };
  const auto [rows1, unique1] = keys(one);
  const auto [rows_all, unique_all] = keys(all);
  v.check(rows1 == 80 && unique1 == 80, "air: " + std::to_string(rows1) + " rows, " + std::to_string(unique1) + " unique");
  v.check(rows_all == 8320 && unique_all == 8320,
          "all nouns: " + std::to_string(rows_all) + " rows, " + std::to_string(unique_all) + " unique");
  if (v.ok) v.detail = "80 unique prompts for air, 8320 for 104 nouns";
  return v;
}

Verdict air_fixture() {
  Verdict v;
  t::TempDir dir("acc2");
  const auto store = t::data_file("fixtures/air_store.tsv").string();
  v.check(cli(with({"build", "--store", store}, base_args(dir / "a"))) == 0, "first build failed");
  v.check(cli(with({"build", "--store", store}, base_args(dir / "b"))) == 0, "second build failed");
  if (!v.ok) return v;
  const std::string pattern = t::slurp(dir / "a/modl/patterns/air.ttl");
  const auto tuples = extract_tuples(parse_turtle(pattern).graph).tuples;
  const std::string ns = "https://example.org/modl/patterns/air#";
  auto has = [&](const std::string& r) {
    return std::any_of(tuples.begin(), tuples.end(), [&](const PropertyTuple& x) {
      return x.property == ns + "hasHumidity" && x.domain == ns + "Air" && x.range == r;
    });
  };
  v.check(has(ns + "Humidity"), "missing (hasHumidity, Air, Humidity)");
  v.check(has(vocab::xsd("float")), "missing (hasHumidity, Air, xsd:float)");
  v.check(library_files(dir / "a/modl") == library_files(dir / "b/modl"), "runs differ");
  if (v.ok) v.detail = "hasHumidity ranges Humidity and xsd:float; " + std::to_string(tuples.size()) + " tuples; runs identical";
  return v;
}

Verdict repair_corpus() {
  Verdict v;
  const auto docs = corpus();
  std::size_t good = 0, monotone = 0;
  for (const auto& [name, doc] : docs) {
    const auto record = ResponseRecord{"corpus", {}, "", doc, "", ""};
    const auto h = harvest_response(record);
    if (h.report.status != RepairStatus::unusable) ++good;
    bool mono = true;
    for (const auto& c : extract_candidates(doc)) {
      const auto r = repair(c.text);
      mono = mono && parse_turtle(r.text).graph.size() >= parse_turtle(c.text).graph.size();
    }
    monotone += mono;
    if (!mono) v.check(false, name + " lost triples");
  }
  const double rate = docs.empty() ? 0 : 100.0 * static_cast<double>(good) / static_cast<double>(docs.size());
  v.check(docs.size() >= 40, "corpus has only " + std::to_string(docs.size()) + " documents");
  v.check(rate >= 90.0, "clean/repaired rate " + std::to_string(rate) + "%");
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu/%zu clean or repaired (%.1f%%), monotone %zu/%zu", good, docs.size(), rate,
                monotone, docs.size());
  if (v.ok) v.detail = buf;
  return v;
}

std::string mutate(std::string s, std::mt19937_64& rng) {
  static const char* junk[] = {".", ";", ",", "\"", "<", ">", "[", "]", "(", "#", "@prefix", "_:", "^^", "\"\"\"",
                               "\\", ":", "\n", "'", "a", "@base <x> ."};
  const int edits = 1 + static_cast<int>(rng() % 4);
  for (int i = 0; i < edits; ++i) {
    const std::size_t at = s.empty() ? 0 : rng() % (s.size() + 1);
    switch (rng() % 3) {
      case 0: s.insert(at, junk[rng() % std::size(junk)]); break;
      case 1: if (at < s.size()) s.erase(at, 1 + rng() % 12); break;
      default: if (at < s.size()) s.insert(rng() % (s.size() + 1), s.substr(at, 1 + rng() % 20)); break;
    }
  }
  return s;
}

Verdict parser_properties() {
  Verdict v;
  t::RandomGraphs gen(2024);
  std::size_t round_trips = 0;
  for (int i = 0; i < 1000; ++i) {
    const Graph g = gen.graph(8);
    ParseOptions o;
    o.skolemize = false;
    o.mode = ParseMode::strict;
    const auto back = parse_turtle(serialize_turtle(g), o);
    const bool same = back.ok() && back.graph.same_triples(g);
    round_trips += same;
    v.check(same, "round-trip " + std::to_string(i) + " differs");
  }

  std::vector<std::string> fixtures;
  std::size_t matched = 0, fixtures_total = 0;
  std::istringstream counts(t::slurp(t::fixture("turtle/reference_counts.tsv")));
  for (std::string line; std::getline(counts, line);) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    const std::string file = line.substr(0, tab);
    const std::size_t want = std::stoul(line.substr(tab + 1));
    fixtures.push_back(t::slurp(t::fixture("turtle/" + file)));
    const auto out = parse_turtle(fixtures.back(), ParseMode::strict);
    ++fixtures_total;
    matched += out.ok() && out.graph.size() == want;
    v.check(out.ok() && out.graph.size() == want, file + " count differs from reference");
  }
  v.check(fixtures_total == 20, std::to_string(fixtures_total) + " reference fixtures");

  std::mt19937_64 rng(99);
  const std::string alphabet = "@prefix:<>\"'#._-[](),;^ \n\tabcxyz019eE+\\u";
  std::size_t survived = 0;
  for (int i = 0; i < 10000; ++i) {
    std::string input;
    if (i % 2 == 0) {
      input = mutate(fixtures[rng() % fixtures.size()], rng);
    } else {
      input.resize(rng() % 160);
      for (auto& c : input) c = rng() % 4 == 0 ? static_cast<char>(rng() % 256) : alphabet[rng() % alphabet.size()];
    }
    try {
      const auto out = parse_turtle(input, ParseMode::recover);
      bool ok = !out.aborted;
      for (const auto& d : out.diagnostics) ok = ok && d.skip_begin <= d.skip_end && d.skip_end <= input.size();
      survived += ok;
      v.check(ok, "fuzz input " + std::to_string(i) + " aborted");
    } catch (const std::exception& e) {
      v.check(false, "fuzz input " + std::to_string(i) + " threw: " + e.what());
    }
  }
  if (v.ok) {
    v.detail = std::to_string(round_trips) + "/1000 round-trips, " + std::to_string(survived) +
               "/10000 fuzz inputs recovered, " + std::to_string(matched) + "/20 reference counts";
  }
  return v;
}

Verdict voting_properties() {
  Verdict v;
  t::RandomTuples gen(7);
  std::size_t fixtures = 0;
  for (int f = 0; f < 100; ++f, ++fixtures) {
    const auto lists = gen.lists(1 + gen.pick(10), 10);
    // Set union of per-response tuple sets, independent of vote().
    std::set<std::tuple<std::string, std::string, std::string>> uni;
    for (const auto& l : lists) {
      for (const auto& x : l) uni.insert(x.key());
    }
    const auto one = vote(lists, 1);
    std::set<std::tuple<std::string, std::string, std::string>> got;
    for (const auto& x : one) got.insert(x.key());
    v.check(got == uni, "fixture " + std::to_string(f) + ": threshold-1 output is not the union");
    v.check(one == t::brute_force_votes(lists, 1), "fixture " + std::to_string(f) + ": votes differ from brute force");
    for (int th = 1; th <= 5; ++th) {
      const auto lo = vote(lists, th);
      for (const auto& x : vote(lists, th + 1)) {
        const bool in = std::any_of(lo.begin(), lo.end(), [&](const PropertyTuple& y) { return y.key() == x.key(); });
        v.check(in, "fixture " + std::to_string(f) + ": threshold " + std::to_string(th + 1) + " adds a tuple");
      }
    }
    // Repeating every tuple inside its response must not change any vote.
    auto doubled = lists;
    for (auto& l : doubled) {
      const auto copy = l;
      l.insert(l.end(), copy.begin(), copy.end());
      l.insert(l.end(), copy.begin(), copy.end());
    }
    v.check(vote(doubled, 1) == one, "fixture " + std::to_string(f) + ": intra-response repeats changed votes");
  }
  if (v.ok) v.detail = std::to_string(fixtures) + " fixtures: union, brute-force votes, monotone t=1..5, dedup";
  return v;
}

Verdict individual_stripping() {
  Verdict v;
  std::map<std::string, std::map<std::string, std::string>> labels;
  const std::string table = t::slurp(t::fixture("strip/labels.tsv"));
  std::istringstream in(table);
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    const auto a = line.find('\t'), b = line.find('\t', a + 1);
    labels[line.substr(0, a)][line.substr(a + 1, b - a - 1)] = line.substr(b + 1);
  }
  std::size_t declarations = 0, kept = 0, instance_triples = 0;
  for (const auto& [file, roles] : labels) {
    ParseOptions o;
    o.skolemize = false;
    const Graph g = parse_turtle(t::slurp(t::fixture("strip/" + file)), o).graph;
    const Graph s = strip_individuals(g);
    auto role = [&](const Term& x) {
      const auto it = roles.find(x.is_blank() ? "_:" + x.value : x.value);
      return it == roles.end() ? std::string() : it->second;
    };
    for (const auto& tr : s) instance_triples += role(tr.subject) == "individual" || role(tr.object) == "individual";
    for (const auto& tr : g) {
      if (tr.predicate.value == vocab::kType && role(tr.subject) == "schema") {
        ++declarations;
        kept += s.contains(tr);
      }
    }
  }
  v.check(instance_triples == 0, std::to_string(instance_triples) + " instance triples survived");
  v.check(declarations > 0 && kept == declarations,
          std::to_string(kept) + "/" + std::to_string(declarations) + " declarations kept");
  if (v.ok) {
    v.detail = std::to_string(labels.size()) + " fixtures: 0 instance triples, " + std::to_string(kept) + "/" +
               std::to_string(declarations) + " declarations kept";
  }
  return v;
}

Verdict query_soundness() {
  Verdict v;
  t::TempDir dir("acc7");
  const auto patterns = dir / "patterns";
  t::write_random_library(patterns, 77, 10);
  const auto index = build_index(patterns, LibraryMeta{}).index;
  v.check(index.entries.size() == 10, "library has " + std::to_string(index.entries.size()) + " patterns");
  std::mt19937_64 rng(5);
  const std::vector<std::string> words = {"Air", "Chair", "Water", "Tree", "Book", "Humidity", "Leg", "Seat",
                                          "Material", "Person", "hasHumidity", "madeOf", "locatedIn", "hasPart",
                                          "ownedBy", "humidityLevel", "partOf", "Zebra", "qqq"};
  std::size_t agreed = 0, hits = 0;
  for (int i = 0; i < 50; ++i) {
    std::string q = words[rng() % words.size()];
    if (rng() % 2) {
      const std::size_t from = rng() % q.size();
      q = q.substr(from, 1 + rng() % (q.size() - from));
    }
    for (auto& c : q) {
      if (rng() % 3 == 0) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    bool same;
    if (i % 2 == 0) {
      const auto got = query_by_class(index, q);
      same = got == t::scan_class_query(patterns, q);
      hits += !got.empty();
    } else {
      const auto got = query_by_property(index, q);
      const auto want = t::scan_property_query(patterns, q);
      same = got.size() == want.size();
      hits += !got.empty();
      for (std::size_t k = 0; same && k < got.size(); ++k) {
        same = got[k].pattern_iri == want[k].first && got[k].tuples == want[k].second;
      }
    }
    agreed += same;
    v.check(same, "query '" + q + "' differs from the scan oracle");
  }
  if (v.ok) v.detail = std::to_string(agreed) + "/50 queries equal the linear scan over 10 patterns (" +
                      std::to_string(hits) + " with matches)";
  return v;
}

Verdict idempotence() {
  Verdict v;
  t::TempDir dir("acc8");
  const auto store = t::data_file("fixtures/air_store.tsv").string();
  v.check(cli(with({"build", "--store", store, "--jobs", "1"}, base_args(dir / "out"))) == 0, "first build failed");
  const auto first = library_files(dir / "out/modl");
  v.check(cli(with({"build", "--store", store, "--jobs", "8"}, base_args(dir / "out"))) == 0, "second build failed");
  v.check(first == library_files(dir / "out/modl"), "patterns or index differ between builds");
  std::size_t stable = 0, candidates = 0;
  for (const auto& [name, doc] : corpus()) {
    for (const auto& c : extract_candidates(doc)) {
      ++candidates;
      const auto once = repair(c.text);
      const auto twice = repair(once.text);
      const bool same = twice.text == once.text && twice.report.steps.empty();
      stable += same;
      v.check(same, name + ": repair is not idempotent");
    }
  }
  if (v.ok) {
    v.detail = std::to_string(first.size()) + " library files identical; repair idempotent on " +
               std::to_string(stable) + "/" + std::to_string(candidates) + " corpus candidates";
  }
  return v;
}

}  // namespace
}  // namespace modlforge

int main() {
  using namespace modlforge;
  const std::vector<Criterion> criteria = {
      {1, "prompt arithmetic", 1, prompt_arithmetic},
      {2, "air fixture reproduction", 5, air_fixture},
      {3, "repair corpus", 10, repair_corpus},
      {4, "parser properties", 60, parser_properties},
      {5, "voting properties", 30, voting_properties},
      {6, "individual stripping", 5, individual_stripping},
      {7, "query soundness", 10, query_soundness},
      {8, "idempotence and determinism", 30, idempotence},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.ok = false;
      v.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_seconds;
    const bool pass = v.ok && in_time;
    failed += !pass;
    std::printf("%s [%d] %s: %s (%.2f s, budget %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                v.detail.c_str(), secs, c.budget_seconds, in_time ? "" : ", over budget");
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
