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

#include <gtest/gtest.h>

#include <filesystem>

#include "modlforge/harvest.hpp"
#include "test_support.hpp"

namespace modlforge {
namespace {

const std::string kAirTurtle =
    "@prefix air: <http://example.org/air#> .\n"
    "@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n"
    "@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .\n"
    "air:Air a rdfs:Class .\n"
    "air:Humidity a rdfs:Class .\n"
    "air:hasHumidity rdfs:domain air:Air ;\n"
    "    rdfs:range air:Humidity , xsd:float .\n";

std::vector<std::string> corpus() {
  std::vector<std::string> docs;
  std::vector<std::filesystem::path> paths;
  for (const auto& e : std::filesystem::directory_iterator(testing::fixture("repair_corpus"))) {
    if (e.path().extension() == ".txt") paths.push_back(e.path());
  }
  std::sort(paths.begin(), paths.end());
  for (const auto& p : paths) docs.push_back(testing::slurp(p));
  return docs;
}

std::size_t triples(std::string_view s) { return parse_turtle(s).graph.size(); }

TEST(ExtractCandidates, FencedBlockInsideProse) {
  const std::string response = "Here is the ontology:\n\n```turtle\n" + kAirTurtle + "```\nHope this helps.";
  const auto c = extract_candidates(response);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].method, CandidateMethod::fenced);
  EXPECT_EQ(c[0].text + "\n", kAirTurtle);
  EXPECT_EQ(response.substr(c[0].begin, c[0].end - c[0].begin), c[0].text);
}

TEST(ExtractCandidates, EmptyInput) {
  EXPECT_TRUE(extract_candidates("").empty());
  EXPECT_TRUE(extract_candidates("  \n\t").empty());
}

// Each case is assembled as before + body + after, so the expected span is
// known independently of the extractor.
struct SpanCase {
  std::string name;
  std::string before;
  std::string body;
  std::string after;
  CandidateMethod method;
};

std::vector<SpanCase> span_cases() {
  const std::string ttl = "@prefix ex: <http://ex.org/> .\nex:A a ex:B .";
  const std::string esc = "@prefix ex: <http://ex.org/> .\\nex:A a ex:B .";
  const std::string sparql = "PREFIX ex: <http://ex.org/>\nex:A a ex:B .";
  using M = CandidateMethod;
  return {
      {"turtle fence", "Intro.\n```turtle\n", ttl, "\n```\nOutro.", M::fenced},
      {"ttl fence", "```ttl\n", ttl, "\n```", M::fenced},
      {"bare fence", "Text\n```\n", ttl, "\n```\n", M::fenced},
      {"rdf fence", "```rdf\n", ttl, "\n```\nThanks!", M::fenced},
      {"indented fence", "  ```turtle\n", ttl, "\n  ```", M::fenced},
      {"unclosed fence", "Sure:\n```turtle\n", ttl, "", M::fenced},
      {"fence with trailing blank lines", "```turtle\n", ttl + "\n", "\n```", M::fenced},
      {"escaped fence", "Here:\\n```turtle\\n", esc, "\\n```\\nDone.", M::fenced},
      {"escaped bare fence", "```\\n", esc, "\\n```", M::fenced},
      {"crlf-free fence with language and spaces", "```  turtle  \n", ttl, "\n```", M::fenced},
      {"prefix anchored", "Sure! Here it is.\n\n", ttl, "\n\nLet me know if you need more!", M::prefix_anchored},
      {"prefix anchored runs to last dotted line", "Hi\n", ttl + "\nThat is all.", "\nbye", M::prefix_anchored},
      {"prefix anchored at start", "", ttl, "\nThat's all", M::prefix_anchored},
      {"prefix anchored sparql", "Ontology:\n", sparql, "\nEnd of answer", M::prefix_anchored},
      {"prefix anchored escaped", "Answer:\\n", esc, "\\nBye", M::prefix_anchored},
      {"prefix anchored indented", "Text\n", "   " + ttl, "\nmore text", M::prefix_anchored},
      {"prefix anchored no trailing prose", "Intro line\n", ttl, "", M::prefix_anchored},
      {"prefix anchored trailing text without dot", "x\n", ttl, "\nno terminator here", M::prefix_anchored},
      {"whole text", "", "ex:A a ex:B .", "", M::whole_text},
      {"whole text prose", "", "There is no RDF here, only words.", "", M::whole_text},
      {"whole text single line turtle", "", "ex:A a ex:B . ex:C a ex:D .", "", M::whole_text},
      {"whole text lowercase prefix word", "", "prefixes are missing", "", M::whole_text},
  };
}

TEST(ExtractCandidates, HandLabeledSpans) {
  const auto cases = span_cases();
  ASSERT_GE(cases.size(), 20u);
  for (const auto& c : cases) {
    const std::string response = c.before + c.body + c.after;
    const auto got = extract_candidates(response);
    ASSERT_EQ(got.size(), 1u) << c.name;
    EXPECT_EQ(got[0].method, c.method) << c.name;
    EXPECT_EQ(got[0].begin, c.before.size()) << c.name;
    EXPECT_EQ(got[0].end, c.before.size() + c.body.size()) << c.name;
    EXPECT_EQ(got[0].text, c.body) << c.name;
  }
}

TEST(ExtractCandidates, MultipleFencesAreDisjoint) {
  const std::string response = "A\n```turtle\nex:a ex:b ex:c .\n```\nB\n```\nex:d ex:e ex:f .\n```\n";
  const auto c = extract_candidates(response);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_LE(c[0].end, c[1].begin);
  EXPECT_EQ(c[0].text, "ex:a ex:b ex:c .");
  EXPECT_EQ(c[1].text, "ex:d ex:e ex:f .");
}

TEST(Repair, EscapedNewlinesAreRestored) {
  const std::string flat = tsv_escape(kAirTurtle);
  ASSERT_EQ(flat.find('\n'), std::string::npos);
  const auto r = repair(flat);
  ASSERT_FALSE(r.report.steps.empty());
  EXPECT_EQ(r.report.steps[0].rule, "R1");
  EXPECT_EQ(r.report.status, RepairStatus::repaired);
  EXPECT_EQ(r.text, kAirTurtle);
  EXPECT_EQ(triples(r.text), 5u);
}

TEST(Repair, ValidTurtleIsLeftAlone) {
  const auto r = repair(kAirTurtle);
  EXPECT_TRUE(r.report.steps.empty());
  EXPECT_EQ(r.report.status, RepairStatus::clean);
  EXPECT_EQ(r.text, kAirTurtle);
}

TEST(Repair, MissingWellKnownPrefixIsInjected) {
  const std::string doc = "@prefix ex: <http://ex.org/> .\nex:A a rdfs:Class .\nex:p rdfs:range xsd:string .\n";
  const auto before = parse_turtle(doc);
  EXPECT_EQ(before.diagnostics.size(), 2u);
  const auto r = repair(doc);
  ASSERT_EQ(r.report.steps.size(), 1u);
  EXPECT_EQ(r.report.steps[0].rule, "R4");
  const auto after = parse_turtle(r.text);
  EXPECT_EQ(after.diagnostics.size(), 0u);
  EXPECT_EQ(after.graph.size(), 2u);
}

TEST(Repair, UnknownPrefixIsNotInvented) {
  const auto r = repair("myont:A a myont:B .");
  EXPECT_EQ(r.report.status, RepairStatus::unusable);
  EXPECT_TRUE(r.report.steps.empty() || r.report.steps[0].rule != "R4");
}

TEST(Repair, CommentSwallowingStatementsIsSplit) {
  const std::string doc =
      "@prefix ex: <http://ex.org/> .\n"
      "@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n"
      "# Classes ex:Air a rdfs:Class . ex:Gas a rdfs:Class .\n"
      "# Properties ex:has rdfs:domain ex:Air ;\n"
      "  rdfs:range ex:Gas .\n";
  EXPECT_EQ(triples(doc), 0u);
  const auto r = repair(doc);
  ASSERT_EQ(r.report.steps.size(), 1u);
  EXPECT_EQ(r.report.steps[0].rule, "R3");
  EXPECT_EQ(r.report.steps[0].location, "line 3");
  EXPECT_EQ(triples(r.text), 4u);
  EXPECT_NE(r.text.find("# Classes\nex:Air a rdfs:Class ."), std::string::npos);
}

TEST(Repair, ProseCommentsSurvive) {
  const std::string doc =
      "@prefix ex: <http://ex.org/> .\n"
      "ex:a ex:b ex:c . # see the notes. nothing else here.\n"
      "# ex:Air is the key class, used throughout.\n";
  const auto r = repair(doc);
  EXPECT_EQ(r.report.status, RepairStatus::clean);
  EXPECT_EQ(r.text, doc);
}

TEST(Repair, MissingTerminatorAndDuplicatePrefixes) {
  const std::string doc =
      "@prefix ex: <http://ex.org/> .\n@prefix ex: <http://ex.org/> .\nex:a ex:b ex:c .\nex:d ex:e ex:f # done\n";
  EXPECT_EQ(triples(doc), 1u);
  const auto r = repair(doc);
  ASSERT_EQ(r.report.steps.size(), 1u);
  EXPECT_EQ(r.report.steps[0].rule, "R5");
  EXPECT_EQ(r.text, "@prefix ex: <http://ex.org/> .\nex:a ex:b ex:c .\nex:d ex:e ex:f . # done\n");
  EXPECT_EQ(triples(r.text), 2u);
}

TEST(Repair, ProseAndFenceRemnantsAreStripped) {
  const std::string doc = "Sure, here you go\n```turtle\n" + kAirTurtle + "```\nThese are the classes.\n";
  const auto r = repair(doc);
  ASSERT_EQ(r.report.steps.size(), 1u);
  EXPECT_EQ(r.report.steps[0].rule, "R2");
  EXPECT_EQ(r.text, kAirTurtle);
}

TEST(Repair, RulesCanBeDisabled) {
  const std::string doc = "ex:A a rdfs:Class";
  RepairConfig minimal = RepairConfig::minimal();
  EXPECT_EQ(repair(doc, minimal).report.status, RepairStatus::unusable);
  const auto full = repair(doc);
  EXPECT_EQ(full.report.status, RepairStatus::repaired);
  ASSERT_EQ(full.report.steps.size(), 2u);
  EXPECT_EQ(full.report.steps[0].rule, "R4");
  EXPECT_EQ(full.report.steps[1].rule, "R5");
}

TEST(Repair, CorpusProperties) {
  const auto docs = corpus();
  ASSERT_GE(docs.size(), 40u);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    for (const auto& c : extract_candidates(docs[i])) {
      const auto r = repair(c.text);
      EXPECT_GE(triples(r.text), triples(c.text)) << "doc " << i;
      EXPECT_TRUE(repair(r.text).report.steps.empty()) << "doc " << i << " not idempotent";
      EXPECT_EQ(replay(c.text, r.report), r.text) << "doc " << i;
      if (r.report.status == RepairStatus::clean) {
        EXPECT_EQ(r.text, c.text);
      }
      if (r.report.status == RepairStatus::repaired) {
        EXPECT_FALSE(r.report.steps.empty());
        EXPECT_GE(triples(r.text), 1u);
      }
      if (r.report.status == RepairStatus::unusable) {
        EXPECT_EQ(triples(r.text), 0u);
      }
    }
  }
}

ResponseRecord record(std::string response) {
  return ResponseRecord{"air", PromptKey{1, 0, true}, "p", std::move(response), "m", "t"};
}

TEST(HarvestResponse, FencedValidTurtle) {
  const auto h = harvest_response(record("Here you go:\n```turtle\n" + kAirTurtle + "```\n"));
  ASSERT_TRUE(h.usable());
  EXPECT_EQ(h.graph->size(), 5u);
  EXPECT_EQ(h.report.status, RepairStatus::clean);
  EXPECT_EQ(h.graph->provenance(), "air/b1-v0-t");
}

TEST(HarvestResponse, NoRdfAtAll) {
  const auto h = harvest_response(record("I cannot produce an ontology."));
  EXPECT_FALSE(h.usable());
  EXPECT_EQ(h.report.status, RepairStatus::unusable);
}

TEST(HarvestResponse, LargestCandidateWins) {
  std::string three, seven;
  for (int i = 0; i < 3; ++i) three += "<http://ex.org/a> <http://ex.org/p> <http://ex.org/o" + std::to_string(i) + "> .\n";
  for (int i = 0; i < 7; ++i) seven += "<http://ex.org/b> <http://ex.org/p> <http://ex.org/o" + std::to_string(i) + "> .\n";
  const auto h = harvest_response(record("```\n" + three + "```\ntext\n```\n" + seven + "```\n"));
  ASSERT_TRUE(h.usable());
  EXPECT_EQ(h.graph->size(), 7u);
  EXPECT_EQ(h.candidates, 2u);

  const auto tie = harvest_response(record("```\n" + three + "```\n```\n" + three + "```\n"));
  ASSERT_TRUE(tie.candidate.has_value());
  EXPECT_LT(tie.candidate->begin, 10u);
}

TEST(HarvestResponse, StoredEscapedResponse) {
  const auto stored = ResponseRecord::from_raw("air", PromptKey{1, 0, false}, "prompt",
                                               "Sure!\n```turtle\n" + kAirTurtle + "```\nBye", "m", "t");
  const auto h = harvest_response(stored);
  ASSERT_TRUE(h.usable());
  EXPECT_EQ(h.candidate->method, CandidateMethod::fenced);
  EXPECT_EQ(h.graph->size(), 5u);
  EXPECT_EQ(h.report.status, RepairStatus::repaired);
  EXPECT_EQ(h.report.steps[0].rule, "R1");
}

}  // namespace
}  // namespace modlforge
