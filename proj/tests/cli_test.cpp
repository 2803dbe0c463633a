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

#include <cstdlib>
#include <sstream>

#include "modlforge/cli.hpp"
#include "test_support.hpp"

namespace modlforge {
namespace {

using testing::TempDir;
using testing::data_file;
using testing::slurp;
using testing::spit;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  CliRun run(std::vector<std::string> args) {
    args.insert(args.end(), {"--nouns", data_file("nouns.txt").string(), "--prompts", data_file("prompts.tsv").string(),
                             "--out", (dir_ / "out").string()});
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
  }

  std::string air_store() const { return data_file("fixtures/air_store.tsv").string(); }

  TempDir dir_{"cli"};
};

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

TEST_F(Cli, PromptsForOneNounAndAll) {
  const auto one = run({"prompts", "--noun", "air"});
  EXPECT_EQ(one.code, 0);
  EXPECT_EQ(count_lines(one.out), 80u);
  EXPECT_EQ(one.out.substr(0, one.out.find('\n')), "air\tb1-v0-n\tGenerate an ontology that covers Air.");
  EXPECT_EQ(count_lines(run({"prompts"}).out), 8320u);
  EXPECT_EQ(run({"prompts", "--noun", "unobtainium"}).code, 2);
}

TEST_F(Cli, BuildOnEmptyStoreIsPartialFailure) {
  spit(dir_ / "empty.tsv", std::string(kStoreHeader) + "\n");
  const auto r = run({"build", "--store", (dir_ / "empty.tsv").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("0 usable responses"), std::string::npos) << r.err;
}

TEST_F(Cli, StatsMatchesWorkDirectoryRecount) {
  ASSERT_EQ(run({"build", "--store", air_store()}).code, 0);
  const auto stats = run({"stats"});
  ASSERT_EQ(stats.code, 0);
  std::map<std::string, std::size_t> files;
  for (const auto& d : fs::directory_iterator(dir_ / "out/work")) {
    if (!d.is_directory()) continue;
    files[d.path().filename().string()] =
        static_cast<std::size_t>(std::distance(fs::directory_iterator(d.path()), fs::directory_iterator{}));
  }
  std::map<std::string, std::size_t> responses;
  for (const auto& r : load_store(air_store()).records) ++responses[r.noun_slug];
  std::istringstream lines(stats.out);
  std::string line;
  std::getline(lines, line);
  std::size_t rows = 0;
  while (std::getline(lines, line)) {
    const auto cols = text::split(line, '\t');
    const std::string noun(cols[0]);
    EXPECT_EQ(std::string(cols[2]), std::to_string(files.at(noun))) << line;
    EXPECT_EQ(std::string(cols[1]), std::to_string(responses.at(noun))) << line;
    ++rows;
  }
  EXPECT_EQ(rows, files.size());
}

TEST_F(Cli, BuildTwiceIsByteIdentical) {
  ASSERT_EQ(run({"build", "--store", air_store()}).code, 0);
  const auto first = slurp(dir_ / "out/modl/patterns/air.ttl");
  const auto first_index = slurp(dir_ / "out/modl/index.ttl");
  ASSERT_EQ(run({"build", "--store", air_store(), "--jobs", "1"}).code, 0);
  EXPECT_EQ(slurp(dir_ / "out/modl/patterns/air.ttl"), first);
  EXPECT_EQ(slurp(dir_ / "out/modl/index.ttl"), first_index);
}

TEST_F(Cli, StaleOutputsAreReplaced) {
  ASSERT_EQ(run({"build", "--store", air_store()}).code, 0);
  spit(dir_ / "out/work/air/b9-v9-n.ttl", "stale");
  spit(dir_ / "out/modl/patterns/ghost.ttl", "stale");
  ASSERT_EQ(run({"build", "--store", air_store()}).code, 0);
  EXPECT_FALSE(fs::exists(dir_ / "out/work/air/b9-v9-n.ttl"));
  EXPECT_FALSE(fs::exists(dir_ / "out/modl/patterns/ghost.ttl"));
  EXPECT_FALSE(fs::exists(dir_ / "out/work.next"));
}

TEST_F(Cli, QueriesAfterBuild) {
  EXPECT_EQ(run({"query", "class", "air"}).code, 2);
  ASSERT_EQ(run({"build", "--store", air_store()}).code, 0);
  const auto cls = run({"query", "class", "HUMIDITY"});
  EXPECT_EQ(cls.code, 0);
  EXPECT_EQ(cls.out, "https://example.org/modl/patterns/air\n");
  const auto prop = run({"query", "property", "hasHumidity"});
  EXPECT_EQ(count_lines(prop.out), 3u);
  EXPECT_EQ(run({"query", "property", " "}).code, 2);
  EXPECT_EQ(run({"query", "color", "x"}).code, 2);
}

TEST_F(Cli, ThresholdShrinksPattern) {
  ASSERT_EQ(run({"build", "--store", air_store()}).code, 0);
  const auto loose = extract_tuples(parse_turtle(slurp(dir_ / "out/modl/patterns/air.ttl")).graph).tuples;
  ASSERT_EQ(run({"build", "--store", air_store(), "--threshold", "25"}).code, 0);
  const auto strict = extract_tuples(parse_turtle(slurp(dir_ / "out/modl/patterns/air.ttl")).graph).tuples;
  EXPECT_LT(strict.size(), loose.size());
  for (const auto& t : strict) EXPECT_GE(t.votes, 25);
  EXPECT_EQ(run({"build", "--store", air_store(), "--threshold", "0"}).code, 2);
}

TEST_F(Cli, ConfigFileAndFlagPrecedence) {
  spit(dir_ / "cfg/modlforge.conf", "# settings\nstore = ../missing.tsv\nthreshold = 3\n");
  const auto missing = run({"build", "--config", (dir_ / "cfg/modlforge.conf").string()});
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.err.find("missing.tsv"), std::string::npos);
  const auto ok = run({"build", "--config", (dir_ / "cfg/modlforge.conf").string(), "--store", air_store()});
  EXPECT_EQ(ok.code, 0);
  EXPECT_NE(ok.out.find("threshold 3"), std::string::npos);
  spit(dir_ / "bad.conf", "colour = blue\n");
  const auto bad = run({"build", "--config", (dir_ / "bad.conf").string()});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("unknown config key"), std::string::npos);
}

TEST_F(Cli, StrictRepairOmitsR4AndR5) {
  ASSERT_EQ(run({"harvest", "--store", air_store()}).code, 0);
  const auto full = run({"stats"}).out;
  ASSERT_EQ(run({"harvest", "--store", air_store(), "--strict-repair"}).code, 0);
  const auto strict = run({"stats"}).out;
  EXPECT_NE(full, strict);
  EXPECT_EQ(strict.find("R4"), std::string::npos);
  EXPECT_EQ(strict.find("R5"), std::string::npos);
}

TEST_F(Cli, CollectAgainstMockEndpoint) {
  MockChatServer server(MockChatServer::responses_from(load_store(air_store()).records));
  server.start();
  const std::string store = (dir_ / "collected.tsv").string();
  const std::string config = (dir_ / "unlimited.conf").string();
  spit(config, "rate = 0\nmodel = mock-model\n");
  ::unsetenv(kApiKeyEnv);
  EXPECT_EQ(run({"collect", "--noun", "air", "--store", store, "--endpoint", server.url()}).code, 2);
  EXPECT_EQ(server.requests(), 0u);
  ::setenv(kApiKeyEnv, "test-key", 1);
  const auto r = run({"collect", "--config", config, "--noun", "air", "--store", store, "--endpoint", server.url(),
                      "--jobs", "8"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(load_store(store).records.size(), 80u);
  EXPECT_EQ(load_store(store).records.front().model_id, "mock-model");
  const auto again = run({"collect", "--config", config, "--noun", "air", "--store", store, "--endpoint", server.url()});
  ::unsetenv(kApiKeyEnv);
  EXPECT_NE(again.out.find("0 new, 80 already stored, 0 requests"), std::string::npos) << again.out;
  ASSERT_EQ(run({"build", "--store", store}).code, 0);
  EXPECT_TRUE(fs::exists(dir_ / "out/modl/patterns/air.ttl"));
}

}  // namespace
}  // namespace modlforge
