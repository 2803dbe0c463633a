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

// Offline chat-completion endpoint serving the responses of a fixture store.

#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "modlforge/collect.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Serve canned chat completions from a response store", "modlforge-mock"};
  std::string store;
  int port = 8089;
  std::vector<std::string> failing;
  app.add_option("--store", store, "TSV store whose responses are served")->required();
  app.add_option("--port", port, "port on 127.0.0.1");
  app.add_option("--fail", failing, "answer HTTP 500 for this exact prompt (repeatable)");
  CLI11_PARSE(app, argc, argv);

  try {
    const auto contents = modlforge::load_store(store);
    modlforge::MockChatServer server(modlforge::MockChatServer::responses_from(contents.records),
                                     std::set<std::string>(failing.begin(), failing.end()));
    std::cout << "serving " << contents.records.size() << " responses at http://127.0.0.1:" << port << "/v1"
              << std::endl;
    server.serve(port);
  } catch (const std::exception& e) {
    std::cerr << "modlforge-mock: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
