// Copyright 2026 The Shufflestack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SHUFFLESTACK_TOOLS_CLI_H_
#define SHUFFLESTACK_TOOLS_CLI_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "shufflestack/net_sim.h"
#include "shufflestack/shuffler.h"

namespace shufflestack::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;

enum class GroupChoice { kRistretto255, kTiny };

// A parsed and validated scenario file. Relative output paths are resolved
// against the output directory given on the command line.
struct Scenario {
  std::string name;
  ProtocolKind kind = ProtocolKind::kAmortized;
  GroupChoice group = GroupChoice::kRistretto255;
  ProtocolConfig cfg;
  std::vector<Bytes> inputs;
  AdversarySpec adversary;
  DropoutSchedule dropouts;
  std::vector<uint64_t> seeds;
  bool keep_payloads = false;
  std::string result_path = "result.json";
  std::string transcript_path = "transcript.jsonl";
};

// Throws ConfigInvalid naming the offending field.
Scenario ParseScenario(const nlohmann::json& j);

// Most nearly square factorization h x w of n with h <= w.
std::pair<uint32_t, uint32_t> GridFor(uint32_t n);

// Runs one command line (without the program name). Artifacts go to `out`
// unless the command writes files; diagnostics go to `err`.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace shufflestack::cli

#endif  // SHUFFLESTACK_TOOLS_CLI_H_
