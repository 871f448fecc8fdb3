// Copyright 2026 The DISC Authors
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

#pragma once

// Ground-truth verifiers, configured per problem through the `verifier`
// object of a problem-set line:
//
//   {"kind": "exact", "target": "ab"}
//   {"kind": "numeric", "target": 36, "tolerance": 1e-6}
//   {"kind": "command", "command": "python3 {solution}", "tests": [
//       {"input": "t1.in", "expected": "t1.out"}], "timeout_s": 10}
//   {"kind": "constant", "value": 0.5}
//   {"kind": "planted", "target": "abba"}
//   {"kind": "wiener"}
//
// Verifiers score the generated text only; the prompt is stripped first.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "disc/core.hpp"

namespace disc {

struct ExactMatch {
  std::string target;
};

struct NumericMatch {
  double target = 0.0;
  double tolerance = 1e-6;
};

struct CommandTest {
  std::filesystem::path input;  // fed on stdin
  std::optional<std::filesystem::path> expected;  // compared token-wise to stdout
};

// `command` runs under /bin/sh with {solution}, {input} and {dir} replaced by
// absolute paths. A test passes when the command exits 0 within the timeout
// and, if an expected file is given, stdout matches it up to whitespace.
struct ExternalCommand {
  std::string command;
  std::string solution_file = "solution.txt";
  std::vector<CommandTest> tests;
  Duration timeout{10.0};
  std::size_t workers = 1;
};

struct ConstantReward {
  double value = 0.0;
};

struct PlantedMatch {
  std::string target;
};

struct WienerFinal {};

using VerifierSpec = std::variant<ExactMatch, NumericMatch, ExternalCommand, ConstantReward,
                                  PlantedMatch, WienerFinal>;

// Relative test paths resolve against `base_dir`. Throws
// std::invalid_argument on unknown kinds or missing fields.
VerifierSpec parse_verifier(const nlohmann::json& j, const std::filesystem::path& base_dir = {});

double score_with_verifier(const VerifierSpec& spec, const Problem& problem,
                           const TextSeq& solution);

// Last decimal literal in `text`, if any.
std::optional<double> extract_last_number(std::string_view text);

// Trims surrounding whitespace.
std::string normalize_answer(std::string_view text);

class VerifierReward final : public RewardModel {
 public:
  explicit VerifierReward(VerifierSpec spec) : spec_(std::move(spec)) {}
  double score(const Problem& problem, const TextSeq& solution) const override;
  std::optional<double> correctness_threshold() const override;

  const VerifierSpec& spec() const { return spec_; }

 private:
  VerifierSpec spec_;
};

}  // namespace disc
