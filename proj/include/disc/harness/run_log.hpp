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

// Persistent record of one (problem, method) run. On disk it is JSONL with
// one event per line, in the order things happened:
//
//   {"type":"meta","event":"start","problem_id":..,"method":{..},"seed":..,
//    "scheme":"character"|"whitespace","budget_samples":..,"budget_tokens":..|null,"correct_threshold":..|null}
//   {"type":"sample","index":..,"prefix":..,"suffix":..,"reward":..,
//    "tokens":..,"gen_time":..,"overhead_time":..}
//   {"type":"commit","step_index":..,"action":"append"|"replace",
//    "step":..,"metric":..|null,"kind":..,"samples_spent":..,"committed_at":..}
//   {"type":"meta","event":"end","solved":..,"consumed_samples":..,
//    "consumed_tokens":..,"generation_time":..,"overhead_time":..,
//    "wall_time":..,"final_solution":..,"error":..|null}
//
// Non-finite numbers are written as the strings "inf", "-inf" and "nan".
// A log without the end event is incomplete.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "disc/engine.hpp"

namespace disc {

struct RunLog {
  std::string problem_id;
  nlohmann::json method = nlohmann::json::object();
  std::uint64_t seed = 0;
  UnitScheme scheme = UnitScheme::kCharacter;
  std::size_t budget_samples = 0;
  std::optional<std::size_t> budget_tokens;
  std::optional<double> correct_threshold = 1.0;

  std::vector<SampleRecord> samples;
  std::vector<CommitEvent> commits;

  bool complete = false;
  bool solved = false;
  std::size_t consumed_samples = 0;
  std::size_t consumed_tokens = 0;
  Duration generation_time{0};
  Duration overhead_time{0};
  Duration wall_time{0};
  std::string final_solution;
  std::optional<std::string> error;

  // Steps after replaying every commit.
  std::vector<StepRecord> steps() const;
};

RunLog make_run_log(const Problem& problem, nlohmann::json method, const EngineConfig& cfg,
                    std::optional<double> correct_threshold, const Decomposition& d,
                    std::optional<std::string> error = std::nullopt);

std::string to_jsonl(const RunLog& log);

// Throws std::invalid_argument on malformed lines. A missing end event
// yields complete == false.
RunLog parse_run_log(std::string_view jsonl);

// Writes through a temporary file and renames, so readers never see a
// partial log.
void write_run_log(const std::filesystem::path& path, const RunLog& log);
RunLog read_run_log(const std::filesystem::path& path);

// Every *.jsonl file under `dir`, sorted by path.
std::vector<RunLog> load_run_logs(const std::filesystem::path& dir);

nlohmann::json number_to_json(double x);
double number_from_json(const nlohmann::json& j);

}  // namespace disc
