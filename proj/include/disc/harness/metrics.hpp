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

// Metrics computed from persisted run logs. Everything here is a pure
// function of its inputs.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "disc/harness/run_log.hpp"

namespace disc {

enum class BudgetAxis { kSamples, kTokens };

struct Curve {
  BudgetAxis axis = BudgetAxis::kSamples;
  std::vector<std::pair<std::size_t, double>> points;  // strictly increasing budgets
};

// 1-based index of the first sample at or above the log's correctness
// threshold.
std::optional<std::size_t> solve_index(const RunLog& log);

// Cumulative completion tokens up to and including the first solving sample.
std::optional<std::size_t> solve_tokens(const RunLog& log);

// Fraction of logs solved within each budget. Budgets are sorted and
// deduplicated; an empty log list gives zeros.
Curve pass_at_k(std::span<const RunLog> logs, std::span<const std::size_t> ks);
Curve pass_at_token(std::span<const RunLog> logs, std::span<const std::size_t> budgets);

struct PartitionStats {
  std::map<std::size_t, std::size_t> step_count_histogram;  // committed steps -> runs
  std::vector<double> step_reward_mean;  // by step index active when drawn
  std::vector<double> step_reward_std;
  std::vector<std::size_t> step_sample_count;
};

PartitionStats partition_stats(std::span<const RunLog> logs);

// Step index in effect when sample `index` was drawn: the number of appended
// steps committed before it.
std::vector<std::size_t> active_steps(const RunLog& log);

struct OverheadReport {
  Duration generation{0};
  Duration total{0};
  double generation_fraction = 0.0;
  double overhead_fraction = 1.0;
};

OverheadReport overhead_report(std::span<const RunLog> logs);

struct RewardHistogram {
  std::vector<double> edges;  // bins + 1 entries
  std::vector<std::size_t> counts;
  double mean = 0.0;
  double std = 0.0;
};

// Fixed-width bins over the observed range; values equal to the maximum land
// in the last bin. A degenerate range gives one occupied bin.
RewardHistogram reward_histogram(std::span<const double> rewards, std::size_t bins);

std::string to_csv(const Curve& curve);
nlohmann::json to_json(const Curve& curve);
nlohmann::json to_json(const PartitionStats& p);
nlohmann::json to_json(const OverheadReport& o);
nlohmann::json to_json(const RewardHistogram& h);

}  // namespace disc
