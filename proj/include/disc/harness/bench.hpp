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

// Seeded comparison of search methods on the synthetic suites. Every method
// runs once per seed at the largest budget; the best reward at a smaller
// budget K is the maximum over the first K samples, which is what a run
// capped at K would have seen.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "disc/backends/synthetic.hpp"
#include "disc/harness/methods.hpp"

namespace disc {

enum class SynthSuite { kPlanted, kWiener };

std::string_view to_string(SynthSuite suite);
SynthSuite parse_synth_suite(std::string_view name);

struct PlantedSuiteConfig {
  std::vector<std::string> alphabet = {"a", "b"};
  std::size_t depth = 4;
  std::optional<double> p_planted;  // uniform when unset
};

struct WienerSuiteConfig {
  double horizon = 1.0;
  double dt = 0.01;
};

struct SynthBenchConfig {
  SynthSuite suite = SynthSuite::kPlanted;
  std::size_t seeds = 100;
  std::vector<std::size_t> budgets = {1, 10, 50};
  std::vector<MethodSpec> methods;  // empty means disc and bon with defaults
  std::string baseline = "bon";
  std::uint64_t seed = 0;
  std::size_t bootstrap_resamples = 1000;
  double confidence = 0.95;
  std::size_t parallel = 1;
  PlantedSuiteConfig planted;
  WienerSuiteConfig wiener;

  void validate() const;
};

// Problem, policy and reward for seed index `s` of a suite.
struct SynthInstance {
  Problem problem;
  std::unique_ptr<GenerationPolicy> policy;
  std::unique_ptr<RewardModel> reward;
  std::uint64_t run_seed = 0;
};

SynthInstance make_synth_instance(const SynthBenchConfig& cfg, std::size_t s);

struct MethodCurve {
  std::string name;
  std::vector<double> mean;  // by budget
  std::vector<double> ci_low;
  std::vector<double> ci_high;
  std::vector<double> solve_rate;  // planted suite only; empty otherwise
  std::vector<std::vector<double>> best;  // [seed][budget]
};

struct PairedComparison {
  std::string method;
  std::string baseline;
  std::size_t budget = 0;
  std::size_t n = 0;
  double mean_difference = 0.0;
  double t_statistic = 0.0;
  double p_value = 1.0;  // two-sided
};

struct SynthBenchReport {
  SynthBenchConfig config;
  std::vector<MethodCurve> methods;
  std::vector<PairedComparison> comparisons;  // every method against the baseline
};

SynthBenchReport run_synth_bench(const SynthBenchConfig& cfg);

// Best-so-far reward after each budget, from a run's samples in draw order.
// Budgets beyond the samples drawn reuse the final maximum.
std::vector<double> best_by_budget(std::span<const SampleRecord> samples,
                                   std::span<const std::size_t> budgets);

// Two-sided paired t-test of a - b. Zero variance gives p = 1 when the mean
// difference is zero and p = 0 otherwise.
PairedComparison paired_t_test(std::span<const double> a, std::span<const double> b);

struct ConfidenceInterval {
  double low = 0.0;
  double high = 0.0;
};

// Percentile bootstrap interval for the mean.
ConfidenceInterval bootstrap_mean_ci(std::span<const double> values, std::size_t resamples,
                                     double confidence, std::uint64_t seed);

nlohmann::json to_json(const SynthBenchReport& report);

}  // namespace disc
