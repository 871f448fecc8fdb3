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

// Command implementations behind the `disc` executable. Each returns a
// process exit code and writes diagnostics to `err`.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "disc/harness/bench.hpp"
#include "disc/harness/methods.hpp"
#include "disc/harness/metrics.hpp"

namespace disc {

// Flag values that override the manifest.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> budget_samples;
  std::optional<std::size_t> budget_tokens;
  std::optional<double> alpha0;
  std::optional<double> sigma;
  std::optional<std::string> criterion;
  std::vector<std::string> methods;  // replaces the method matrix when non-empty
  std::optional<std::size_t> parallel;
  std::optional<std::filesystem::path> out;
};

// Manifest keys:
//   problems       path to the problem-set JSONL (relative to the manifest)
//   unit_scheme    "character" | "whitespace"
//   out            output directory
//   seed           global seed
//   parallel       worker count
//   record_timings false for bit-reproducible logs
//   defaults       method keys applied to every method
//   methods        list of method objects (see MethodSpec::from_json) or kind
//                  names; default disc, tokensplit, linesplit, bon
//   policy         {"type": "planted", "alphabet": [...], "p_planted": p}
//                  {"type": "wiener", "horizon": T, "dt": dt}
//                  {"type": "http", "endpoint": url, ...}
//   reward         {"type": "verifier"} (default)
struct RunManifest {
  std::filesystem::path problems;
  UnitScheme scheme = UnitScheme::kCharacter;
  std::filesystem::path out;
  std::uint64_t seed = 0;
  std::size_t parallel = 1;
  bool record_timings = true;
  std::vector<MethodSpec> methods;
  nlohmann::json policy = nlohmann::json::object();
  nlohmann::json reward = {{"type", "verifier"}};

  static RunManifest from_json(const nlohmann::json& j, const std::filesystem::path& base_dir,
                               const Overrides& overrides = {});
};

RunManifest load_manifest(const std::filesystem::path& path, const Overrides& overrides = {});

// Builds the generation policy for one problem. Policies that can be shared
// across problems (HTTP) are created once and reused through `shared`.
class PolicyFactory {
 public:
  explicit PolicyFactory(nlohmann::json config);
  std::shared_ptr<const GenerationPolicy> for_problem(const Problem& problem,
                                                      std::uint64_t seed) const;

 private:
  nlohmann::json config_;
  std::shared_ptr<const GenerationPolicy> shared_;
};

std::unique_ptr<RewardModel> make_reward(const nlohmann::json& config, const Problem& problem,
                                         const std::filesystem::path& base_dir);

// Seed of a (problem, method) cell. Methods share the seed for a problem so
// their first draws coincide.
std::uint64_t cell_seed(std::uint64_t global_seed, const std::string& problem_id);

std::filesystem::path cell_log_path(const std::filesystem::path& out, const std::string& method,
                                    const std::string& problem_id);

struct RunOptions {
  RunManifest manifest;
  bool resume = false;
  // Replaces the manifest policy; used by tests to count calls.
  std::shared_ptr<const GenerationPolicy> policy_override;
};

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err);

enum class CompareMetric { kPassAtK, kPassAtToken };

struct CompareOptions {
  std::vector<std::filesystem::path> log_dirs;
  CompareMetric metric = CompareMetric::kPassAtK;
  std::vector<std::size_t> budgets = {1, 2, 5, 10};
  std::string baseline = "bon";
  std::optional<std::filesystem::path> out;
};

struct CompareRow {
  std::string method;
  std::size_t budget = 0;
  double value = 0.0;
  std::optional<double> error_reduction;  // vs the baseline; unset when undefined
};

// Groups logs by method name and evaluates the metric at every budget.
std::vector<CompareRow> compare_logs(std::span<const RunLog> logs, CompareMetric metric,
                                     std::span<const std::size_t> budgets,
                                     const std::string& baseline);

int cmd_compare(const CompareOptions& options, std::ostream& out, std::ostream& err);

struct AnalyzeOptions {
  std::vector<std::filesystem::path> log_dirs;
  std::size_t bins = 20;
  std::optional<std::filesystem::path> out;
};

nlohmann::json analyze_logs(std::span<const RunLog> logs, std::size_t bins);

int cmd_analyze(const AnalyzeOptions& options, std::ostream& out, std::ostream& err);

struct SynthBenchOptions {
  SynthBenchConfig config;
  std::optional<std::filesystem::path> out;
};

int cmd_synth_bench(const SynthBenchOptions& options, std::ostream& out, std::ostream& err);

// Parses argv and dispatches. Used by the executable and by tests.
int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace disc
