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

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "disc/core.hpp"
#include "disc/sampler.hpp"
#include "disc/stats.hpp"

namespace disc {

// Step-size priority used by the metric-split driver.
enum class PriorityMetric { kZScore, kMean };

std::string_view to_string(PriorityMetric m);
PriorityMetric parse_priority_metric(std::string_view name);
double priority(PriorityMetric m, const RewardStats& stats);

struct EngineConfig {
  double alpha0 = 0.15;
  double sigma = 1.0;
  std::size_t budget_samples = 64;
  std::optional<std::size_t> budget_tokens;
  AcceptanceCriterion criterion = AcceptanceCriterion::kZ;
  double theta = -std::numeric_limits<double>::infinity();
  bool inference_mode = true;
  PolicyParams policy_params;
  std::uint64_t rng_seed = 0;
  double r_star = 1.0;
  PriorityMetric metric = PriorityMetric::kZScore;
  std::size_t speculative_batch = 1;
  bool record_timings = true;

  void validate() const;
  SamplerOptions sampler_options() const;
};

enum class StepKind {
  kAccepted,  // candidate won the acceptance test
  kTerminal,  // remaining suffix could not be split further
  kSolved,    // inference-mode exit on a correct sample
  kSplit,     // metric-split driver: head of a split step
  kTail,      // metric-split driver: remainder committed on the precision exit
};

std::string_view to_string(StepKind kind);
StepKind parse_step_kind(std::string_view name);

struct StepRecord {
  TextSeq step_str;
  std::optional<double> metric;  // z-score (or priority) that justified the commit
  std::size_t samples_spent = 0;
  StepKind kind = StepKind::kAccepted;
  std::size_t committed_at = 0;  // samples drawn when the step was committed
};

enum class CommitAction { kAppend, kReplace };

struct CommitEvent {
  std::size_t step_index = 0;
  CommitAction action = CommitAction::kAppend;
  StepRecord step;
};

// One accept/reject decision of a greedy-style driver.
struct IterationRecord {
  double alpha = 0.0;
  std::size_t head_units = 0;
  RewardStats base;
  RewardStats cand;
  double z_base = 0.0;
  double z_cand = 0.0;
  bool accepted = false;
};

struct Decomposition {
  std::vector<StepRecord> steps;
  std::vector<CommitEvent> commits;
  std::vector<SampleRecord> generated_solutions;
  std::vector<IterationRecord> iterations;
  TextSeq final_solution;
  bool solved = false;
  bool budget_exhausted = false;
  Duration wall_time{0};

  std::optional<std::size_t> best_index() const;
  std::optional<double> best_reward() const;
  TextSeq committed_prefix(const Problem& problem) const;
};

// A backend failed mid-run. Carries everything drawn and committed so far.
class RunAborted : public std::runtime_error {
 public:
  RunAborted(const std::string& what, Decomposition partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const Decomposition& partial() const { return partial_; }

 private:
  Decomposition partial_;
};

// Chooses the next candidate step from the current best suffix. nullopt means
// the suffix is atomic and gets committed whole.
class StepProposer {
 public:
  virtual ~StepProposer() = default;
  virtual std::optional<TextSeq> propose(const TextSeq& best_suffix) = 0;
  virtual void on_accept() {}
  virtual void on_reject() {}
  virtual double alpha() const { return 0.0; }
};

// alpha-fraction proposals with multiplicative contraction on rejection.
class ContractingProposer final : public StepProposer {
 public:
  explicit ContractingProposer(double alpha0);
  std::optional<TextSeq> propose(const TextSeq& best_suffix) override;
  void on_accept() override { alpha_ = alpha0_; }
  void on_reject() override;
  double alpha() const override { return alpha_; }

 private:
  double alpha0_;
  double alpha_;
};

// Greedy accept/commit loop shared by DISC and the static baselines: sample
// the base prefix, propose a step on its best suffix, sample the candidate
// with the best base sample seeded in, accept or reject.
Decomposition greedy_step_search(const Problem& problem, const GenerationPolicy& policy,
                                 const RewardModel& reward, const EngineConfig& cfg,
                                 StepProposer& proposer);

Decomposition greedy_disc(const Problem& problem, const GenerationPolicy& policy,
                          const RewardModel& reward, const EngineConfig& cfg);

// Generalized decomposition: always refines whichever of the newest
// completion and the last committed step carries the higher metric.
Decomposition metric_split_decomposition(const Problem& problem, const GenerationPolicy& policy,
                                         const RewardModel& reward, const EngineConfig& cfg);

namespace detail {
void finalize(Decomposition& d, const Sampler& sampler);

// Highest-reward sample (earliest on ties) whose solution extends the
// committed prefix.
std::optional<std::size_t> best_committed_index(const Decomposition& d, const Problem& problem);
}  // namespace detail

}  // namespace disc
