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

#include "disc/baselines.hpp"

#include <chrono>
#include <stdexcept>

namespace disc {

std::string_view to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::kBoN:
      return "bon";
    case BaselineKind::kTokenSplit:
      return "tokensplit";
    case BaselineKind::kLineSplit:
      return "linesplit";
  }
  return "bon";
}

namespace {

struct BonRun {
  BestOfN result;
  Decomposition decomposition;
};

BonRun run_best_of_n(const Problem& problem, const GenerationPolicy& policy,
                     const RewardModel& reward, SamplerOptions options, bool inference_mode) {
  const auto start = std::chrono::steady_clock::now();
  Sampler sampler(problem, policy, reward, options);
  BonRun run;
  try {
    while (auto s = sampler.draw(problem.prompt)) {
      if (inference_mode && sampler.is_correct(s->reward)) break;
    }
  } catch (const std::exception& e) {
    detail::finalize(run.decomposition, sampler);
    throw RunAborted(e.what(), std::move(run.decomposition));
  }
  detail::finalize(run.decomposition, sampler);
  Decomposition& d = run.decomposition;
  d.wall_time = options.record_timings ? Duration(std::chrono::steady_clock::now() - start)
                                       : Duration{0};
  run.result.samples = d.generated_solutions;
  run.result.best = d.generated_solutions[argmax_reward(d.generated_solutions)];
  run.result.solved = d.solved;
  d.final_solution = run.result.best.solution();
  const StepKind kind = sampler.is_correct(run.result.best.reward) ? StepKind::kSolved
                                                                   : StepKind::kTerminal;
  StepRecord step{run.result.best.suffix, std::nullopt, d.generated_solutions.size(), kind,
                  d.generated_solutions.size()};
  d.steps.push_back(step);
  d.commits.push_back({0, CommitAction::kAppend, step});
  return run;
}

}  // namespace

BestOfN best_of_n(const Problem& problem, const GenerationPolicy& policy,
                  const RewardModel& reward, std::size_t n, const PolicyParams& params,
                  std::uint64_t seed, bool inference_mode, bool record_timings) {
  if (n < 1) throw std::invalid_argument("best_of_n needs n >= 1");
  SamplerOptions o;
  o.budget_samples = n;
  o.params = params;
  o.seed = seed;
  o.record_timings = record_timings;
  return run_best_of_n(problem, policy, reward, o, inference_mode).result;
}

Decomposition best_of_n_decomposition(const Problem& problem, const GenerationPolicy& policy,
                                      const RewardModel& reward, const EngineConfig& cfg) {
  cfg.validate();
  return run_best_of_n(problem, policy, reward, cfg.sampler_options(), cfg.inference_mode)
      .decomposition;
}

TextSeq static_candidate_step(BaselineKind kind, const TextSeq& suffix,
                              std::string_view delimiter) {
  switch (kind) {
    case BaselineKind::kTokenSplit: {
      if (unit_count(suffix) <= 1) return suffix;
      return TextSeq(suffix.text.substr(0, unit_boundary(suffix, 1)), suffix.scheme);
    }
    case BaselineKind::kLineSplit: {
      if (delimiter.empty()) throw std::invalid_argument("line delimiter must be non-empty");
      const auto pos = suffix.text.find(delimiter);
      if (pos == std::string::npos) return suffix;
      return TextSeq(suffix.text.substr(0, pos + delimiter.size()), suffix.scheme);
    }
    case BaselineKind::kBoN:
      return suffix;
  }
  return suffix;
}

StaticProposer::StaticProposer(BaselineKind kind, std::string delimiter)
    : kind_(kind), delimiter_(std::move(delimiter)) {
  if (kind == BaselineKind::kBoN) {
    throw std::invalid_argument("best-of-n has no step proposals");
  }
}

std::optional<TextSeq> StaticProposer::propose(const TextSeq& best_suffix) {
  TextSeq step = static_candidate_step(kind_, best_suffix, delimiter_);
  if (step.text.size() >= best_suffix.text.size()) return std::nullopt;
  return step;
}

Decomposition static_split_search(const Problem& problem, const GenerationPolicy& policy,
                                  const RewardModel& reward, BaselineKind kind,
                                  const EngineConfig& cfg, std::string_view delimiter) {
  StaticProposer proposer(kind, std::string(delimiter));
  return greedy_step_search(problem, policy, reward, cfg, proposer);
}

}  // namespace disc
