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

#include "disc/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

namespace disc {

std::string_view to_string(PriorityMetric m) {
  return m == PriorityMetric::kZScore ? "zscore" : "mean";
}

PriorityMetric parse_priority_metric(std::string_view name) {
  if (name == "zscore" || name == "z") return PriorityMetric::kZScore;
  if (name == "mean" || name == "q") return PriorityMetric::kMean;
  throw std::invalid_argument("unknown priority metric: " + std::string(name));
}

double priority(PriorityMetric m, const RewardStats& stats) {
  return m == PriorityMetric::kZScore ? zscore(stats).value() : stats.mean;
}

void EngineConfig::validate() const {
  if (!(alpha0 > 0.0 && alpha0 < 1.0)) throw std::invalid_argument("alpha0 must lie in (0, 1)");
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  if (budget_samples < 1) throw std::invalid_argument("budget_samples must be >= 1");
  if (budget_tokens && *budget_tokens < 1) throw std::invalid_argument("budget_tokens must be >= 1");
  if (speculative_batch < 1) throw std::invalid_argument("speculative_batch must be >= 1");
  policy_params.validate();
}

SamplerOptions EngineConfig::sampler_options() const {
  SamplerOptions o;
  o.budget_samples = budget_samples;
  o.budget_tokens = budget_tokens;
  o.params = policy_params;
  o.seed = rng_seed;
  o.record_timings = record_timings;
  return o;
}

std::string_view to_string(StepKind kind) {
  switch (kind) {
    case StepKind::kAccepted:
      return "accepted";
    case StepKind::kTerminal:
      return "terminal";
    case StepKind::kSolved:
      return "solved";
    case StepKind::kSplit:
      return "split";
    case StepKind::kTail:
      return "tail";
  }
  return "accepted";
}

StepKind parse_step_kind(std::string_view name) {
  if (name == "accepted") return StepKind::kAccepted;
  if (name == "terminal") return StepKind::kTerminal;
  if (name == "solved") return StepKind::kSolved;
  if (name == "split") return StepKind::kSplit;
  if (name == "tail") return StepKind::kTail;
  throw std::invalid_argument("unknown step kind: " + std::string(name));
}

std::optional<std::size_t> Decomposition::best_index() const {
  if (generated_solutions.empty()) return std::nullopt;
  return argmax_reward(generated_solutions);
}

std::optional<double> Decomposition::best_reward() const {
  const auto i = best_index();
  if (!i) return std::nullopt;
  return generated_solutions[*i].reward;
}

TextSeq Decomposition::committed_prefix(const Problem& problem) const {
  TextSeq out = problem.prompt;
  for (const auto& s : steps) out.text += s.step_str.text;
  return out;
}

ContractingProposer::ContractingProposer(double alpha0) : alpha0_(alpha0), alpha_(alpha0) {
  if (!(alpha0 > 0.0 && alpha0 < 1.0)) throw std::invalid_argument("alpha0 must lie in (0, 1)");
}

std::optional<TextSeq> ContractingProposer::propose(const TextSeq& best_suffix) {
  auto parts = split(best_suffix, alpha_);
  if (!parts) return std::nullopt;
  return std::move(parts->head);
}

void ContractingProposer::on_reject() {
  alpha_ = std::max(alpha_ * alpha0_, std::numeric_limits<double>::min());
}

namespace detail {

void finalize(Decomposition& d, const Sampler& sampler) {
  d.generated_solutions = sampler.history();
  d.solved = std::any_of(d.generated_solutions.begin(), d.generated_solutions.end(),
                         [&](const SampleRecord& s) { return sampler.is_correct(s.reward); });
  d.budget_exhausted = sampler.exhausted();
}

std::optional<std::size_t> best_committed_index(const Decomposition& d, const Problem& problem) {
  const std::string committed = d.committed_prefix(problem).text;
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < d.generated_solutions.size(); ++i) {
    const SampleRecord& s = d.generated_solutions[i];
    if (!s.solution().text.starts_with(committed)) continue;
    if (!best || s.reward > d.generated_solutions[*best].reward) best = i;
  }
  return best;
}

}  // namespace detail

namespace {

class Commits {
 public:
  explicit Commits(Decomposition& d) : d_(d) {}

  void append(TextSeq step, std::optional<double> metric, StepKind kind, std::size_t spent,
              std::size_t at) {
    StepRecord rec{std::move(step), metric, spent, kind, at};
    d_.steps.push_back(rec);
    d_.commits.push_back({d_.steps.size() - 1, CommitAction::kAppend, std::move(rec)});
  }

  void replace_last(TextSeq step, std::optional<double> metric, std::size_t spent,
                    std::size_t at) {
    StepRecord rec{std::move(step), metric, spent, StepKind::kSplit, at};
    d_.steps.back() = rec;
    d_.commits.push_back({d_.steps.size() - 1, CommitAction::kReplace, std::move(rec)});
  }

 private:
  Decomposition& d_;
};

template <typename Body>
Decomposition run_guarded(Sampler& sampler, Body&& body) {
  Decomposition d;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(d);
  } catch (const RunAborted&) {
    throw;
  } catch (const std::exception& e) {
    detail::finalize(d, sampler);
    d.wall_time = sampler.options().record_timings
                      ? Duration(std::chrono::steady_clock::now() - start)
                      : Duration{0};
    throw RunAborted(e.what(), std::move(d));
  }
  detail::finalize(d, sampler);
  d.wall_time = sampler.options().record_timings
                    ? Duration(std::chrono::steady_clock::now() - start)
                    : Duration{0};
  return d;
}

}  // namespace

Decomposition greedy_step_search(const Problem& problem, const GenerationPolicy& policy,
                                 const RewardModel& reward, const EngineConfig& cfg,
                                 StepProposer& proposer) {
  cfg.validate();
  Sampler sampler(problem, policy, reward, cfg.sampler_options());
  std::mt19937_64 rng(cfg.rng_seed);
  const std::optional<GuardInputs> guard =
      cfg.criterion == AcceptanceCriterion::kZConfidenceGuarded
          ? std::optional<GuardInputs>(GuardInputs{cfg.r_star})
          : std::nullopt;

  Decomposition result = run_guarded(sampler, [&](Decomposition& d) {
    Commits commits(d);
    TextSeq base_prefix = problem.prompt;

    auto round = sample_until_threshold(sampler, base_prefix, cfg.sigma, {}, cfg.inference_mode,
                                        cfg.speculative_batch);
    std::size_t spent = round.drawn;
    if (round.solved) {
      const SampleRecord& hit = round.samples.back();
      commits.append(hit.suffix, std::nullopt, StepKind::kSolved, spent, sampler.drawn());
      d.final_solution = hit.solution();
      return;
    }
    if (round.budget_exhausted) {
      d.final_solution = round.samples[argmax_reward(round.samples)].solution();
      return;
    }

    RewardStats base_stats = reward_stats(round.samples);
    ZScore z_base = zscore(base_stats);
    SampleRecord best_base = round.samples[argmax_reward(round.samples)];
    d.final_solution = best_base.solution();

    while (!sampler.exhausted()) {
      const TextSeq best_suffix = strip_prefix(best_base.solution(), base_prefix);
      const double alpha = proposer.alpha();
      auto head = proposer.propose(best_suffix);
      if (!head) {
        commits.append(best_suffix, z_base.value(), StepKind::kTerminal, spent, sampler.drawn());
        break;
      }
      const TextSeq cand_prefix = concat(base_prefix, *head);
      const SampleRecord seeds[] = {best_base};
      auto cand = sample_until_threshold(sampler, cand_prefix, cfg.sigma, seeds,
                                         cfg.inference_mode, cfg.speculative_batch);
      spent += cand.drawn;
      if (cand.solved) {
        const SampleRecord& hit = cand.samples.back();
        commits.append(strip_prefix(hit.solution(), base_prefix), std::nullopt, StepKind::kSolved,
                       spent, sampler.drawn());
        d.final_solution = hit.solution();
        return;
      }
      if (cand.budget_exhausted) break;  // no decision on an incomplete round

      const RewardStats cand_stats = reward_stats(cand.samples);
      const ZScore z_cand = zscore(cand_stats);
      const bool accepted = accept(cfg.criterion, base_stats, cand_stats, rng, guard);
      d.iterations.push_back(
          {alpha, unit_count(*head), base_stats, cand_stats, z_base.value(), z_cand.value(), accepted});
      if (accepted) {
        commits.append(*head, z_cand.value(), StepKind::kAccepted, spent, sampler.drawn());
        spent = 0;
        base_prefix = cand_prefix;
        base_stats = cand_stats;
        z_base = z_cand;
        best_base = cand.samples[argmax_reward(cand.samples)];
        d.final_solution = best_base.solution();
        proposer.on_accept();
      } else {
        proposer.on_reject();
      }
    }
  });
  if (const auto best = detail::best_committed_index(result, problem)) {
    result.final_solution = result.generated_solutions[*best].solution();
  }
  return result;
}

Decomposition greedy_disc(const Problem& problem, const GenerationPolicy& policy,
                          const RewardModel& reward, const EngineConfig& cfg) {
  cfg.validate();
  ContractingProposer proposer(cfg.alpha0);
  return greedy_step_search(problem, policy, reward, cfg, proposer);
}

Decomposition metric_split_decomposition(const Problem& problem, const GenerationPolicy& policy,
                                         const RewardModel& reward, const EngineConfig& cfg) {
  cfg.validate();
  Sampler sampler(problem, policy, reward, cfg.sampler_options());

  Decomposition result = run_guarded(sampler, [&](Decomposition& d) {
    Commits commits(d);
    std::size_t spent = 0;
    d.final_solution = problem.prompt;
    while (!sampler.exhausted()) {
      const TextSeq prefix = d.committed_prefix(problem);
      auto round = sample_until_threshold(sampler, prefix, cfg.sigma, {}, cfg.inference_mode,
                                          cfg.speculative_batch);
      spent += round.drawn;
      if (round.solved) {
        const SampleRecord& hit = round.samples.back();
        commits.append(hit.suffix, std::nullopt, StepKind::kSolved, spent, sampler.drawn());
        d.final_solution = hit.solution();
        return;
      }
      if (round.budget_exhausted) return;

      const double new_metric = priority(cfg.metric, reward_stats(round.samples));
      const SampleRecord& best = round.samples[argmax_reward(round.samples)];
      d.final_solution = best.solution();
      const std::optional<double> last_metric =
          d.steps.empty() ? std::nullopt : d.steps.back().metric;
      const bool split_new = !last_metric || new_metric >= *last_metric;
      const TextSeq& target = split_new ? best.suffix : d.steps.back().step_str;

      auto parts = split(target, cfg.alpha0);
      if (!parts) {
        commits.append(best.suffix, new_metric, StepKind::kTerminal, spent, sampler.drawn());
        return;
      }
      if (split_new) {
        commits.append(parts->head, new_metric, StepKind::kSplit, spent, sampler.drawn());
        spent = 0;
        if (new_metric < cfg.theta) {
          commits.append(parts->tail, std::nullopt, StepKind::kTail, 0, sampler.drawn());
          return;
        }
      } else {
        commits.replace_last(parts->head, last_metric, spent, sampler.drawn());
        spent = 0;
      }
    }
  });
  if (const auto best = detail::best_committed_index(result, problem)) {
    result.final_solution = result.generated_solutions[*best].solution();
  }
  return result;
}

}  // namespace disc
