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

#include "disc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace disc {

RewardStats reward_stats(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("reward_stats needs at least one sample");
  RewardStats s;
  s.n = samples.size();
  double lo = samples.front();
  double hi = samples.front();
  for (double r : samples) {
    s.sum += r;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  s.max = hi;
  if (lo == hi) {
    // Exact: summation error must not manufacture spread.
    s.mean = hi;
    s.std = 0.0;
    return s;
  }
  s.mean = std::clamp(s.sum / static_cast<double>(s.n), lo, hi);
  double ss = 0.0;
  for (double r : samples) ss += (r - s.mean) * (r - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(s.n));
  return s;
}

RewardStats reward_stats(std::span<const SampleRecord> samples) {
  std::vector<double> rewards;
  rewards.reserve(samples.size());
  for (const auto& s : samples) rewards.push_back(s.reward);
  return reward_stats(rewards);
}

ZScore zscore(const RewardStats& stats) {
  if (stats.std == 0.0) return ZScore::sentinel();
  return ZScore((stats.max - stats.mean) / stats.std);
}

double improvement_probability(ZScore z) {
  if (z.is_sentinel()) return 0.0;
  return 0.5 * std::erfc(z.value() / std::numbers::sqrt2);
}

ThresholdRound sample_until_threshold(Sampler& sampler, const TextSeq& prefix, double sigma,
                                      std::span<const SampleRecord> seeds, bool inference_mode,
                                      std::size_t speculative_batch) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  for (const auto& seed : seeds) {
    if (seed.solution().text.compare(0, prefix.text.size(), prefix.text) != 0) {
      throw std::invalid_argument("seed sample does not extend the sampling prefix");
    }
  }
  ThresholdRound round;
  round.samples.assign(seeds.begin(), seeds.end());
  double total = 0.0;
  for (const auto& s : seeds) total += s.reward;

  // Returns true when the round is complete after taking `s`.
  auto take = [&](const SampleRecord& s) {
    round.samples.push_back(s);
    ++round.drawn;
    total += s.reward;
    if (inference_mode && sampler.is_correct(s.reward)) {
      round.solved = true;
      return true;
    }
    return total >= sigma;
  };

  const std::size_t batch = std::max<std::size_t>(1, speculative_batch);
  while (true) {
    if (sampler.exhausted()) {
      round.budget_exhausted = true;
      return round;
    }
    if (batch == 1) {
      if (take(*sampler.draw(prefix))) return round;
      continue;
    }
    auto drafts = sampler.speculate(prefix, batch);
    std::size_t used = 0;
    bool done = false;
    while (used < drafts.size() && !done) done = take(drafts[used++]);
    sampler.commit(std::span<const SampleRecord>(drafts.data(), used));
    if (done) return round;
  }
}

std::string_view to_string(AcceptanceCriterion c) {
  switch (c) {
    case AcceptanceCriterion::kZ:
      return "z";
    case AcceptanceCriterion::kQ:
      return "q";
    case AcceptanceCriterion::kNegZ:
      return "negz";
    case AcceptanceCriterion::kNegQ:
      return "negq";
    case AcceptanceCriterion::kRandom:
      return "random";
    case AcceptanceCriterion::kZConfidenceGuarded:
      return "zguard";
  }
  return "z";
}

AcceptanceCriterion parse_criterion(std::string_view name) {
  if (name == "z") return AcceptanceCriterion::kZ;
  if (name == "q") return AcceptanceCriterion::kQ;
  if (name == "negz") return AcceptanceCriterion::kNegZ;
  if (name == "negq") return AcceptanceCriterion::kNegQ;
  if (name == "random") return AcceptanceCriterion::kRandom;
  if (name == "zguard") return AcceptanceCriterion::kZConfidenceGuarded;
  throw std::invalid_argument("unknown acceptance criterion: " + std::string(name));
}

bool confidence_guard_holds(const RewardStats& base, const RewardStats& cand, double r_star) {
  const double gap = r_star - cand.max;
  if (gap <= 0.0) return true;
  const ZScore zb = zscore(base);
  const ZScore zc = zscore(cand);
  if (zc.is_sentinel()) return false;
  const double delta = zb.value() - zc.value();
  if (!(delta >= 0.0)) return false;
  if (base.std == 0.0) return true;
  return (1.0 - delta * cand.std / gap) * base.std <= cand.std;
}

bool accept(AcceptanceCriterion criterion, const RewardStats& base, const RewardStats& cand,
            std::mt19937_64& rng, std::optional<GuardInputs> guard) {
  switch (criterion) {
    case AcceptanceCriterion::kZ:
      return zscore(cand) < zscore(base);
    case AcceptanceCriterion::kQ:
      return cand.mean < base.mean;
    case AcceptanceCriterion::kNegZ:
      return zscore(cand) > zscore(base);
    case AcceptanceCriterion::kNegQ:
      return cand.mean > base.mean;
    case AcceptanceCriterion::kRandom:
      return (rng() >> 63) != 0;
    case AcceptanceCriterion::kZConfidenceGuarded: {
      if (!guard) throw std::invalid_argument("zguard criterion requires r_star");
      if (guard->r_star - cand.max <= 0.0) return true;
      return zscore(cand) < zscore(base) && confidence_guard_holds(base, cand, guard->r_star);
    }
  }
  return false;
}

std::size_t argmax_reward(std::span<const SampleRecord> samples) {
  if (samples.empty()) throw std::invalid_argument("argmax over an empty sample set");
  std::size_t best = 0;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].reward > samples[best].reward) best = i;
  }
  return best;
}

}  // namespace disc
