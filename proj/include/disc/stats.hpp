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
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "disc/sampler.hpp"

namespace disc {

// Population statistics of a non-empty reward sample.
struct RewardStats {
  std::size_t n = 0;
  double mean = 0.0;
  double std = 0.0;
  double max = 0.0;
  double sum = 0.0;
};

RewardStats reward_stats(std::span<const double> samples);
RewardStats reward_stats(std::span<const SampleRecord> samples);

// Standardized sample maximum. Zero spread maps to +infinity, which no
// strict comparison can beat.
class ZScore {
 public:
  constexpr ZScore() = default;
  constexpr explicit ZScore(double v) : value_(v) {}
  static constexpr ZScore sentinel() { return ZScore(std::numeric_limits<double>::infinity()); }

  constexpr double value() const { return value_; }
  constexpr bool is_sentinel() const {
    return value_ == std::numeric_limits<double>::infinity();
  }
  friend constexpr auto operator<=>(const ZScore&, const ZScore&) = default;

 private:
  double value_ = std::numeric_limits<double>::infinity();
};

ZScore zscore(const RewardStats& stats);

// 1 - Phi(z) under a standard normal reward model; 0 for the sentinel.
double improvement_probability(ZScore z);

struct ThresholdRound {
  std::vector<SampleRecord> samples;  // seeds first, then new draws
  std::size_t drawn = 0;              // new draws only
  bool budget_exhausted = false;      // stopped before reaching sigma
  bool solved = false;                // stopped on a correct sample (inference mode)
};

// Draws from `prefix` until the summed reward of seeds plus new draws reaches
// sigma, with at least one new draw. Stops early on the budget or, in
// inference mode, on a correct sample. With speculative_batch > 1 draws are
// generated in concurrent batches and truncated to the same minimal prefix a
// sequential run would take.
ThresholdRound sample_until_threshold(Sampler& sampler, const TextSeq& prefix, double sigma,
                                      std::span<const SampleRecord> seeds = {},
                                      bool inference_mode = false,
                                      std::size_t speculative_batch = 1);

enum class AcceptanceCriterion { kZ, kQ, kNegZ, kNegQ, kRandom, kZConfidenceGuarded };

std::string_view to_string(AcceptanceCriterion c);
AcceptanceCriterion parse_criterion(std::string_view name);

struct GuardInputs {
  double r_star = 1.0;
};

// Accepts a candidate prefix over the base prefix. Ties reject.
bool accept(AcceptanceCriterion criterion, const RewardStats& base, const RewardStats& cand,
            std::mt19937_64& rng, std::optional<GuardInputs> guard = std::nullopt);

// The variance guard alone: delta >= 0 and (1 - delta*s_c/gap)*s_b <= s_c,
// true when the candidate already reaches r_star.
bool confidence_guard_holds(const RewardStats& base, const RewardStats& cand, double r_star);

// Index of the first maximum reward.
std::size_t argmax_reward(std::span<const SampleRecord> samples);

}  // namespace disc
