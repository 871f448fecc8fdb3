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

// Synthetic testbeds with known answers. Both policies are pure functions of
// (seed, per-draw seed, prefix) and safe to call concurrently.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "disc/core.hpp"

namespace disc {

// Depth-d tree over a character alphabet. Position i of a completion is
// drawn from position_probs[i]; one leaf is the planted solution.
class PlantedTreePolicy final : public GenerationPolicy {
 public:
  PlantedTreePolicy(TextSeq prompt, std::vector<std::string> alphabet, TextSeq planted,
                    std::vector<std::vector<double>> position_probs, std::uint64_t seed);

  static PlantedTreePolicy uniform(TextSeq prompt, std::vector<std::string> alphabet,
                                   TextSeq planted, std::uint64_t seed);

  // Planted unit drawn with probability p_planted at every position, the
  // rest spread evenly.
  static PlantedTreePolicy biased(TextSeq prompt, std::vector<std::string> alphabet,
                                  TextSeq planted, double p_planted, std::uint64_t seed);

  Generation sample(const TextSeq& prefix, const PolicyParams& params) const override;

  // Exact probability that a completion of `prefix` is the planted solution.
  double completion_probability(const TextSeq& prefix) const;

  std::size_t depth() const { return depth_; }
  const TextSeq& planted() const { return planted_; }
  const std::vector<std::string>& alphabet() const { return alphabet_; }

 private:
  std::vector<std::size_t> generated_units(const TextSeq& prefix) const;

  TextSeq prompt_;
  std::vector<std::string> alphabet_;
  TextSeq planted_;
  std::vector<std::size_t> planted_units_;
  std::size_t depth_;
  std::vector<std::vector<double>> probs_;
  std::uint64_t seed_;
};

// Fraction of leading positions that agree with the planted solution. Equals
// 1 exactly on the planted solution.
class PlantedPrefixReward final : public RewardModel {
 public:
  explicit PlantedPrefixReward(TextSeq planted);
  double score(const Problem& problem, const TextSeq& solution) const override;

 private:
  TextSeq planted_;
  std::size_t depth_;
};

// Brownian motion on [0, T] in steps of dt, written as whitespace-separated
// fixed-precision increments after the prompt. A prefix with k increments
// pins the path up to t = k*dt; sampling continues it to T.
class WienerPolicy final : public GenerationPolicy {
 public:
  WienerPolicy(TextSeq prompt, double horizon, double dt, std::uint64_t seed);

  Generation sample(const TextSeq& prefix, const PolicyParams& params) const override;

  std::size_t steps() const { return steps_; }
  double horizon() const { return horizon_; }
  double dt() const { return dt_; }

 private:
  TextSeq prompt_;
  double horizon_;
  double dt_;
  std::size_t steps_;
  std::uint64_t seed_;
};

// W(T): the sum of all increments. Unbounded, so there is no correctness
// threshold.
class WienerReward final : public RewardModel {
 public:
  double score(const Problem& problem, const TextSeq& solution) const override;
  std::optional<double> correctness_threshold() const override { return std::nullopt; }
};

std::string format_increment(double x);

// Parses whitespace-separated increments. Throws std::invalid_argument on
// anything that is not a signed decimal.
std::vector<double> parse_increments(std::string_view text);

}  // namespace disc
