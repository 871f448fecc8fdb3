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

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "disc/core.hpp"

namespace disc {

// One policy rollout from `prefix`.
struct SampleRecord {
  TextSeq prefix;
  TextSeq suffix;
  double reward = 0.0;
  std::size_t tokens = 0;
  Duration gen_time{0};
  Duration overhead_time{0};
  std::size_t index = 0;  // global draw order, 0-based

  TextSeq solution() const { return concat(prefix, suffix); }
};

struct SamplerOptions {
  std::size_t budget_samples = 1;
  std::optional<std::size_t> budget_tokens;
  PolicyParams params;
  std::uint64_t seed = 0;
  bool record_timings = true;
};

// Draws samples for one problem under a global budget. Draw i is generated
// with PolicyParams::seed = mix_seed(seed, i), so a draw is a pure function of
// (seed, i, prefix) for deterministic backends. Speculative draws that are not
// committed give their indices back to the budget.
class Sampler {
 public:
  Sampler(const Problem& problem, const GenerationPolicy& policy, const RewardModel& reward,
          SamplerOptions options);

  const Problem& problem() const { return problem_; }
  const RewardModel& reward_model() const { return reward_; }
  const SamplerOptions& options() const { return options_; }

  std::size_t drawn() const { return history_.size(); }
  std::size_t tokens_used() const { return tokens_; }
  std::size_t remaining() const;
  bool exhausted() const { return remaining() == 0; }

  // Draws and commits one sample. Returns nullopt when the budget is spent.
  std::optional<SampleRecord> draw(const TextSeq& prefix);

  // Generates up to `count` draws for the next free indices concurrently,
  // without committing them.
  std::vector<SampleRecord> speculate(const TextSeq& prefix, std::size_t count) const;

  // Commits speculative draws. They must continue the index sequence.
  void commit(std::span<const SampleRecord> samples);

  bool is_correct(double reward) const;

  const std::vector<SampleRecord>& history() const { return history_; }

 private:
  SampleRecord generate(const TextSeq& prefix, std::size_t index) const;
  void record(SampleRecord sample);

  const Problem& problem_;
  const GenerationPolicy& policy_;
  const RewardModel& reward_;
  SamplerOptions options_;
  std::vector<SampleRecord> history_;
  std::size_t tokens_ = 0;
  std::chrono::steady_clock::time_point last_mark_;
};

}  // namespace disc
