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

// Static decompositions: whole solutions (best-of-n), single units, and
// delimiter-terminated lines. The split baselines reuse the greedy
// accept/commit loop so only the step sizing differs from DISC.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "disc/engine.hpp"

namespace disc {

enum class BaselineKind { kBoN, kTokenSplit, kLineSplit };

std::string_view to_string(BaselineKind kind);

struct BestOfN {
  SampleRecord best;
  std::vector<SampleRecord> samples;
  bool solved = false;
};

// Draws up to n full solutions from the prompt and keeps the first maximum.
// In inference mode drawing stops at the first correct sample.
BestOfN best_of_n(const Problem& problem, const GenerationPolicy& policy,
                  const RewardModel& reward, std::size_t n, const PolicyParams& params,
                  std::uint64_t seed = 0, bool inference_mode = true, bool record_timings = true);

// best_of_n with the budget and seed of `cfg`, packaged as a one-step
// decomposition.
Decomposition best_of_n_decomposition(const Problem& problem, const GenerationPolicy& policy,
                                      const RewardModel& reward, const EngineConfig& cfg);

// Candidate step a static baseline proposes on `suffix`. Never looks at
// rewards. The whole suffix comes back when no shorter step exists.
TextSeq static_candidate_step(BaselineKind kind, const TextSeq& suffix,
                              std::string_view delimiter = "\n");

class StaticProposer final : public StepProposer {
 public:
  StaticProposer(BaselineKind kind, std::string delimiter);
  std::optional<TextSeq> propose(const TextSeq& best_suffix) override;

 private:
  BaselineKind kind_;
  std::string delimiter_;
};

Decomposition static_split_search(const Problem& problem, const GenerationPolicy& policy,
                                  const RewardModel& reward, BaselineKind kind,
                                  const EngineConfig& cfg, std::string_view delimiter = "\n");

}  // namespace disc
