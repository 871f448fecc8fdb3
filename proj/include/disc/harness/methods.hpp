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

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "disc/baselines.hpp"
#include "disc/search.hpp"

namespace disc {

enum class MethodKind { kDisc, kDiscMetric, kMcts, kBeam, kBoN, kTokenSplit, kLineSplit };

std::string_view to_string(MethodKind kind);
MethodKind parse_method_kind(std::string_view name);

struct MethodSpec {
  std::string name = "disc";  // unique label within a run
  MethodKind kind = MethodKind::kDisc;
  SearchConfig search;  // search.engine holds the engine settings
  std::string delimiter = "\n";

  void validate() const;

  // Full descriptor, written into run logs.
  nlohmann::json to_json() const;

  // Overlays the keys present in `j` on `defaults`. Keys: name, kind,
  // alpha0, sigma, budget_samples, budget_tokens, criterion, theta,
  // inference_mode, temperature, max_units, r_star, metric,
  // speculative_batch, exploration_c, beam_width, max_children,
  // learning_rate, delimiter.
  static MethodSpec from_json(const nlohmann::json& j, const MethodSpec& defaults);
  static MethodSpec from_json(const nlohmann::json& j);
};

Decomposition run_method(const MethodSpec& method, const Problem& problem,
                         const GenerationPolicy& policy, const RewardModel& reward);

}  // namespace disc
