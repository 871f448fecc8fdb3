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

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "disc/backends/synthetic.hpp"
#include "disc/harness/methods.hpp"
#include "disc/harness/run_log.hpp"

namespace disc::testing {

// Logs of real runs on small planted problems, with method, depth, budget
// and bias drawn from the seed.
inline std::vector<RunLog> planted_run_logs(std::size_t count, std::uint64_t seed) {
  static const char* const kKinds[] = {"disc", "bon", "tokensplit", "disc-metric", "mcts"};
  std::mt19937_64 rng(seed);
  std::vector<RunLog> logs;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t depth = 3 + rng() % 5;
    std::string target;
    for (std::size_t k = 0; k < depth; ++k) target += "abc"[rng() % 3];
    const std::uint64_t run_seed = rng();
    const double bias = 0.34 + 0.5 * static_cast<double>(rng() % 100) / 100.0;
    const auto policy = PlantedTreePolicy::biased(TextSeq("?"), {"a", "b", "c"}, TextSeq(target),
                                                  bias, run_seed);
    const PlantedPrefixReward reward((TextSeq(target)));
    Problem problem{"p" + std::to_string(i), TextSeq("?"), {{"kind", "planted"}, {"target", target}}};

    MethodSpec method;
    method.name = kKinds[i % std::size(kKinds)];
    method.kind = parse_method_kind(method.name);
    method.search.engine.budget_samples = 5 + rng() % 40;
    method.search.engine.rng_seed = run_seed;
    method.search.engine.record_timings = false;
    const Decomposition d = run_method(method, problem, policy, reward);
    logs.push_back(make_run_log(problem, method.to_json(), method.search.engine,
                                reward.correctness_threshold(), d));
  }
  return logs;
}

}  // namespace disc::testing
