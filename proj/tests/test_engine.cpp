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

#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>

#include <doctest.h>

#include "disc/backends/synthetic.hpp"
#include "disc/backends/verifier.hpp"
#include "disc/engine.hpp"
#include "support.hpp"

using namespace disc;

namespace {

EngineConfig config(std::size_t budget, double alpha0 = 0.15, double sigma = 1.0) {
  EngineConfig cfg;
  cfg.budget_samples = budget;
  cfg.alpha0 = alpha0;
  cfg.sigma = sigma;
  return cfg;
}

void check_invariants(const Problem& p, const Decomposition& d, std::size_t budget) {
  CHECK(d.generated_solutions.size() <= budget);
  std::set<std::size_t> seen;
  for (std::size_t i = 0; i < d.generated_solutions.size(); ++i) {
    CHECK(d.generated_solutions[i].index == i);
    seen.insert(d.generated_solutions[i].index);
  }
  CHECK(seen.size() == d.generated_solutions.size());
  CHECK(d.final_solution.text.starts_with(d.committed_prefix(p).text));
  for (const auto& it : d.iterations) CHECK(it.cand.max >= it.base.max);
}

bool same(const Decomposition& a, const Decomposition& b) {
  if (a.steps.size() != b.steps.size()) return false;
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    if (a.steps[i].step_str != b.steps[i].step_str) return false;
    if (a.steps[i].committed_at != b.steps[i].committed_at) return false;
  }
  if (a.generated_solutions.size() != b.generated_solutions.size()) return false;
  for (std::size_t i = 0; i < a.generated_solutions.size(); ++i) {
    if (a.generated_solutions[i].solution() != b.generated_solutions[i].solution()) return false;
    if (a.generated_solutions[i].reward != b.generated_solutions[i].reward) return false;
  }
  return a.final_solution == b.final_solution && a.solved == b.solved;
}

}  // namespace

TEST_CASE("greedy solves the two-letter planted problem") {
  const Problem p = testing::make_problem("ab", "");
  const auto policy = PlantedTreePolicy::uniform(TextSeq(""), {"a", "b"}, TextSeq("ab"), 17);
  const VerifierReward reward(ExactMatch{"ab"});
  EngineConfig cfg = config(64, 0.5);
  cfg.rng_seed = 5;
  const Decomposition d = greedy_disc(p, policy, reward, cfg);
  CHECK(d.solved);
  CHECK(d.final_solution.text == "ab");
  check_invariants(p, d, 64);
  CHECK(same(d, greedy_disc(p, policy, reward, cfg)));
}

TEST_CASE("flat zero rewards never accept") {
  const Problem p = testing::make_problem("z", "Q");
  const auto policy =
      PlantedTreePolicy::uniform(TextSeq("Q"), {"a", "b"}, TextSeq("abababab"), 3);
  const testing::FixedReward zero(0.0);
  for (std::size_t n : {1u, 7u, 30u}) {
    const Decomposition d = greedy_disc(p, policy, zero, config(n));
    CHECK_FALSE(d.solved);
    CHECK(d.generated_solutions.size() == n);
    CHECK(d.steps.empty());
    CHECK(d.budget_exhausted);
  }
}

TEST_CASE("a correct first sample ends the run") {
  const Problem p = testing::make_problem("one", "Q");
  const auto policy = PlantedTreePolicy::uniform(TextSeq("Q"), {"a", "b"}, TextSeq("abab"), 3);
  const testing::FixedReward one(1.0);
  const Decomposition d = greedy_disc(p, policy, one, config(10));
  CHECK(d.solved);
  CHECK(d.generated_solutions.size() == 1);
  REQUIRE(d.steps.size() == 1);
  CHECK(d.steps[0].kind == StepKind::kSolved);
  CHECK(d.steps[0].step_str == d.generated_solutions[0].suffix);
  CHECK(d.final_solution == d.generated_solutions[0].solution());
}

TEST_CASE("greedy invariants on the planted suite") {
  const std::string target = "abbabaab";
  const Problem p = testing::make_problem("planted", "?");
  const PlantedPrefixReward reward((TextSeq(target)));
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto policy = PlantedTreePolicy::uniform(TextSeq("?"), {"a", "b"}, TextSeq(target), seed);
    EngineConfig cfg = config(120);
    cfg.rng_seed = seed;
    const Decomposition d = greedy_disc(p, policy, reward, cfg);
    check_invariants(p, d, 120);

    double last = std::numeric_limits<double>::infinity();
    for (const auto& s : d.steps) {
      if (s.kind != StepKind::kAccepted) continue;
      REQUIRE(s.metric);
      CHECK(*s.metric < last);
      last = *s.metric;
    }
    CHECK(same(d, greedy_disc(p, policy, reward, cfg)));
  }
}

TEST_CASE("samples from an unfinished round still count toward the best solution") {
  const Problem p = testing::make_problem("q", "Q");
  testing::StreamPolicy policy;
  const testing::StreamReward reward({0.3, 0.8, 0.95, 0.99});
  EngineConfig cfg = config(4, 0.15, 2.0);
  cfg.inference_mode = false;
  const Decomposition d = greedy_disc(p, policy, reward, cfg);
  CHECK(d.generated_solutions.size() == 4);
  CHECK(d.iterations.empty());
  CHECK(d.steps.empty());
  CHECK(reward.score(p, d.final_solution) == 0.99);
}

TEST_CASE("rejections contract alpha and acceptance resets it") {
  ContractingProposer proposer(0.5);
  CHECK(proposer.alpha() == 0.5);
  proposer.on_reject();
  CHECK(proposer.alpha() == 0.25);
  for (int i = 0; i < 5000; ++i) proposer.on_reject();
  CHECK(proposer.alpha() > 0.0);
  auto head = proposer.propose(TextSeq("abcdef"));
  REQUIRE(head);
  CHECK(head->text == "a");
  proposer.on_accept();
  CHECK(proposer.alpha() == 0.5);
  CHECK_FALSE(proposer.propose(TextSeq("a")));
  CHECK_THROWS_AS(ContractingProposer(1.0), std::invalid_argument);
}

TEST_CASE("config validation") {
  EngineConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.alpha0 = 0.0;
  CHECK_THROWS(cfg.validate());
  cfg = EngineConfig{};
  cfg.sigma = 0.0;
  CHECK_THROWS(cfg.validate());
  cfg = EngineConfig{};
  cfg.budget_samples = 0;
  CHECK_THROWS(cfg.validate());
}

TEST_CASE("metric split commits a single-unit completion whole") {
  const Problem p = testing::make_problem("m1", "");
  const auto policy = PlantedTreePolicy::uniform(TextSeq(""), {"a", "b"}, TextSeq("a"), 2);
  const testing::FixedReward half(0.5);
  const Decomposition d = metric_split_decomposition(p, policy, half, config(10));
  REQUIRE(d.steps.size() == 1);
  CHECK(d.steps[0].kind == StepKind::kTerminal);
  CHECK(d.steps[0].step_str.text.size() == 1);
  CHECK(d.generated_solutions.size() == 2);
}

TEST_CASE("metric split with infinite precision commits head and tail") {
  const Problem p = testing::make_problem("m2", "Q");
  const auto policy =
      PlantedTreePolicy::uniform(TextSeq("Q"), {"a", "b", "c"}, TextSeq("abcabcabca"), 9);
  const testing::HashReward reward(1);
  EngineConfig cfg = config(50);
  cfg.theta = std::numeric_limits<double>::infinity();
  const Decomposition d = metric_split_decomposition(p, policy, reward, cfg);
  REQUIRE(d.steps.size() == 2);
  CHECK(d.steps[0].kind == StepKind::kSplit);
  CHECK(d.steps[1].kind == StepKind::kTail);
  CHECK(d.steps[0].step_str.text.size() == 2);
  CHECK(d.committed_prefix(p).text.size() == 11);
  CHECK(d.final_solution == d.committed_prefix(p));
}

TEST_CASE("metric split re-splits the last step when the new round scores lower") {
  const Problem p = testing::make_problem("m3", "Q");
  const testing::StreamPolicy policy("abcdefghijklmnop");
  const testing::StreamReward reward({0.2, 0.5, 0.8, 0.4, 0.6});
  const Decomposition d = metric_split_decomposition(p, policy, reward, config(5));
  const double z1 = 0.3 / std::sqrt(0.06);
  REQUIRE(d.commits.size() == 2);
  CHECK(d.commits[0].action == CommitAction::kAppend);
  CHECK(d.commits[0].step.step_str.text == "#2a");
  REQUIRE(d.commits[0].step.metric);
  CHECK(*d.commits[0].step.metric == doctest::Approx(z1).epsilon(1e-12));
  CHECK(d.commits[1].action == CommitAction::kReplace);
  REQUIRE(d.steps.size() == 1);
  CHECK(d.steps[0].step_str.text == "#");
  CHECK(*d.steps[0].metric == *d.commits[0].step.metric);
  CHECK(d.steps[0].kind == StepKind::kSplit);
}

TEST_CASE("backend failures abort with the partial run") {
  class Flaky final : public GenerationPolicy {
   public:
    Generation sample(const TextSeq&, const PolicyParams&) const override {
      if (calls_++ == 3) throw BackendError("down");
      return {TextSeq("xy"), 1, Duration{0}};
    }

   private:
    mutable int calls_ = 0;
  } flaky;
  const Problem p = testing::make_problem("f", "Q");
  const testing::FixedReward reward(0.1);
  try {
    greedy_disc(p, flaky, reward, config(20));
    FAIL("expected RunAborted");
  } catch (const RunAborted& e) {
    CHECK(std::string(e.what()) == "down");
    CHECK(e.partial().generated_solutions.size() == 3);
  }
}

TEST_CASE("step kinds and priority metrics round trip") {
  for (auto k : {StepKind::kAccepted, StepKind::kTerminal, StepKind::kSolved, StepKind::kSplit,
                 StepKind::kTail}) {
    CHECK(parse_step_kind(to_string(k)) == k);
  }
  for (auto m : {PriorityMetric::kZScore, PriorityMetric::kMean}) {
    CHECK(parse_priority_metric(to_string(m)) == m);
  }
  const RewardStats s{3, 0.5, std::sqrt(0.06), 0.8, 1.5};
  CHECK(priority(PriorityMetric::kMean, s) == 0.5);
  CHECK(priority(PriorityMetric::kZScore, s) == doctest::Approx(1.224744871));
}
