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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "disc/backends/sandbox.hpp"
#include "disc/backends/synthetic.hpp"
#include "disc/backends/verifier.hpp"
#include "disc/cli/commands.hpp"
#include "disc/engine.hpp"
#include "disc/harness/bench.hpp"
#include "disc/harness/metrics.hpp"
#include "disc/search.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace disc;
namespace fs = std::filesystem;

namespace {

// A criterion returns an empty string on success, else a failure detail.
using Check = std::function<std::string()>;

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

std::string monotone_and_dominance(bool dominance) {
  const Problem p = testing::make_problem("planted", "?");
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    std::mt19937_64 rng(seed);
    std::string target;
    const std::size_t depth = 4 + seed % 6;
    for (std::size_t i = 0; i < depth; ++i) target += "ab"[rng() % 2];
    const auto policy = PlantedTreePolicy::uniform(TextSeq("?"), {"a", "b"}, TextSeq(target), seed);
    const PlantedPrefixReward reward((TextSeq(target)));
    EngineConfig cfg;
    cfg.budget_samples = 120;
    cfg.criterion = AcceptanceCriterion::kZ;
    cfg.rng_seed = seed;
    const Decomposition d = greedy_disc(p, policy, reward, cfg);
    if (dominance) {
      for (const auto& it : d.iterations) {
        if (it.cand.max < it.base.max) return "seed " + std::to_string(seed) + ": candidate max below base max";
      }
      continue;
    }
    double last = std::numeric_limits<double>::infinity();
    for (const auto& s : d.steps) {
      if (s.kind != StepKind::kAccepted) continue;
      if (!s.metric || !(*s.metric < last)) return "seed " + std::to_string(seed) + ": z not decreasing";
      last = *s.metric;
    }
  }
  return {};
}

std::string stopping_oracle() {
  const Problem p = testing::make_problem("p", "Q");
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> stream(1 + rng() % 30);
    for (double& r : stream) r = unit(rng) < 0.2 ? 0.0 : unit(rng);
    const double sigma = 0.1 + 3.0 * unit(rng);
    const std::size_t budget = 1 + rng() % 40;
    const double seed_reward = rng() % 2 ? unit(rng) : 0.0;
    SamplerOptions opts;
    opts.budget_samples = budget;
    testing::StreamPolicy policy;
    testing::StreamReward reward(stream, std::nullopt);
    Sampler sampler(p, policy, reward, opts);
    std::vector<SampleRecord> seeds;
    if (seed_reward > 0.0) {
      SampleRecord s;
      s.prefix = p.prompt;
      s.reward = seed_reward;
      seeds.push_back(s);
    }
    // Streams shorter than the budget are padded with zeros by the reward.
    std::vector<double> padded = stream;
    padded.resize(std::max(stream.size(), budget), 0.0);
    const auto round = sample_until_threshold(sampler, p.prompt, sigma, seeds);
    const auto [m, exhausted] = testing::minimal_stop(seed_reward, padded, sigma, budget);
    if (round.drawn != m || round.budget_exhausted != exhausted) {
      return "trial " + std::to_string(trial) + ": drew " + std::to_string(round.drawn) +
             ", oracle " + std::to_string(m);
    }
  }
  return {};
}

std::string optimality() {
  const Problem p = testing::make_problem("opt", "?");
  std::size_t solved = 0;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    std::mt19937_64 rng(seed);
    std::string target;
    for (int i = 0; i < 4; ++i) target += "ab"[rng() % 2];
    const auto policy = PlantedTreePolicy::uniform(TextSeq("?"), {"a", "b"}, TextSeq(target), seed);
    const VerifierReward reward(ExactMatch{target});
    EngineConfig cfg;
    cfg.budget_samples = 200;
    cfg.rng_seed = seed;
    solved += greedy_disc(p, policy, reward, cfg).solved;
  }
  if (solved < 475) return "solved " + std::to_string(solved) + "/500";
  return {};
}

std::string wiener_max_search() {
  SynthBenchConfig cfg;
  cfg.suite = SynthSuite::kWiener;
  cfg.seeds = 500;
  cfg.budgets = {50};
  cfg.bootstrap_resamples = 200;
  MethodSpec greedy = MethodSpec::from_json({{"kind", "disc"}, {"alpha0", 0.15}, {"criterion", "z"}});
  cfg.methods = {greedy, MethodSpec::from_json({{"kind", "bon"}})};
  const SynthBenchReport r = run_synth_bench(cfg);
  const PairedComparison& c = r.comparisons.at(0);
  if (!(c.mean_difference > 0.0 && c.p_value < 0.05)) {
    return fmt("difference %.4f, p = %.3g", c.mean_difference, c.p_value);
  }

  const double alpha = 0.3;
  const WienerPolicy policy(TextSeq("W", UnitScheme::kWhitespaceToken), 1.0, 0.01, 11);
  const WienerReward reward;
  const Problem prob = testing::make_problem("w", "W", UnitScheme::kWhitespaceToken);
  std::string text = "W";
  for (int i = 0; i < 30; ++i) text += " " + format_increment(0.02);
  const TextSeq prefix(text, UnitScheme::kWhitespaceToken);
  const int n = 10000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    PolicyParams params;
    params.seed = static_cast<std::uint64_t>(i);
    const double w = reward.score(prob, concat(prefix, policy.sample(prefix, params).suffix));
    sum += w;
    sq += w * w;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  if (std::abs(var / (1.0 - alpha) - 1.0) > 0.05) return fmt("variance %.4f, expected %.4f", var, 1.0 - alpha);
  return {};
}

std::string micro_oracles() {
  const std::vector<double> xs{0.2, 0.5, 0.8};
  const ZScore z = zscore(reward_stats(xs));
  if (std::abs(z.value() - *testing::brute_zscore(xs)) > 1e-12 || std::abs(z.value() - 1.224745) > 1e-6) {
    return fmt("zscore %.9f", z.value());
  }
  const double q = improvement_probability(z);
  if (std::abs(q - testing::upper_tail_simpson(z.value())) > 1e-9 || std::abs(q - 0.110336) > 1e-6) {
    return fmt("improvement probability %.12f vs %.12f", q, testing::upper_tail_simpson(z.value()));
  }
  const double uct = uct_score(0.25, 2, 8, 1.0);
  if (std::abs(uct - (0.25 + std::sqrt(std::log(8.0) / 2.0))) > 1e-12 || std::abs(uct - 1.2697) > 1e-4) {
    return fmt("uct %.9f", uct);
  }
  SearchTree tree;
  tree.add_root(TextSeq("Q"));
  SearchNode child;
  child.prefix = TextSeq("Qa");
  child.q_hat = 0.4;
  child.visits = 1;
  const NodeId c = tree.add_child(0, child);
  const NodeId path[] = {0, c};
  backpropagate(tree, path, 0.7, LearningRateSchedule{LearningRateSchedule::Kind::kConstant, 0.5});
  if (std::abs(tree[c].q_hat - 0.55) > 1e-12) return fmt("backprop %.12f", tree[c].q_hat);
  return {};
}

std::string metric_oracles() {
  const auto logs = testing::planted_run_logs(100, 17);
  TempDir dir;
  for (std::size_t i = 0; i < logs.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "run%04zu.jsonl", i);
    write_run_log(dir.path() / name, logs[i]);
  }
  const auto reloaded = load_run_logs(dir.path());
  if (reloaded.size() != logs.size()) return "reload lost logs";
  for (std::size_t i = 0; i < logs.size(); ++i) {
    if (to_jsonl(reloaded[i]) != to_jsonl(logs[i])) return "reload changed log " + std::to_string(i);
  }
  std::vector<std::size_t> ks;
  for (std::size_t k = 1; k <= 60; ++k) ks.push_back(k);
  for (const auto* set : {&logs, &reloaded}) {
    const Curve a = pass_at_k(*set, ks);
    const Curve t = pass_at_token(*set, ks);
    for (std::size_t i = 0; i < ks.size(); ++i) {
      if (a.points[i].second != testing::rescan_pass_at_k(*set, ks[i])) return "pass@k differs at k=" + std::to_string(ks[i]);
      if (t.points[i].second != testing::rescan_pass_at_token(*set, ks[i])) {
        return "pass@token differs at budget " + std::to_string(ks[i]);
      }
    }
    const PartitionStats p = partition_stats(*set);
    const auto g = testing::rescan_partition(*set);
    if (p.step_count_histogram != g.step_counts) return "step count histogram differs";
    if (p.step_reward_mean.size() != g.by_step.size()) return "partition group count differs";
    for (std::size_t s = 0; s < g.by_step.size(); ++s) {
      if (p.step_sample_count[s] != g.by_step[s].size()) return "group size differs";
      if (g.by_step[s].empty()) continue;
      if (p.step_reward_mean[s] != testing::plain_mean(g.by_step[s]) ||
          p.step_reward_std[s] != testing::plain_population_std(g.by_step[s])) {
        return "group statistics differ at step " + std::to_string(s);
      }
    }
  }
  return {};
}

bool same_trace(const Decomposition& a, const Decomposition& b) {
  if (a.commits.size() != b.commits.size()) return false;
  for (std::size_t i = 0; i < a.commits.size(); ++i) {
    const StepRecord& x = a.commits[i].step;
    const StepRecord& y = b.commits[i].step;
    if (x.step_str != y.step_str || x.kind != y.kind || x.metric != y.metric ||
        x.committed_at != y.committed_at) {
      return false;
    }
  }
  return a.generated_solutions.size() == b.generated_solutions.size() &&
         a.final_solution == b.final_solution;
}

std::string reductions() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 10000; ++trial) {
    SearchTree tree;
    tree.add_root(TextSeq("Q"));
    const std::size_t n = 1 + rng() % 8;
    std::size_t expected = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      SearchNode child;
      child.prefix = TextSeq("Q" + std::to_string(i));
      child.q_hat = rng() % 4 == 0 ? 0.5 : unit(rng);
      child.visits = 1 + rng() % 20;
      if (child.q_hat > best) {
        best = child.q_hat;
        expected = i;
      }
      tree.add_child(0, child);
    }
    if (uct_select(tree, 0, 0.0) != expected) return "trial " + std::to_string(trial) + " picked a non-argmax child";
  }

  const Problem p = testing::make_problem("p", "Q");
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto policy =
        PlantedTreePolicy::uniform(TextSeq("Q"), {"a", "b", "c"}, TextSeq("abcabcabcabc"), seed);
    const testing::HashReward reward(seed);
    SearchConfig cfg;
    cfg.engine.budget_samples = 40 + seed;
    cfg.engine.rng_seed = seed;
    cfg.beam_width = 1;
    if (!same_trace(greedy_disc(p, policy, reward, cfg.engine), beam_disc(p, policy, reward, cfg))) {
      return "beam trace differs at seed " + std::to_string(seed);
    }
  }
  return {};
}

std::string read_all(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string end_to_end_determinism() {
  TempDir dir;
  std::ofstream(dir.path() / "planted.jsonl")
      << R"({"id": "p1", "prompt": "?", "verifier": {"kind": "exact", "target": "abba"}})" << '\n'
      << R"({"id": "p2", "prompt": "?", "verifier": {"kind": "exact", "target": "babab"}})" << '\n';
  std::ofstream(dir.path() / "wiener.jsonl")
      << R"({"id": "w1", "prompt": "W", "verifier": {"kind": "wiener"}})" << '\n'
      << R"({"id": "w2", "prompt": "W", "verifier": {"kind": "wiener"}})" << '\n';
  const nlohmann::json suites[] = {
      {{"problems", "planted.jsonl"}, {"policy", {{"type", "planted"}, {"alphabet", {"a", "b"}}}}},
      {{"problems", "wiener.jsonl"}, {"unit_scheme", "whitespace"}, {"policy", {{"type", "wiener"}}}}};
  for (const auto& suite : suites) {
    nlohmann::json j = suite;
    j["seed"] = 314;
    j["record_timings"] = false;
    j["parallel"] = 2;
    j["defaults"] = {{"budget_samples", 30}};
    j["methods"] = {"disc", "disc-metric", "mcts", "beam", "bon", "tokensplit"};
    std::vector<fs::path> outs;
    for (const char* run : {"a", "b"}) {
      Overrides o;
      o.out = dir.path() / (j["problems"].get<std::string>() + run);
      RunOptions opts;
      opts.manifest = RunManifest::from_json(j, dir.path(), o);
      std::ostringstream out, err;
      if (cmd_run(opts, out, err) != 0) return "run failed: " + err.str();
      outs.push_back(*o.out);
    }
    std::size_t compared = 0;
    for (const auto& entry : fs::recursive_directory_iterator(outs[0])) {
      if (entry.path().extension() != ".jsonl") continue;
      const fs::path other = outs[1] / fs::relative(entry.path(), outs[0]);
      if (read_all(entry.path()) != read_all(other)) return "logs differ: " + other.string();
      ++compared;
    }
    if (compared != 12) return "expected 12 logs, found " + std::to_string(compared);
  }
  return {};
}

std::string overhead_accounting() {
  const Problem p = testing::make_problem("o", "Q");
  const testing::StreamPolicy inner;
  const testing::CountingPolicy stub(inner, std::chrono::milliseconds(10));
  const testing::FixedReward reward(0.1);
  MethodSpec bon = MethodSpec::from_json({{"kind", "bon"}, {"budget_samples", 100}});
  bon.search.engine.record_timings = true;
  const Decomposition d = run_method(bon, p, stub, reward);
  if (stub.calls() != 100) return "expected 100 calls, saw " + std::to_string(stub.calls());
  const std::vector<RunLog> logs{make_run_log(p, bon.to_json(), bon.search.engine, 1.0, d)};
  const OverheadReport r = overhead_report(logs);
  const double gen = r.generation.count();
  if (std::abs(gen - 1.0) > 0.2) return fmt("generation time %.4f s", gen);
  if (std::abs(r.generation_fraction + r.overhead_fraction - 1.0) > 1e-9) {
    return fmt("fractions sum to %.12f", r.generation_fraction + r.overhead_fraction);
  }
  return {};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, Check>> criteria = {
      {"monotone-z", [] { return monotone_and_dominance(false); }},
      {"dominance", [] { return monotone_and_dominance(true); }},
      {"stopping-oracle", stopping_oracle},
      {"optimality", optimality},
      {"wiener-max-search", wiener_max_search},
      {"stats-micro-oracles", micro_oracles},
      {"metric-oracles", metric_oracles},
      {"reductions", reductions},
      {"end-to-end-determinism", end_to_end_determinism},
      {"overhead-accounting", overhead_accounting},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    try {
      detail = check();
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (detail.empty()) {
      std::printf("PASS %-24s (%.2fs)\n", name.c_str(), secs);
    } else {
      std::printf("FAIL %-24s (%.2fs) %s\n", name.c_str(), secs, detail.c_str());
      ++failures;
    }
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
