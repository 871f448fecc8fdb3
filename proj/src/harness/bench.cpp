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

#include "disc/harness/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "disc/harness/run_log.hpp"

namespace disc {
namespace {

using nlohmann::json;

constexpr std::uint64_t kTargetStream = 0x7a7267657473ULL;

std::vector<MethodSpec> default_methods() {
  MethodSpec disc_method;
  disc_method.name = "disc";
  disc_method.kind = MethodKind::kDisc;
  MethodSpec bon = disc_method;
  bon.name = "bon";
  bon.kind = MethodKind::kBoN;
  return {disc_method, bon};
}

std::vector<double> mean_by_budget(const std::vector<std::vector<double>>& best, std::size_t b) {
  std::vector<double> col;
  col.reserve(best.size());
  for (const auto& row : best) col.push_back(row[b]);
  return col;
}

double mean_of(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return v.empty() ? 0.0 : sum / static_cast<double>(v.size());
}

template <class F>
void parallel_for(std::size_t n, std::size_t workers, F&& body) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::string_view to_string(SynthSuite suite) {
  return suite == SynthSuite::kPlanted ? "planted" : "wiener";
}

SynthSuite parse_synth_suite(std::string_view name) {
  if (name == "planted") return SynthSuite::kPlanted;
  if (name == "wiener") return SynthSuite::kWiener;
  throw std::invalid_argument("unknown suite '" + std::string(name) + "'");
}

void SynthBenchConfig::validate() const {
  if (seeds < 1) throw std::invalid_argument("need at least one seed");
  if (budgets.empty()) throw std::invalid_argument("need at least one budget");
  for (std::size_t i = 0; i < budgets.size(); ++i) {
    if (budgets[i] < 1 || (i > 0 && budgets[i] <= budgets[i - 1])) {
      throw std::invalid_argument("budgets must be positive and strictly increasing");
    }
  }
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw std::invalid_argument("confidence must lie in (0, 1)");
  }
  if (bootstrap_resamples < 1) throw std::invalid_argument("need at least one resample");
  for (const auto& m : methods) m.validate();
}

SynthInstance make_synth_instance(const SynthBenchConfig& cfg, std::size_t s) {
  SynthInstance inst;
  inst.run_seed = mix_seed(cfg.seed, s);
  if (cfg.suite == SynthSuite::kPlanted) {
    const auto& pc = cfg.planted;
    std::mt19937_64 rng(mix_seed(inst.run_seed, kTargetStream));
    std::string target;
    for (std::size_t i = 0; i < pc.depth; ++i) target += pc.alphabet[rng() % pc.alphabet.size()];
    inst.problem = Problem{"planted-" + std::to_string(s), TextSeq("?"),
                           json{{"kind", "planted"}, {"target", target}}};
    if (pc.p_planted) {
      inst.policy = std::make_unique<PlantedTreePolicy>(PlantedTreePolicy::biased(
          inst.problem.prompt, pc.alphabet, TextSeq(target), *pc.p_planted, inst.run_seed));
    } else {
      inst.policy = std::make_unique<PlantedTreePolicy>(PlantedTreePolicy::uniform(
          inst.problem.prompt, pc.alphabet, TextSeq(target), inst.run_seed));
    }
    inst.reward = std::make_unique<PlantedPrefixReward>(TextSeq(target));
  } else {
    const TextSeq prompt("W", UnitScheme::kWhitespaceToken);
    inst.problem = Problem{"wiener-" + std::to_string(s), prompt, json{{"kind", "wiener"}}};
    inst.policy =
        std::make_unique<WienerPolicy>(prompt, cfg.wiener.horizon, cfg.wiener.dt, inst.run_seed);
    inst.reward = std::make_unique<WienerReward>();
  }
  return inst;
}

std::vector<double> best_by_budget(std::span<const SampleRecord> samples,
                                   std::span<const std::size_t> budgets) {
  std::vector<double> out;
  double best = -std::numeric_limits<double>::infinity();
  std::size_t seen = 0;
  for (std::size_t b : budgets) {
    for (; seen < std::min(b, samples.size()); ++seen) best = std::max(best, samples[seen].reward);
    out.push_back(best);
  }
  return out;
}

PairedComparison paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("paired samples differ in length");
  PairedComparison c;
  c.n = a.size();
  if (c.n == 0) return c;
  std::vector<double> d(c.n);
  for (std::size_t i = 0; i < c.n; ++i) d[i] = a[i] - b[i];
  c.mean_difference = mean_of(d);
  if (c.n < 2) return c;
  double ss = 0.0;
  for (double x : d) ss += (x - c.mean_difference) * (x - c.mean_difference);
  const double sd = std::sqrt(ss / static_cast<double>(c.n - 1));
  if (sd == 0.0) {
    c.t_statistic = c.mean_difference == 0.0 ? 0.0
                                              : std::copysign(std::numeric_limits<double>::infinity(),
                                                              c.mean_difference);
    c.p_value = c.mean_difference == 0.0 ? 1.0 : 0.0;
    return c;
  }
  c.t_statistic = c.mean_difference / (sd / std::sqrt(static_cast<double>(c.n)));
  const boost::math::students_t dist(static_cast<double>(c.n - 1));
  c.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(c.t_statistic)));
  return c;
}

ConfidenceInterval bootstrap_mean_ci(std::span<const double> values, std::size_t resamples,
                                     double confidence, std::uint64_t seed) {
  if (values.empty()) return {};
  std::mt19937_64 rng(seed);
  std::vector<double> means;
  means.reserve(resamples);
  for (std::size_t r = 0; r < resamples; ++r) {
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) sum += values[rng() % values.size()];
    means.push_back(sum / static_cast<double>(values.size()));
  }
  std::sort(means.begin(), means.end());
  const double tail = (1.0 - confidence) / 2.0;
  auto at = [&](double q) {
    const auto idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(resamples - 1)));
    return means[std::min(idx, resamples - 1)];
  };
  return {at(tail), at(1.0 - tail)};
}

SynthBenchReport run_synth_bench(const SynthBenchConfig& input) {
  SynthBenchReport report;
  report.config = input;
  SynthBenchConfig& cfg = report.config;
  if (cfg.methods.empty()) cfg.methods = default_methods();
  cfg.validate();

  const std::size_t max_budget = cfg.budgets.back();
  for (auto& m : cfg.methods) m.search.engine.budget_samples = max_budget;

  const std::size_t nm = cfg.methods.size();
  const std::size_t nb = cfg.budgets.size();
  std::vector<std::vector<std::vector<double>>> best(
      nm, std::vector<std::vector<double>>(cfg.seeds));
  parallel_for(cfg.seeds, cfg.parallel, [&](std::size_t s) {
    const SynthInstance inst = make_synth_instance(cfg, s);
    for (std::size_t m = 0; m < nm; ++m) {
      MethodSpec method = cfg.methods[m];
      method.search.engine.rng_seed = inst.run_seed;
      Decomposition d;
      try {
        d = run_method(method, inst.problem, *inst.policy, *inst.reward);
      } catch (const RunAborted& e) {
        d = e.partial();
      }
      best[m][s] = best_by_budget(d.generated_solutions, cfg.budgets);
    }
  });

  for (std::size_t m = 0; m < nm; ++m) {
    MethodCurve curve;
    curve.name = cfg.methods[m].name;
    curve.best = best[m];
    for (std::size_t b = 0; b < nb; ++b) {
      const auto col = mean_by_budget(best[m], b);
      curve.mean.push_back(mean_of(col));
      const auto ci = bootstrap_mean_ci(col, cfg.bootstrap_resamples, cfg.confidence,
                                        mix_seed(cfg.seed, (m << 32) | b));
      curve.ci_low.push_back(ci.low);
      curve.ci_high.push_back(ci.high);
      if (cfg.suite == SynthSuite::kPlanted) {
        const auto solved = std::count_if(col.begin(), col.end(), [](double r) { return r >= 1.0; });
        curve.solve_rate.push_back(static_cast<double>(solved) / static_cast<double>(col.size()));
      }
    }
    report.methods.push_back(std::move(curve));
  }

  const auto base = std::find_if(report.methods.begin(), report.methods.end(),
                                 [&](const MethodCurve& c) { return c.name == cfg.baseline; });
  if (base != report.methods.end()) {
    for (const auto& curve : report.methods) {
      if (curve.name == base->name) continue;
      for (std::size_t b = 0; b < nb; ++b) {
        const auto x = mean_by_budget(curve.best, b);
        const auto y = mean_by_budget(base->best, b);
        PairedComparison c = paired_t_test(x, y);
        c.method = curve.name;
        c.baseline = base->name;
        c.budget = cfg.budgets[b];
        report.comparisons.push_back(std::move(c));
      }
    }
  }
  return report;
}

json to_json(const SynthBenchReport& report) {
  const SynthBenchConfig& cfg = report.config;
  json suite_cfg;
  if (cfg.suite == SynthSuite::kPlanted) {
    suite_cfg = {{"alphabet", cfg.planted.alphabet},
                 {"depth", cfg.planted.depth},
                 {"p_planted", cfg.planted.p_planted ? json(*cfg.planted.p_planted) : json(nullptr)}};
  } else {
    suite_cfg = {{"horizon", cfg.wiener.horizon}, {"dt", cfg.wiener.dt}};
  }
  json methods = json::array();
  for (std::size_t m = 0; m < report.methods.size(); ++m) {
    const auto& c = report.methods[m];
    methods.push_back({{"name", c.name},
                       {"config", cfg.methods[m].to_json()},
                       {"mean_best", c.mean},
                       {"ci_low", c.ci_low},
                       {"ci_high", c.ci_high},
                       {"solve_rate", c.solve_rate.empty() ? json(nullptr) : json(c.solve_rate)},
                       {"per_seed_best", c.best}});
  }
  json comparisons = json::array();
  for (const auto& c : report.comparisons) {
    comparisons.push_back({{"method", c.method},
                           {"baseline", c.baseline},
                           {"budget", c.budget},
                           {"n", c.n},
                           {"mean_difference", c.mean_difference},
                           {"t_statistic", number_to_json(c.t_statistic)},
                           {"p_value", c.p_value}});
  }
  return {{"suite", std::string(to_string(cfg.suite))},
          {"suite_config", suite_cfg},
          {"seeds", cfg.seeds},
          {"seed", cfg.seed},
          {"budgets", cfg.budgets},
          {"baseline", cfg.baseline},
          {"confidence", cfg.confidence},
          {"bootstrap_resamples", cfg.bootstrap_resamples},
          {"methods", methods},
          {"comparisons", comparisons}};
}

}  // namespace disc
