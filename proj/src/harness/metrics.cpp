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

#include "disc/harness/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "disc/stats.hpp"

namespace disc {
namespace {

using nlohmann::json;

std::vector<std::size_t> sorted_unique(std::span<const std::size_t> v) {
  std::vector<std::size_t> out(v.begin(), v.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Curve fraction_curve(BudgetAxis axis, std::span<const RunLog> logs,
                     std::span<const std::size_t> budgets,
                     std::optional<std::size_t> (*solve_at)(const RunLog&)) {
  Curve c{axis, {}};
  std::vector<std::optional<std::size_t>> at;
  at.reserve(logs.size());
  for (const auto& log : logs) at.push_back(solve_at(log));
  for (std::size_t b : sorted_unique(budgets)) {
    std::size_t solved = 0;
    for (const auto& a : at) solved += (a && *a <= b) ? 1 : 0;
    c.points.emplace_back(b, logs.empty() ? 0.0
                                          : static_cast<double>(solved) /
                                                static_cast<double>(logs.size()));
  }
  return c;
}

}  // namespace

std::optional<std::size_t> solve_index(const RunLog& log) {
  if (!log.correct_threshold) return std::nullopt;
  for (std::size_t i = 0; i < log.samples.size(); ++i) {
    if (log.samples[i].reward >= *log.correct_threshold) return i + 1;
  }
  return std::nullopt;
}

std::optional<std::size_t> solve_tokens(const RunLog& log) {
  if (!log.correct_threshold) return std::nullopt;
  std::size_t tokens = 0;
  for (const auto& s : log.samples) {
    tokens += s.tokens;
    if (s.reward >= *log.correct_threshold) return tokens;
  }
  return std::nullopt;
}

Curve pass_at_k(std::span<const RunLog> logs, std::span<const std::size_t> ks) {
  return fraction_curve(BudgetAxis::kSamples, logs, ks, &solve_index);
}

Curve pass_at_token(std::span<const RunLog> logs, std::span<const std::size_t> budgets) {
  return fraction_curve(BudgetAxis::kTokens, logs, budgets, &solve_tokens);
}

std::vector<std::size_t> active_steps(const RunLog& log) {
  std::vector<std::size_t> appends_at;
  for (const auto& c : log.commits) {
    if (c.action == CommitAction::kAppend) appends_at.push_back(c.step.committed_at);
  }
  std::sort(appends_at.begin(), appends_at.end());
  std::vector<std::size_t> out(log.samples.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    while (k < appends_at.size() && appends_at[k] <= i) ++k;
    out[i] = k;
  }
  return out;
}

PartitionStats partition_stats(std::span<const RunLog> logs) {
  PartitionStats p;
  std::vector<std::vector<double>> grouped;
  for (const auto& log : logs) {
    ++p.step_count_histogram[log.steps().size()];
    const auto active = active_steps(log);
    for (std::size_t i = 0; i < active.size(); ++i) {
      if (active[i] >= grouped.size()) grouped.resize(active[i] + 1);
      grouped[active[i]].push_back(log.samples[i].reward);
    }
  }
  for (const auto& g : grouped) {
    double sum = 0.0;
    for (double r : g) sum += r;
    const double mean = g.empty() ? 0.0 : sum / static_cast<double>(g.size());
    double sq = 0.0;
    for (double r : g) sq += (r - mean) * (r - mean);
    p.step_reward_mean.push_back(mean);
    p.step_reward_std.push_back(g.empty() ? 0.0 : std::sqrt(sq / static_cast<double>(g.size())));
    p.step_sample_count.push_back(g.size());
  }
  return p;
}

OverheadReport overhead_report(std::span<const RunLog> logs) {
  OverheadReport r;
  for (const auto& log : logs) {
    for (const auto& s : log.samples) r.generation += s.gen_time;
    r.total += log.wall_time;
  }
  if (r.total.count() > 0.0) {
    r.generation_fraction = std::clamp(r.generation / r.total, 0.0, 1.0);
    r.overhead_fraction = 1.0 - r.generation_fraction;
  }
  return r;
}

RewardHistogram reward_histogram(std::span<const double> rewards, std::size_t bins) {
  if (bins < 1) throw std::invalid_argument("need at least one bin");
  RewardHistogram h;
  if (rewards.empty()) return h;
  const auto [lo_it, hi_it] = std::minmax_element(rewards.begin(), rewards.end());
  const double lo = *lo_it, hi = *hi_it;
  const RewardStats st = reward_stats(rewards);
  h.mean = st.mean;
  h.std = st.std;
  if (!(hi > lo)) {
    h.edges = {lo, hi};
    h.counts = {rewards.size()};
    return h;
  }
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i < bins; ++i) h.edges.push_back(lo + width * static_cast<double>(i));
  h.edges.push_back(hi);
  h.counts.assign(bins, 0);
  for (double r : rewards) {
    auto b = static_cast<std::size_t>((r - lo) / width);
    ++h.counts[std::min(b, bins - 1)];
  }
  return h;
}

std::string to_csv(const Curve& curve) {
  std::ostringstream out;
  out.precision(17);
  out << "budget,value\n";
  for (const auto& [b, v] : curve.points) out << b << ',' << v << '\n';
  return out.str();
}

json to_json(const Curve& curve) {
  json pts = json::array();
  for (const auto& [b, v] : curve.points) pts.push_back({{"budget", b}, {"value", v}});
  return {{"axis", curve.axis == BudgetAxis::kSamples ? "samples" : "tokens"}, {"points", pts}};
}

json to_json(const PartitionStats& p) {
  json hist = json::object();
  for (const auto& [k, n] : p.step_count_histogram) hist[std::to_string(k)] = n;
  return {{"step_count_histogram", hist},
          {"step_reward_mean", p.step_reward_mean},
          {"step_reward_std", p.step_reward_std},
          {"step_sample_count", p.step_sample_count}};
}

json to_json(const OverheadReport& o) {
  return {{"generation_s", o.generation.count()},
          {"total_s", o.total.count()},
          {"generation_fraction", o.generation_fraction},
          {"overhead_fraction", o.overhead_fraction}};
}

json to_json(const RewardHistogram& h) {
  return {{"edges", h.edges}, {"counts", h.counts}, {"mean", h.mean}, {"std", h.std}};
}

}  // namespace disc
