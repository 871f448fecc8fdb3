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

#include "disc/harness/methods.hpp"

#include <array>
#include <stdexcept>
#include <utility>

#include "disc/harness/run_log.hpp"

namespace disc {
namespace {

using nlohmann::json;

constexpr std::array<std::pair<MethodKind, std::string_view>, 7> kNames{{
    {MethodKind::kDisc, "disc"},
    {MethodKind::kDiscMetric, "disc-metric"},
    {MethodKind::kMcts, "mcts"},
    {MethodKind::kBeam, "beam"},
    {MethodKind::kBoN, "bon"},
    {MethodKind::kTokenSplit, "tokensplit"},
    {MethodKind::kLineSplit, "linesplit"},
}};

}  // namespace

std::string_view to_string(MethodKind kind) {
  for (const auto& [k, n] : kNames) {
    if (k == kind) return n;
  }
  return "disc";
}

MethodKind parse_method_kind(std::string_view name) {
  for (const auto& [k, n] : kNames) {
    if (n == name) return k;
  }
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

void MethodSpec::validate() const {
  if (name.empty()) throw std::invalid_argument("method name must be non-empty");
  search.validate();
  if (kind == MethodKind::kLineSplit && delimiter.empty()) {
    throw std::invalid_argument("linesplit needs a non-empty delimiter");
  }
}

json MethodSpec::to_json() const {
  const EngineConfig& e = search.engine;
  json j = {{"name", name},
            {"kind", std::string(disc::to_string(kind))},
            {"alpha0", e.alpha0},
            {"sigma", e.sigma},
            {"budget_samples", e.budget_samples},
            {"budget_tokens", e.budget_tokens ? json(*e.budget_tokens) : json(nullptr)},
            {"criterion", std::string(disc::to_string(e.criterion))},
            {"theta", number_to_json(e.theta)},
            {"inference_mode", e.inference_mode},
            {"temperature", e.policy_params.temperature},
            {"max_units", e.policy_params.max_units},
            {"r_star", e.r_star},
            {"metric", std::string(disc::to_string(e.metric))},
            {"speculative_batch", e.speculative_batch}};
  if (kind == MethodKind::kMcts || kind == MethodKind::kBeam) {
    j["exploration_c"] = search.exploration_c;
    j["beam_width"] = search.beam_width;
    j["max_children"] = search.max_children;
    j["learning_rate"] =
        search.learning_rate.kind == LearningRateSchedule::Kind::kConstant
            ? json(search.learning_rate.constant)
            : json("visits");
  }
  if (kind == MethodKind::kLineSplit) j["delimiter"] = delimiter;
  return j;
}

MethodSpec MethodSpec::from_json(const json& j, const MethodSpec& defaults) {
  MethodSpec m = defaults;
  EngineConfig& e = m.search.engine;
  try {
    if (j.contains("kind")) m.kind = parse_method_kind(j.at("kind").get<std::string>());
    m.name = j.value("name", j.contains("kind") ? std::string(disc::to_string(m.kind)) : m.name);
    if (m.name.empty()) m.name = std::string(disc::to_string(m.kind));
    e.alpha0 = j.value("alpha0", e.alpha0);
    e.sigma = j.value("sigma", e.sigma);
    e.budget_samples = j.value("budget_samples", e.budget_samples);
    if (j.contains("budget_tokens")) {
      const auto& t = j.at("budget_tokens");
      e.budget_tokens = t.is_null() ? std::nullopt : std::optional(t.get<std::size_t>());
    }
    if (j.contains("criterion")) {
      e.criterion = parse_criterion(j.at("criterion").get<std::string>());
    }
    if (j.contains("theta")) e.theta = number_from_json(j.at("theta"));
    e.inference_mode = j.value("inference_mode", e.inference_mode);
    e.policy_params.temperature = j.value("temperature", e.policy_params.temperature);
    e.policy_params.max_units = j.value("max_units", e.policy_params.max_units);
    e.r_star = j.value("r_star", e.r_star);
    if (j.contains("metric")) e.metric = parse_priority_metric(j.at("metric").get<std::string>());
    e.speculative_batch = j.value("speculative_batch", e.speculative_batch);
    m.search.exploration_c = j.value("exploration_c", m.search.exploration_c);
    m.search.beam_width = j.value("beam_width", m.search.beam_width);
    m.search.max_children = j.value("max_children", m.search.max_children);
    if (j.contains("learning_rate")) {
      const auto& lr = j.at("learning_rate");
      if (lr.is_number()) {
        m.search.learning_rate = {LearningRateSchedule::Kind::kConstant, lr.get<double>()};
      } else {
        m.search.learning_rate = {};
      }
    }
    m.delimiter = j.value("delimiter", m.delimiter);
  } catch (const json::exception& ex) {
    throw std::invalid_argument(std::string("method config: ") + ex.what());
  }
  m.validate();
  return m;
}

MethodSpec MethodSpec::from_json(const json& j) {
  MethodSpec defaults;
  defaults.name = "disc";
  return from_json(j, defaults);
}

Decomposition run_method(const MethodSpec& method, const Problem& problem,
                         const GenerationPolicy& policy, const RewardModel& reward) {
  const EngineConfig& cfg = method.search.engine;
  switch (method.kind) {
    case MethodKind::kDisc:
      return greedy_disc(problem, policy, reward, cfg);
    case MethodKind::kDiscMetric:
      return metric_split_decomposition(problem, policy, reward, cfg);
    case MethodKind::kMcts:
      return mcts_disc(problem, policy, reward, method.search);
    case MethodKind::kBeam:
      return beam_disc(problem, policy, reward, method.search);
    case MethodKind::kBoN:
      return best_of_n_decomposition(problem, policy, reward, cfg);
    case MethodKind::kTokenSplit:
      return static_split_search(problem, policy, reward, BaselineKind::kTokenSplit, cfg);
    case MethodKind::kLineSplit:
      return static_split_search(problem, policy, reward, BaselineKind::kLineSplit, cfg,
                                 method.delimiter);
  }
  throw std::logic_error("unhandled method kind");
}

}  // namespace disc
