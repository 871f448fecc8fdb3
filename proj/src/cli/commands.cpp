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

#include "disc/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <spdlog/spdlog.h>

#include "disc/backends/http.hpp"
#include "disc/backends/synthetic.hpp"
#include "disc/backends/verifier.hpp"
#include "disc/harness/run_log.hpp"

namespace disc {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    out += ok ? c : '_';
  }
  if (out.empty() || out != s || out.front() == '.') {
    char suffix[20];
    std::snprintf(suffix, sizeof suffix, "-%08llx",
                  static_cast<unsigned long long>(fnv1a(s) & 0xffffffffULL));
    out += suffix;
  }
  return out;
}

fs::path resolve(const fs::path& base, const fs::path& p) {
  return p.is_absolute() || base.empty() ? p : base / p;
}

std::string method_name(const RunLog& log) {
  return log.method.is_object() ? log.method.value("name", std::string("?")) : std::string("?");
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::vector<RunLog> load_all(const std::vector<fs::path>& dirs) {
  std::vector<RunLog> logs;
  for (const auto& d : dirs) {
    auto part = load_run_logs(d);
    logs.insert(logs.end(), std::make_move_iterator(part.begin()),
                std::make_move_iterator(part.end()));
  }
  return logs;
}

std::string target_of(const Problem& problem) {
  const auto& v = problem.verifier;
  if (v.is_object() && v.contains("target") && v.at("target").is_string()) {
    return v.at("target").get<std::string>();
  }
  throw std::invalid_argument("problem " + problem.id +
                              ": planted policy needs a verifier with a string target");
}

void apply_overrides(MethodSpec& m, const Overrides& o) {
  EngineConfig& e = m.search.engine;
  if (o.budget_samples) e.budget_samples = *o.budget_samples;
  if (o.budget_tokens) e.budget_tokens = *o.budget_tokens;
  if (o.alpha0) e.alpha0 = *o.alpha0;
  if (o.sigma) e.sigma = *o.sigma;
  if (o.criterion) e.criterion = parse_criterion(*o.criterion);
  m.validate();
}

}  // namespace

RunManifest RunManifest::from_json(const json& j, const fs::path& base_dir,
                                   const Overrides& overrides) {
  RunManifest m;
  try {
    m.problems = resolve(base_dir, j.at("problems").get<std::string>());
    m.scheme = parse_unit_scheme(j.value("unit_scheme", std::string("character")));
    if (overrides.out) {
      m.out = *overrides.out;
    } else if (j.contains("out")) {
      m.out = resolve(base_dir, j.at("out").get<std::string>());
    } else {
      throw std::invalid_argument("no output directory (set 'out' or pass --out)");
    }
    m.seed = overrides.seed.value_or(j.value("seed", std::uint64_t{0}));
    m.parallel = overrides.parallel.value_or(j.value("parallel", std::size_t{1}));
    m.record_timings = j.value("record_timings", true);
    m.policy = j.at("policy");
    m.reward = j.value("reward", m.reward);

    MethodSpec defaults;
    if (j.contains("defaults")) defaults = MethodSpec::from_json(j.at("defaults"), defaults);
    std::vector<json> entries;
    if (!overrides.methods.empty()) {
      for (const auto& k : overrides.methods) entries.push_back({{"kind", k}});
    } else if (j.contains("methods")) {
      for (const auto& e : j.at("methods")) {
        entries.push_back(e.is_string() ? json{{"kind", e}} : e);
      }
    } else {
      for (const char* k : {"disc", "tokensplit", "linesplit", "bon"}) {
        entries.push_back({{"kind", k}});
      }
    }
    std::set<std::string> names;
    for (const auto& e : entries) {
      MethodSpec spec = MethodSpec::from_json(e, defaults);
      apply_overrides(spec, overrides);
      if (!names.insert(spec.name).second) {
        throw std::invalid_argument("duplicate method name '" + spec.name + "'");
      }
      m.methods.push_back(std::move(spec));
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("manifest: ") + e.what());
  }
  if (m.parallel < 1) throw std::invalid_argument("parallel must be at least 1");
  return m;
}

RunManifest load_manifest(const fs::path& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read manifest " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw std::invalid_argument("manifest " + path.string() + ": " + e.what());
  }
  return RunManifest::from_json(j, path.parent_path(), overrides);
}

PolicyFactory::PolicyFactory(json config) : config_(std::move(config)) {
  const std::string type = config_.at("type").get<std::string>();
  if (type == "http") {
    shared_ = std::make_shared<HttpGenerationBackend>(HttpBackendConfig::from_json(config_));
  } else if (type == "planted") {
    const auto alphabet = config_.at("alphabet").get<std::vector<std::string>>();
    PlantedTreePolicy::uniform(TextSeq("?"), alphabet, TextSeq(alphabet.front()), 0);
  } else if (type == "wiener") {
    WienerPolicy(TextSeq("W"), config_.value("horizon", 1.0), config_.value("dt", 0.01), 0);
  } else {
    throw std::invalid_argument("unknown policy type '" + type + "'");
  }
}

std::shared_ptr<const GenerationPolicy> PolicyFactory::for_problem(const Problem& problem,
                                                                   std::uint64_t seed) const {
  if (shared_) return shared_;
  const std::string type = config_.at("type").get<std::string>();
  if (type == "planted") {
    auto alphabet = config_.at("alphabet").get<std::vector<std::string>>();
    const TextSeq target(target_of(problem));
    if (config_.contains("p_planted") && !config_.at("p_planted").is_null()) {
      return std::make_shared<PlantedTreePolicy>(PlantedTreePolicy::biased(
          problem.prompt, std::move(alphabet), target, config_.at("p_planted").get<double>(),
          seed));
    }
    return std::make_shared<PlantedTreePolicy>(
        PlantedTreePolicy::uniform(problem.prompt, std::move(alphabet), target, seed));
  }
  return std::make_shared<WienerPolicy>(problem.prompt, config_.value("horizon", 1.0),
                                        config_.value("dt", 0.01), seed);
}

std::unique_ptr<RewardModel> make_reward(const json& config, const Problem& problem,
                                         const fs::path& base_dir) {
  const std::string type = config.value("type", std::string("verifier"));
  if (type != "verifier") throw std::invalid_argument("unknown reward type '" + type + "'");
  return std::make_unique<VerifierReward>(parse_verifier(problem.verifier, base_dir));
}

std::uint64_t cell_seed(std::uint64_t global_seed, const std::string& problem_id) {
  return mix_seed(global_seed, fnv1a(problem_id));
}

fs::path cell_log_path(const fs::path& out, const std::string& method,
                       const std::string& problem_id) {
  return out / sanitize(method) / (sanitize(problem_id) + ".jsonl");
}

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err) {
  const RunManifest& manifest = options.manifest;
  std::vector<Problem> problems;
  std::unique_ptr<PolicyFactory> factory;
  const fs::path base_dir = manifest.problems.parent_path();
  try {
    if (fs::exists(manifest.out) && !fs::is_empty(manifest.out) && !options.resume) {
      err << "output directory " << manifest.out << " is not empty; pass --resume to continue it\n";
      return 2;
    }
    problems = load_problem_set(manifest.problems, manifest.scheme);
    if (!options.policy_override) factory = std::make_unique<PolicyFactory>(manifest.policy);
    for (const auto& p : problems) {
      make_reward(manifest.reward, p, base_dir);
      if (factory) factory->for_problem(p, 0);
    }
  } catch (const std::exception& e) {
    err << "configuration error: " << e.what() << '\n';
    return 2;
  }
  fs::create_directories(manifest.out);
  {
    json snapshot = {{"problems", manifest.problems.string()},
                     {"unit_scheme", std::string(to_string(manifest.scheme))},
                     {"seed", manifest.seed},
                     {"record_timings", manifest.record_timings},
                     {"policy", manifest.policy},
                     {"reward", manifest.reward},
                     {"methods", json::array()}};
    for (const auto& m : manifest.methods) snapshot["methods"].push_back(m.to_json());
    write_text(manifest.out / "manifest.resolved.json", snapshot.dump(2) + "\n");
  }

  struct Cell {
    const Problem* problem;
    const MethodSpec* method;
    fs::path path;
  };
  std::vector<Cell> cells;
  std::size_t skipped = 0;
  for (const auto& p : problems) {
    for (const auto& m : manifest.methods) {
      fs::path path = cell_log_path(manifest.out, m.name, p.id);
      if (options.resume && fs::exists(path)) {
        try {
          const RunLog existing = read_run_log(path);
          if (existing.complete && !existing.error) {
            ++skipped;
            continue;
          }
        } catch (const std::exception&) {
        }
      }
      cells.push_back({&p, &m, std::move(path)});
    }
  }

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> failed{0};
  std::mutex err_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const Cell& cell = cells[i];
      MethodSpec method = *cell.method;
      EngineConfig& cfg = method.search.engine;
      cfg.rng_seed = cell_seed(manifest.seed, cell.problem->id);
      cfg.record_timings = manifest.record_timings;
      Decomposition d;
      std::optional<std::string> error;
      std::optional<double> threshold = 1.0;
      try {
        const auto policy = options.policy_override
                                ? options.policy_override
                                : factory->for_problem(*cell.problem, cfg.rng_seed);
        const auto reward = make_reward(manifest.reward, *cell.problem, base_dir);
        threshold = reward->correctness_threshold();
        if (policy->serial_only()) {
          SerializedPolicy serial(*policy);
          d = run_method(method, *cell.problem, serial, *reward);
        } else {
          d = run_method(method, *cell.problem, *policy, *reward);
        }
      } catch (const RunAborted& e) {
        d = e.partial();
        error = e.what();
      } catch (const std::exception& e) {
        error = e.what();
      }
      if (error) {
        ++failed;
        std::lock_guard lock(err_mutex);
        err << "cell " << method.name << "/" << cell.problem->id << " failed: " << *error << '\n';
      }
      try {
        write_run_log(cell.path,
                      make_run_log(*cell.problem, method.to_json(), cfg, threshold, d, error));
      } catch (const std::exception& e) {
        if (!error) ++failed;
        std::lock_guard lock(err_mutex);
        err << "cannot write " << cell.path << ": " << e.what() << '\n';
      }
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(manifest.parallel, cells.size()));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }
  out << "cells run: " << cells.size() << ", skipped: " << skipped
      << ", failed: " << failed.load() << '\n';
  return 0;
}

std::vector<CompareRow> compare_logs(std::span<const RunLog> logs, CompareMetric metric,
                                     std::span<const std::size_t> budgets,
                                     const std::string& baseline) {
  std::map<std::string, std::vector<RunLog>> by_method;
  for (const auto& log : logs) by_method[method_name(log)].push_back(log);
  std::map<std::string, Curve> curves;
  for (const auto& [name, group] : by_method) {
    curves[name] = metric == CompareMetric::kPassAtK ? pass_at_k(group, budgets)
                                                     : pass_at_token(group, budgets);
  }
  const auto base = curves.find(baseline);
  std::vector<CompareRow> rows;
  for (const auto& [name, curve] : curves) {
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
      CompareRow row{name, curve.points[i].first, curve.points[i].second, std::nullopt};
      if (base != curves.end()) {
        const double err_base = 1.0 - base->second.points[i].second;
        const double err = 1.0 - row.value;
        if (err_base > 0.0) row.error_reduction = (err_base - err) / err_base;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

int cmd_compare(const CompareOptions& options, std::ostream& out, std::ostream& err) {
  std::vector<RunLog> logs;
  try {
    logs = load_all(options.log_dirs);
  } catch (const std::exception& e) {
    err << "cannot load logs: " << e.what() << '\n';
    return 2;
  }
  const auto rows = compare_logs(logs, options.metric, options.budgets, options.baseline);
  std::ostringstream csv;
  csv.precision(17);
  csv << "method,budget,value,error_reduction\n";
  json j = json::array();
  char line[256];
  std::snprintf(line, sizeof line, "%-16s %10s %10s %16s\n", "method", "budget",
                options.metric == CompareMetric::kPassAtK ? "pass@k" : "pass@token",
                "err_reduction");
  out << line;
  for (const auto& r : rows) {
    csv << r.method << ',' << r.budget << ',' << r.value << ',';
    if (r.error_reduction) csv << *r.error_reduction;
    csv << '\n';
    j.push_back({{"method", r.method},
                 {"budget", r.budget},
                 {"value", r.value},
                 {"error_reduction", r.error_reduction ? json(*r.error_reduction) : json(nullptr)}});
    std::snprintf(line, sizeof line, "%-16s %10zu %10.4f %16s\n", r.method.c_str(), r.budget,
                  r.value,
                  r.error_reduction ? std::to_string(*r.error_reduction).c_str() : "-");
    out << line;
  }
  if (options.out) {
    try {
      write_text(*options.out / "compare.csv", csv.str());
      write_text(*options.out / "compare.json", j.dump(2) + "\n");
    } catch (const std::exception& e) {
      err << e.what() << '\n';
      return 1;
    }
  }
  return 0;
}

json analyze_logs(std::span<const RunLog> logs, std::size_t bins) {
  std::map<std::string, std::vector<RunLog>> by_method;
  for (const auto& log : logs) by_method[method_name(log)].push_back(log);
  json j = json::object();
  for (const auto& [name, group] : by_method) {
    std::vector<double> rewards;
    std::size_t solved = 0, failed = 0;
    for (const auto& log : group) {
      for (const auto& s : log.samples) rewards.push_back(s.reward);
      solved += log.solved ? 1 : 0;
      failed += log.error ? 1 : 0;
    }
    j[name] = {{"runs", group.size()},
               {"solved", solved},
               {"failed", failed},
               {"partition", to_json(partition_stats(group))},
               {"overhead", to_json(overhead_report(group))},
               {"reward_histogram", to_json(reward_histogram(rewards, bins))}};
  }
  return j;
}

int cmd_analyze(const AnalyzeOptions& options, std::ostream& out, std::ostream& err) {
  std::vector<RunLog> logs;
  try {
    logs = load_all(options.log_dirs);
  } catch (const std::exception& e) {
    err << "cannot load logs: " << e.what() << '\n';
    return 2;
  }
  const json report = analyze_logs(logs, options.bins);
  if (options.out) {
    try {
      write_text(*options.out / "analysis.json", report.dump(2) + "\n");
    } catch (const std::exception& e) {
      err << e.what() << '\n';
      return 1;
    }
  }
  out << report.dump(2) << '\n';
  return 0;
}

int cmd_synth_bench(const SynthBenchOptions& options, std::ostream& out, std::ostream& err) {
  SynthBenchReport report;
  try {
    report = run_synth_bench(options.config);
  } catch (const std::exception& e) {
    err << "synth-bench failed: " << e.what() << '\n';
    return 2;
  }
  const json j = to_json(report);
  if (options.out) {
    try {
      write_text(*options.out / "report.json", j.dump(2) + "\n");
    } catch (const std::exception& e) {
      err << e.what() << '\n';
      return 1;
    }
  }
  char line[256];
  for (const auto& m : report.methods) {
    for (std::size_t b = 0; b < m.mean.size(); ++b) {
      std::snprintf(line, sizeof line, "%-12s K=%-6zu mean best %.4f  [%.4f, %.4f]\n",
                    m.name.c_str(), report.config.budgets[b], m.mean[b], m.ci_low[b],
                    m.ci_high[b]);
      out << line;
    }
  }
  for (const auto& c : report.comparisons) {
    std::snprintf(line, sizeof line, "%s - %s at K=%zu: %+.4f (t=%.3f, p=%.3g)\n",
                  c.method.c_str(), c.baseline.c_str(), c.budget, c.mean_difference,
                  c.t_statistic, c.p_value);
    out << line;
  }
  return 0;
}

}  // namespace disc
