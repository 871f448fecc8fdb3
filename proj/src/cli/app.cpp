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

#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "disc/cli/commands.hpp"

namespace disc {
namespace {

const std::vector<std::string> kCriteria = {"z", "q", "negz", "negq", "random", "zguard"};
const std::vector<std::string> kMethods = {"disc", "disc-metric", "mcts",     "beam",
                                           "bon",  "tokensplit",  "linesplit"};

struct EngineFlags {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> budget_samples;
  std::optional<std::size_t> budget_tokens;
  std::optional<double> alpha0;
  std::optional<double> sigma;
  std::optional<std::string> criterion;
  std::vector<std::string> methods;
  std::optional<std::size_t> parallel;
  std::optional<std::string> out;

  void attach(CLI::App& app) {
    app.add_option("--out", out, "Output directory");
    app.add_option("--seed", seed, "Global seed");
    app.add_option("--budget-samples", budget_samples, "Sample budget per run")
        ->check(CLI::PositiveNumber);
    app.add_option("--budget-tokens", budget_tokens, "Completion-token budget per run")
        ->check(CLI::PositiveNumber);
    app.add_option("--alpha0", alpha0, "Initial step fraction")->check(CLI::Range(0.0, 1.0));
    app.add_option("--sigma", sigma, "Cumulative-reward stopping threshold")
        ->check(CLI::PositiveNumber);
    app.add_option("--criterion", criterion, "Acceptance criterion")
        ->check(CLI::IsMember(kCriteria));
    app.add_option("--method", methods, "Method (repeatable)")->check(CLI::IsMember(kMethods));
    app.add_option("--parallel", parallel, "Worker count")->check(CLI::PositiveNumber);
  }

  Overrides overrides() const {
    Overrides o;
    o.seed = seed;
    o.budget_samples = budget_samples;
    o.budget_tokens = budget_tokens;
    o.alpha0 = alpha0;
    o.sigma = sigma;
    o.criterion = criterion;
    o.methods = methods;
    o.parallel = parallel;
    if (out) o.out = *out;
    return o;
  }
};

}  // namespace

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dynamic decomposition search for sequence generation"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  EngineFlags run_flags;
  std::string manifest_path;
  bool resume = false;
  auto* run = app.add_subcommand("run", "Run every (problem, method) cell of a manifest");
  run->add_option("--manifest", manifest_path, "Run manifest (JSON)")->required();
  run->add_flag("--resume", resume, "Continue a non-empty output directory");
  run_flags.attach(*run);

  CompareOptions compare_opts;
  std::string compare_metric = "pass@k";
  std::optional<std::string> compare_out;
  auto* compare = app.add_subcommand("compare", "Compare methods across run logs");
  compare->add_option("logs", compare_opts.log_dirs, "Log directories")->required();
  compare->add_option("--metric", compare_metric, "pass@k or pass@token")
      ->check(CLI::IsMember({"pass@k", "pass@token"}));
  compare->add_option("--budgets", compare_opts.budgets, "Budgets")->delimiter(',');
  compare->add_option("--baseline", compare_opts.baseline, "Baseline method name");
  compare->add_option("--out", compare_out, "Output directory for CSV and JSON");

  AnalyzeOptions analyze_opts;
  std::optional<std::string> analyze_out;
  auto* analyze = app.add_subcommand("analyze", "Per-method analytics from run logs");
  analyze->add_option("logs", analyze_opts.log_dirs, "Log directories")->required();
  analyze->add_option("--bins", analyze_opts.bins, "Reward histogram bins")
      ->check(CLI::PositiveNumber);
  analyze->add_option("--out", analyze_out, "Output directory");

  EngineFlags bench_flags;
  SynthBenchConfig bench;
  std::string suite = "planted";
  std::optional<double> p_planted;
  auto* synth = app.add_subcommand("synth-bench", "Seeded comparison on a synthetic suite");
  synth->add_option("--suite", suite, "planted or wiener")
      ->check(CLI::IsMember({"planted", "wiener"}));
  synth->add_option("--seeds", bench.seeds, "Number of seeds")->check(CLI::PositiveNumber);
  synth->add_option("--budgets", bench.budgets, "Sample budgets")->delimiter(',');
  synth->add_option("--baseline", bench.baseline, "Baseline method name");
  synth->add_option("--bootstrap", bench.bootstrap_resamples, "Bootstrap resamples");
  synth->add_option("--depth", bench.planted.depth, "Planted tree depth");
  synth->add_option("--p-planted", p_planted, "Per-position planted probability");
  synth->add_option("--horizon", bench.wiener.horizon, "Wiener horizon T");
  synth->add_option("--dt", bench.wiener.dt, "Wiener step dt");
  bench_flags.attach(*synth);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e_out;
    const int code = app.exit(e, o, e_out);
    out << o.str();
    err << e_out.str();
    return code;
  }
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::warn);

  if (run->parsed()) {
    RunOptions opts;
    try {
      opts.manifest = load_manifest(manifest_path, run_flags.overrides());
    } catch (const std::exception& e) {
      err << "configuration error: " << e.what() << '\n';
      return 2;
    }
    opts.resume = resume;
    return cmd_run(opts, out, err);
  }
  if (compare->parsed()) {
    compare_opts.metric =
        compare_metric == "pass@k" ? CompareMetric::kPassAtK : CompareMetric::kPassAtToken;
    if (compare_out) compare_opts.out = *compare_out;
    return cmd_compare(compare_opts, out, err);
  }
  if (analyze->parsed()) {
    if (analyze_out) analyze_opts.out = *analyze_out;
    return cmd_analyze(analyze_opts, out, err);
  }

  SynthBenchOptions opts;
  try {
    const Overrides o = bench_flags.overrides();
    bench.suite = parse_synth_suite(suite);
    bench.planted.p_planted = p_planted;
    if (o.seed) bench.seed = *o.seed;
    if (o.parallel) bench.parallel = *o.parallel;
    if (o.budget_samples) {
      std::erase_if(bench.budgets, [&](std::size_t b) { return b >= *o.budget_samples; });
      bench.budgets.push_back(*o.budget_samples);
    }
    const std::vector<std::string> kinds =
        o.methods.empty() ? std::vector<std::string>{"disc", "bon"} : o.methods;
    for (const auto& k : kinds) {
      MethodSpec m;
      m.kind = parse_method_kind(k);
      m.name = k;
      if (o.budget_tokens) m.search.engine.budget_tokens = *o.budget_tokens;
      if (o.alpha0) m.search.engine.alpha0 = *o.alpha0;
      if (o.sigma) m.search.engine.sigma = *o.sigma;
      if (o.criterion) m.search.engine.criterion = parse_criterion(*o.criterion);
      bench.methods.push_back(std::move(m));
    }
    if (o.out) opts.out = *o.out;
  } catch (const std::exception& e) {
    err << "configuration error: " << e.what() << '\n';
    return 2;
  }
  opts.config = std::move(bench);
  return cmd_synth_bench(opts, out, err);
}

}  // namespace disc
