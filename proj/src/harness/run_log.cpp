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

#include "disc/harness/run_log.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace disc {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json optional_size(const std::optional<std::size_t>& v) { return v ? json(*v) : json(nullptr); }

json sample_event(const SampleRecord& s) {
  return {{"type", "sample"},
          {"index", s.index},
          {"prefix", s.prefix.text},
          {"suffix", s.suffix.text},
          {"reward", number_to_json(s.reward)},
          {"tokens", s.tokens},
          {"gen_time", s.gen_time.count()},
          {"overhead_time", s.overhead_time.count()}};
}

json commit_event(const CommitEvent& c) {
  return {{"type", "commit"},
          {"step_index", c.step_index},
          {"action", c.action == CommitAction::kAppend ? "append" : "replace"},
          {"step", c.step.step_str.text},
          {"metric", c.step.metric ? number_to_json(*c.step.metric) : json(nullptr)},
          {"kind", std::string(to_string(c.step.kind))},
          {"samples_spent", c.step.samples_spent},
          {"committed_at", c.step.committed_at}};
}

}  // namespace

json number_to_json(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double number_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw std::invalid_argument("expected a number, got " + j.dump());
}

std::vector<StepRecord> RunLog::steps() const {
  std::vector<StepRecord> out;
  for (const auto& c : commits) {
    if (c.action == CommitAction::kAppend) {
      out.push_back(c.step);
    } else {
      if (c.step_index >= out.size()) throw std::invalid_argument("replace of a missing step");
      out[c.step_index] = c.step;
    }
  }
  return out;
}

RunLog make_run_log(const Problem& problem, json method, const EngineConfig& cfg,
                    std::optional<double> correct_threshold, const Decomposition& d,
                    std::optional<std::string> error) {
  RunLog log;
  log.problem_id = problem.id;
  log.method = std::move(method);
  log.seed = cfg.rng_seed;
  log.scheme = problem.prompt.scheme;
  log.budget_samples = cfg.budget_samples;
  log.budget_tokens = cfg.budget_tokens;
  log.correct_threshold = correct_threshold;
  log.samples = d.generated_solutions;
  log.commits = d.commits;
  log.complete = true;
  log.solved = d.solved;
  log.consumed_samples = d.generated_solutions.size();
  for (const auto& s : d.generated_solutions) {
    log.consumed_tokens += s.tokens;
    log.generation_time += s.gen_time;
    log.overhead_time += s.overhead_time;
  }
  log.wall_time = d.wall_time;
  log.final_solution = d.final_solution.text;
  log.error = std::move(error);
  return log;
}

std::string to_jsonl(const RunLog& log) {
  std::ostringstream out;
  const json start = {{"type", "meta"},
                      {"event", "start"},
                      {"problem_id", log.problem_id},
                      {"method", log.method},
                      {"seed", log.seed},
                      {"scheme", std::string(to_string(log.scheme))},
                      {"budget_samples", log.budget_samples},
                      {"budget_tokens", optional_size(log.budget_tokens)},
                      {"correct_threshold", log.correct_threshold
                                                ? number_to_json(*log.correct_threshold)
                                                : json(nullptr)}};
  out << start.dump() << '\n';
  std::size_t next_commit = 0;
  auto flush_commits = [&](std::size_t drawn) {
    while (next_commit < log.commits.size() &&
           log.commits[next_commit].step.committed_at <= drawn) {
      out << commit_event(log.commits[next_commit++]).dump() << '\n';
    }
  };
  for (std::size_t i = 0; i < log.samples.size(); ++i) {
    flush_commits(i);
    out << sample_event(log.samples[i]).dump() << '\n';
  }
  flush_commits(std::numeric_limits<std::size_t>::max());
  if (log.complete) {
    const json end = {{"type", "meta"},
                      {"event", "end"},
                      {"solved", log.solved},
                      {"consumed_samples", log.consumed_samples},
                      {"consumed_tokens", log.consumed_tokens},
                      {"generation_time", log.generation_time.count()},
                      {"overhead_time", log.overhead_time.count()},
                      {"wall_time", log.wall_time.count()},
                      {"final_solution", log.final_solution},
                      {"error", log.error ? json(*log.error) : json(nullptr)}};
    out << end.dump() << '\n';
  }
  return out.str();
}

RunLog parse_run_log(std::string_view jsonl) {
  RunLog log;
  bool started = false;
  std::size_t line_no = 0;
  std::istringstream in{std::string(jsonl)};
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json e = json::parse(line);
      const std::string type = e.at("type").get<std::string>();
      if (type == "meta" && e.at("event") == "start") {
        log.problem_id = e.at("problem_id").get<std::string>();
        log.method = e.at("method");
        log.seed = e.at("seed").get<std::uint64_t>();
        log.scheme = parse_unit_scheme(e.value("scheme", std::string("character")));
        log.budget_samples = e.at("budget_samples").get<std::size_t>();
        if (!e.at("budget_tokens").is_null()) {
          log.budget_tokens = e.at("budget_tokens").get<std::size_t>();
        }
        const auto& t = e.at("correct_threshold");
        log.correct_threshold =
            t.is_null() ? std::nullopt : std::optional<double>(number_from_json(t));
        started = true;
      } else if (!started) {
        throw std::invalid_argument("event before the start record");
      } else if (type == "sample") {
        SampleRecord s;
        s.index = e.at("index").get<std::size_t>();
        s.prefix = TextSeq(e.at("prefix").get<std::string>(), log.scheme);
        s.suffix = TextSeq(e.at("suffix").get<std::string>(), log.scheme);
        s.reward = number_from_json(e.at("reward"));
        s.tokens = e.at("tokens").get<std::size_t>();
        s.gen_time = Duration(e.at("gen_time").get<double>());
        s.overhead_time = Duration(e.at("overhead_time").get<double>());
        if (s.index != log.samples.size()) throw std::invalid_argument("sample out of order");
        log.samples.push_back(std::move(s));
      } else if (type == "commit") {
        CommitEvent c;
        c.step_index = e.at("step_index").get<std::size_t>();
        c.action = e.at("action") == "append" ? CommitAction::kAppend : CommitAction::kReplace;
        c.step.step_str = TextSeq(e.at("step").get<std::string>(), log.scheme);
        if (!e.at("metric").is_null()) c.step.metric = number_from_json(e.at("metric"));
        c.step.kind = parse_step_kind(e.at("kind").get<std::string>());
        c.step.samples_spent = e.at("samples_spent").get<std::size_t>();
        c.step.committed_at = e.at("committed_at").get<std::size_t>();
        log.commits.push_back(std::move(c));
      } else if (type == "meta" && e.at("event") == "end") {
        log.complete = true;
        log.solved = e.at("solved").get<bool>();
        log.consumed_samples = e.at("consumed_samples").get<std::size_t>();
        log.consumed_tokens = e.at("consumed_tokens").get<std::size_t>();
        log.generation_time = Duration(e.at("generation_time").get<double>());
        log.overhead_time = Duration(e.at("overhead_time").get<double>());
        log.wall_time = Duration(e.at("wall_time").get<double>());
        log.final_solution = e.at("final_solution").get<std::string>();
        if (!e.at("error").is_null()) log.error = e.at("error").get<std::string>();
      } else {
        throw std::invalid_argument("unknown event type '" + type + "'");
      }
    } catch (const json::exception& ex) {
      throw std::invalid_argument("run log line " + std::to_string(line_no) + ": " + ex.what());
    }
  }
  if (!started) throw std::invalid_argument("run log has no start record");
  return log;
}

void write_run_log(const fs::path& path, const RunLog& log) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << to_jsonl(log);
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

RunLog read_run_log(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_log(ss.str());
}

std::vector<RunLog> load_run_logs(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<RunLog> logs;
  logs.reserve(files.size());
  for (const auto& f : files) logs.push_back(read_run_log(f));
  return logs;
}

}  // namespace disc
