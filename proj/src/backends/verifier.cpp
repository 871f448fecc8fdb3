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

#include "disc/backends/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <regex>
#include <sstream>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "disc/backends/sandbox.hpp"
#include "disc/backends/synthetic.hpp"

namespace disc {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

std::string_view answer_text(const Problem& problem, const TextSeq& solution) {
  std::string_view t = solution.text;
  if (t.starts_with(problem.prompt.text)) t.remove_prefix(problem.prompt.text.size());
  return t;
}

std::vector<std::string> tokens_of(std::string_view s) {
  std::istringstream in{std::string(s)};
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(std::move(tok));
  return out;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw BackendError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string substitute(std::string s, std::string_view key, const std::string& value) {
  for (std::size_t pos = s.find(key); pos != std::string::npos;
       pos = s.find(key, pos + value.size())) {
    s.replace(pos, key.size(), value);
  }
  return s;
}

bool run_test(const ExternalCommand& spec, const CommandTest& test, std::string_view program) {
  TempDir dir;
  const fs::path solution = dir.path() / spec.solution_file;
  {
    std::ofstream out(solution, std::ios::binary);
    out << program;
  }
  std::string cmd = substitute(spec.command, "{solution}", solution.string());
  cmd = substitute(cmd, "{input}", test.input.string());
  cmd = substitute(cmd, "{dir}", dir.path().string());
  const CommandResult r = run_sandboxed(cmd, dir.path(), test.input, spec.timeout);
  if (r.timed_out || r.exit_code != 0) return false;
  if (!test.expected) return true;
  return tokens_of(r.output) == tokens_of(read_file(*test.expected));
}

double score_command(const ExternalCommand& spec, std::string_view program) {
  if (spec.tests.empty()) return 0.0;
  const std::size_t workers = std::max<std::size_t>(1, spec.workers);
  std::size_t passed = 0;
  for (std::size_t start = 0; start < spec.tests.size(); start += workers) {
    std::vector<std::future<bool>> batch;
    const std::size_t end = std::min(spec.tests.size(), start + workers);
    for (std::size_t i = start; i < end; ++i) {
      batch.push_back(std::async(std::launch::async, [&, i] {
        return run_test(spec, spec.tests[i], program);
      }));
    }
    for (auto& f : batch) passed += f.get() ? 1 : 0;
  }
  return static_cast<double>(passed) / static_cast<double>(spec.tests.size());
}

}  // namespace

VerifierSpec parse_verifier(const json& j, const fs::path& base_dir) {
  if (!j.is_object() || !j.contains("kind")) {
    throw std::invalid_argument("verifier needs a 'kind' field");
  }
  const std::string kind = j.at("kind").get<std::string>();
  try {
    if (kind == "exact") return ExactMatch{j.at("target").get<std::string>()};
    if (kind == "numeric") {
      return NumericMatch{j.at("target").get<double>(), j.value("tolerance", 1e-6)};
    }
    if (kind == "constant") return ConstantReward{j.at("value").get<double>()};
    if (kind == "planted") return PlantedMatch{j.at("target").get<std::string>()};
    if (kind == "wiener") return WienerFinal{};
    if (kind == "command") {
      ExternalCommand c;
      c.command = j.at("command").get<std::string>();
      c.solution_file = j.value("solution_file", c.solution_file);
      c.timeout = Duration(j.value("timeout_s", c.timeout.count()));
      c.workers = j.value("workers", c.workers);
      for (const auto& t : j.at("tests")) {
        CommandTest test;
        test.input = resolve(base_dir, t.at("input").get<std::string>());
        if (t.contains("expected")) {
          test.expected = resolve(base_dir, t.at("expected").get<std::string>());
        }
        c.tests.push_back(std::move(test));
      }
      if (c.command.empty()) throw std::invalid_argument("empty command");
      if (!(c.timeout.count() > 0.0)) throw std::invalid_argument("timeout must be positive");
      return c;
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument("verifier '" + kind + "': " + e.what());
  }
  throw std::invalid_argument("unknown verifier kind '" + kind + "'");
}

std::optional<double> extract_last_number(std::string_view text) {
  static const std::regex number(R"([-+]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][-+]?\d+)?)");
  const std::string s(text);
  std::optional<double> last;
  for (auto it = std::sregex_iterator(s.begin(), s.end(), number); it != std::sregex_iterator();
       ++it) {
    last = std::strtod(it->str().c_str(), nullptr);
  }
  return last;
}

std::string normalize_answer(std::string_view text) {
  const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
  while (!text.empty() && ws(text.front())) text.remove_prefix(1);
  while (!text.empty() && ws(text.back())) text.remove_suffix(1);
  return std::string(text);
}

double score_with_verifier(const VerifierSpec& spec, const Problem& problem,
                           const TextSeq& solution) {
  const std::string_view answer = answer_text(problem, solution);
  return std::visit(
      Overloaded{
          [&](const ExactMatch& m) {
            return normalize_answer(answer) == normalize_answer(m.target) ? 1.0 : 0.0;
          },
          [&](const NumericMatch& m) {
            const auto x = extract_last_number(answer);
            if (!x) {
              spdlog::warn("problem {}: no number found in completion", problem.id);
              return 0.0;
            }
            return std::abs(*x - m.target) <= m.tolerance ? 1.0 : 0.0;
          },
          [&](const ExternalCommand& c) { return score_command(c, answer); },
          [](const ConstantReward& c) { return c.value; },
          [&](const PlantedMatch& m) {
            return PlantedPrefixReward(TextSeq(m.target)).score(problem, solution);
          },
          [&](const WienerFinal&) { return WienerReward().score(problem, solution); },
      },
      spec);
}

double VerifierReward::score(const Problem& problem, const TextSeq& solution) const {
  return score_with_verifier(spec_, problem, solution);
}

std::optional<double> VerifierReward::correctness_threshold() const {
  if (std::holds_alternative<WienerFinal>(spec_)) return std::nullopt;
  return 1.0;
}

}  // namespace disc
