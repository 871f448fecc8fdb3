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

#include "disc/core.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace disc {
namespace {

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

bool is_utf8_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

}  // namespace

std::string_view to_string(UnitScheme scheme) {
  switch (scheme) {
    case UnitScheme::kCharacter:
      return "character";
    case UnitScheme::kWhitespaceToken:
      return "whitespace";
  }
  return "character";
}

UnitScheme parse_unit_scheme(std::string_view name) {
  if (name == "character" || name == "char") return UnitScheme::kCharacter;
  if (name == "whitespace" || name == "token") return UnitScheme::kWhitespaceToken;
  throw std::invalid_argument("unknown unit scheme: " + std::string(name));
}

std::size_t unit_count(const TextSeq& s) {
  std::size_t n = 0;
  if (s.scheme == UnitScheme::kCharacter) {
    for (unsigned char c : s.text) {
      if (!is_utf8_continuation(c)) ++n;
    }
    return n;
  }
  bool in_run = false;
  for (unsigned char c : s.text) {
    const bool space = is_space(c);
    if (!space && !in_run) ++n;
    in_run = !space;
  }
  return n;
}

std::size_t unit_boundary(const TextSeq& s, std::size_t k) {
  if (k == 0) return 0;
  const std::string& t = s.text;
  std::size_t seen = 0;
  if (s.scheme == UnitScheme::kCharacter) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (is_utf8_continuation(static_cast<unsigned char>(t[i]))) continue;
      if (seen == k) return i;
      ++seen;
    }
    return t.size();
  }
  bool in_run = false;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const bool space = is_space(static_cast<unsigned char>(t[i]));
    if (in_run && space && seen == k) return i;
    if (!space && !in_run) ++seen;
    in_run = !space;
  }
  return t.size();
}

TextSeq concat(const TextSeq& head, const TextSeq& tail) {
  return TextSeq(head.text + tail.text, head.scheme);
}

std::size_t split_head_units(std::size_t units, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("split fraction must lie in (0, 1)");
  }
  if (units <= 1) return 0;
  const double raw = std::ceil(alpha * static_cast<double>(units));
  const auto k = static_cast<std::size_t>(std::max(1.0, raw));
  return std::clamp<std::size_t>(k, 1, units - 1);
}

std::optional<SplitResult> split(const TextSeq& s, double alpha) {
  const std::size_t units = unit_count(s);
  const std::size_t k = split_head_units(units, alpha);
  if (k == 0) return std::nullopt;
  const std::size_t cut = unit_boundary(s, k);
  return SplitResult{TextSeq(s.text.substr(0, cut), s.scheme),
                     TextSeq(s.text.substr(cut), s.scheme)};
}

TextSeq strip_prefix(const TextSeq& whole, const TextSeq& prefix) {
  if (whole.text.compare(0, prefix.text.size(), prefix.text) != 0) {
    throw std::invalid_argument("sequence does not extend the given prefix");
  }
  return TextSeq(whole.text.substr(prefix.text.size()), whole.scheme);
}

std::vector<Problem> parse_problem_set(std::string_view jsonl, UnitScheme scheme) {
  std::vector<Problem> problems;
  std::unordered_set<std::string> ids;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return is_space(c); })) {
      continue;
    }
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::invalid_argument("problem set line " + std::to_string(line_no) + ": " +
                                  e.what());
    }
    Problem p;
    p.id = obj.at("id").get<std::string>();
    p.prompt = TextSeq(obj.at("prompt").get<std::string>(), scheme);
    if (obj.contains("verifier")) p.verifier = obj.at("verifier");
    if (p.prompt.empty()) {
      throw std::invalid_argument("problem " + p.id + " has an empty prompt");
    }
    if (!ids.insert(p.id).second) {
      throw std::invalid_argument("duplicate problem id: " + p.id);
    }
    problems.push_back(std::move(p));
  }
  return problems;
}

std::vector<Problem> load_problem_set(const std::filesystem::path& path, UnitScheme scheme) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open problem set " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem_set(buf.str(), scheme);
}

void PolicyParams::validate() const {
  if (!(temperature >= 0.0)) throw std::invalid_argument("temperature must be >= 0");
  if (max_units < 1) throw std::invalid_argument("max_units must be >= 1");
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace disc
