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

#include "disc/backends/synthetic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <stdexcept>

namespace disc {
namespace {

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t draw_index(std::mt19937_64& rng, const std::vector<double>& probs) {
  const double u = unit_uniform(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  return probs.size() - 1;
}

std::vector<std::string> units_of(const TextSeq& s) {
  std::vector<std::string> out;
  const std::size_t n = unit_count(s);
  std::size_t start = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    const std::size_t end = unit_boundary(s, k);
    out.push_back(s.text.substr(start, end - start));
    start = end;
  }
  return out;
}

std::size_t symbol_index(const std::vector<std::string>& alphabet, std::string_view unit) {
  const auto it = std::find(alphabet.begin(), alphabet.end(), unit);
  if (it == alphabet.end()) {
    throw std::invalid_argument("unit '" + std::string(unit) + "' is not in the alphabet");
  }
  return static_cast<std::size_t>(it - alphabet.begin());
}

std::string_view generated_text(const TextSeq& whole, const TextSeq& prompt) {
  std::string_view t = whole.text;
  if (!t.starts_with(prompt.text)) {
    throw std::invalid_argument("prefix does not start with the prompt");
  }
  return t.substr(prompt.text.size());
}

}  // namespace

PlantedTreePolicy::PlantedTreePolicy(TextSeq prompt, std::vector<std::string> alphabet,
                                     TextSeq planted,
                                     std::vector<std::vector<double>> position_probs,
                                     std::uint64_t seed)
    : prompt_(std::move(prompt)),
      alphabet_(std::move(alphabet)),
      planted_(std::move(planted)),
      depth_(0),
      probs_(std::move(position_probs)),
      seed_(seed) {
  if (alphabet_.size() < 2) throw std::invalid_argument("alphabet needs at least two symbols");
  for (const auto& a : alphabet_) {
    if (unit_count(TextSeq(a, UnitScheme::kCharacter)) != 1) {
      throw std::invalid_argument("alphabet symbols must be single characters");
    }
  }
  planted_.scheme = UnitScheme::kCharacter;
  for (const auto& u : units_of(planted_)) planted_units_.push_back(symbol_index(alphabet_, u));
  depth_ = planted_units_.size();
  if (depth_ == 0) throw std::invalid_argument("planted solution must be non-empty");
  if (probs_.size() != depth_) {
    throw std::invalid_argument("need one distribution per position");
  }
  for (auto& p : probs_) {
    if (p.size() != alphabet_.size()) {
      throw std::invalid_argument("distribution size must match the alphabet");
    }
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    if (!(total > 0.0) || std::any_of(p.begin(), p.end(), [](double v) { return v < 0.0; })) {
      throw std::invalid_argument("distribution must be non-negative with positive mass");
    }
    for (double& v : p) v /= total;
  }
}

PlantedTreePolicy PlantedTreePolicy::uniform(TextSeq prompt, std::vector<std::string> alphabet,
                                             TextSeq planted, std::uint64_t seed) {
  const std::size_t d = unit_count(TextSeq(planted.text, UnitScheme::kCharacter));
  std::vector<std::vector<double>> probs(d, std::vector<double>(alphabet.size(), 1.0));
  return PlantedTreePolicy(std::move(prompt), std::move(alphabet), std::move(planted),
                           std::move(probs), seed);
}

PlantedTreePolicy PlantedTreePolicy::biased(TextSeq prompt, std::vector<std::string> alphabet,
                                            TextSeq planted, double p_planted,
                                            std::uint64_t seed) {
  if (!(p_planted > 0.0 && p_planted < 1.0)) {
    throw std::invalid_argument("p_planted must lie in (0, 1)");
  }
  const TextSeq target(planted.text, UnitScheme::kCharacter);
  std::vector<std::vector<double>> probs;
  const double rest = (1.0 - p_planted) / static_cast<double>(alphabet.size() - 1);
  for (const auto& u : units_of(target)) {
    std::vector<double> p(alphabet.size(), rest);
    p[symbol_index(alphabet, u)] = p_planted;
    probs.push_back(std::move(p));
  }
  return PlantedTreePolicy(std::move(prompt), std::move(alphabet), std::move(planted),
                           std::move(probs), seed);
}

std::vector<std::size_t> PlantedTreePolicy::generated_units(const TextSeq& prefix) const {
  const TextSeq gen(std::string(generated_text(prefix, prompt_)), UnitScheme::kCharacter);
  std::vector<std::size_t> out;
  for (const auto& u : units_of(gen)) out.push_back(symbol_index(alphabet_, u));
  if (out.size() > depth_) throw std::invalid_argument("prefix is deeper than the tree");
  return out;
}

Generation PlantedTreePolicy::sample(const TextSeq& prefix, const PolicyParams& params) const {
  const std::size_t have = generated_units(prefix).size();
  std::mt19937_64 rng(mix_seed(seed_, params.seed.value_or(0)));
  const std::size_t want = std::min(depth_ - have, params.max_units);
  Generation g;
  g.suffix.scheme = prefix.scheme;
  for (std::size_t i = 0; i < want; ++i) {
    g.suffix.text += alphabet_[draw_index(rng, probs_[have + i])];
  }
  g.tokens = want;
  return g;
}

double PlantedTreePolicy::completion_probability(const TextSeq& prefix) const {
  const auto have = generated_units(prefix);
  for (std::size_t i = 0; i < have.size(); ++i) {
    if (have[i] != planted_units_[i]) return 0.0;
  }
  double p = 1.0;
  for (std::size_t i = have.size(); i < depth_; ++i) p *= probs_[i][planted_units_[i]];
  return p;
}

PlantedPrefixReward::PlantedPrefixReward(TextSeq planted)
    : planted_(std::move(planted.text), UnitScheme::kCharacter),
      depth_(unit_count(planted_)) {
  if (depth_ == 0) throw std::invalid_argument("planted solution must be non-empty");
}

double PlantedPrefixReward::score(const Problem& problem, const TextSeq& solution) const {
  const TextSeq gen(std::string(generated_text(solution, problem.prompt)),
                    UnitScheme::kCharacter);
  const auto got = units_of(gen);
  const auto want = units_of(planted_);
  std::size_t match = 0;
  while (match < got.size() && match < want.size() && got[match] == want[match]) ++match;
  if (got.size() != want.size() && match == want.size()) --match;
  return static_cast<double>(match) / static_cast<double>(depth_);
}

WienerPolicy::WienerPolicy(TextSeq prompt, double horizon, double dt, std::uint64_t seed)
    : prompt_(std::move(prompt)), horizon_(horizon), dt_(dt), steps_(0), seed_(seed) {
  if (!(horizon > 0.0) || !(dt > 0.0) || dt > horizon) {
    throw std::invalid_argument("need 0 < dt <= horizon");
  }
  const double n = horizon / dt;
  steps_ = static_cast<std::size_t>(std::llround(n));
  if (std::abs(n - static_cast<double>(steps_)) > 1e-9 * n) {
    throw std::invalid_argument("horizon must be a whole number of steps");
  }
}

Generation WienerPolicy::sample(const TextSeq& prefix, const PolicyParams& params) const {
  const std::size_t have = parse_increments(generated_text(prefix, prompt_)).size();
  if (have > steps_) throw std::invalid_argument("prefix runs past the horizon");
  std::mt19937_64 rng(mix_seed(seed_, params.seed.value_or(0)));
  std::normal_distribution<double> step(0.0, std::sqrt(dt_));
  const std::size_t want = std::min(steps_ - have, params.max_units);
  Generation g;
  g.suffix.scheme = prefix.scheme;
  for (std::size_t i = 0; i < want; ++i) {
    g.suffix.text += ' ';
    g.suffix.text += format_increment(step(rng));
  }
  g.tokens = want;
  return g;
}

double WienerReward::score(const Problem& problem, const TextSeq& solution) const {
  const auto inc = parse_increments(generated_text(solution, problem.prompt));
  return std::accumulate(inc.begin(), inc.end(), 0.0);
}

std::string format_increment(double x) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%+.6f", x);
  return std::string(buf, static_cast<std::size_t>(n));
}

std::vector<double> parse_increments(std::string_view text) {
  std::vector<double> out;
  std::size_t i = 0;
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    if (i == text.size()) break;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    std::string_view tok = text.substr(i, j - i);
    std::string_view digits = tok;
    if (!digits.empty() && (digits[0] == '+' || digits[0] == '-')) digits.remove_prefix(1);
    double v = 0.0;
    const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v,
                                           std::chars_format::fixed);
    if (digits.empty() || digits[0] == '+' || digits[0] == '-' || ec != std::errc{} ||
        end != digits.data() + digits.size()) {
      throw std::invalid_argument("malformed increment '" + std::string(tok) + "'");
    }
    out.push_back(tok[0] == '-' ? -v : v);
    i = j;
  }
  return out;
}

}  // namespace disc
