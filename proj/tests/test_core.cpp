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

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <stdexcept>
#include <string>

#include <doctest.h>

#include "disc/core.hpp"
#include "disc/sampler.hpp"
#include "support.hpp"

using namespace disc;

TEST_CASE("unit_count") {
  CHECK(unit_count(TextSeq("", UnitScheme::kCharacter)) == 0);
  CHECK(unit_count(TextSeq("ab cd", UnitScheme::kWhitespaceToken)) == 2);
  CHECK(unit_count(TextSeq("abcdefghij", UnitScheme::kCharacter)) == 10);
  CHECK(unit_count(TextSeq("h\xc3\xa9llo")) == 5);
  CHECK(unit_count(TextSeq("  a\n\tb  c ", UnitScheme::kWhitespaceToken)) == 3);
}

TEST_CASE("split picks ceil(alpha * L) clamped to [1, L-1]") {
  auto ten = split(TextSeq("abcdefghij"), 0.15);
  REQUIRE(ten);
  CHECK(ten->head.text == "ab");
  CHECK(ten->tail.text == "cdefghij");

  CHECK_FALSE(split(TextSeq("x"), 0.5));
  CHECK_FALSE(split(TextSeq(""), 0.5));

  auto two = split(TextSeq("ab"), 0.9);
  REQUIRE(two);
  CHECK(two->head.text == "a");
  CHECK(two->tail.text == "b");

  CHECK(split_head_units(10, 0.15) == 2);
  CHECK(split_head_units(100, 0.01) == 1);
  CHECK(split_head_units(100, 0.999) == 99);
  CHECK_THROWS_AS(split(TextSeq("ab"), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(split(TextSeq("ab"), 1.0), std::invalid_argument);
}

TEST_CASE("whitespace split keeps separators with the tail") {
  auto parts = split(TextSeq(" 1 2 3 4", UnitScheme::kWhitespaceToken), 0.5);
  REQUIRE(parts);
  CHECK(parts->head.text == " 1 2");
  CHECK(parts->tail.text == " 3 4");
  CHECK(parts->head.scheme == UnitScheme::kWhitespaceToken);
}

TEST_CASE("split reconstructs random strings on unit boundaries") {
  std::mt19937_64 rng(7);
  const std::string pieces[] = {"a", "b", " ", "\n", "\xc3\xa9", "\xe2\x82\xac", "xy"};
  std::uniform_int_distribution<std::size_t> pick(0, std::size(pieces) - 1);
  std::uniform_int_distribution<std::size_t> len(0, 30);
  std::uniform_real_distribution<double> alpha(1e-6, 1.0 - 1e-6);
  for (int trial = 0; trial < 2000; ++trial) {
    std::string text;
    const std::size_t n = len(rng);
    for (std::size_t i = 0; i < n; ++i) text += pieces[pick(rng)];
    for (UnitScheme scheme : {UnitScheme::kCharacter, UnitScheme::kWhitespaceToken}) {
      const TextSeq s(text, scheme);
      const std::size_t units = unit_count(s);
      const double a = alpha(rng);
      auto parts = split(s, a);
      if (units <= 1) {
        CHECK_FALSE(parts);
        continue;
      }
      REQUIRE(parts);
      CHECK_FALSE(parts->head.empty());
      CHECK_FALSE(parts->tail.empty());
      CHECK(parts->head.text + parts->tail.text == text);
      const std::size_t k = static_cast<std::size_t>(
          std::clamp<double>(std::ceil(a * static_cast<double>(units)), 1.0,
                             static_cast<double>(units - 1)));
      CHECK(unit_count(parts->head) == k);
      CHECK(parts->head.text.size() == unit_boundary(s, k));
    }
  }
}

TEST_CASE("strip_prefix") {
  CHECK(strip_prefix(TextSeq("abc"), TextSeq("ab")).text == "c");
  CHECK(strip_prefix(TextSeq("abc"), TextSeq("")).text == "abc");
  CHECK_THROWS(strip_prefix(TextSeq("abc"), TextSeq("b")));
}

TEST_CASE("problem set parsing") {
  const auto problems = parse_problem_set(
      R"({"id": "p1", "prompt": "Q1", "verifier": {"kind": "exact", "target": "x"}}

{"id": "p2", "prompt": "Q2"}
)",
      UnitScheme::kWhitespaceToken);
  REQUIRE(problems.size() == 2);
  CHECK(problems[0].id == "p1");
  CHECK(problems[0].prompt.text == "Q1");
  CHECK(problems[0].prompt.scheme == UnitScheme::kWhitespaceToken);
  CHECK(problems[0].verifier["target"] == "x");
  CHECK(problems[1].verifier.is_object());

  CHECK_THROWS(parse_problem_set("{\"id\": \"a\", \"prompt\": \"x\"}\n{\"id\": \"a\", \"prompt\": \"y\"}"));
  CHECK_THROWS(parse_problem_set("{\"id\": \"a\", \"prompt\": \"\"}"));
  CHECK_THROWS(parse_problem_set("not json"));
}

TEST_CASE("unit scheme names round trip") {
  for (UnitScheme s : {UnitScheme::kCharacter, UnitScheme::kWhitespaceToken}) {
    CHECK(parse_unit_scheme(to_string(s)) == s);
  }
  CHECK_THROWS(parse_unit_scheme("bytes"));
}

TEST_CASE("reward models are deterministic") {
  testing::HashReward reward(3);
  const Problem p = testing::make_problem("p", "x");
  for (int i = 0; i < 100; ++i) {
    const TextSeq s("x" + std::to_string(i));
    const double a = reward.score(p, s);
    const double b = reward.score(p, s);
    CHECK(std::memcmp(&a, &b, sizeof a) == 0);
  }
}

TEST_CASE("sampler enforces the budget and seeds draws by index") {
  testing::StreamPolicy policy;
  testing::StreamReward reward({0.1, 0.2, 0.3});
  const Problem p = testing::make_problem("p", "Q");
  SamplerOptions opts;
  opts.budget_samples = 3;
  Sampler sampler(p, policy, reward, opts);
  for (int i = 0; i < 3; ++i) REQUIRE(sampler.draw(p.prompt));
  CHECK_FALSE(sampler.draw(p.prompt));
  CHECK(sampler.drawn() == 3);
  CHECK(sampler.history()[2].reward == doctest::Approx(0.3));
  CHECK(sampler.history()[2].index == 2);
  CHECK(sampler.tokens_used() == 3);
}

TEST_CASE("sampler token budget") {
  testing::StreamPolicy policy;
  testing::FixedReward reward(0.0);
  const Problem p = testing::make_problem("p", "Q");
  SamplerOptions opts;
  opts.budget_samples = 100;
  opts.budget_tokens = 4;
  Sampler sampler(p, policy, reward, opts);
  while (sampler.draw(p.prompt)) {
  }
  CHECK(sampler.drawn() == 4);
}

TEST_CASE("mix_seed separates streams") {
  CHECK(mix_seed(1, 0) != mix_seed(1, 1));
  CHECK(mix_seed(1, 0) != mix_seed(2, 0));
  CHECK(mix_seed(5, 9) == mix_seed(5, 9));
}
