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

#pragma once

// Sequence types and the two backend interfaces every engine consumes: a
// generation policy that continues a prefix, and a reward model that scores a
// complete solution.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace disc {

using Duration = std::chrono::duration<double>;

enum class UnitScheme {
  kCharacter,        // UTF-8 code points
  kWhitespaceToken,  // maximal runs of non-whitespace bytes
};

std::string_view to_string(UnitScheme scheme);
UnitScheme parse_unit_scheme(std::string_view name);

// A piece of text measured in units of a declared scheme. Prefixes, suffixes
// and complete solutions are all TextSeqs.
struct TextSeq {
  std::string text;
  UnitScheme scheme = UnitScheme::kCharacter;

  TextSeq() = default;
  TextSeq(std::string t, UnitScheme s = UnitScheme::kCharacter)
      : text(std::move(t)), scheme(s) {}

  bool empty() const { return text.empty(); }
  friend bool operator==(const TextSeq&, const TextSeq&) = default;
};

std::size_t unit_count(const TextSeq& s);

// Byte offset just past the k-th unit. Leading whitespace under the
// whitespace-token scheme belongs to the first unit.
std::size_t unit_boundary(const TextSeq& s, std::size_t k);

TextSeq concat(const TextSeq& head, const TextSeq& tail);

struct SplitResult {
  TextSeq head;
  TextSeq tail;
};

// Splits off the first k = clamp(ceil(alpha * L), 1, L - 1) units.
// Returns nullopt (cannot split) iff L <= 1. Throws std::invalid_argument
// unless 0 < alpha < 1.
std::optional<SplitResult> split(const TextSeq& s, double alpha);

// Number of units split() takes for a sequence of `units` units.
std::size_t split_head_units(std::size_t units, double alpha);

// Suffix of `whole` after `prefix`. Throws if `prefix` is not a prefix.
TextSeq strip_prefix(const TextSeq& whole, const TextSeq& prefix);

struct Problem {
  std::string id;
  TextSeq prompt;
  nlohmann::json verifier = nlohmann::json::object();
};

// Reads a problem set: one JSON object per line with `id`, `prompt` and
// `verifier`. Blank lines are skipped. Duplicate ids and empty prompts are
// rejected.
std::vector<Problem> load_problem_set(const std::filesystem::path& path,
                                      UnitScheme scheme = UnitScheme::kCharacter);
std::vector<Problem> parse_problem_set(std::string_view jsonl,
                                       UnitScheme scheme = UnitScheme::kCharacter);

struct PolicyParams {
  double temperature = 0.2;
  std::size_t max_units = 4096;
  std::optional<std::uint64_t> seed;

  void validate() const;
};

struct Generation {
  TextSeq suffix;
  std::size_t tokens = 0;
  Duration generation_time{0};
};

// Continues a prefix. Implementations must be callable concurrently unless
// serial_only() is true, in which case callers wrap them in SerializedPolicy.
class GenerationPolicy {
 public:
  virtual ~GenerationPolicy() = default;
  virtual Generation sample(const TextSeq& prefix, const PolicyParams& params) const = 0;
  virtual bool serial_only() const { return false; }
};

// Scores a complete solution (prompt included). Must be deterministic for a
// fixed (problem, solution) pair.
class RewardModel {
 public:
  virtual ~RewardModel() = default;
  virtual double score(const Problem& problem, const TextSeq& solution) const = 0;

  // Reward at or above which a solution counts as correct. Backends with
  // unbounded rewards return nullopt and never mark a run solved.
  virtual std::optional<double> correctness_threshold() const { return 1.0; }
};

class SerializedPolicy final : public GenerationPolicy {
 public:
  explicit SerializedPolicy(const GenerationPolicy& inner) : inner_(inner) {}
  Generation sample(const TextSeq& prefix, const PolicyParams& params) const override {
    std::lock_guard lock(mutex_);
    return inner_.sample(prefix, params);
  }

 private:
  const GenerationPolicy& inner_;
  mutable std::mutex mutex_;
};

// Raised by backends for generation or scoring failures.
class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// splitmix64 finalizer; derives independent per-draw seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace disc
