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

// Stub backends shared by the unit tests and the acceptance suite.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "disc/core.hpp"

namespace disc::testing {

inline Problem make_problem(std::string id, std::string prompt,
                            UnitScheme scheme = UnitScheme::kCharacter) {
  Problem p;
  p.id = std::move(id);
  p.prompt = TextSeq(std::move(prompt), scheme);
  return p;
}

// Emits "#<n><padding>" for the n-th call (0-based). Paired with
// StreamReward this replays a recorded reward stream in draw order.
class StreamPolicy final : public GenerationPolicy {
 public:
  explicit StreamPolicy(std::string padding = "") : padding_(std::move(padding)) {}
  Generation sample(const TextSeq& prefix, const PolicyParams&) const override {
    const std::size_t n = calls_.fetch_add(1);
    return {TextSeq("#" + std::to_string(n) + padding_, prefix.scheme), 1, Duration{0}};
  }
  std::size_t calls() const { return calls_.load(); }

 private:
  std::string padding_;
  mutable std::atomic<std::size_t> calls_{0};
};

class StreamReward final : public RewardModel {
 public:
  explicit StreamReward(std::vector<double> stream, std::optional<double> threshold = 1.0)
      : stream_(std::move(stream)), threshold_(threshold) {}

  double score(const Problem&, const TextSeq& solution) const override {
    const auto hash = solution.text.rfind('#');
    if (hash == std::string::npos) return 0.0;
    const std::size_t n = std::stoul(solution.text.substr(hash + 1));
    return n < stream_.size() ? stream_[n] : 0.0;
  }
  std::optional<double> correctness_threshold() const override { return threshold_; }

 private:
  std::vector<double> stream_;
  std::optional<double> threshold_;
};

// Forwards to `inner`, counting calls and optionally sleeping first. The
// sleep is reported as generation time.
class CountingPolicy final : public GenerationPolicy {
 public:
  explicit CountingPolicy(const GenerationPolicy& inner, Duration latency = Duration{0})
      : inner_(inner), latency_(latency) {}

  Generation sample(const TextSeq& prefix, const PolicyParams& params) const override {
    calls_.fetch_add(1);
    const auto start = std::chrono::steady_clock::now();
    if (latency_.count() > 0) {
      std::this_thread::sleep_for(std::chrono::duration_cast<std::chrono::nanoseconds>(latency_));
    }
    Generation g = inner_.sample(prefix, params);
    g.generation_time = std::chrono::steady_clock::now() - start;
    return g;
  }
  std::size_t calls() const { return calls_.load(); }

 private:
  const GenerationPolicy& inner_;
  Duration latency_;
  mutable std::atomic<std::size_t> calls_{0};
};

class FixedReward final : public RewardModel {
 public:
  explicit FixedReward(double value, std::optional<double> threshold = 1.0)
      : value_(value), threshold_(threshold) {}
  double score(const Problem&, const TextSeq&) const override { return value_; }
  std::optional<double> correctness_threshold() const override { return threshold_; }

 private:
  double value_;
  std::optional<double> threshold_;
};

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Deterministic pseudo-random reward in [0, 1) keyed by the solution text.
// Never reaches the correctness threshold.
class HashReward final : public RewardModel {
 public:
  explicit HashReward(std::uint64_t salt = 0) : salt_(salt) {}
  double score(const Problem&, const TextSeq& solution) const override {
    const std::uint64_t h = fnv1a(solution.text) ^ (salt_ * 0x9e3779b97f4a7c15ULL);
    return static_cast<double>(mix_seed(h, 0) >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t salt_;
};

}  // namespace disc::testing
