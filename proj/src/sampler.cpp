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

#include "disc/sampler.hpp"

#include <algorithm>
#include <future>
#include <stdexcept>

namespace disc {

Sampler::Sampler(const Problem& problem, const GenerationPolicy& policy,
                 const RewardModel& reward, SamplerOptions options)
    : problem_(problem),
      policy_(policy),
      reward_(reward),
      options_(std::move(options)),
      last_mark_(std::chrono::steady_clock::now()) {
  options_.params.validate();
  if (options_.budget_samples < 1) throw std::invalid_argument("budget_samples must be >= 1");
}

std::size_t Sampler::remaining() const {
  if (options_.budget_tokens && tokens_ >= *options_.budget_tokens) return 0;
  return options_.budget_samples > history_.size() ? options_.budget_samples - history_.size()
                                                   : 0;
}

bool Sampler::is_correct(double reward) const {
  const auto threshold = reward_.correctness_threshold();
  return threshold && reward >= *threshold;
}

SampleRecord Sampler::generate(const TextSeq& prefix, std::size_t index) const {
  PolicyParams params = options_.params;
  params.seed = mix_seed(options_.seed, index);
  Generation g = policy_.sample(prefix, params);
  SampleRecord s;
  s.prefix = prefix;
  s.suffix = std::move(g.suffix);
  s.suffix.scheme = prefix.scheme;
  s.tokens = g.tokens;
  s.gen_time = options_.record_timings ? g.generation_time : Duration{0};
  s.index = index;
  s.reward = reward_.score(problem_, s.solution());
  return s;
}

void Sampler::record(SampleRecord sample) {
  const auto now = std::chrono::steady_clock::now();
  if (options_.record_timings) {
    const Duration since = now - last_mark_;
    sample.overhead_time = std::max(Duration{0}, since - sample.gen_time);
  } else {
    sample.overhead_time = Duration{0};
  }
  last_mark_ = now;
  tokens_ += sample.tokens;
  history_.push_back(std::move(sample));
}

std::optional<SampleRecord> Sampler::draw(const TextSeq& prefix) {
  if (exhausted()) return std::nullopt;
  record(generate(prefix, history_.size()));
  return history_.back();
}

std::vector<SampleRecord> Sampler::speculate(const TextSeq& prefix, std::size_t count) const {
  count = std::min(count, remaining());
  std::vector<std::future<SampleRecord>> futures;
  futures.reserve(count);
  const std::size_t base = history_.size();
  for (std::size_t i = 0; i < count; ++i) {
    futures.push_back(std::async(std::launch::async,
                                 [this, &prefix, index = base + i] { return generate(prefix, index); }));
  }
  std::vector<SampleRecord> out;
  out.reserve(count);
  for (auto& f : futures) out.push_back(f.get());
  return out;
}

void Sampler::commit(std::span<const SampleRecord> samples) {
  for (const auto& s : samples) {
    if (s.index != history_.size()) {
      throw std::logic_error("speculative sample committed out of order");
    }
    if (exhausted()) throw std::logic_error("speculative sample committed past the budget");
    record(s);
  }
}

}  // namespace disc
