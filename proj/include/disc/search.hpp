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

// Dynamic decomposition as a node-expansion operator, plugged into Monte
// Carlo tree search and beam search. Each node owns a prefix and the sample
// set drawn from it; expanding a node proposes a child prefix by contracting
// along one of its sampled suffixes until the child's statistics win.

#include <cstddef>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "disc/engine.hpp"

namespace disc {

using NodeId = std::size_t;

enum class NodeKind { kRoot, kAccepted, kTerminal, kSolved, kUnresolved };

struct SearchNode {
  TextSeq prefix;
  double q_hat = 0.0;
  std::size_t visits = 0;
  std::vector<NodeId> children;
  double best_reward = -std::numeric_limits<double>::infinity();
  ZScore z = ZScore::sentinel();

  std::optional<NodeId> parent;
  NodeKind kind = NodeKind::kRoot;
  RewardStats stats;
  std::vector<SampleRecord> samples;  // rollouts drawn at this prefix
  std::size_t targets_used = 0;       // sampled suffixes already expanded
  std::size_t committed_at = 0;       // samples drawn when the node was created
  bool terminal = false;              // prefix is a complete solution
};

class SearchTree {
 public:
  NodeId add_root(TextSeq prefix);
  NodeId add_child(NodeId parent, SearchNode child);

  SearchNode& operator[](NodeId id) { return nodes_.at(id); }
  const SearchNode& operator[](NodeId id) const { return nodes_.at(id); }
  std::size_t size() const { return nodes_.size(); }

  std::vector<NodeId> path_to(NodeId id) const;  // root first

 private:
  std::vector<SearchNode> nodes_;
};

// Learning rate for the max-backup.
struct LearningRateSchedule {
  enum class Kind { kVisitAveraging, kConstant };
  Kind kind = Kind::kVisitAveraging;
  double constant = 0.5;

  double rate(std::size_t visits) const;
};

struct SearchConfig {
  double exploration_c = 1.0;
  std::size_t beam_width = 1;
  LearningRateSchedule learning_rate;
  EngineConfig engine;
  std::size_t max_children = 3;       // MCTS widening cap per node
  std::size_t expansions_per_node = 0;  // beam; 0 means beam_width

  void validate() const;
};

// Samples the rollout set at `prefix` under the threshold rule.
ThresholdRound make_children(Sampler& sampler, const TextSeq& prefix, double sigma,
                             bool inference_mode, std::span<const SampleRecord> seeds = {},
                             std::size_t speculative_batch = 1);

struct ExpandResult {
  TextSeq prefix;
  std::vector<SampleRecord> samples;  // children of the final candidate only
  RewardStats stats;
  ZScore z = ZScore::sentinel();
  bool accepted = false;  // candidate won against the parent
  bool forced = false;    // suffix could not be split; prefix is the full suffix
  bool solved = false;
  bool budget_exhausted = false;
  std::size_t drawn = 0;
  std::vector<IterationRecord> iterations;
};

// Contracts a candidate step along `suffix_to_child` from alpha0 until the
// candidate's statistics are accepted over the node's, the suffix cannot be
// split, or the budget runs out. `seed`, when given, is injected into every
// candidate sample set.
ExpandResult expand_node(Sampler& sampler, const SearchNode& node,
                         const TextSeq& suffix_to_child, const EngineConfig& cfg,
                         std::mt19937_64& rng, const SampleRecord* seed = nullptr);

double uct_score(double q_hat, std::size_t visits, std::size_t total_visits, double c);

// Child position (into node.children) maximizing the UCT score. Unvisited
// children win first, in creation order; ties go to the lowest position.
std::size_t uct_select(const SearchTree& tree, NodeId node, double c);

// Max-backup from the last node of `path` to the root. A node seen for the
// first time takes the incoming value as its estimate.
void backpropagate(SearchTree& tree, std::span<const NodeId> path, double value,
                   const LearningRateSchedule& schedule);

struct SearchOutcome {
  Decomposition decomposition;
  SearchTree tree;
  std::vector<std::size_t> expansion_draws;  // samples drawn per make_children call
};

SearchOutcome mcts_search(const Problem& problem, const GenerationPolicy& policy,
                          const RewardModel& reward, const SearchConfig& cfg);
SearchOutcome beam_search(const Problem& problem, const GenerationPolicy& policy,
                          const RewardModel& reward, const SearchConfig& cfg);

inline Decomposition mcts_disc(const Problem& problem, const GenerationPolicy& policy,
                               const RewardModel& reward, const SearchConfig& cfg) {
  return mcts_search(problem, policy, reward, cfg).decomposition;
}

inline Decomposition beam_disc(const Problem& problem, const GenerationPolicy& policy,
                               const RewardModel& reward, const SearchConfig& cfg) {
  return beam_search(problem, policy, reward, cfg).decomposition;
}

}  // namespace disc
