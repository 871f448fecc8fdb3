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

#include "disc/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

namespace disc {

NodeId SearchTree::add_root(TextSeq prefix) {
  if (!nodes_.empty()) throw std::logic_error("search tree already has a root");
  SearchNode root;
  root.prefix = std::move(prefix);
  nodes_.push_back(std::move(root));
  return 0;
}

NodeId SearchTree::add_child(NodeId parent, SearchNode child) {
  const SearchNode& p = nodes_.at(parent);
  if (child.prefix.text.compare(0, p.prefix.text.size(), p.prefix.text) != 0) {
    throw std::invalid_argument("child prefix must extend its parent's prefix");
  }
  child.parent = parent;
  nodes_.push_back(std::move(child));
  const NodeId id = nodes_.size() - 1;
  nodes_[parent].children.push_back(id);
  return id;
}

std::vector<NodeId> SearchTree::path_to(NodeId id) const {
  std::vector<NodeId> path{id};
  while (nodes_.at(path.back()).parent) path.push_back(*nodes_[path.back()].parent);
  std::reverse(path.begin(), path.end());
  return path;
}

double LearningRateSchedule::rate(std::size_t visits) const {
  if (kind == Kind::kConstant) return constant;
  return 1.0 / static_cast<double>(visits + 1);
}

void SearchConfig::validate() const {
  if (!(exploration_c >= 0.0)) throw std::invalid_argument("exploration_c must be >= 0");
  if (beam_width < 1) throw std::invalid_argument("beam_width must be >= 1");
  if (max_children < 1) throw std::invalid_argument("max_children must be >= 1");
  if (learning_rate.kind == LearningRateSchedule::Kind::kConstant &&
      !(learning_rate.constant > 0.0 && learning_rate.constant <= 1.0)) {
    throw std::invalid_argument("constant learning rate must lie in (0, 1]");
  }
  engine.validate();
}

ThresholdRound make_children(Sampler& sampler, const TextSeq& prefix, double sigma,
                             bool inference_mode, std::span<const SampleRecord> seeds,
                             std::size_t speculative_batch) {
  return sample_until_threshold(sampler, prefix, sigma, seeds, inference_mode, speculative_batch);
}

ExpandResult expand_node(Sampler& sampler, const SearchNode& node,
                         const TextSeq& suffix_to_child, const EngineConfig& cfg,
                         std::mt19937_64& rng, const SampleRecord* seed) {
  if (suffix_to_child.empty()) throw std::invalid_argument("expand_node needs a non-empty suffix");
  const std::optional<GuardInputs> guard =
      cfg.criterion == AcceptanceCriterion::kZConfidenceGuarded
          ? std::optional<GuardInputs>(GuardInputs{cfg.r_star})
          : std::nullopt;
  std::span<const SampleRecord> seeds;
  if (seed) seeds = std::span<const SampleRecord>(seed, 1);

  ExpandResult out;
  out.prefix = node.prefix;
  ContractingProposer proposer(cfg.alpha0);
  while (!sampler.exhausted()) {
    const double alpha = proposer.alpha();
    auto head = proposer.propose(suffix_to_child);
    if (!head) {
      out.prefix = concat(node.prefix, suffix_to_child);
      out.samples.clear();
      out.forced = true;
      out.accepted = true;
      return out;
    }
    const TextSeq cand_prefix = concat(node.prefix, *head);
    auto round = make_children(sampler, cand_prefix, cfg.sigma, cfg.inference_mode, seeds,
                               cfg.speculative_batch);
    out.drawn += round.drawn;
    out.prefix = cand_prefix;
    out.samples = std::move(round.samples);
    if (round.solved) {
      out.solved = true;
      out.stats = reward_stats(out.samples);
      out.z = zscore(out.stats);
      return out;
    }
    if (round.budget_exhausted) {
      out.budget_exhausted = true;
      if (!out.samples.empty()) {
        out.stats = reward_stats(out.samples);
        out.z = zscore(out.stats);
      }
      return out;
    }
    out.stats = reward_stats(out.samples);
    out.z = zscore(out.stats);
    const bool ok = accept(cfg.criterion, node.stats, out.stats, rng, guard);
    out.iterations.push_back({alpha, unit_count(*head), node.stats, out.stats, node.z.value(),
                              out.z.value(), ok});
    if (ok) {
      out.accepted = true;
      return out;
    }
    proposer.on_reject();
  }
  out.budget_exhausted = true;
  return out;
}

double uct_score(double q_hat, std::size_t visits, std::size_t total_visits, double c) {
  if (c == 0.0) return q_hat;
  return q_hat + c * std::sqrt(std::log(static_cast<double>(total_visits)) /
                               static_cast<double>(visits));
}

std::size_t uct_select(const SearchTree& tree, NodeId node, double c) {
  const auto& children = tree[node].children;
  if (children.empty()) throw std::invalid_argument("uct_select on a node without children");
  std::size_t total = 0;
  for (std::size_t i = 0; i < children.size(); ++i) {
    const std::size_t n = tree[children[i]].visits;
    if (n == 0) return i;
    total += n;
  }
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < children.size(); ++i) {
    const SearchNode& child = tree[children[i]];
    const double score = uct_score(child.q_hat, child.visits, total, c);
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  return best;
}

void backpropagate(SearchTree& tree, std::span<const NodeId> path, double value,
                   const LearningRateSchedule& schedule) {
  double incoming = value;
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    SearchNode& n = tree[*it];
    if (n.visits == 0) {
      n.q_hat = incoming;
    } else {
      // (1 - a) * q + a * max(q, v)
      const double a = schedule.rate(n.visits);
      n.q_hat += a * std::max(0.0, incoming - n.q_hat);
    }
    ++n.visits;
    incoming = n.q_hat;
  }
}

namespace {

// Samples of a node ranked by reward (earliest first on ties), one per
// distinct non-empty suffix.
std::vector<const SampleRecord*> expansion_targets(const SearchNode& node) {
  std::vector<const SampleRecord*> ranked;
  for (const auto& s : node.samples) ranked.push_back(&s);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const SampleRecord* a, const SampleRecord* b) { return a->reward > b->reward; });
  std::vector<const SampleRecord*> out;
  std::set<std::string> seen;
  for (const SampleRecord* s : ranked) {
    const std::string rest = s->solution().text.substr(node.prefix.text.size());
    if (rest.empty() || !seen.insert(rest).second) continue;
    out.push_back(s);
  }
  return out;
}

TextSeq suffix_after(const SampleRecord& s, const TextSeq& prefix) {
  return strip_prefix(s.solution(), prefix);
}

void absorb(SearchNode& node, std::span<const SampleRecord> samples) {
  node.samples.insert(node.samples.end(), samples.begin(), samples.end());
  if (node.samples.empty()) return;
  node.stats = reward_stats(node.samples);
  node.z = zscore(node.stats);
  for (const auto& s : node.samples) node.best_reward = std::max(node.best_reward, s.reward);
  node.terminal = std::all_of(node.samples.begin(), node.samples.end(), [&](const SampleRecord& s) {
    return s.solution().text.size() == node.prefix.text.size();
  });
}

SearchNode child_from(const ExpandResult& r, const SampleRecord& target, std::size_t at) {
  SearchNode child;
  child.prefix = r.prefix;
  child.committed_at = at;
  if (r.forced) {
    child.kind = NodeKind::kTerminal;
    child.terminal = true;
    child.best_reward = target.reward;
    return child;
  }
  child.kind = r.solved ? NodeKind::kSolved
                        : (r.accepted ? NodeKind::kAccepted : NodeKind::kUnresolved);
  absorb(child, r.samples);
  return child;
}

// Steps along the root path of `node`, ending in the sample `final`.
void emit_steps(Decomposition& d, const SearchTree& tree, NodeId node, const SampleRecord* final,
                bool solved_exit) {
  const auto path = tree.path_to(node);
  if (path.size() == 1 && solved_exit && final) {
    StepRecord rec{strip_prefix(final->solution(), tree[node].prefix), std::nullopt,
                   final->index + 1, StepKind::kSolved, final->index + 1};
    d.steps.push_back(rec);
    d.commits.push_back({0, CommitAction::kAppend, rec});
  }
  for (std::size_t i = 1; i < path.size(); ++i) {
    const SearchNode& parent = tree[path[i - 1]];
    const SearchNode& child = tree[path[i]];
    StepRecord rec;
    rec.committed_at = child.committed_at;
    rec.samples_spent = child.committed_at - (i == 1 ? 0 : parent.committed_at);
    const bool last = i + 1 == path.size();
    if (last && solved_exit && final) {
      rec.step_str = strip_prefix(final->solution(), parent.prefix);
      rec.kind = StepKind::kSolved;
    } else {
      rec.step_str = strip_prefix(child.prefix, parent.prefix);
      if (child.kind == NodeKind::kTerminal) {
        rec.kind = StepKind::kTerminal;
        rec.metric = parent.z.value();
      } else {
        rec.kind = StepKind::kAccepted;
        rec.metric = child.z.value();
      }
    }
    d.steps.push_back(rec);
    d.commits.push_back({d.steps.size() - 1, CommitAction::kAppend, rec});
  }
  if (final) d.final_solution = final->solution();
}

// Node and sample holding the best reward in the tree (earliest on ties).
std::pair<NodeId, const SampleRecord*> best_in_tree(const SearchTree& tree) {
  NodeId best_node = 0;
  const SampleRecord* best = nullptr;
  for (NodeId id = 0; id < tree.size(); ++id) {
    for (const auto& s : tree[id].samples) {
      if (!best || s.reward > best->reward || (s.reward == best->reward && s.index < best->index)) {
        best = &s;
        best_node = id;
      }
    }
  }
  return {best_node, best};
}

template <typename Body>
SearchOutcome run_search(Sampler& sampler, Body&& body) {
  SearchOutcome out;
  const auto start = std::chrono::steady_clock::now();
  auto finish = [&] {
    detail::finalize(out.decomposition, sampler);
    out.decomposition.wall_time = sampler.options().record_timings
                                      ? Duration(std::chrono::steady_clock::now() - start)
                                      : Duration{0};
  };
  try {
    body(out);
  } catch (const std::exception& e) {
    finish();
    throw RunAborted(e.what(), std::move(out.decomposition));
  }
  finish();
  return out;
}

// Root node with its first rollout set. Returns false if the search is over.
bool init_root(SearchOutcome& out, Sampler& sampler, const Problem& problem,
               const SearchConfig& cfg) {
  const EngineConfig& e = cfg.engine;
  const NodeId root = out.tree.add_root(problem.prompt);
  auto round =
      make_children(sampler, problem.prompt, e.sigma, e.inference_mode, {}, e.speculative_batch);
  out.expansion_draws.push_back(round.drawn);
  absorb(out.tree[root], round.samples);
  out.tree[root].committed_at = 0;
  for (const auto& s : round.samples) {
    const NodeId path[] = {root};
    backpropagate(out.tree, path, s.reward, cfg.learning_rate);
  }
  if (round.solved) {
    const SampleRecord& hit = out.tree[root].samples.back();
    StepRecord rec{hit.suffix, std::nullopt, round.drawn, StepKind::kSolved, sampler.drawn()};
    out.decomposition.steps.push_back(rec);
    out.decomposition.commits.push_back({0, CommitAction::kAppend, rec});
    out.decomposition.final_solution = hit.solution();
    return false;
  }
  if (round.budget_exhausted || round.samples.empty()) {
    if (!round.samples.empty()) {
      out.decomposition.final_solution = round.samples[argmax_reward(round.samples)].solution();
    }
    return false;
  }
  return true;
}

}  // namespace

SearchOutcome mcts_search(const Problem& problem, const GenerationPolicy& policy,
                          const RewardModel& reward, const SearchConfig& cfg) {
  cfg.validate();
  const EngineConfig& e = cfg.engine;
  Sampler sampler(problem, policy, reward, e.sampler_options());
  std::mt19937_64 rng(e.rng_seed);

  return run_search(sampler, [&](SearchOutcome& out) {
    if (!init_root(out, sampler, problem, cfg)) return;
    SearchTree& tree = out.tree;
    std::optional<NodeId> solved_node;

    auto can_expand = [&](NodeId id) {
      const SearchNode& n = tree[id];
      return !n.terminal && n.children.size() < cfg.max_children &&
             n.targets_used < expansion_targets(n).size();
    };

    while (!sampler.exhausted() && !solved_node) {
      std::vector<NodeId> path{0};
      while (!can_expand(path.back()) && !tree[path.back()].children.empty()) {
        const NodeId at = path.back();
        path.push_back(tree[at].children[uct_select(tree, at, cfg.exploration_c)]);
      }
      const NodeId leaf = path.back();

      if (!can_expand(leaf)) {
        // Nothing left to refine here: spend rollouts on the leaf itself.
        auto round = make_children(sampler, tree[leaf].prefix, e.sigma, e.inference_mode, {},
                                   e.speculative_batch);
        out.expansion_draws.push_back(round.drawn);
        absorb(tree[leaf], round.samples);
        for (const auto& s : round.samples) backpropagate(tree, path, s.reward, cfg.learning_rate);
        if (round.solved) solved_node = leaf;
        if (round.budget_exhausted) break;
        continue;
      }

      const SampleRecord target = *expansion_targets(tree[leaf])[tree[leaf].targets_used];
      ++tree[leaf].targets_used;
      auto r = expand_node(sampler, tree[leaf], suffix_after(target, tree[leaf].prefix), e, rng,
                           &target);
      out.expansion_draws.push_back(r.drawn);
      out.decomposition.iterations.insert(out.decomposition.iterations.end(),
                                          r.iterations.begin(), r.iterations.end());
      if (!r.forced && r.samples.empty()) break;
      const NodeId child = tree.add_child(leaf, child_from(r, target, sampler.drawn()));
      path.push_back(child);
      if (r.forced) {
        backpropagate(tree, path, target.reward, cfg.learning_rate);
      } else {
        for (const auto& s : r.samples) backpropagate(tree, path, s.reward, cfg.learning_rate);
      }
      if (r.solved) solved_node = child;
      if (r.budget_exhausted) break;
    }

    if (solved_node) {
      const SampleRecord& hit = tree[*solved_node].samples.back();
      emit_steps(out.decomposition, tree, *solved_node, &hit, true);
    } else {
      auto [node, best] = best_in_tree(tree);
      emit_steps(out.decomposition, tree, node, best, false);
    }
  });
}

SearchOutcome beam_search(const Problem& problem, const GenerationPolicy& policy,
                          const RewardModel& reward, const SearchConfig& cfg) {
  cfg.validate();
  const EngineConfig& e = cfg.engine;
  const std::size_t per_node = cfg.expansions_per_node ? cfg.expansions_per_node : cfg.beam_width;
  Sampler sampler(problem, policy, reward, e.sampler_options());
  std::mt19937_64 rng(e.rng_seed);

  SearchOutcome result = run_search(sampler, [&](SearchOutcome& out) {
    if (!init_root(out, sampler, problem, cfg)) return;
    SearchTree& tree = out.tree;
    std::vector<NodeId> frontier{0};
    std::optional<NodeId> solved_node;
    bool stop = false;

    auto ranks_before = [&](NodeId a, NodeId b) {
      const SearchNode& x = tree[a];
      const SearchNode& y = tree[b];
      if (x.best_reward != y.best_reward) return x.best_reward > y.best_reward;
      if (x.z != y.z) return x.z < y.z;
      return a < b;
    };

    while (!stop && !sampler.exhausted()) {
      std::vector<NodeId> pool;
      bool expanded = false;
      for (const NodeId id : frontier) {
        if (stop) break;
        if (tree[id].terminal) {
          pool.push_back(id);
          continue;
        }
        const auto targets = expansion_targets(tree[id]);
        const std::size_t n = std::min(per_node, targets.size());
        if (n == 0) pool.push_back(id);
        for (std::size_t t = 0; t < n && !stop; ++t) {
          const SampleRecord target = *targets[t];
          auto r = expand_node(sampler, tree[id], suffix_after(target, tree[id].prefix), e, rng,
                               &target);
          out.expansion_draws.push_back(r.drawn);
          out.decomposition.iterations.insert(out.decomposition.iterations.end(),
                                              r.iterations.begin(), r.iterations.end());
          if (r.budget_exhausted && !r.solved) {
            stop = true;
            break;
          }
          const NodeId child = tree.add_child(id, child_from(r, target, sampler.drawn()));
          pool.push_back(child);
          expanded = true;
          if (r.solved) {
            solved_node = child;
            stop = true;
          }
        }
      }
      if (solved_node || !expanded) break;
      std::stable_sort(pool.begin(), pool.end(), ranks_before);
      if (pool.size() > cfg.beam_width) pool.resize(cfg.beam_width);
      frontier = pool;
      if (std::all_of(frontier.begin(), frontier.end(), [&](NodeId id) { return tree[id].terminal; })) {
        break;
      }
    }

    if (solved_node) {
      const SampleRecord& hit = tree[*solved_node].samples.back();
      emit_steps(out.decomposition, tree, *solved_node, &hit, true);
      return;
    }
    std::vector<NodeId> ranked = frontier;
    std::stable_sort(ranked.begin(), ranked.end(), ranks_before);
    const NodeId top = ranked.front();
    const SearchNode& node = tree[top];
    const SampleRecord* final = nullptr;
    if (!node.samples.empty()) {
      final = &node.samples[argmax_reward(node.samples)];
    }
    emit_steps(out.decomposition, tree, top, final, false);
    if (!final) out.decomposition.final_solution = node.prefix;
  });
  Decomposition& d = result.decomposition;
  if (const auto best = detail::best_committed_index(d, problem)) {
    d.final_solution = d.generated_solutions[*best].solution();
  }
  return result;
}

}  // namespace disc
