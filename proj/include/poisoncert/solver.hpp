// Copyright 2026 The poisoncert Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Anytime depth-first branch-and-bound for BilpProblem.
//
// Variables are branched in a fixed order (most rows whose prediction they
// vote for first, lowest index on ties), "take" before "skip". Every node is
// itself a feasible attack, so its objective updates the incumbent. The node
// bound counts rows that are already flipped plus rows that could still flip
// if each group spent its remaining capacity on that row's best undecided
// variables; it never underestimates what the subtree can reach.
//
// When a node or time limit stops the search, the reported upper bound is the
// maximum of the incumbent and the bounds of all unexplored subtrees, so
// M - upper_bound stays a sound certificate.

#ifndef POISONCERT_SOLVER_HPP_
#define POISONCERT_SOLVER_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "poisoncert/bilp.hpp"
#include "poisoncert/core.hpp"

namespace poisoncert {

struct SolveOptions {
  std::optional<double> time_limit_seconds;
  // Deterministic alternative to the wall-clock limit.
  std::optional<std::uint64_t> node_limit;
};

enum class SolveStatus { kOptimal, kTimeLimit };

struct SolveResult {
  int incumbent_objective = 0;
  int upper_bound = 0;
  std::vector<int> incumbent_attack;  // chosen decision variables, ascending
  std::uint64_t nodes_explored = 0;
  double elapsed_seconds = 0.0;
  SolveStatus status = SolveStatus::kOptimal;
};

namespace detail {

class BranchAndBound {
 public:
  BranchAndBound(const BilpProblem& p, const SolveOptions& opts)
      : p_(p), opts_(opts), start_(std::chrono::steady_clock::now()) {
    const int rows = p.num_targets();
    const int classes = p.num_classes;
    const int g_total = p.num_classifiers;
    weight_.assign(static_cast<std::size_t>(rows) * classes * g_total, 0);
    deficit_.assign(static_cast<std::size_t>(rows) * classes, 0);
    for (int r = 0; r < rows; ++r) {
      const auto& t = p.targets[r];
      for (ClassIndex y = 0; y < classes; ++y) {
        if (y == t.prediction) continue;
        deficit_[idx(r, y)] = deficit(t.counts, t.prediction, y);
        for (int g = 0; g < g_total; ++g) {
          weight_[idx(r, y) * g_total + g] = static_cast<std::uint8_t>(swing_weight(t.votes[g], t.prediction, y));
        }
      }
    }
    swing_.assign(static_cast<std::size_t>(rows) * classes, 0);
    cover_.assign(g_total, 0);
    group_left_.resize(p.groups.size());
    for (std::size_t h = 0; h < p.groups.size(); ++h) group_left_[h] = p.groups[h].cap;
    order_ = branch_order();
    taken_.assign(p.decision_dim(), 0);
    flipped_.assign(rows, 0);
  }

  SolveResult run() {
    SolveResult res;
    if (p_.num_targets() == 0) return finish(res);
    if (opts_.time_limit_seconds && *opts_.time_limit_seconds <= 0.0) {
      res.status = SolveStatus::kTimeLimit;
      res.upper_bound = p_.num_targets();
      return finish(res);
    }
    dfs(0);
    res.incumbent_objective = best_;
    res.incumbent_attack = best_attack_;
    res.status = aborted_ ? SolveStatus::kTimeLimit : SolveStatus::kOptimal;
    res.upper_bound = aborted_ ? std::max(best_, live_bound_) : best_;
    return finish(res);
  }

 private:
  std::size_t idx(int r, ClassIndex y) const {
    return static_cast<std::size_t>(r) * p_.num_classes + y;
  }

  SolveResult finish(SolveResult& res) {
    res.nodes_explored = nodes_;
    res.elapsed_seconds = elapsed();
    return res;
  }

  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  std::vector<int> branch_order() const {
    std::vector<int> coverage(p_.decision_dim(), 0);
    for (int v = 0; v < p_.decision_dim(); ++v) {
      for (const auto& t : p_.targets) {
        for (int g : p_.patterns[v]) {
          if (t.votes[g] == t.prediction) {
            ++coverage[v];
            break;
          }
        }
      }
    }
    std::vector<int> order(p_.decision_dim());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return coverage[a] > coverage[b]; });
    return order;
  }

  bool limit_hit() {
    if (opts_.node_limit && nodes_ > *opts_.node_limit) return true;
    if (opts_.time_limit_seconds && elapsed() >= *opts_.time_limit_seconds) return true;
    return false;
  }

  // Rows currently flipped by the taken variables.
  int flipped_count() const { return flipped_total_; }

  void take(int v) {
    const int g_total = p_.num_classifiers;
    for (int g : p_.patterns[v]) {
      if (cover_[g]++ != 0) continue;
      for (int r = 0; r < p_.num_targets(); ++r) {
        const ClassIndex pred = p_.targets[r].prediction;
        for (ClassIndex y = 0; y < p_.num_classes; ++y) {
          if (y == pred) continue;
          swing_[idx(r, y)] += weight_[idx(r, y) * g_total + g];
        }
      }
    }
    --group_left_[p_.group_of[v]];
    taken_[v] = 1;
    refresh_flipped();
  }

  void untake(int v) {
    const int g_total = p_.num_classifiers;
    for (int g : p_.patterns[v]) {
      if (--cover_[g] != 0) continue;
      for (int r = 0; r < p_.num_targets(); ++r) {
        const ClassIndex pred = p_.targets[r].prediction;
        for (ClassIndex y = 0; y < p_.num_classes; ++y) {
          if (y == pred) continue;
          swing_[idx(r, y)] -= weight_[idx(r, y) * g_total + g];
        }
      }
    }
    ++group_left_[p_.group_of[v]];
    taken_[v] = 0;
    refresh_flipped();
  }

  void refresh_flipped() {
    flipped_total_ = 0;
    for (int r = 0; r < p_.num_targets(); ++r) {
      const ClassIndex pred = p_.targets[r].prediction;
      char f = 0;
      for (ClassIndex y = 0; y < p_.num_classes && !f; ++y) {
        if (y != pred && swing_[idx(r, y)] >= deficit_[idx(r, y)]) f = 1;
      }
      flipped_[r] = f;
      flipped_total_ += f;
    }
  }

  // Optimistic objective of the subtree where order_[depth..] are undecided.
  int bound(int depth) {
    const int g_total = p_.num_classifiers;
    int b = 0;
    gains_by_group_.resize(p_.groups.size());
    for (int r = 0; r < p_.num_targets(); ++r) {
      if (flipped_[r]) {
        ++b;
        continue;
      }
      const ClassIndex pred = p_.targets[r].prediction;
      bool reachable = false;
      for (ClassIndex y = 0; y < p_.num_classes && !reachable; ++y) {
        if (y == pred) continue;
        const int need = deficit_[idx(r, y)] - swing_[idx(r, y)];
        const std::uint8_t* w = &weight_[idx(r, y) * g_total];
        for (auto& gg : gains_by_group_) gg.clear();
        long long total = 0;
        for (int k = depth; k < static_cast<int>(order_.size()); ++k) {
          const int v = order_[k];
          const int h = p_.group_of[v];
          if (group_left_[h] <= 0) continue;
          int gain = 0;
          for (int g : p_.patterns[v]) {
            if (cover_[g] == 0) gain += w[g];
          }
          if (gain > 0) {
            gains_by_group_[h].push_back(gain);
            total += gain;
          }
        }
        if (total < need) continue;
        long long best = 0;
        for (std::size_t h = 0; h < gains_by_group_.size(); ++h) {
          auto& gg = gains_by_group_[h];
          const auto k = std::min<std::size_t>(gg.size(), static_cast<std::size_t>(std::max(group_left_[h], 0)));
          if (k < gg.size()) {
            std::nth_element(gg.begin(), gg.begin() + static_cast<long>(k), gg.end(), std::greater<>());
          }
          for (std::size_t i = 0; i < k; ++i) best += gg[i];
        }
        reachable = best >= need;
      }
      if (reachable) ++b;
    }
    return b;
  }

  bool any_move_left(int depth) const {
    for (int k = depth; k < static_cast<int>(order_.size()); ++k) {
      if (group_left_[p_.group_of[order_[k]]] > 0) return true;
    }
    return false;
  }

  void record_incumbent() {
    const int cur = flipped_count();
    if (cur > best_ || !have_incumbent_) {
      best_ = cur;
      have_incumbent_ = true;
      best_attack_.clear();
      for (int v = 0; v < p_.decision_dim(); ++v) {
        if (taken_[v]) best_attack_.push_back(v);
      }
    }
  }

  void dfs(int depth) {
    ++nodes_;
    record_incumbent();
    if (best_ == p_.num_targets()) return;
    if (!any_move_left(depth)) return;
    if (limit_hit()) {
      aborted_ = true;
      live_bound_ = std::max(live_bound_, bound(depth));
      return;
    }
    if (bound(depth) <= best_) return;

    const int v = order_[depth];
    if (group_left_[p_.group_of[v]] > 0) {
      take(v);
      dfs(depth + 1);
      untake(v);
      if (aborted_) {
        live_bound_ = std::max(live_bound_, bound(depth + 1));
        return;
      }
    }
    dfs(depth + 1);
  }

  const BilpProblem& p_;
  SolveOptions opts_;
  std::chrono::steady_clock::time_point start_;

  std::vector<std::uint8_t> weight_;  // [row][class][classifier]
  std::vector<int> deficit_;          // [row][class]
  std::vector<int> swing_;            // [row][class], from taken variables
  std::vector<int> cover_;            // taken variables covering classifier g
  std::vector<int> group_left_;
  std::vector<int> order_;
  std::vector<char> taken_;
  std::vector<char> flipped_;
  int flipped_total_ = 0;
  std::vector<std::vector<int>> gains_by_group_;

  int best_ = 0;
  bool have_incumbent_ = false;
  std::vector<int> best_attack_;
  std::uint64_t nodes_ = 0;
  bool aborted_ = false;
  int live_bound_ = 0;
};

}  // namespace detail

inline SolveResult solve(const BilpProblem& problem, const SolveOptions& opts = {}) {
  detail::BranchAndBound bnb(problem, opts);
  return bnb.run();
}

// ---------------------------------------------------------------------------
// Certification
// ---------------------------------------------------------------------------

struct CertifyOptions {
  // Per-sample time budget; the solve limit is this times the number of
  // target rows. Ignored when `time_limit_seconds` is set.
  double time_per_sample = 2.0;
  std::optional<double> time_limit_seconds;
  std::optional<std::uint64_t> node_limit;
  bool apply_omega = true;
};

namespace detail {

inline SolveOptions solve_options_for(const CertifyOptions& opts, int num_targets) {
  SolveOptions so;
  so.node_limit = opts.node_limit;
  if (opts.time_limit_seconds) {
    so.time_limit_seconds = opts.time_limit_seconds;
  } else if (std::isfinite(opts.time_per_sample)) {
    so.time_limit_seconds = opts.time_per_sample * std::max(num_targets, 1);
  }
  return so;
}

inline std::vector<int> correct_rows(const VoteMatrix& votes, std::span<const int> labels) {
  if (static_cast<int>(labels.size()) != votes.num_samples()) {
    throw InputError("labels: expected " + std::to_string(votes.num_samples()) + " entries, got " +
                     std::to_string(labels.size()));
  }
  std::vector<int> rows;
  for (int j = 0; j < votes.num_samples(); ++j) {
    if (labels[j] == votes.prediction(j)) rows.push_back(j);
  }
  return rows;
}

inline void check_dimensions(const VoteMatrix& votes, const AttackStructure& structure) {
  if (structure.num_classifiers() != votes.num_classifiers()) {
    throw InputError("votes have G=" + std::to_string(votes.num_classifiers()) +
                     " but the structure has G=" + std::to_string(structure.num_classifiers()));
  }
}

}  // namespace detail

// Exact (or anytime) collective certificate over the whole testset. With
// labels, additionally certifies accuracy over the correctly predicted rows.
inline Certificate certify(const VoteMatrix& votes, const AttackStructure& structure,
                           const Budget& budget, std::optional<std::span<const int>> labels = {},
                           const CertifyOptions& opts = {}) {
  detail::check_dimensions(votes, structure);
  structure.check_budget(budget);
  Certificate cert;
  cert.num_samples = votes.num_samples();
  cert.budget = budget;
  cert.method = CertifyMethod::kCollective;

  BuildOptions bo;
  bo.apply_omega = opts.apply_omega;
  const auto problem = structure.build(votes, budget, bo);
  const auto res = solve(problem, detail::solve_options_for(opts, problem.num_targets()));
  cert.omega_size = problem.num_targets();
  cert.attacked_ub = res.upper_bound;
  cert.attacked_incumbent = res.incumbent_objective;
  cert.collective_robustness_lb = votes.num_samples() - res.upper_bound;
  cert.solve_seconds = res.elapsed_seconds;
  cert.status = res.status == SolveStatus::kOptimal ? CertificateStatus::kExact
                                                    : CertificateStatus::kTimeLimitBound;

  if (labels) {
    const auto correct = detail::correct_rows(votes, *labels);
    bo.rows = correct;
    const auto acc_problem = structure.build(votes, budget, bo);
    const auto acc = solve(acc_problem, detail::solve_options_for(opts, acc_problem.num_targets()));
    cert.num_correct = static_cast<int>(correct.size());
    cert.accuracy_attacked_ub = acc.upper_bound;
    cert.certified_accuracy = static_cast<int>(correct.size()) - acc.upper_bound;
    cert.solve_seconds += acc.elapsed_seconds;
    if (acc.status != SolveStatus::kOptimal) cert.status = CertificateStatus::kTimeLimitBound;
  }
  return cert;
}

}  // namespace poisoncert

#endif  // POISONCERT_SOLVER_HPP_
