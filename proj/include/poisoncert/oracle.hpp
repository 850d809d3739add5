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

// Brute-force ground truth for small instances.
//
// Nothing here reuses the swing/deficit arithmetic of the sample-wise module
// or the solver: votes are recounted from the raw vote table for every
// enumerated attack, and the half-vote tie rule is evaluated on doubled
// integer counts.

#ifndef POISONCERT_ORACLE_HPP_
#define POISONCERT_ORACLE_HPP_

#include <bit>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "poisoncert/bilp.hpp"
#include "poisoncert/core.hpp"
#include "poisoncert/hash_bagging.hpp"

namespace poisoncert::oracle {

inline constexpr int kMaxEnumeratedVariables = 20;

struct OracleResult {
  int max_attacked = 0;
  // Controlled classifiers of the first (lexicographically smallest mask)
  // optimal attack.
  std::vector<int> witness_classifiers;
  // Vanilla only: one training sample per chosen scope.
  std::vector<std::size_t> witness_samples;
};

namespace detail {

// Own tally and argmax, kept separate from VoteMatrix's.
struct RawRow {
  std::vector<int> votes;
  std::vector<int> counts;
  int pred = 0;
};

inline std::vector<RawRow> raw_rows(const VoteMatrix& votes, std::optional<std::vector<int>> rows) {
  std::vector<int> idx;
  if (rows) {
    idx = *rows;
  } else {
    for (int j = 0; j < votes.num_samples(); ++j) idx.push_back(j);
  }
  std::vector<RawRow> out;
  for (int j : idx) {
    RawRow r;
    r.counts.assign(votes.num_classes(), 0);
    for (int g = 0; g < votes.num_classifiers(); ++g) {
      r.votes.push_back(votes.vote(j, g));
      ++r.counts[votes.vote(j, g)];
    }
    for (int y = 0; y < votes.num_classes(); ++y) {
      if (r.counts[y] > r.counts[r.pred]) r.pred = y;
    }
    out.push_back(std::move(r));
  }
  return out;
}

// Worst-case flip test for one row when classifiers in `mask` are controlled.
// `strict_ties` false treats every tie as a flip (index rule ignored).
inline bool row_flipped(const RawRow& r, std::uint64_t mask, bool strict_ties = true) {
  const int classes = static_cast<int>(r.counts.size());
  int pred_after = r.counts[r.pred];
  for (std::size_t g = 0; g < r.votes.size(); ++g) {
    if ((mask >> g & 1U) && r.votes[g] == r.pred) --pred_after;
  }
  for (int y = 0; y < classes; ++y) {
    if (y == r.pred) continue;
    int rival_after = r.counts[y];
    for (std::size_t g = 0; g < r.votes.size(); ++g) {
      if ((mask >> g & 1U) && r.votes[g] != y) ++rival_after;
    }
    const int half = strict_ties ? (y < r.pred ? 1 : 0) : 1;
    if (2 * pred_after < 2 * rival_after + half) return true;
  }
  return false;
}

inline int count_flipped(const std::vector<RawRow>& rows, std::uint64_t mask, bool strict = true) {
  int n = 0;
  for (const auto& r : rows) n += row_flipped(r, mask, strict) ? 1 : 0;
  return n;
}

inline std::vector<int> bits_of(std::uint64_t mask) {
  std::vector<int> out;
  for (int g = 0; mask != 0; ++g, mask >>= 1) {
    if (mask & 1U) out.push_back(g);
  }
  return out;
}

inline bool within_pair_caps(std::uint64_t mask, const PairStructure& pairs, int cap) {
  for (int h = 0; h < pairs.num_pairs(); ++h) {
    int used = 0;
    for (int g = pairs.pair_begin(h); g < pairs.pair_end(h); ++g) used += (mask >> g & 1U) ? 1 : 0;
    if (used > cap) return false;
  }
  return true;
}

struct Scopes {
  std::vector<std::uint64_t> masks;
  std::vector<std::size_t> first_sample;
};

inline Scopes distinct_scopes(const Membership& m) {
  Scopes s;
  std::set<std::uint64_t> seen;
  for (std::size_t i = 0; i < m.sets.size(); ++i) {
    std::uint64_t mask = 0;
    for (int g : m.sets[i]) mask |= std::uint64_t{1} << g;
    if (mask == 0 || !seen.insert(mask).second) continue;
    s.masks.push_back(mask);
    s.first_sample.push_back(i);
  }
  return s;
}

}  // namespace detail

// Max over all controlled-classifier sets within the per-pair caps.
inline OracleResult brute_force_p2(const VoteMatrix& votes, const PairStructure& pairs,
                                   const Budget& budget,
                                   std::optional<std::vector<int>> rows = std::nullopt) {
  const int g_total = votes.num_classifiers();
  if (g_total > kMaxEnumeratedVariables) {
    throw TooLargeError("brute_force_p2: G=" + std::to_string(g_total) + " exceeds " +
                        std::to_string(kMaxEnumeratedVariables));
  }
  if (pairs.num_classifiers() != g_total) throw InputError("brute_force_p2: G mismatch");
  const auto raw = detail::raw_rows(votes, std::move(rows));
  const int cap = budget.per_pair_cap();
  OracleResult best;
  best.max_attacked = detail::count_flipped(raw, 0);
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << g_total); ++mask) {
    if (!detail::within_pair_caps(mask, pairs, cap)) continue;
    const int n = detail::count_flipped(raw, mask);
    if (n > best.max_attacked) {
      best.max_attacked = n;
      best.witness_classifiers = detail::bits_of(mask);
    }
  }
  return best;
}

// Max over all sets of at most r_mod distinct non-empty scopes.
inline OracleResult brute_force_p1(const VoteMatrix& votes, const Membership& membership, int r_mod,
                                   std::optional<std::vector<int>> rows = std::nullopt) {
  if (votes.num_classifiers() > 63) throw TooLargeError("brute_force_p1: G exceeds 63");
  if (membership.num_classifiers != votes.num_classifiers()) {
    throw InputError("brute_force_p1: G mismatch");
  }
  const auto scopes = detail::distinct_scopes(membership);
  const int n = static_cast<int>(scopes.masks.size());
  if (n > kMaxEnumeratedVariables) {
    throw TooLargeError("brute_force_p1: " + std::to_string(n) + " distinct scopes exceed " +
                        std::to_string(kMaxEnumeratedVariables));
  }
  const auto raw = detail::raw_rows(votes, std::move(rows));
  OracleResult best;
  for (std::uint64_t pick = 0; pick < (std::uint64_t{1} << n); ++pick) {
    if (std::popcount(pick) > r_mod) continue;
    std::uint64_t mask = 0;
    for (int k = 0; k < n; ++k) {
      if (pick >> k & 1U) mask |= scopes.masks[k];
    }
    const int flipped = detail::count_flipped(raw, mask);
    if (pick == 0 || flipped > best.max_attacked) {
      best.max_attacked = flipped;
      best.witness_classifiers = detail::bits_of(mask);
      best.witness_samples.clear();
      for (int k = 0; k < n; ++k) {
        if (pick >> k & 1U) best.witness_samples.push_back(scopes.first_sample[k]);
      }
    }
  }
  return best;
}

inline OracleResult brute_force(const VoteMatrix& votes, const AttackStructure& structure,
                                const Budget& budget,
                                std::optional<std::vector<int>> rows = std::nullopt) {
  structure.check_budget(budget);
  if (structure.is_hash()) return brute_force_p2(votes, structure.pairs(), budget, std::move(rows));
  return brute_force_p1(votes, structure.membership(), budget.r_mod, std::move(rows));
}

// True if some feasible attack leaves a row tied with a higher-index rival and
// no other rival ahead, i.e. the smallest-index tie rule decides the outcome.
inline bool tie_rule_binds(const VoteMatrix& votes, const AttackStructure& structure,
                           const Budget& budget) {
  const auto raw = detail::raw_rows(votes, std::nullopt);
  auto differs = [&](std::uint64_t mask) {
    for (const auto& r : raw) {
      if (detail::row_flipped(r, mask, true) != detail::row_flipped(r, mask, false)) return true;
    }
    return false;
  };
  if (structure.is_hash()) {
    const int g_total = votes.num_classifiers();
    if (g_total > kMaxEnumeratedVariables) throw TooLargeError("tie_rule_binds: G too large");
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << g_total); ++mask) {
      if (detail::within_pair_caps(mask, structure.pairs(), budget.per_pair_cap()) && differs(mask)) {
        return true;
      }
    }
    return false;
  }
  const auto scopes = detail::distinct_scopes(structure.membership());
  const int n = static_cast<int>(scopes.masks.size());
  if (n > kMaxEnumeratedVariables) throw TooLargeError("tie_rule_binds: too many scopes");
  for (std::uint64_t pick = 0; pick < (std::uint64_t{1} << n); ++pick) {
    if (std::popcount(pick) > budget.r_mod) continue;
    std::uint64_t mask = 0;
    for (int k = 0; k < n; ++k) {
      if (pick >> k & 1U) mask |= scopes.masks[k];
    }
    if (differs(mask)) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Generic 0-1 solver for StandardBilp
// ---------------------------------------------------------------------------

// Depth-first enumeration with row-activity feasibility pruning. Only meant
// for the small instances used to cross-check the native formulation.
class StandardFormSolver {
 public:
  explicit StandardFormSolver(const StandardBilp& s) : s_(s) {
    const int n = s.num_variables();
    x_.assign(n, 0);
    // Training samples first, then classifiers, then the indicator blocks, so
    // infeasible supports are cut before the indicators are enumerated.
    for (int k = 0; k < s.num_w; ++k) order_.push_back(s.w(k));
    for (int i = 0; i < s.num_a; ++i) order_.push_back(s.a(i));
    for (int j = 0; j < s.num_y; ++j) {
      for (int l = 0; l < s.num_classes; ++l) order_.push_back(s.z(j, l));
      order_.push_back(s.y(j));
    }
    col_rows_.resize(n);
    for (std::size_t r = 0; r < s.rows.size(); ++r) {
      for (auto [v, c] : s.rows[r].terms) col_rows_[v].emplace_back(static_cast<int>(r), c);
    }
    // Minimum activity with everything undecided.
    min_act_.assign(s.rows.size(), 0);
    for (std::size_t r = 0; r < s.rows.size(); ++r) {
      for (auto [v, c] : s.rows[r].terms) min_act_[r] += std::min(c * s.lower[v], c * s.upper[v]);
    }
    // Objective slack of undecided variables.
    for (int v = 0; v < n; ++v) obj_left_ += std::max(0, s.objective[v] * s.upper[v]);
  }

  std::optional<int> solve() {
    for (std::size_t r = 0; r < s_.rows.size(); ++r) {
      if (min_act_[r] > s_.rows[r].rhs) return std::nullopt;
    }
    dfs(0, 0);
    if (!found_) return std::nullopt;
    return best_;
  }

  const std::vector<int>& best_assignment() const { return best_x_; }

 private:
  void dfs(int k, int obj) {
    if (found_ && obj + obj_left_ <= best_) return;
    if (k == s_.num_variables()) {
      found_ = true;
      best_ = obj;
      best_x_ = x_;
      return;
    }
    const int v = order_[k];
    const int lo = s_.lower[v];
    const int hi = s_.upper[v];
    const int obj_here = std::max(0, s_.objective[v] * hi);
    obj_left_ -= obj_here;
    for (int val = hi; val >= lo; --val) {
      if (assign(v, val)) dfs(k + 1, obj + s_.objective[v] * val);
      unassign(v, val);
    }
    obj_left_ += obj_here;
  }

  // Moves variable v from "undecided" to `val`; false if some row becomes
  // infeasible. Always paired with unassign.
  bool assign(int v, int val) {
    x_[v] = val;
    bool ok = true;
    for (auto [r, c] : col_rows_[v]) {
      min_act_[r] += c * val - std::min(c * s_.lower[v], c * s_.upper[v]);
      if (min_act_[r] > s_.rows[r].rhs) ok = false;
    }
    return ok;
  }

  void unassign(int v, int val) {
    for (auto [r, c] : col_rows_[v]) {
      min_act_[r] -= c * val - std::min(c * s_.lower[v], c * s_.upper[v]);
    }
    x_[v] = 0;
  }

  const StandardBilp& s_;
  std::vector<int> order_;
  std::vector<int> x_;
  std::vector<std::vector<std::pair<int, int>>> col_rows_;
  std::vector<long long> min_act_;
  int obj_left_ = 0;
  bool found_ = false;
  int best_ = 0;
  std::vector<int> best_x_;
};

inline std::optional<int> solve_standard_form(const StandardBilp& s) {
  if (s.num_variables() > 40) throw TooLargeError("solve_standard_form: too many variables");
  StandardFormSolver solver(s);
  return solver.solve();
}

}  // namespace poisoncert::oracle

#endif  // POISONCERT_ORACLE_HPP_
