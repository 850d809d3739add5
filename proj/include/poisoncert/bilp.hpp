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

// Attack-optimization problems over a bagged ensemble.
//
// Both flavours share one native shape: a list of binary decision variables,
// each controlling a fixed set of classifiers ("pattern"), grouped into
// contiguous ranges with a cardinality cap per range.
//
//  * kVanilla: one variable per distinct influence scope S_i; a single group
//    capped at r_mod.
//  * kHash: one variable per classifier; one group per trainset-hash pair
//    capped at r_ins + r_del + 2 r_mod.
//
// The objective counts target rows whose prediction flips when every rival
// receives the votes of all controlled classifiers that did not vote for it
// and the predicted class loses the controlled votes it had.

#ifndef POISONCERT_BILP_HPP_
#define POISONCERT_BILP_HPP_

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "poisoncert/core.hpp"
#include "poisoncert/hash_bagging.hpp"
#include "poisoncert/samplewise.hpp"

namespace poisoncert {

enum class BilpMode { kVanilla, kHash };

struct TargetRow {
  int sample = 0;
  ClassIndex prediction = 0;
  std::vector<int> counts;
  std::vector<int> votes;
};

struct VariableGroup {
  int begin = 0;
  int end = 0;
  int cap = 0;
};

struct BilpProblem {
  BilpMode mode = BilpMode::kHash;
  int num_classifiers = 0;
  int num_classes = 1;
  std::vector<std::vector<int>> patterns;
  // Training samples sharing each pattern (vanilla); 1 for hash variables.
  std::vector<int> multiplicity;
  std::vector<int> group_of;
  std::vector<VariableGroup> groups;
  std::vector<TargetRow> targets;

  int decision_dim() const { return static_cast<int>(patterns.size()); }
  int num_targets() const { return static_cast<int>(targets.size()); }
};

struct BuildOptions {
  // Restrict the objective to these samples (e.g. correctly classified
  // ones); all samples when empty.
  std::optional<std::vector<int>> rows;
  // Drop rows whose margin rules out any flip within the budget.
  bool apply_omega = true;
};

namespace detail {

inline std::vector<int> candidate_rows(const VoteMatrix& votes, const BuildOptions& opts) {
  if (opts.rows) {
    for (int j : *opts.rows) {
      if (j < 0 || j >= votes.num_samples()) {
        throw InputError("target row " + std::to_string(j) + " out of range");
      }
    }
    return *opts.rows;
  }
  std::vector<int> all(votes.num_samples());
  for (int j = 0; j < votes.num_samples(); ++j) all[j] = j;
  return all;
}

inline void fill_targets(BilpProblem& p, const VoteMatrix& votes, std::span<const int> rows,
                         std::int64_t margin_threshold, bool apply_omega) {
  for (int j : rows) {
    const int m = vote_margin(votes.counts_row(j), votes.prediction(j));
    if (m == kUnbreakableMargin) continue;
    if (apply_omega && m > margin_threshold) continue;
    const auto c = votes.counts_row(j);
    const auto v = votes.votes_row(j);
    p.targets.push_back({j, votes.prediction(j), {c.begin(), c.end()}, {v.begin(), v.end()}});
  }
}

}  // namespace detail

inline BilpProblem build_p2(const VoteMatrix& votes, const PairStructure& pairs,
                            const Budget& budget, const BuildOptions& opts = {}) {
  budget.validate();
  if (pairs.num_classifiers() != votes.num_classifiers()) {
    throw InputError("build_p2: pair structure has G=" + std::to_string(pairs.num_classifiers()) +
                     " but votes have G=" + std::to_string(votes.num_classifiers()));
  }
  BilpProblem p;
  p.mode = BilpMode::kHash;
  p.num_classifiers = votes.num_classifiers();
  p.num_classes = votes.num_classes();
  for (int g = 0; g < p.num_classifiers; ++g) {
    p.patterns.push_back({g});
    p.multiplicity.push_back(1);
    p.group_of.push_back(pairs.pair_of(g));
  }
  for (int h = 0; h < pairs.num_pairs(); ++h) {
    p.groups.push_back({pairs.pair_begin(h), pairs.pair_end(h), budget.per_pair_cap()});
  }
  const auto rows = detail::candidate_rows(votes, opts);
  detail::fill_targets(p, votes, rows, omega_threshold(pairs, budget), opts.apply_omega);
  return p;
}

// Vanilla bagging: training samples with identical scopes collapse into one
// variable since picking a scope twice never influences more classifiers.
// Empty scopes are dropped.
inline BilpProblem build_p1(const VoteMatrix& votes, const Membership& membership, int r_mod,
                            const BuildOptions& opts = {}) {
  if (r_mod < 0) throw InputError("build_p1: negative r_mod");
  if (membership.num_classifiers != votes.num_classifiers()) {
    throw InputError("build_p1: membership has G=" + std::to_string(membership.num_classifiers) +
                     " but votes have G=" + std::to_string(votes.num_classifiers()));
  }
  BilpProblem p;
  p.mode = BilpMode::kVanilla;
  p.num_classifiers = votes.num_classifiers();
  p.num_classes = votes.num_classes();
  std::map<std::vector<int>, int> index_of;
  for (const auto& s : membership.sets) {
    if (s.empty()) continue;
    auto [it, inserted] = index_of.try_emplace(s, static_cast<int>(p.patterns.size()));
    if (inserted) {
      p.patterns.push_back(s);
      p.multiplicity.push_back(0);
    }
    ++p.multiplicity[it->second];
  }
  p.group_of.assign(p.patterns.size(), 0);
  p.groups.push_back({0, p.decision_dim(), r_mod});

  // At most the r_mod largest scopes can be controlled at once.
  std::vector<int> sizes;
  for (const auto& s : p.patterns) sizes.push_back(static_cast<int>(s.size()));
  std::sort(sizes.rbegin(), sizes.rend());
  long long reach = 0;
  for (int k = 0; k < std::min<int>(r_mod, static_cast<int>(sizes.size())); ++k) reach += sizes[k];
  reach = std::min<long long>(reach, p.num_classifiers);

  const auto rows = detail::candidate_rows(votes, opts);
  detail::fill_targets(p, votes, rows, 2 * reach, opts.apply_omega);
  return p;
}

// How poisoned training samples reach classifiers: either a hash-bagging
// pair structure (any budget component) or an arbitrary vanilla membership
// (modifications only).
class AttackStructure {
 public:
  static AttackStructure hash(PairStructure pairs) {
    AttackStructure s;
    s.pairs_ = pairs;
    return s;
  }
  static AttackStructure vanilla(Membership membership) {
    AttackStructure s;
    membership.validate();
    s.membership_ = std::move(membership);
    return s;
  }
  // Hash structure when the membership carries one, vanilla otherwise.
  static AttackStructure from_membership(Membership membership) {
    if (membership.pair_structure) return hash(*membership.pair_structure);
    return vanilla(std::move(membership));
  }

  bool is_hash() const { return pairs_.has_value(); }
  const PairStructure& pairs() const { return *pairs_; }
  const Membership& membership() const { return *membership_; }
  int num_classifiers() const {
    return is_hash() ? pairs_->num_classifiers() : membership_->num_classifiers;
  }

  void check_budget(const Budget& budget) const {
    budget.validate();
    if (!is_hash() && (budget.r_ins != 0 || budget.r_del != 0)) {
      throw InputError(
          "vanilla bagging supports modifications only; r_ins and r_del must be 0");
    }
  }

  BilpProblem build(const VoteMatrix& votes, const Budget& budget,
                    const BuildOptions& opts = {}) const {
    check_budget(budget);
    if (is_hash()) return build_p2(votes, *pairs_, budget, opts);
    return build_p1(votes, *membership_, budget.r_mod, opts);
  }

 private:
  std::optional<PairStructure> pairs_;
  std::optional<Membership> membership_;
};

// Number of target rows flipped when the variables in `chosen` are set.
inline int evaluate_attack(const BilpProblem& p, std::span<const int> chosen) {
  std::vector<char> controlled(p.num_classifiers, 0);
  for (int v : chosen) {
    for (int g : p.patterns[v]) controlled[g] = 1;
  }
  int flipped = 0;
  std::vector<int> after(p.num_classes);
  for (const auto& row : p.targets) {
    // Worst case per rival: each rival independently gets every controlled vote.
    int lost = 0;
    std::vector<int> gained(p.num_classes, 0);
    for (int g = 0; g < p.num_classifiers; ++g) {
      if (!controlled[g]) continue;
      if (row.votes[g] == row.prediction) ++lost;
      for (ClassIndex y = 0; y < p.num_classes; ++y) {
        if (row.votes[g] != y) ++gained[y];
      }
    }
    for (ClassIndex y = 0; y < p.num_classes; ++y) {
      after[y] = y == row.prediction ? row.counts[y] - lost : row.counts[y] + gained[y];
    }
    flipped += prediction_changed(after, row.prediction) ? 1 : 0;
  }
  return flipped;
}

inline bool attack_feasible(const BilpProblem& p, std::span<const int> chosen) {
  std::vector<int> used(p.groups.size(), 0);
  std::vector<char> seen(p.patterns.size(), 0);
  for (int v : chosen) {
    if (v < 0 || v >= p.decision_dim() || seen[v]) return false;
    seen[v] = 1;
    if (++used[p.group_of[v]] > p.groups[p.group_of[v]].cap) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Standard form
// ---------------------------------------------------------------------------

// sum(coef * x) <= rhs over binary variables.
struct LinearRow {
  std::vector<std::pair<int, int>> terms;  // (variable, coefficient)
  int rhs = 0;
};

// Maximize sum(objective * x) subject to `rows`, lower <= x <= upper, x binary.
// Variable blocks, in order: A (G classifiers), Y (targets), Z (targets x C),
// W (training samples; empty for hash problems).
struct StandardBilp {
  int num_a = 0;
  int num_y = 0;
  int num_classes = 0;
  int num_w = 0;
  int big_m = 0;
  std::vector<int> lower;
  std::vector<int> upper;
  std::vector<int> objective;
  std::vector<LinearRow> rows;

  int a(int i) const { return i; }
  int y(int j) const { return num_a + j; }
  int z(int j, int l) const { return num_a + num_y + j * num_classes + l; }
  int w(int k) const { return num_a + num_y + num_y * num_classes + k; }
  int num_variables() const { return num_a + num_y + num_y * num_classes + num_w; }
};

namespace detail {

inline StandardBilp standard_form_common(const BilpProblem& p, int num_w) {
  StandardBilp s;
  s.num_a = p.num_classifiers;
  s.num_y = p.num_targets();
  s.num_classes = p.num_classes;
  s.num_w = num_w;
  s.big_m = 2 * p.num_classifiers + 1;
  const int n = s.num_variables();
  s.lower.assign(n, 0);
  s.upper.assign(n, 1);
  s.objective.assign(n, 0);
  for (int j = 0; j < s.num_y; ++j) s.objective[s.y(j)] = 1;

  for (int j = 0; j < s.num_y; ++j) {
    const auto& row = p.targets[j];
    // Z_{j,pred} is always 1.
    s.lower[s.z(j, row.prediction)] = 1;
    for (int l = 0; l < s.num_classes; ++l) {
      if (l == row.prediction) continue;
      // Z_{j,l} <= 0  or  o(pred) - o(l) <= sum_i A_i ([f_i != l] + [f_i == pred]),
      // switched by Z itself:  -sum_i c_i A_i + M Z_{j,l} <= M - (o(pred) - o(l)).
      LinearRow r;
      for (int i = 0; i < s.num_a; ++i) {
        const int c = (row.votes[i] != l ? 1 : 0) + (row.votes[i] == row.prediction ? 1 : 0);
        if (c != 0) r.terms.emplace_back(s.a(i), -c);
      }
      r.terms.emplace_back(s.z(j, l), s.big_m);
      r.rhs = s.big_m - (row.counts[row.prediction] - row.counts[l]);
      s.rows.push_back(std::move(r));
    }
    // Y_j <= 0  or  sum_l Z_{j,l} >= 2:  M Y_j - sum_l Z_{j,l} <= M - 2.
    LinearRow act;
    act.terms.emplace_back(s.y(j), s.big_m);
    for (int l = 0; l < s.num_classes; ++l) act.terms.emplace_back(s.z(j, l), -1);
    act.rhs = s.big_m - 2;
    s.rows.push_back(std::move(act));
  }
  return s;
}

}  // namespace detail

// Standard form of a vanilla problem. W ranges over every training sample of
// `membership` (no deduplication). The smallest-index tie rule is not
// encoded: a tie with any rival counts as a flip.
inline StandardBilp to_standard_form(const BilpProblem& p, const Membership& membership) {
  if (p.mode != BilpMode::kVanilla) {
    throw InputError("to_standard_form: membership overload expects a vanilla problem");
  }
  if (membership.num_classifiers != p.num_classifiers) {
    throw InputError("to_standard_form: membership G mismatch");
  }
  const int n = static_cast<int>(membership.num_samples());
  auto s = detail::standard_form_common(p, n);
  LinearRow budget;
  for (int k = 0; k < n; ++k) budget.terms.emplace_back(s.w(k), 1);
  budget.rhs = p.groups.empty() ? 0 : p.groups.front().cap;
  s.rows.insert(s.rows.begin(), std::move(budget));

  // A_i <= sum_k W_k [i in S_k]
  std::vector<LinearRow> link(s.num_a);
  for (int i = 0; i < s.num_a; ++i) link[i].terms.emplace_back(s.a(i), 1);
  for (int k = 0; k < n; ++k) {
    for (int i : membership.sets[k]) link[i].terms.emplace_back(s.w(k), -1);
  }
  s.rows.insert(s.rows.begin() + 1, link.begin(), link.end());
  return s;
}

// Standard form of a hash problem: A is the only coupled block, capped per
// trainset-hash pair.
inline StandardBilp to_standard_form(const BilpProblem& p) {
  if (p.mode != BilpMode::kHash) {
    throw InputError("to_standard_form: vanilla problems need their membership");
  }
  auto s = detail::standard_form_common(p, 0);
  std::vector<LinearRow> caps;
  for (const auto& grp : p.groups) {
    LinearRow r;
    for (int v = grp.begin; v < grp.end; ++v) r.terms.emplace_back(s.a(p.patterns[v].front()), 1);
    r.rhs = grp.cap;
    caps.push_back(std::move(r));
  }
  s.rows.insert(s.rows.begin(), caps.begin(), caps.end());
  return s;
}

// Objective and constraint value of an assignment; nullopt if infeasible.
inline std::optional<int> evaluate_standard(const StandardBilp& s, std::span<const int> x) {
  for (int v = 0; v < s.num_variables(); ++v) {
    if (x[v] < s.lower[v] || x[v] > s.upper[v]) return std::nullopt;
  }
  for (const auto& r : s.rows) {
    long long act = 0;
    for (auto [v, c] : r.terms) act += static_cast<long long>(c) * x[v];
    if (act > r.rhs) return std::nullopt;
  }
  int obj = 0;
  for (int v = 0; v < s.num_variables(); ++v) obj += s.objective[v] * x[v];
  return obj;
}

// {"sense": "maximize", "num_variables": n,
//  "blocks": {"A": [offset, len], "Y": [...], "Z": [...], "W": [...]},
//  "lower": [...], "upper": [...], "objective": [[var, coef], ...],
//  "constraints": {"sense": "<=", "num_rows": m,
//                  "triplets": [[row, var, coef], ...], "rhs": [...]},
//  "big_m": M}
inline nlohmann::json to_json(const StandardBilp& s) {
  nlohmann::json j;
  j["sense"] = "maximize";
  j["num_variables"] = s.num_variables();
  j["blocks"] = {{"A", {0, s.num_a}},
                 {"Y", {s.num_a, s.num_y}},
                 {"Z", {s.num_a + s.num_y, s.num_y * s.num_classes}},
                 {"W", {s.num_a + s.num_y + s.num_y * s.num_classes, s.num_w}}};
  j["lower"] = s.lower;
  j["upper"] = s.upper;
  auto obj = nlohmann::json::array();
  for (int v = 0; v < s.num_variables(); ++v) {
    if (s.objective[v] != 0) obj.push_back({v, s.objective[v]});
  }
  j["objective"] = obj;
  auto triplets = nlohmann::json::array();
  auto rhs = nlohmann::json::array();
  for (std::size_t r = 0; r < s.rows.size(); ++r) {
    for (auto [v, c] : s.rows[r].terms) triplets.push_back({r, v, c});
    rhs.push_back(s.rows[r].rhs);
  }
  j["constraints"] = {{"sense", "<="},
                      {"num_rows", s.rows.size()},
                      {"triplets", triplets},
                      {"rhs", rhs}};
  j["big_m"] = s.big_m;
  return j;
}

}  // namespace poisoncert

#endif  // POISONCERT_BILP_HPP_
