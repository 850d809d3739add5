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

// Tolerable-budget bound: the fewest training samples whose influence scopes
// jointly cover more than half of the classifiers. Poisoning that many samples
// lets the attacker flip every prediction, so collective robustness is zero
// from that budget on.

#ifndef POISONCERT_BOUND_HPP_
#define POISONCERT_BOUND_HPP_

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "poisoncert/core.hpp"
#include "poisoncert/hash_bagging.hpp"

namespace poisoncert {

inline constexpr int kUnreachableBudget = std::numeric_limits<int>::max();

struct BudgetBound {
  std::optional<int> r_bar;            // exact minimum, when searched
  int r_bar_upper = kUnreachableBudget;  // size of a feasible cover
  std::vector<std::size_t> witness;    // training indices of the cover

  bool unreachable() const { return r_bar_upper == kUnreachableBudget; }
};

struct ExactBoundOptions {
  // Exact search is refused above this many distinct, non-dominated scopes.
  int max_patterns = 30;
};

namespace detail {

struct CoverPattern {
  boost::dynamic_bitset<> bits;
  std::size_t first_sample = 0;
};

inline int coverage_needed(int g_total) { return g_total / 2 + 1; }

// Distinct non-empty scopes, each tagged with the first sample that has it.
inline std::vector<CoverPattern> distinct_patterns(const Membership& m) {
  std::map<std::vector<int>, std::size_t> first;
  for (std::size_t i = 0; i < m.sets.size(); ++i) {
    if (!m.sets[i].empty()) first.try_emplace(m.sets[i], i);
  }
  std::vector<CoverPattern> out;
  for (const auto& [set, i] : first) {
    CoverPattern p{boost::dynamic_bitset<>(static_cast<std::size_t>(m.num_classifiers)), i};
    for (int g : set) p.bits.set(static_cast<std::size_t>(g));
    out.push_back(std::move(p));
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first_sample < b.first_sample; });
  return out;
}

// Drops every scope strictly contained in another one.
inline std::vector<CoverPattern> drop_dominated(std::vector<CoverPattern> ps) {
  std::vector<CoverPattern> out;
  for (std::size_t a = 0; a < ps.size(); ++a) {
    bool dominated = false;
    for (std::size_t b = 0; b < ps.size() && !dominated; ++b) {
      if (a != b && ps[a].bits.is_proper_subset_of(ps[b].bits)) dominated = true;
    }
    if (!dominated) out.push_back(ps[a]);
  }
  return out;
}

class MinCoverSearch {
 public:
  MinCoverSearch(std::vector<CoverPattern> patterns, int needed, int incumbent,
                 std::vector<std::size_t> incumbent_set)
      : ps_(std::move(patterns)), needed_(needed), best_(incumbent), best_set_(std::move(incumbent_set)) {
    std::stable_sort(ps_.begin(), ps_.end(),
                     [](const auto& a, const auto& b) { return a.bits.count() > b.bits.count(); });
  }

  void run() {
    if (ps_.empty()) return;
    boost::dynamic_bitset<> covered(ps_.front().bits.size());
    dfs(0, covered);
  }

  int best() const { return best_; }
  const std::vector<std::size_t>& best_set() const { return best_set_; }

 private:
  void dfs(std::size_t next, const boost::dynamic_bitset<>& covered) {
    const int have = static_cast<int>(covered.count());
    const int chosen = static_cast<int>(chosen_.size());
    if (have >= needed_) {
      if (chosen < best_) {
        best_ = chosen;
        best_set_ = chosen_;
      }
      return;
    }
    if (next >= ps_.size() || chosen + 1 >= best_) return;
    // Patterns are sorted by size, so the next ones add at most this much each.
    const int per_pick = static_cast<int>(ps_[next].bits.count());
    if (per_pick == 0) return;
    const int missing = needed_ - have;
    if (chosen + (missing + per_pick - 1) / per_pick >= best_) return;

    chosen_.push_back(ps_[next].first_sample);
    dfs(next + 1, covered | ps_[next].bits);
    chosen_.pop_back();
    dfs(next + 1, covered);
  }

  std::vector<CoverPattern> ps_;
  int needed_;
  int best_;
  std::vector<std::size_t> best_set_;
  std::vector<std::size_t> chosen_;
};

}  // namespace detail

// Greedy max-coverage: repeatedly add the scope covering the most uncovered
// classifiers (lowest sample index on ties) until more than G/2 are covered.
inline BudgetBound tolerable_budget_greedy(const Membership& membership) {
  BudgetBound out;
  const auto ps = detail::distinct_patterns(membership);
  const int needed = detail::coverage_needed(membership.num_classifiers);
  boost::dynamic_bitset<> covered(static_cast<std::size_t>(membership.num_classifiers));
  std::vector<std::size_t> picks;
  while (static_cast<int>(covered.count()) < needed) {
    std::size_t best_gain = 0;
    std::optional<std::size_t> best;
    for (std::size_t k = 0; k < ps.size(); ++k) {
      const auto gain = (ps[k].bits - covered).count();
      if (gain > best_gain) {
        best_gain = gain;
        best = k;
      }
    }
    if (!best) return out;
    covered |= ps[*best].bits;
    picks.push_back(ps[*best].first_sample);
  }
  out.r_bar_upper = static_cast<int>(picks.size());
  out.witness = std::move(picks);
  return out;
}

// Exact minimum cover size by branch-and-bound over distinct, non-dominated
// scopes, seeded with the greedy cover. Throws TooLargeError above the cap.
inline BudgetBound tolerable_budget_exact(const Membership& membership,
                                          const ExactBoundOptions& opts = {}) {
  auto greedy = tolerable_budget_greedy(membership);
  const auto ps = detail::drop_dominated(detail::distinct_patterns(membership));
  if (static_cast<int>(ps.size()) > opts.max_patterns) {
    throw TooLargeError("tolerable_budget_exact: " + std::to_string(ps.size()) +
                        " distinct scopes exceed the exact-search cap of " +
                        std::to_string(opts.max_patterns) + "; use the greedy bound");
  }
  BudgetBound out;
  if (greedy.unreachable()) {
    out.r_bar = kUnreachableBudget;
    return out;
  }
  detail::MinCoverSearch search(ps, detail::coverage_needed(membership.num_classifiers),
                                greedy.r_bar_upper, greedy.witness);
  search.run();
  out.r_bar = search.best();
  out.r_bar_upper = search.best();
  out.witness = search.best_set();
  std::sort(out.witness.begin(), out.witness.end());
  return out;
}

}  // namespace poisoncert

#endif  // POISONCERT_BOUND_HPP_
