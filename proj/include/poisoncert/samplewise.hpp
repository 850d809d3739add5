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

// Per-prediction certificates and the breakable set used to prune the BILP.
//
// Against a fixed rival y, a fully controlled classifier moves the vote
// difference V(pred) - V(y) by its "swing": 2 if it voted pred (one vote
// leaves pred, one joins y), 0 if it already voted y, 1 otherwise. The
// prediction flips to y once the accumulated swing reaches
//   deficit(y) = o(pred) - o(y) + 1 - [y < pred].

#ifndef POISONCERT_SAMPLEWISE_HPP_
#define POISONCERT_SAMPLEWISE_HPP_

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "poisoncert/core.hpp"
#include "poisoncert/hash_bagging.hpp"

namespace poisoncert {

inline constexpr int kUnbreakableMargin = std::numeric_limits<int>::max();

inline int swing_weight(int vote, ClassIndex pred, ClassIndex rival) {
  if (vote == pred) return 2;
  if (vote == rival) return 0;
  return 1;
}

inline int deficit(std::span<const int> counts, ClassIndex pred, ClassIndex rival) {
  return counts[pred] - counts[rival] + 1 - (rival < pred ? 1 : 0);
}

// o(pred) - max_{y != pred}[o(y) + [y < pred]]. kUnbreakableMargin when there
// is no rival class.
inline int vote_margin(std::span<const int> counts, ClassIndex pred) {
  int margin = kUnbreakableMargin;
  for (ClassIndex y = 0; y < static_cast<ClassIndex>(counts.size()); ++y) {
    if (y == pred) continue;
    margin = std::min(margin, deficit(counts, pred, y) - 1);
  }
  return margin;
}

// Largest margin that a budget could possibly overturn under hash bagging.
inline std::int64_t omega_threshold(const PairStructure& pairs, const Budget& budget) {
  return 2LL * pairs.num_pairs() * budget.per_pair_cap();
}

// Samples whose margin does not exceed the breakability threshold. A sound
// superset of the predictions any attack within `budget` can flip.
inline std::vector<int> omega(const VoteMatrix& votes, const PairStructure& pairs,
                              const Budget& budget) {
  const auto threshold = omega_threshold(pairs, budget);
  std::vector<int> out;
  for (int j = 0; j < votes.num_samples(); ++j) {
    const int m = vote_margin(votes.counts_row(j), votes.prediction(j));
    if (m != kUnbreakableMargin && m <= threshold) out.push_back(j);
  }
  return out;
}

// Fewest fully controlled classifiers that flip the prediction, with no
// structural limit on which classifiers can be controlled. Returns G + 1 if
// even controlling all G classifiers cannot flip it.
inline int min_controlled_to_break(std::span<const int> counts, ClassIndex pred,
                                   std::span<const int> votes_row) {
  const int g_total = static_cast<int>(votes_row.size());
  int best = g_total + 1;
  for (ClassIndex y = 0; y < static_cast<ClassIndex>(counts.size()); ++y) {
    if (y == pred) continue;
    const int d = deficit(counts, pred, y);
    if (d <= 0) return 0;
    int twos = 0;
    int ones = 0;
    for (int v : votes_row) {
      const int w = swing_weight(v, pred, y);
      twos += (w == 2);
      ones += (w == 1);
    }
    int t = std::min(twos, (d + 1) / 2);
    int remaining = d - 2 * t;
    if (remaining > 0) {
      if (ones < remaining) continue;
      t += remaining;
    }
    best = std::min(best, t);
  }
  return best;
}

// Best achievable swing towards `rival` when at most `cap` classifiers may be
// controlled inside each trainset-hash pair.
inline int max_swing_under_caps(std::span<const int> votes_row, ClassIndex pred, ClassIndex rival,
                                const PairStructure& pairs, int cap) {
  int total = 0;
  for (int h = 0; h < pairs.num_pairs(); ++h) {
    int twos = 0;
    int ones = 0;
    for (int g = pairs.pair_begin(h); g < pairs.pair_end(h); ++g) {
      const int w = swing_weight(votes_row[g], pred, rival);
      twos += (w == 2);
      ones += (w == 1);
    }
    const int take2 = std::min(cap, twos);
    const int take1 = std::min(cap - take2, ones);
    total += 2 * take2 + take1;
  }
  return total;
}

// Exact single-prediction test under per-pair caps.
inline bool breakable_under_caps(const VoteMatrix& votes, int j, const PairStructure& pairs,
                                 int cap) {
  const auto counts = votes.counts_row(j);
  const auto row = votes.votes_row(j);
  const ClassIndex pred = votes.prediction(j);
  for (ClassIndex y = 0; y < votes.num_classes(); ++y) {
    if (y == pred) continue;
    if (max_swing_under_caps(row, pred, y, pairs, cap) >= deficit(counts, pred, y)) return true;
  }
  return false;
}

struct SampleCertificate {
  int margin = 0;
  int min_controlled_to_break = 0;
  bool breakable_at_cap = false;
};

inline SampleCertificate sample_certificate(const VoteMatrix& votes, int j,
                                            const PairStructure& pairs, const Budget& budget) {
  SampleCertificate c;
  c.margin = vote_margin(votes.counts_row(j), votes.prediction(j));
  c.min_controlled_to_break =
      min_controlled_to_break(votes.counts_row(j), votes.prediction(j), votes.votes_row(j));
  c.breakable_at_cap = breakable_under_caps(votes, j, pairs, budget.per_pair_cap());
  return c;
}

// Rows among `rows` that some attack within `budget` flips on its own.
inline std::vector<int> breakable_rows(const VoteMatrix& votes, std::span<const int> rows,
                                       const PairStructure& pairs, const Budget& budget) {
  std::vector<int> out;
  const int cap = budget.per_pair_cap();
  if (cap == 0) return out;
  for (int j : rows) {
    if (breakable_under_caps(votes, j, pairs, cap)) out.push_back(j);
  }
  return out;
}

// Naive sample-wise collective robustness: M minus the number of individually
// breakable predictions.
inline int samplewise_collective_count(const VoteMatrix& votes, const PairStructure& pairs,
                                       const Budget& budget) {
  std::vector<int> all(votes.num_samples());
  for (int j = 0; j < votes.num_samples(); ++j) all[j] = j;
  return votes.num_samples() - static_cast<int>(breakable_rows(votes, all, pairs, budget).size());
}

}  // namespace poisoncert

#endif  // POISONCERT_SAMPLEWISE_HPP_
