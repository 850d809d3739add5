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

// Instance generators and test-only reference implementations.

#ifndef POISONCERT_TESTS_TEST_SUPPORT_HPP_
#define POISONCERT_TESTS_TEST_SUPPORT_HPP_

#include <algorithm>
#include <bit>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "poisoncert/poisoncert.hpp"

namespace poisoncert::testing {

// Three classifiers, three test samples, two classes. Each classifier is the
// lone dissenter on exactly one sample.
inline VoteMatrix dissent_votes() { return VoteMatrix({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, 2); }
inline PairStructure dissent_pairs() { return PairStructure::single_pair(3); }

inline Membership identity_membership(int g_total) {
  Membership m;
  m.num_classifiers = g_total;
  for (int g = 0; g < g_total; ++g) m.sets.push_back({g});
  return m;
}

struct HashInstance {
  VoteMatrix votes;
  PairStructure pairs;
  Budget budget;
};

struct VanillaInstance {
  VoteMatrix votes;
  Membership membership;
  int r_mod = 0;
};

inline std::vector<std::vector<int>> random_votes(std::mt19937_64& rng, int m, int g_total,
                                                  int classes) {
  // A per-row class bias makes margins vary from ties to landslides.
  std::uniform_int_distribution<int> cls(0, classes - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<int>> rows(m, std::vector<int>(g_total));
  for (auto& row : rows) {
    const int favourite = cls(rng);
    const double bias = unit(rng);
    for (auto& v : row) v = unit(rng) < bias ? favourite : cls(rng);
  }
  return rows;
}

inline HashInstance random_hash_instance(std::mt19937_64& rng, int max_g = 10, int max_m = 6,
                                         int max_c = 3) {
  std::uniform_int_distribution<int> g_dist(1, max_g);
  std::uniform_int_distribution<int> m_dist(1, max_m);
  std::uniform_int_distribution<int> c_dist(2, max_c);
  const int g_total = g_dist(rng);
  const int m = m_dist(rng);
  const int c = c_dist(rng);
  std::uniform_int_distribution<int> ghat_dist(1, g_total + 1);
  PairStructure pairs(g_total, ghat_dist(rng));
  std::uniform_int_distribution<int> cap_dist(0, g_total);
  return {VoteMatrix(random_votes(rng, m, g_total, c), c), pairs, {cap_dist(rng), 0, 0}};
}

inline Membership random_vanilla_membership(std::mt19937_64& rng, int g_total, int n,
                                            double inclusion) {
  std::bernoulli_distribution in(inclusion);
  Membership mem;
  mem.num_classifiers = g_total;
  for (int i = 0; i < n; ++i) {
    std::vector<int> s;
    for (int g = 0; g < g_total; ++g) {
      if (in(rng)) s.push_back(g);
    }
    mem.sets.push_back(std::move(s));
  }
  return mem;
}

inline int distinct_nonempty_scopes(const Membership& m) {
  std::vector<std::vector<int>> v;
  for (const auto& s : m.sets) {
    if (!s.empty()) v.push_back(s);
  }
  std::sort(v.begin(), v.end());
  return static_cast<int>(std::unique(v.begin(), v.end()) - v.begin());
}

// Vanilla instance with at most `max_patterns` distinct scopes.
inline VanillaInstance random_vanilla_instance(std::mt19937_64& rng, int max_g = 10, int max_m = 6,
                                               int max_c = 3, int max_patterns = 12) {
  std::uniform_int_distribution<int> g_dist(1, max_g);
  std::uniform_int_distribution<int> m_dist(1, max_m);
  std::uniform_int_distribution<int> c_dist(2, max_c);
  std::uniform_int_distribution<int> n_dist(1, max_patterns);
  std::uniform_real_distribution<double> p_dist(0.1, 0.6);
  const int g_total = g_dist(rng);
  const int m = m_dist(rng);
  const int c = c_dist(rng);
  Membership mem;
  do {
    mem = random_vanilla_membership(rng, g_total, n_dist(rng), p_dist(rng));
  } while (distinct_nonempty_scopes(mem) > max_patterns);
  std::uniform_int_distribution<int> r_dist(0, 4);
  return {VoteMatrix(random_votes(rng, m, g_total, c), c), mem, r_dist(rng)};
}

// Independent FNV-1a 64 (byte loop over a std::string).
inline std::uint64_t reference_fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (char ch : bytes) {
    h ^= static_cast<std::uint8_t>(ch);
    h *= 1099511628211ULL;
  }
  return h;
}

// Fewest controlled classifiers that flip the row's prediction, by trying every
// subset and every reassignment of its votes and recounting the ensemble.
inline int brute_force_min_controlled(const std::vector<int>& votes_row, int classes) {
  const int g_total = static_cast<int>(votes_row.size());
  std::vector<int> counts(classes, 0);
  for (int v : votes_row) ++counts[v];
  const int pred = ensemble_predict(counts);
  int best = g_total + 1;
  for (std::uint32_t mask = 1; mask < (1U << g_total); ++mask) {
    const int k = std::popcount(mask);
    if (k >= best) continue;
    std::vector<int> members;
    for (int g = 0; g < g_total; ++g) {
      if (mask >> g & 1U) members.push_back(g);
    }
    std::vector<int> assign(k, 0);
    bool done = false;
    while (!done) {
      std::vector<int> v = votes_row;
      for (int t = 0; t < k; ++t) v[members[t]] = assign[t];
      std::vector<int> c(classes, 0);
      for (int x : v) ++c[x];
      if (ensemble_predict(c) != pred) {
        best = k;
        break;
      }
      int pos = 0;
      while (pos < k && ++assign[pos] == classes) assign[pos++] = 0;
      done = pos == k;
    }
  }
  return best;
}

}  // namespace poisoncert::testing

#endif  // POISONCERT_TESTS_TEST_SUPPORT_HPP_
