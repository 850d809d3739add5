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

// Testset decomposition: certify fixed-size sub-testsets independently, each
// against the full budget, and sum their attack upper bounds. The sum can only
// overestimate the attacker, so M minus it is a collective lower bound.

#ifndef POISONCERT_DECOMPOSE_HPP_
#define POISONCERT_DECOMPOSE_HPP_

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "poisoncert/bilp.hpp"
#include "poisoncert/core.hpp"
#include "poisoncert/samplewise.hpp"
#include "poisoncert/solver.hpp"

namespace poisoncert {

// Contiguous groups of `delta` consecutive indices of [0, m); the last group
// may be shorter.
inline std::vector<std::vector<int>> partition_testset(int m, int delta) {
  if (delta < 1) throw InputError("partition_testset: delta must be >= 1");
  std::vector<std::vector<int>> groups;
  for (int start = 0; start < m; start += delta) {
    std::vector<int> g;
    for (int j = start; j < std::min(m, start + delta); ++j) g.push_back(j);
    groups.push_back(std::move(g));
  }
  return groups;
}

struct DecomposeOptions {
  // Each group gets time_per_sample * group size seconds (infinite = no limit).
  double time_per_sample = 2.0;
  std::optional<std::uint64_t> node_limit_per_group;
  int threads = 1;
  bool apply_omega = true;
};

namespace detail {

struct DecomposedSide {
  int attacked_ub = 0;
  int attacked_incumbent = 0;
  int omega_size = 0;
  bool all_optimal = true;
  double seconds = 0.0;
  std::vector<GroupDiagnostic> groups;
};

template <typename Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  threads = std::clamp(threads, 1, std::max(n, 1));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

inline DecomposedSide solve_decomposed(const VoteMatrix& votes, const AttackStructure& structure,
                                       const Budget& budget, int delta,
                                       std::optional<std::vector<int>> rows,
                                       const DecomposeOptions& opts) {
  BuildOptions bo;
  bo.rows = std::move(rows);
  bo.apply_omega = opts.apply_omega;
  const auto whole = structure.build(votes, budget, bo);
  std::vector<int> omega_rows;
  for (const auto& t : whole.targets) omega_rows.push_back(t.sample);

  DecomposedSide side;
  side.omega_size = static_cast<int>(omega_rows.size());
  const auto parts = partition_testset(side.omega_size, delta);
  std::vector<SolveResult> results(parts.size());
  parallel_for(static_cast<int>(parts.size()), opts.threads, [&](int mu) {
    BuildOptions gbo;
    gbo.apply_omega = false;
    gbo.rows.emplace();
    for (int k : parts[mu]) gbo.rows->push_back(omega_rows[k]);
    const auto sub = structure.build(votes, budget, gbo);
    SolveOptions so;
    so.node_limit = opts.node_limit_per_group;
    if (std::isfinite(opts.time_per_sample)) {
      so.time_limit_seconds = opts.time_per_sample * static_cast<double>(parts[mu].size());
    }
    results[mu] = solve(sub, so);
  });

  for (std::size_t mu = 0; mu < parts.size(); ++mu) {
    const auto& r = results[mu];
    side.attacked_ub += r.upper_bound;
    side.attacked_incumbent = std::max(side.attacked_incumbent, r.incumbent_objective);
    side.all_optimal = side.all_optimal && r.status == SolveStatus::kOptimal;
    side.seconds += r.elapsed_seconds;
    side.groups.push_back({static_cast<int>(parts[mu].size()), r.incumbent_objective,
                           r.upper_bound, r.status == SolveStatus::kOptimal, r.elapsed_seconds});
  }
  return side;
}

}  // namespace detail

// Sum of per-group attack bounds. `attacked_incumbent` is the strongest
// single-group attack, which is a genuine lower bound on the joint optimum.
inline Certificate certify_decomposed(const VoteMatrix& votes, const AttackStructure& structure,
                                      const Budget& budget, int delta,
                                      std::optional<std::span<const int>> labels = {},
                                      const DecomposeOptions& opts = {}) {
  if (delta < 1) throw InputError("certify_decomposed: delta must be >= 1");
  detail::check_dimensions(votes, structure);
  structure.check_budget(budget);
  Certificate cert;
  cert.num_samples = votes.num_samples();
  cert.budget = budget;
  cert.method = CertifyMethod::kDecomposed;
  cert.status = CertificateStatus::kDecomposed;

  const auto side = detail::solve_decomposed(votes, structure, budget, delta, std::nullopt, opts);
  cert.attacked_ub = side.attacked_ub;
  cert.attacked_incumbent = side.attacked_incumbent;
  cert.omega_size = side.omega_size;
  cert.collective_robustness_lb = votes.num_samples() - side.attacked_ub;
  cert.solve_seconds = side.seconds;
  cert.groups = side.groups;

  if (labels) {
    const auto correct = detail::correct_rows(votes, *labels);
    const auto acc = detail::solve_decomposed(votes, structure, budget, delta, correct, opts);
    cert.num_correct = static_cast<int>(correct.size());
    cert.accuracy_attacked_ub = acc.attacked_ub;
    cert.certified_accuracy = static_cast<int>(correct.size()) - acc.attacked_ub;
    cert.solve_seconds += acc.seconds;
  }
  return cert;
}

// Sample-wise certificate: every prediction is attacked on its own. Hash
// structures use the closed-form per-row test; vanilla memberships solve one
// single-row problem per prediction.
inline Certificate certify_samplewise(const VoteMatrix& votes, const AttackStructure& structure,
                                      const Budget& budget,
                                      std::optional<std::span<const int>> labels = {},
                                      const DecomposeOptions& opts = {}) {
  if (!structure.is_hash()) {
    auto cert = certify_decomposed(votes, structure, budget, 1, labels, opts);
    cert.method = CertifyMethod::kSampleWise;
    cert.attacked_incumbent = std::min(cert.attacked_incumbent, 1);
    return cert;
  }
  detail::check_dimensions(votes, structure);
  structure.check_budget(budget);
  Certificate cert;
  cert.num_samples = votes.num_samples();
  cert.budget = budget;
  cert.method = CertifyMethod::kSampleWise;
  cert.status = CertificateStatus::kDecomposed;

  const auto& pairs = structure.pairs();
  const auto in_omega = omega(votes, pairs, budget);
  cert.omega_size = static_cast<int>(in_omega.size());
  const auto broken = breakable_rows(votes, in_omega, pairs, budget);
  cert.attacked_ub = static_cast<int>(broken.size());
  cert.attacked_incumbent = std::min(cert.attacked_ub, 1);
  cert.collective_robustness_lb = votes.num_samples() - cert.attacked_ub;

  if (labels) {
    const auto correct = detail::correct_rows(votes, *labels);
    const auto broken_correct = breakable_rows(votes, correct, pairs, budget);
    cert.num_correct = static_cast<int>(correct.size());
    cert.accuracy_attacked_ub = static_cast<int>(broken_correct.size());
    cert.certified_accuracy = *cert.num_correct - *cert.accuracy_attacked_ub;
  }
  return cert;
}

}  // namespace poisoncert

#endif  // POISONCERT_DECOMPOSE_HPP_
