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

// Shared domain types and majority-vote semantics of a bagged ensemble.

#ifndef POISONCERT_CORE_HPP_
#define POISONCERT_CORE_HPP_

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace poisoncert {

// Malformed or inconsistent input (dimensions, ranges, parse failures).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An instance exceeds the size cap of an exhaustive routine.
class TooLargeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

using ClassIndex = int;

// Returns the majority class; ties go to the smallest class index.
// An all-zero row (G == 0) yields class 0.
inline ClassIndex ensemble_predict(std::span<const int> counts_row) {
  if (counts_row.empty()) throw InputError("ensemble_predict: empty class set");
  ClassIndex best = 0;
  for (ClassIndex y = 1; y < static_cast<ClassIndex>(counts_row.size()); ++y) {
    if (counts_row[y] > counts_row[best]) best = y;
  }
  return best;
}

// True iff some rival y beats `original_pred` under the half-vote tie rule:
// V(pred) < V(y), or V(pred) == V(y) with y < pred.
inline bool prediction_changed(std::span<const int> counts_after,
                               ClassIndex original_pred) {
  const int own = counts_after[original_pred];
  for (ClassIndex y = 0; y < static_cast<ClassIndex>(counts_after.size()); ++y) {
    if (y == original_pred) continue;
    if (own < counts_after[y]) return true;
    if (own == counts_after[y] && y < original_pred) return true;
  }
  return false;
}

// Relative gap between the sample-wise and the collective number of attacked
// predictions. NaN when `m_sam` is zero.
inline double relative_gap(std::int64_t m_sam, std::int64_t m_col) {
  if (m_col > m_sam) {
    throw InputError("relative_gap: collective count " + std::to_string(m_col) +
                     " exceeds sample-wise count " + std::to_string(m_sam));
  }
  if (m_sam == 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(m_sam - m_col) / static_cast<double>(m_sam);
}

// Hard-label votes of G sub-classifiers on M test samples, plus tallies and
// ensemble predictions. Immutable after construction.
class VoteMatrix {
 public:
  VoteMatrix() = default;

  // `votes[j][g]` is the class predicted by classifier g on sample j.
  VoteMatrix(const std::vector<std::vector<int>>& votes, int num_classes)
      : num_samples_(static_cast<int>(votes.size())), num_classes_(num_classes) {
    if (num_classes < 1) throw InputError("VoteMatrix: need at least one class");
    num_classifiers_ = votes.empty() ? 0 : static_cast<int>(votes.front().size());
    votes_.reserve(static_cast<std::size_t>(num_samples_) * num_classifiers_);
    for (std::size_t j = 0; j < votes.size(); ++j) {
      if (static_cast<int>(votes[j].size()) != num_classifiers_) {
        throw InputError("VoteMatrix: row " + std::to_string(j) + " has " +
                         std::to_string(votes[j].size()) + " votes, expected " +
                         std::to_string(num_classifiers_));
      }
      for (int v : votes[j]) {
        if (v < 0 || v >= num_classes_) {
          throw InputError("VoteMatrix: vote " + std::to_string(v) + " in row " +
                           std::to_string(j) + " outside [0, " +
                           std::to_string(num_classes_) + ")");
        }
        votes_.push_back(v);
      }
    }
    counts_.assign(static_cast<std::size_t>(num_samples_) * num_classes_, 0);
    for (int j = 0; j < num_samples_; ++j) {
      for (int v : votes_row(j)) ++counts_[static_cast<std::size_t>(j) * num_classes_ + v];
    }
    predictions_.reserve(num_samples_);
    for (int j = 0; j < num_samples_; ++j) predictions_.push_back(ensemble_predict(counts_row(j)));
  }

  int num_classifiers() const { return num_classifiers_; }
  int num_samples() const { return num_samples_; }
  int num_classes() const { return num_classes_; }

  std::span<const int> votes_row(int j) const {
    return {votes_.data() + static_cast<std::size_t>(j) * num_classifiers_,
            static_cast<std::size_t>(num_classifiers_)};
  }
  std::span<const int> counts_row(int j) const {
    return {counts_.data() + static_cast<std::size_t>(j) * num_classes_,
            static_cast<std::size_t>(num_classes_)};
  }
  int vote(int j, int g) const { return votes_[static_cast<std::size_t>(j) * num_classifiers_ + g]; }
  ClassIndex prediction(int j) const { return predictions_[j]; }
  const std::vector<ClassIndex>& predictions() const { return predictions_; }

  // Rows restricted to `rows`, in the given order.
  VoteMatrix select_rows(std::span<const int> rows) const {
    std::vector<std::vector<int>> sub;
    sub.reserve(rows.size());
    for (int j : rows) {
      const auto r = votes_row(j);
      sub.emplace_back(r.begin(), r.end());
    }
    VoteMatrix out(sub, num_classes_);
    if (sub.empty()) out.num_classifiers_ = num_classifiers_;
    return out;
  }

 private:
  int num_classifiers_ = 0;
  int num_samples_ = 0;
  int num_classes_ = 1;
  std::vector<int> votes_;
  std::vector<int> counts_;
  std::vector<ClassIndex> predictions_;
};

// Poison budget: insertions, deletions and modifications of training samples.
struct Budget {
  int r_ins = 0;
  int r_del = 0;
  int r_mod = 0;

  // Sub-trainsets a budget can influence inside one trainset-hash pair.
  int per_pair_cap() const { return r_ins + r_del + 2 * r_mod; }
  bool is_zero() const { return r_ins == 0 && r_del == 0 && r_mod == 0; }

  void validate() const {
    if (r_ins < 0 || r_del < 0 || r_mod < 0) throw InputError("Budget: negative component");
  }

  friend bool operator==(const Budget&, const Budget&) = default;
};

enum class CertificateStatus { kExact, kTimeLimitBound, kDecomposed };

inline std::string_view to_string(CertificateStatus s) {
  switch (s) {
    case CertificateStatus::kExact: return "Exact";
    case CertificateStatus::kTimeLimitBound: return "TimeLimitBound";
    case CertificateStatus::kDecomposed: return "Decomposed";
  }
  return "?";
}

enum class CertifyMethod { kSampleWise, kCollective, kDecomposed };

inline std::string_view to_string(CertifyMethod m) {
  switch (m) {
    case CertifyMethod::kSampleWise: return "SampleWise";
    case CertifyMethod::kCollective: return "Collective";
    case CertifyMethod::kDecomposed: return "Decomposed";
  }
  return "?";
}

// Per sub-testset diagnostics of a decomposed run.
struct GroupDiagnostic {
  int size = 0;
  int attacked_incumbent = 0;
  int attacked_ub = 0;
  bool optimal = true;
  double seconds = 0.0;
};

// Certified collective robustness (and optionally certified accuracy).
//
// `attacked_ub` is the sound side of the anytime pair; the reported
// robustness is derived from it. `attacked_incumbent` is the strongest
// simultaneous attack actually found and only serves gap diagnostics.
struct Certificate {
  int num_samples = 0;
  int collective_robustness_lb = 0;
  int attacked_ub = 0;
  int attacked_incumbent = 0;
  std::optional<int> certified_accuracy;
  std::optional<int> num_correct;
  std::optional<int> accuracy_attacked_ub;
  CertificateStatus status = CertificateStatus::kExact;
  CertifyMethod method = CertifyMethod::kCollective;
  double solve_seconds = 0.0;
  Budget budget;
  int omega_size = 0;
  std::vector<GroupDiagnostic> groups;

  int gap() const { return attacked_ub - attacked_incumbent; }
};

}  // namespace poisoncert

#endif  // POISONCERT_CORE_HPP_
