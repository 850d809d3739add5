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


#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "poisoncert/core.hpp"
#include "test_support.hpp"

namespace poisoncert {
namespace {

TEST(EnsemblePredict, Majority) {
  EXPECT_EQ(ensemble_predict(std::vector<int>{2, 1}), 0);
  EXPECT_EQ(ensemble_predict(std::vector<int>{1, 3}), 1);
}

TEST(EnsemblePredict, TiesGoToSmallestIndex) {
  EXPECT_EQ(ensemble_predict(std::vector<int>{2, 2, 1}), 0);
  EXPECT_EQ(ensemble_predict(std::vector<int>{0, 3, 3}), 1);
  EXPECT_EQ(ensemble_predict(std::vector<int>{0, 0, 0}), 0);
}

TEST(EnsemblePredict, EmptyClassSetThrows) {
  EXPECT_THROW(ensemble_predict(std::vector<int>{}), InputError);
}

TEST(PredictionChanged, StrictAndTieCases) {
  EXPECT_TRUE(prediction_changed(std::vector<int>{1, 2}, 0));
  EXPECT_TRUE(prediction_changed(std::vector<int>{2, 2}, 1));
  EXPECT_FALSE(prediction_changed(std::vector<int>{2, 2}, 0));
  EXPECT_FALSE(prediction_changed(std::vector<int>{1, 3, 3}, 1));
  EXPECT_TRUE(prediction_changed(std::vector<int>{1, 3, 4}, 1));
}

TEST(PredictionChanged, AgreesWithRecomputedArgmax) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> d(0, 4);
  for (int t = 0; t < 2000; ++t) {
    std::vector<int> counts(3);
    for (auto& c : counts) c = d(rng);
    for (int pred = 0; pred < 3; ++pred) {
      EXPECT_EQ(prediction_changed(counts, pred), ensemble_predict(counts) != pred);
    }
  }
}

TEST(RelativeGap, Values) {
  EXPECT_DOUBLE_EQ(relative_gap(3, 2), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(relative_gap(5, 5), 0.0);
  EXPECT_TRUE(std::isnan(relative_gap(0, 0)));
}

TEST(RelativeGap, InconsistentCertificatesThrow) {
  EXPECT_THROW(relative_gap(2, 3), InputError);
}

TEST(VoteMatrix, TallyAndPredictions) {
  const auto v = testing::dissent_votes();
  EXPECT_EQ(v.num_classifiers(), 3);
  EXPECT_EQ(v.num_samples(), 3);
  EXPECT_EQ(v.num_classes(), 2);
  for (int j = 0; j < 3; ++j) {
    EXPECT_EQ(v.counts_row(j)[0], 2);
    EXPECT_EQ(v.counts_row(j)[1], 1);
    EXPECT_EQ(v.prediction(j), 0);
  }
  EXPECT_EQ(v.vote(1, 1), 1);
}

TEST(VoteMatrix, TallyConsistencyOnRandomMatrices) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 50; ++t) {
    const auto rows = testing::random_votes(rng, 7, 9, 4);
    const VoteMatrix v(rows, 4);
    for (int j = 0; j < v.num_samples(); ++j) {
      std::vector<int> counts(4, 0);
      for (int g = 0; g < v.num_classifiers(); ++g) ++counts[rows[j][g]];
      EXPECT_EQ(std::vector<int>(v.counts_row(j).begin(), v.counts_row(j).end()), counts);
      EXPECT_EQ(v.prediction(j), ensemble_predict(counts));
    }
  }
}

TEST(VoteMatrix, DegenerateShapesAreLegal) {
  const VoteMatrix empty({}, 2);
  EXPECT_EQ(empty.num_samples(), 0);
  EXPECT_EQ(empty.num_classifiers(), 0);
  const VoteMatrix no_voters({{}, {}}, 2);
  EXPECT_EQ(no_voters.num_samples(), 2);
  EXPECT_EQ(no_voters.prediction(0), 0);
}

TEST(VoteMatrix, RejectsBadInput) {
  EXPECT_THROW(VoteMatrix({{0, 1}}, 0), InputError);
  EXPECT_THROW(VoteMatrix({{0, 1}, {0}}, 2), InputError);
  EXPECT_THROW(VoteMatrix({{0, 2}}, 2), InputError);
  EXPECT_THROW(VoteMatrix({{-1, 0}}, 2), InputError);
}

TEST(VoteMatrix, SelectRows) {
  const auto v = testing::dissent_votes();
  const std::vector<int> rows{2, 0};
  const auto s = v.select_rows(rows);
  EXPECT_EQ(s.num_samples(), 2);
  EXPECT_EQ(s.vote(0, 2), 1);
  EXPECT_EQ(s.vote(1, 0), 1);
}

TEST(Budget, PerPairCap) {
  EXPECT_EQ((Budget{1, 1, 1}).per_pair_cap(), 4);
  EXPECT_TRUE((Budget{}).is_zero());
  EXPECT_THROW((Budget{0, -1, 0}).validate(), InputError);
}

TEST(Certificate, GapAndNames) {
  Certificate c;
  c.attacked_ub = 5;
  c.attacked_incumbent = 3;
  EXPECT_EQ(c.gap(), 2);
  EXPECT_EQ(to_string(CertificateStatus::kTimeLimitBound), "TimeLimitBound");
  EXPECT_EQ(to_string(CertificateStatus::kExact), "Exact");
  EXPECT_EQ(to_string(CertificateStatus::kDecomposed), "Decomposed");
}

}  // namespace
}  // namespace poisoncert
