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


#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "poisoncert/bilp.hpp"
#include "poisoncert/oracle.hpp"
#include "test_support.hpp"

namespace poisoncert {
namespace {

using testing::dissent_pairs;
using testing::dissent_votes;

TEST(BuildP1, DeduplicatesScopes) {
  const VoteMatrix v({{0, 0, 1}}, 2);
  Membership m;
  m.num_classifiers = 3;
  m.sets = {{0}, {0, 1}, {2}, {2}};
  const auto p = build_p1(v, m, 2);
  EXPECT_EQ(p.decision_dim(), 3);
  EXPECT_EQ(p.groups.size(), 1U);
  EXPECT_EQ(p.groups[0].cap, 2);
  int total = 0;
  for (int k : p.multiplicity) total += k;
  EXPECT_EQ(total, 4);
}

TEST(BuildP1, DropsEmptyScopes) {
  const VoteMatrix v({{0, 0, 1}}, 2);
  Membership m;
  m.num_classifiers = 3;
  m.sets = {{}, {1}, {}};
  EXPECT_EQ(build_p1(v, m, 1).decision_dim(), 1);
}

TEST(BuildP1, ZeroBudgetHasNoAttack) {
  const auto v = dissent_votes();
  const auto p = build_p1(v, testing::identity_membership(3), 0);
  EXPECT_EQ(evaluate_attack(p, std::vector<int>{}), 0);
  EXPECT_FALSE(attack_feasible(p, std::vector<int>{0}));
}

TEST(BuildP1, UniversalScopeBreaksEverythingBreakable) {
  const VoteMatrix v({{0, 0, 1}, {1, 1, 1}, {0, 1, 0}}, 2);
  Membership m;
  m.num_classifiers = 3;
  m.sets = {{0, 1, 2}, {0, 1, 2}};
  const auto p = build_p1(v, m, 1);
  ASSERT_EQ(p.decision_dim(), 1);
  EXPECT_EQ(evaluate_attack(p, std::vector<int>{0}), 3);
}

TEST(BuildP1, DimensionMismatchThrows) {
  EXPECT_THROW(build_p1(dissent_votes(), testing::identity_membership(4), 1), InputError);
  EXPECT_THROW(build_p1(dissent_votes(), testing::identity_membership(3), -1), InputError);
}

TEST(BuildP2, PairGroups) {
  const VoteMatrix v({{0, 0, 0, 1, 1}}, 2);
  const auto p = build_p2(v, PairStructure(5, 2), {1, 0, 0});
  ASSERT_EQ(p.groups.size(), 3U);
  EXPECT_EQ(p.groups[0].begin, 0);
  EXPECT_EQ(p.groups[0].end, 2);
  EXPECT_EQ(p.groups[2].begin, 4);
  EXPECT_EQ(p.groups[2].end, 5);
  EXPECT_EQ(p.group_of[3], 1);
}

TEST(BuildP2, ZeroBudget) {
  const auto p = build_p2(dissent_votes(), dissent_pairs(), {});
  EXPECT_EQ(p.num_targets(), 0);
  const auto q = build_p2(dissent_votes(), dissent_pairs(), {}, {std::nullopt, false});
  EXPECT_EQ(q.num_targets(), 3);
  EXPECT_FALSE(attack_feasible(q, std::vector<int>{0}));
}

TEST(BuildP2, DimensionMismatchThrows) {
  EXPECT_THROW(build_p2(dissent_votes(), PairStructure(4, 2), {1, 0, 0}), InputError);
  BuildOptions bad;
  bad.rows = std::vector<int>{3};
  EXPECT_THROW(build_p2(dissent_votes(), dissent_pairs(), {1, 0, 0}, bad), InputError);
}

TEST(EvaluateAttack, Dissent) {
  const auto p = build_p2(dissent_votes(), dissent_pairs(), {1, 0, 0});
  EXPECT_EQ(p.num_targets(), 3);
  for (int g = 0; g < 3; ++g) EXPECT_EQ(evaluate_attack(p, std::vector<int>{g}), 2);
  EXPECT_FALSE(attack_feasible(p, std::vector<int>{0, 1}));
}

TEST(AttackStructure, VanillaRejectsInsertions) {
  const auto s = AttackStructure::vanilla(testing::identity_membership(3));
  EXPECT_THROW(s.check_budget({1, 0, 0}), InputError);
  EXPECT_NO_THROW(s.check_budget({0, 0, 2}));
  EXPECT_FALSE(s.is_hash());
  Membership hashed = testing::identity_membership(3);
  hashed.pair_structure = PairStructure::single_pair(3);
  EXPECT_TRUE(AttackStructure::from_membership(hashed).is_hash());
}

TEST(StandardForm, HashCapRow) {
  const VoteMatrix v({{0, 0, 1}}, 2);
  const auto p = build_p2(v, PairStructure::single_pair(3), {1, 1, 1});
  const auto s = to_standard_form(p);
  ASSERT_FALSE(s.rows.empty());
  EXPECT_EQ(s.rows[0].terms.size(), 3U);
  EXPECT_EQ(s.rows[0].rhs, 4);
  for (auto [var, coef] : s.rows[0].terms) {
    EXPECT_LT(var, 3);
    EXPECT_EQ(coef, 1);
  }
}

TEST(StandardForm, DissentVariableCount) {
  const auto p = build_p1(dissent_votes(), testing::identity_membership(3), 1);
  const auto s = to_standard_form(p, testing::identity_membership(3));
  EXPECT_EQ(s.num_variables(), 15);
  EXPECT_EQ(s.num_a, 3);
  EXPECT_EQ(s.num_y, 3);
  EXPECT_EQ(s.num_w, 3);
  EXPECT_EQ(oracle::solve_standard_form(s), 2);
}

TEST(StandardForm, ZeroBudgetOptimumIsZero) {
  const auto mem = testing::identity_membership(3);
  const auto p = build_p1(dissent_votes(), mem, 0, {std::nullopt, false});
  EXPECT_EQ(oracle::solve_standard_form(to_standard_form(p, mem)), 0);
  const auto q = build_p2(dissent_votes(), dissent_pairs(), {}, {std::nullopt, false});
  EXPECT_EQ(oracle::solve_standard_form(to_standard_form(q)), 0);
}

TEST(StandardForm, WrongOverloadThrows) {
  const auto mem = testing::identity_membership(3);
  EXPECT_THROW(to_standard_form(build_p1(dissent_votes(), mem, 1)), InputError);
  EXPECT_THROW(to_standard_form(build_p2(dissent_votes(), dissent_pairs(), {1, 0, 0}), mem), InputError);
}

TEST(StandardForm, EvaluateStandardRespectsBounds) {
  const auto p = build_p2(dissent_votes(), dissent_pairs(), {1, 0, 0});
  const auto s = to_standard_form(p);
  std::vector<int> x(s.num_variables(), 0);
  EXPECT_FALSE(evaluate_standard(s, x).has_value());  // Z_{j,pred} must be 1
  for (int j = 0; j < s.num_y; ++j) x[s.z(j, 0)] = 1;
  EXPECT_EQ(evaluate_standard(s, x), 0);
  // Control classifier 1: rows 0 and 2 flip.
  x[s.a(1)] = 1;
  for (int j : {0, 2}) {
    x[s.z(j, 1)] = 1;
    x[s.y(j)] = 1;
  }
  EXPECT_EQ(evaluate_standard(s, x), 2);
  x[s.y(1)] = 1;
  EXPECT_FALSE(evaluate_standard(s, x).has_value());
}

TEST(StandardForm, JsonLayout) {
  const auto p = build_p2(dissent_votes(), dissent_pairs(), {1, 0, 0});
  const auto s = to_standard_form(p);
  const auto j = to_json(s);
  EXPECT_EQ(j["num_variables"], s.num_variables());
  EXPECT_EQ(j["constraints"]["num_rows"], s.rows.size());
  EXPECT_EQ(j["constraints"]["sense"], "<=");
  EXPECT_EQ(j["big_m"], 7);
  EXPECT_EQ(j["objective"].size(), 3U);
}

TEST(StandardForm, MatchesNativeWhenTieRuleIdle) {
  std::mt19937_64 rng(41);
  int compared = 0;
  while (compared < 40) {
    auto inst = testing::random_hash_instance(rng, 6, 3, 3);
    const auto st = AttackStructure::hash(inst.pairs);
    if (oracle::tie_rule_binds(inst.votes, st, inst.budget)) continue;
    const auto p = build_p2(inst.votes, inst.pairs, inst.budget);
    const auto native = oracle::brute_force_p2(inst.votes, inst.pairs, inst.budget).max_attacked;
    EXPECT_EQ(oracle::solve_standard_form(to_standard_form(p)), native);
    ++compared;
  }
}

}  // namespace
}  // namespace poisoncert
