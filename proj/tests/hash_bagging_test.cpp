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


#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "poisoncert/hash_bagging.hpp"
#include "test_support.hpp"

namespace poisoncert {
namespace {

std::vector<SampleRecord> numbered_records(int n, const std::string& prefix = "row") {
  std::vector<std::string> lines;
  for (int i = 0; i < n; ++i) lines.push_back(prefix + std::to_string(i) + ",1.5,0");
  return records_from_lines(lines);
}

TEST(CanonicalHash, EmptyInputIsOffsetBasis) {
  EXPECT_EQ(fnv1a64({}), 0xcbf29ce484222325ULL);
  EXPECT_EQ(testing::reference_fnv1a(""), 0xcbf29ce484222325ULL);
}

TEST(CanonicalHash, MatchesReferenceImplementation) {
  EXPECT_EQ(canonical_hash("a", 0), testing::reference_fnv1a(std::string(8, '\0') + "a"));
  std::string prefix(8, '\0');
  prefix[0] = 3;
  prefix[1] = 1;
  EXPECT_EQ(canonical_hash("x,y", 259), testing::reference_fnv1a(prefix + "x,y"));
}

TEST(CanonicalHash, Deterministic) {
  EXPECT_EQ(canonical_hash("sample", 4), canonical_hash("sample", 4));
  EXPECT_NE(canonical_hash("sample", 4), canonical_hash("sample", 5));
}

TEST(PairStructure, IndexArithmetic) {
  const PairStructure p(5, 2);
  EXPECT_EQ(p.num_pairs(), 3);
  EXPECT_EQ(p.pair_begin(2), 4);
  EXPECT_EQ(p.pair_end(2), 5);
  EXPECT_EQ(p.pair_of(3), 1);
  EXPECT_EQ(p.slot_of(3), 1);
}

TEST(Subsample, SixRecordsThreeClassifiers) {
  const auto m = subsample(numbered_records(6), 3, 3);
  ASSERT_TRUE(m.pair_structure.has_value());
  EXPECT_EQ(m.pair_structure->g_hat(), 2);
  EXPECT_EQ(m.pair_structure->num_pairs(), 2);
  EXPECT_EQ(m.pair_structure->pair_of(2), 1);
  EXPECT_EQ(m.pair_structure->slot_of(2), 0);
}

TEST(Subsample, PartitionCase) {
  const auto recs = numbered_records(8);
  const auto m = subsample(recs, 4, 2);
  EXPECT_EQ(m.pair_structure->g_hat(), 4);
  EXPECT_EQ(m.pair_structure->num_pairs(), 1);
  std::vector<int> seen;
  for (const auto& s : m.sets) {
    ASSERT_EQ(s.size(), 1U);
    seen.push_back(s[0]);
  }
  std::size_t total = 0;
  for (const auto& t : subtrainsets(m)) total += t.size();
  EXPECT_EQ(total, recs.size());
}

TEST(Subsample, TruncatedLastPair) {
  const auto m = subsample(numbered_records(4), 5, 2);
  EXPECT_EQ(m.pair_structure->g_hat(), 2);
  EXPECT_EQ(m.pair_structure->num_pairs(), 3);
  for (const auto& s : m.sets) {
    EXPECT_LE(s.size(), 3U);
    EXPECT_GE(s.size(), 2U);
  }
  EXPECT_NO_THROW(m.validate());
}

TEST(Subsample, RejectsBadSizes) {
  const auto recs = numbered_records(3);
  EXPECT_THROW(subsample(recs, 2, 4), InputError);
  EXPECT_THROW(subsample(recs, 2, 0), InputError);
  EXPECT_THROW(subsample(recs, 0, 1), InputError);
  try {
    subsample({}, 3, 3);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("K > N"), std::string::npos);
  }
}

TEST(Subsample, DuplicatePayloadsCoLocate) {
  const auto m = subsample(records_from_lines({"same", "other", "same", "x"}), 4, 1);
  EXPECT_EQ(m.sets[0], m.sets[2]);
}

TEST(Subsample, DeterministicJson) {
  const auto recs = numbered_records(40);
  EXPECT_EQ(to_json(subsample(recs, 7, 9)).dump(), to_json(subsample(recs, 7, 9)).dump());
}

TEST(Subsample, EachSampleOncePerPairAndSetsSorted) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 30; ++t) {
    const int n = std::uniform_int_distribution<int>(1, 60)(rng);
    const int k = std::uniform_int_distribution<int>(1, n)(rng);
    const int g = std::uniform_int_distribution<int>(1, 12)(rng);
    const auto m = subsample(numbered_records(n, "s" + std::to_string(t)), g, k);
    EXPECT_NO_THROW(m.validate());
    for (const auto& s : m.sets) EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
  }
}

TEST(Subsample, FullPairsPartitionTheTrainset) {
  const int n = 57;
  const auto m = subsample(numbered_records(n), 11, 6);
  const auto& p = *m.pair_structure;
  const auto sets = subtrainsets(m);
  for (int h = 0; h < p.num_pairs(); ++h) {
    std::size_t total = 0;
    for (int g = p.pair_begin(h); g < p.pair_end(h); ++g) total += sets[g].size();
    if (p.pair_end(h) - p.pair_begin(h) == p.g_hat()) {
      EXPECT_EQ(total, static_cast<std::size_t>(n));
    } else {
      EXPECT_LE(total, static_cast<std::size_t>(n));
    }
  }
}

TEST(InfluencedClassifiers, Union) {
  Membership m;
  m.num_classifiers = 3;
  m.sets = {{0, 1}, {1, 2}};
  EXPECT_TRUE(influenced_classifiers(m, std::vector<std::size_t>{}).empty());
  EXPECT_EQ(influenced_classifiers(m, std::vector<std::size_t>{0, 1}), (std::set<int>{0, 1, 2}));
  EXPECT_THROW(influenced_classifiers(m, std::vector<std::size_t>{2}), InputError);
}

TEST(InfluencedClassifiers, PartitionCaseBoundedByModifications) {
  const auto m = subsample(numbered_records(12), 6, 2);
  for (std::size_t r = 0; r <= 5; ++r) {
    std::vector<std::size_t> idx(r);
    for (std::size_t i = 0; i < r; ++i) idx[i] = 2 * i;
    EXPECT_LE(influenced_classifiers(m, idx).size(), r);
  }
}

TEST(MembershipJson, RoundTrip) {
  const auto m = subsample(numbered_records(10), 5, 3);
  EXPECT_EQ(membership_from_json(nlohmann::json::parse(to_json(m).dump())), m);
  const auto v = testing::identity_membership(4);
  const auto back = membership_from_json(to_json(v));
  EXPECT_EQ(back, v);
  EXPECT_FALSE(back.pair_structure.has_value());
}

TEST(MembershipJson, RejectsMalformed) {
  EXPECT_THROW(membership_from_json(nlohmann::json::parse(R"({"sets": []})")), InputError);
  EXPECT_THROW(membership_from_json(nlohmann::json::parse(R"({"G": 2, "sets": [[0, 2]]})")),
               InputError);
  EXPECT_THROW(membership_from_json(nlohmann::json::parse(R"({"G": 2, "sets": [[1, 0]]})")),
               InputError);
  EXPECT_THROW(
      membership_from_json(nlohmann::json::parse(R"({"G": 4, "g_hat": 2, "sets": [[0, 1]]})")),
      InputError);
}

}  // namespace
}  // namespace poisoncert
