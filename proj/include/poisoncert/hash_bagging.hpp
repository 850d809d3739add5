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

// Deterministic hash-based subsampling and sub-trainset membership.
//
// A trainset of N records is split by each keyed hash h into
// g_hat = floor(N / K) disjoint sub-trainsets: record s goes to slot
// hash_h(s) mod g_hat. Classifier g uses pair floor(g / g_hat) and slot
// g mod g_hat, so G classifiers need ceil(G / g_hat) pairs; the last pair is
// truncated at G. Within one pair a record lives in at most one sub-trainset,
// which is what bounds the influence of a poisoned record.

#ifndef POISONCERT_HASH_BAGGING_HPP_
#define POISONCERT_HASH_BAGGING_HPP_

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "poisoncert/core.hpp"

namespace poisoncert {

struct SampleRecord {
  std::size_t index = 0;
  std::string payload;  // raw bytes as ingested, hashed verbatim
};

inline constexpr std::uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

inline std::uint64_t fnv1a64(std::span<const unsigned char> bytes,
                             std::uint64_t state = kFnvOffsetBasis) {
  for (unsigned char b : bytes) {
    state ^= b;
    state *= kFnvPrime;
  }
  return state;
}

// FNV-1a 64 over (pair_index as 8 little-endian bytes) ++ payload.
inline std::uint64_t canonical_hash(std::string_view payload, std::uint64_t pair_index) {
  unsigned char prefix[8];
  for (int k = 0; k < 8; ++k) prefix[k] = static_cast<unsigned char>(pair_index >> (8 * k));
  const auto state = fnv1a64(prefix);
  return fnv1a64({reinterpret_cast<const unsigned char*>(payload.data()), payload.size()}, state);
}

// Classifier <-> (trainset-hash pair, slot) bookkeeping.
class PairStructure {
 public:
  PairStructure() = default;
  PairStructure(int num_classifiers, int g_hat)
      : num_classifiers_(num_classifiers), g_hat_(g_hat) {
    if (g_hat < 1) throw InputError("PairStructure: g_hat must be >= 1 (requires K <= N)");
    if (num_classifiers < 0) throw InputError("PairStructure: negative G");
    num_pairs_ = (num_classifiers + g_hat - 1) / g_hat;
  }

  // A structure with every classifier in one pair.
  static PairStructure single_pair(int num_classifiers) {
    return PairStructure(num_classifiers, std::max(num_classifiers, 1));
  }

  int num_classifiers() const { return num_classifiers_; }
  int g_hat() const { return g_hat_; }
  int num_pairs() const { return num_pairs_; }
  int pair_of(int g) const { return g / g_hat_; }
  int slot_of(int g) const { return g % g_hat_; }
  int pair_begin(int h) const { return h * g_hat_; }
  int pair_end(int h) const { return std::min((h + 1) * g_hat_, num_classifiers_); }

  friend bool operator==(const PairStructure&, const PairStructure&) = default;

 private:
  int num_classifiers_ = 0;
  int g_hat_ = 1;
  int num_pairs_ = 0;
};

// S_i for every training sample: the sorted sub-trainsets containing it.
struct Membership {
  int num_classifiers = 0;
  std::vector<std::vector<int>> sets;
  std::optional<PairStructure> pair_structure;

  std::size_t num_samples() const { return sets.size(); }

  void validate() const {
    for (std::size_t i = 0; i < sets.size(); ++i) {
      const auto& s = sets[i];
      for (std::size_t k = 0; k < s.size(); ++k) {
        if (s[k] < 0 || s[k] >= num_classifiers) {
          throw InputError("Membership: sample " + std::to_string(i) + " lists classifier " +
                           std::to_string(s[k]) + " outside [0, " +
                           std::to_string(num_classifiers) + ")");
        }
        if (k > 0 && s[k - 1] >= s[k]) {
          throw InputError("Membership: set of sample " + std::to_string(i) +
                           " is not strictly increasing");
        }
      }
      if (pair_structure) {
        for (std::size_t k = 1; k < s.size(); ++k) {
          if (pair_structure->pair_of(s[k - 1]) == pair_structure->pair_of(s[k])) {
            throw InputError("Membership: sample " + std::to_string(i) +
                             " appears twice in one trainset-hash pair");
          }
        }
      }
    }
    if (pair_structure && pair_structure->num_classifiers() != num_classifiers) {
      throw InputError("Membership: pair structure disagrees with G");
    }
  }

  friend bool operator==(const Membership&, const Membership&) = default;
};

inline Membership subsample(std::span<const SampleRecord> records, int num_classifiers, int k) {
  const auto n = static_cast<long long>(records.size());
  if (k <= 0) throw InputError("subsample: K must be >= 1");
  if (k > n) throw InputError("subsample: K > N (K=" + std::to_string(k) + ", N=" +
                              std::to_string(n) + ")");
  if (num_classifiers < 1) throw InputError("subsample: G must be >= 1");

  PairStructure pairs(num_classifiers, static_cast<int>(n / k));
  Membership out;
  out.num_classifiers = num_classifiers;
  out.pair_structure = pairs;
  out.sets.resize(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto& s = out.sets[i];
    for (int h = 0; h < pairs.num_pairs(); ++h) {
      const auto slot = canonical_hash(records[i].payload, static_cast<std::uint64_t>(h)) %
                        static_cast<std::uint64_t>(pairs.g_hat());
      const int g = h * pairs.g_hat() + static_cast<int>(slot);
      if (g < num_classifiers) s.push_back(g);
    }
  }
  return out;
}

inline std::vector<SampleRecord> records_from_lines(const std::vector<std::string>& lines) {
  std::vector<SampleRecord> out;
  out.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) out.push_back({i, lines[i]});
  return out;
}

// Sub-trainset g as the list of training indices it contains.
inline std::vector<std::vector<std::size_t>> subtrainsets(const Membership& m) {
  std::vector<std::vector<std::size_t>> out(m.num_classifiers);
  for (std::size_t i = 0; i < m.sets.size(); ++i) {
    for (int g : m.sets[i]) out[g].push_back(i);
  }
  return out;
}

inline std::set<int> influenced_classifiers(const Membership& membership,
                                            std::span<const std::size_t> modified) {
  std::set<int> out;
  for (std::size_t i : modified) {
    if (i >= membership.sets.size()) {
      throw InputError("influenced_classifiers: index " + std::to_string(i) + " out of range");
    }
    out.insert(membership.sets[i].begin(), membership.sets[i].end());
  }
  return out;
}

// {"G": int, "g_hat": int, "num_pairs": int, "sets": [[int, ...], ...]}
// g_hat and num_pairs are omitted for vanilla (non-hash) memberships.
inline nlohmann::json to_json(const Membership& m) {
  nlohmann::json j;
  j["G"] = m.num_classifiers;
  if (m.pair_structure) {
    j["g_hat"] = m.pair_structure->g_hat();
    j["num_pairs"] = m.pair_structure->num_pairs();
  }
  j["sets"] = m.sets;
  return j;
}

inline Membership membership_from_json(const nlohmann::json& j) {
  Membership m;
  try {
    m.num_classifiers = j.at("G").get<int>();
    m.sets = j.at("sets").get<std::vector<std::vector<int>>>();
    if (j.contains("g_hat") && !j.at("g_hat").is_null()) {
      m.pair_structure = PairStructure(m.num_classifiers, j.at("g_hat").get<int>());
      if (j.contains("num_pairs") && j.at("num_pairs").get<int>() != m.pair_structure->num_pairs()) {
        throw InputError("membership: num_pairs inconsistent with G and g_hat");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("membership: ") + e.what());
  }
  m.validate();
  return m;
}

}  // namespace poisoncert

#endif  // POISONCERT_HASH_BAGGING_HPP_
