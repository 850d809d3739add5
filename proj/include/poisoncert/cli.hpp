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

// Command implementations behind the poison_cert tool. Each command takes a
// plain argument struct, writes human-readable output to `out`, and returns
// the process exit code.

#ifndef POISONCERT_CLI_HPP_
#define POISONCERT_CLI_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "poisoncert/bound.hpp"
#include "poisoncert/core.hpp"
#include "poisoncert/decompose.hpp"
#include "poisoncert/hash_bagging.hpp"
#include "poisoncert/io.hpp"
#include "poisoncert/oracle.hpp"
#include "poisoncert/samplewise.hpp"
#include "poisoncert/solver.hpp"

namespace poisoncert::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitTooLarge = 3;
inline constexpr int kExitMismatch = 4;

// ---------------------------------------------------------------------------
// Shared argument pieces
// ---------------------------------------------------------------------------

struct VotesArgs {
  std::string votes_path;
  bool header = false;
  int num_classes = 0;  // <= 0: infer
};

struct StructureArgs {
  std::string membership_path;   // membership JSON
  std::optional<int> pairs_g_hat;  // or a bare pair structure with this g_hat
};

struct BudgetArgs {
  int r_ins = 0;
  int r_del = 0;
  int r_mod = 0;
  std::optional<double> r_ins_frac;
  std::optional<double> r_del_frac;
  std::optional<double> r_mod_frac;
};

inline int budget_count(double frac, int g_total) {
  if (!(frac >= 0.0)) throw InputError("budget fraction must be >= 0");
  return static_cast<int>(std::lround(frac * g_total));
}

inline Budget resolve_budget(const BudgetArgs& a, int g_total) {
  Budget b{a.r_ins, a.r_del, a.r_mod};
  if (a.r_ins_frac) b.r_ins = budget_count(*a.r_ins_frac, g_total);
  if (a.r_del_frac) b.r_del = budget_count(*a.r_del_frac, g_total);
  if (a.r_mod_frac) b.r_mod = budget_count(*a.r_mod_frac, g_total);
  b.validate();
  return b;
}

inline AttackStructure load_structure(const StructureArgs& a, int g_total) {
  const bool have_membership = !a.membership_path.empty();
  if (have_membership == a.pairs_g_hat.has_value()) {
    throw InputError("give exactly one of --membership or --pairs");
  }
  if (a.pairs_g_hat) return AttackStructure::hash(PairStructure(g_total, *a.pairs_g_hat));
  auto m = io::read_membership(a.membership_path);
  if (m.num_classifiers != g_total) {
    throw InputError("membership has G=" + std::to_string(m.num_classifiers) +
                     " but the votes have G=" + std::to_string(g_total));
  }
  return AttackStructure::from_membership(std::move(m));
}

inline VoteMatrix load_votes(const VotesArgs& a) {
  return io::read_votes(a.votes_path, a.header, a.num_classes);
}

// ---------------------------------------------------------------------------
// subsample
// ---------------------------------------------------------------------------

struct SubsampleArgs {
  std::string dataset_path;
  int num_classifiers = 0;
  int k = 0;
  std::string out_path;
};

inline int cmd_subsample(const SubsampleArgs& a, std::ostream& out) {
  const auto lines = io::read_lines(a.dataset_path);
  const auto records = records_from_lines(lines);
  const auto m = subsample(records, a.num_classifiers, a.k);
  io::write_file(a.out_path, to_json(m).dump() + "\n");
  std::size_t lo = std::numeric_limits<std::size_t>::max();
  std::size_t hi = 0;
  for (const auto& s : subtrainsets(m)) {
    lo = std::min(lo, s.size());
    hi = std::max(hi, s.size());
  }
  out << "N=" << records.size() << " G=" << a.num_classifiers << " K=" << a.k
      << " g_hat=" << m.pair_structure->g_hat() << " pairs=" << m.pair_structure->num_pairs()
      << " min_size=" << lo << " max_size=" << hi << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// certify
// ---------------------------------------------------------------------------

struct CertifyArgs {
  VotesArgs votes;
  StructureArgs structure;
  BudgetArgs budget;
  std::string mode = "collective";
  int delta = 1;
  double time_per_sample = 2.0;
  std::optional<std::uint64_t> node_limit;
  std::string labels_path;
  bool labels_header = false;
  int threads = 1;
  std::string out_path;
};

inline Certificate run_method(const std::string& mode, const VoteMatrix& votes,
                              const AttackStructure& structure, const Budget& budget,
                              std::optional<std::span<const int>> labels, int delta,
                              double time_per_sample, std::optional<std::uint64_t> node_limit,
                              int threads) {
  DecomposeOptions dopts;
  dopts.time_per_sample = time_per_sample;
  dopts.node_limit_per_group = node_limit;
  dopts.threads = threads;
  if (mode == "samplewise") return certify_samplewise(votes, structure, budget, labels, dopts);
  if (mode == "decomposed") return certify_decomposed(votes, structure, budget, delta, labels, dopts);
  if (mode == "collective") {
    CertifyOptions copts;
    copts.time_per_sample = time_per_sample;
    copts.node_limit = node_limit;
    return certify(votes, structure, budget, labels, copts);
  }
  throw InputError("unknown mode '" + mode + "' (expected samplewise, collective or decomposed)");
}

inline int cmd_certify(const CertifyArgs& a, std::ostream& out) {
  const auto votes = load_votes(a.votes);
  const auto structure = load_structure(a.structure, votes.num_classifiers());
  const auto budget = resolve_budget(a.budget, votes.num_classifiers());
  std::optional<std::vector<int>> labels;
  if (!a.labels_path.empty()) labels = io::read_labels(a.labels_path, a.labels_header);
  std::optional<std::span<const int>> label_span;
  if (labels) label_span = std::span<const int>(*labels);

  const auto cert = run_method(a.mode, votes, structure, budget, label_span, a.delta,
                               a.time_per_sample, a.node_limit, a.threads);
  const auto j = io::to_json(cert);
  if (!a.out_path.empty()) io::write_file(a.out_path, j.dump(2) + "\n");
  out << j.dump(2) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct ReportRow {
  double budget_fraction = 0.0;
  CertifyMethod method = CertifyMethod::kCollective;
  int cr = 0;
  std::optional<int> ca;
  std::optional<double> alpha;
  CertificateStatus status = CertificateStatus::kExact;
  double seconds = 0.0;
};

struct SweepConfig {
  std::vector<int> caps;  // per-step budget r (see `component`)
  std::vector<std::string> modes{"samplewise", "collective"};
  // Budget component that receives r: "ins", "del" or "mod". Empty picks
  // "ins" for hash structures and "mod" for vanilla ones.
  std::string component;
  int delta = 1;
  double time_per_sample = 2.0;
  std::optional<std::uint64_t> node_limit;
  int threads = 1;
};

inline Budget budget_for(const std::string& component, bool hash, int r) {
  const std::string c = component.empty() ? (hash ? "ins" : "mod") : component;
  if (c == "ins") return {r, 0, 0};
  if (c == "del") return {0, r, 0};
  if (c == "mod") return {0, 0, r};
  throw InputError("unknown budget component '" + component + "'");
}

// One row per (budget, method), sorted by budget then by the order of
// `modes`. Rows of each method are made non-increasing in budget by carrying
// the certificate of a larger budget down to smaller ones, and collective
// rows never report less than the sample-wise certificate at the same budget;
// both adjustments only replace a bound by another valid one.
inline std::vector<ReportRow> sweep(const VoteMatrix& votes, const AttackStructure& structure,
                                    std::optional<std::span<const int>> labels,
                                    const SweepConfig& cfg) {
  std::vector<int> caps = cfg.caps;
  std::sort(caps.begin(), caps.end());
  caps.erase(std::unique(caps.begin(), caps.end()), caps.end());
  const int g_total = votes.num_classifiers();
  const bool want_alpha = std::any_of(cfg.modes.begin(), cfg.modes.end(),
                                      [](const auto& m) { return m != "samplewise"; });

  std::vector<std::vector<ReportRow>> by_method(cfg.modes.size());
  for (int r : caps) {
    const auto budget = budget_for(cfg.component, structure.is_hash(), r);
    std::optional<Certificate> sam;
    if (want_alpha || std::find(cfg.modes.begin(), cfg.modes.end(), "samplewise") != cfg.modes.end()) {
      sam = run_method("samplewise", votes, structure, budget, labels, 1, cfg.time_per_sample,
                       cfg.node_limit, cfg.threads);
    }
    for (std::size_t mi = 0; mi < cfg.modes.size(); ++mi) {
      const auto& mode = cfg.modes[mi];
      Certificate c = mode == "samplewise"
                          ? *sam
                          : run_method(mode, votes, structure, budget, labels, cfg.delta,
                                       cfg.time_per_sample, cfg.node_limit, cfg.threads);
      ReportRow row;
      row.budget_fraction = g_total > 0 ? static_cast<double>(structure.is_hash()
                                                                  ? budget.per_pair_cap()
                                                                  : budget.r_mod) /
                                              g_total
                                        : 0.0;
      row.method = c.method;
      row.status = c.status;
      row.seconds = c.solve_seconds;
      int attacked = c.attacked_ub;
      std::optional<int> acc_attacked = c.accuracy_attacked_ub;
      if (mode != "samplewise" && sam) {
        attacked = std::min(attacked, sam->attacked_ub);
        if (acc_attacked) acc_attacked = std::min(*acc_attacked, *sam->accuracy_attacked_ub);
        row.alpha = relative_gap(sam->attacked_ub, attacked);
      }
      row.cr = votes.num_samples() - attacked;
      if (acc_attacked) row.ca = *c.num_correct - *acc_attacked;
      by_method[mi].push_back(row);
    }
  }
  for (auto& rows : by_method) {
    for (std::size_t k = rows.size(); k-- > 1;) {
      rows[k - 1].cr = std::max(rows[k - 1].cr, rows[k].cr);
      if (rows[k - 1].ca && rows[k].ca) rows[k - 1].ca = std::max(*rows[k - 1].ca, *rows[k].ca);
    }
  }
  std::vector<ReportRow> out;
  for (std::size_t k = 0; k < caps.size(); ++k) {
    for (auto& rows : by_method) out.push_back(rows[k]);
  }
  return out;
}

inline std::string sweep_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream ss;
  ss << "budget_fraction,method,cr,ca,alpha,status,seconds\n";
  for (const auto& r : rows) {
    ss << io::format_ratio(r.budget_fraction) << ',' << to_string(r.method) << ',' << r.cr << ',';
    if (r.ca) ss << *r.ca;
    ss << ',';
    if (r.alpha) ss << io::format_ratio(*r.alpha);
    ss << ',' << to_string(r.status) << ',' << io::format_ratio(r.seconds) << '\n';
  }
  return ss.str();
}

struct SweepArgs {
  VotesArgs votes;
  StructureArgs structure;
  std::vector<int> caps;
  std::vector<double> fractions;
  std::string labels_path;
  bool labels_header = false;
  SweepConfig config;
  std::string out_path;
};

inline int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  const auto votes = load_votes(a.votes);
  const auto structure = load_structure(a.structure, votes.num_classifiers());
  std::optional<std::vector<int>> labels;
  if (!a.labels_path.empty()) labels = io::read_labels(a.labels_path, a.labels_header);
  std::optional<std::span<const int>> label_span;
  if (labels) label_span = std::span<const int>(*labels);

  auto cfg = a.config;
  cfg.caps = a.caps;
  for (double f : a.fractions) cfg.caps.push_back(budget_count(f, votes.num_classifiers()));
  if (cfg.caps.empty()) throw InputError("sweep: give --caps and/or --fractions");
  const auto csv = sweep_csv(sweep(votes, structure, label_span, cfg));
  if (!a.out_path.empty()) io::write_file(a.out_path, csv);
  out << csv;
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bound
// ---------------------------------------------------------------------------

struct BoundArgs {
  std::string membership_path;
  bool exact = true;
  int max_patterns = 30;
};

inline int cmd_bound(const BoundArgs& a, std::ostream& out) {
  const auto m = io::read_membership(a.membership_path);
  BudgetBound b;
  if (a.exact) {
    b = tolerable_budget_exact(m, {a.max_patterns});
  } else {
    b = tolerable_budget_greedy(m);
  }
  const std::string label = a.exact ? "r_bar" : "r_bar_upper";
  if (b.unreachable()) {
    out << label << "=infinite\n";
    return kExitOk;
  }
  out << label << "=" << b.r_bar_upper << "\nwitness=";
  for (std::size_t k = 0; k < b.witness.size(); ++k) out << (k ? "," : "") << b.witness[k];
  out << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// oracle
// ---------------------------------------------------------------------------

struct OracleArgs {
  VotesArgs votes;
  StructureArgs structure;
  BudgetArgs budget;
  bool cross_check = false;
};

inline int cmd_oracle(const OracleArgs& a, std::ostream& out) {
  const auto votes = load_votes(a.votes);
  const auto structure = load_structure(a.structure, votes.num_classifiers());
  const auto budget = resolve_budget(a.budget, votes.num_classifiers());
  const auto res = oracle::brute_force(votes, structure, budget);
  out << "m_atk=" << res.max_attacked << "\ncontrolled=";
  for (std::size_t k = 0; k < res.witness_classifiers.size(); ++k) {
    out << (k ? "," : "") << res.witness_classifiers[k];
  }
  out << "\n";
  if (!structure.is_hash()) {
    out << "poisoned_samples=";
    for (std::size_t k = 0; k < res.witness_samples.size(); ++k) {
      out << (k ? "," : "") << res.witness_samples[k];
    }
    out << "\n";
  }
  if (a.cross_check) {
    CertifyOptions opts;
    opts.time_per_sample = std::numeric_limits<double>::infinity();
    const auto cert = certify(votes, structure, budget, std::nullopt, opts);
    const bool agree = cert.status == CertificateStatus::kExact &&
                       cert.attacked_ub == res.max_attacked;
    out << "certify_m_atk=" << cert.attacked_ub << "\ncross_check=" << (agree ? "ok" : "MISMATCH")
        << "\n";
    if (!agree) return kExitMismatch;
  }
  return kExitOk;
}

}  // namespace poisoncert::cli

#endif  // POISONCERT_CLI_HPP_
