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

// poison_cert: certify bagged ensembles against data poisoning.
//
//   poison_cert subsample --data train.txt --G 50 --K 100 --out membership.json
//   poison_cert certify   --votes votes.csv --membership membership.json --r-ins 2
//   poison_cert sweep     --votes votes.csv --pairs 10 --fractions 0.05,0.1 --out sweep.csv
//   poison_cert bound     --membership membership.json --greedy
//   poison_cert oracle    --votes votes.csv --pairs 3 --r-ins 1 --cross-check

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "poisoncert/cli.hpp"

namespace {

using namespace poisoncert;

void add_votes(CLI::App* app, cli::VotesArgs& v) {
  app->add_option("--votes", v.votes_path, "votes CSV (M rows x G class indices)")
      ->required()
      ->check(CLI::ExistingFile);
  app->add_flag("--header", v.header, "skip the first line of the votes CSV");
  app->add_option("--classes", v.num_classes, "number of classes (default: max vote + 1, >= 2)");
}

void add_structure(CLI::App* app, cli::StructureArgs& s) {
  app->add_option("--membership", s.membership_path, "membership JSON")->check(CLI::ExistingFile);
  app->add_option("--pairs", s.pairs_g_hat,
                  "hash-bagging pair structure with this many sub-trainsets per pair");
}

void add_budget(CLI::App* app, cli::BudgetArgs& b) {
  auto* ins = app->add_option("--r-ins", b.r_ins, "inserted samples")->check(CLI::NonNegativeNumber);
  auto* del = app->add_option("--r-del", b.r_del, "deleted samples")->check(CLI::NonNegativeNumber);
  auto* mod = app->add_option("--r-mod", b.r_mod, "modified samples")->check(CLI::NonNegativeNumber);
  app->add_option("--r-ins-frac", b.r_ins_frac, "inserted samples as a fraction of G")->excludes(ins);
  app->add_option("--r-del-frac", b.r_del_frac, "deleted samples as a fraction of G")->excludes(del);
  app->add_option("--r-mod-frac", b.r_mod_frac, "modified samples as a fraction of G")->excludes(mod);
}

int default_threads() {
  if (const char* env = std::getenv("POISON_CERT_THREADS")) {
    try {
      return std::max(1, std::stoi(env));
    } catch (const std::exception&) {
    }
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collective robustness certificates for bagged ensembles under data poisoning"};
  app.require_subcommand(1);
  const int threads_default = default_threads();

  cli::SubsampleArgs sub;
  auto* c_sub = app.add_subcommand("subsample", "hash-based sub-trainset membership");
  c_sub->add_option("--data", sub.dataset_path, "line-delimited trainset")->required();
  c_sub->add_option("--G", sub.num_classifiers, "number of sub-trainsets")->required();
  c_sub->add_option("--K", sub.k, "sub-trainset size")->required();
  c_sub->add_option("--out", sub.out_path, "membership JSON output")->required();

  cli::CertifyArgs cert;
  cert.threads = threads_default;
  auto* c_cert = app.add_subcommand("certify", "certify collective robustness");
  add_votes(c_cert, cert.votes);
  add_structure(c_cert, cert.structure);
  add_budget(c_cert, cert.budget);
  c_cert->add_option("--mode", cert.mode, "samplewise | collective | decomposed")
      ->check(CLI::IsMember({"samplewise", "collective", "decomposed"}));
  c_cert->add_option("--delta", cert.delta, "sub-testset size for --mode decomposed")
      ->check(CLI::PositiveNumber);
  c_cert->add_option("--time-per-sample", cert.time_per_sample, "solver seconds per target row");
  c_cert->add_option("--node-limit", cert.node_limit, "branch-and-bound node limit per solve");
  c_cert->add_option("--labels", cert.labels_path, "labels CSV, enables certified accuracy")
      ->check(CLI::ExistingFile);
  c_cert->add_option("--threads", cert.threads, "worker threads (env POISON_CERT_THREADS)");
  c_cert->add_option("--out", cert.out_path, "certificate JSON output");

  cli::SweepArgs sw;
  sw.config.threads = threads_default;
  auto* c_sw = app.add_subcommand("sweep", "certificates over a budget grid");
  add_votes(c_sw, sw.votes);
  add_structure(c_sw, sw.structure);
  c_sw->add_option("--caps", sw.caps, "absolute budgets r")->delimiter(',');
  c_sw->add_option("--fractions", sw.fractions, "budgets as fractions of G")->delimiter(',');
  c_sw->add_option("--modes", sw.config.modes, "methods to run")
      ->delimiter(',')
      ->check(CLI::IsMember({"samplewise", "collective", "decomposed"}));
  c_sw->add_option("--component", sw.config.component, "budget component receiving r: ins|del|mod");
  c_sw->add_option("--delta", sw.config.delta, "sub-testset size for decomposed")
      ->check(CLI::PositiveNumber);
  c_sw->add_option("--time-per-sample", sw.config.time_per_sample, "solver seconds per target row");
  c_sw->add_option("--node-limit", sw.config.node_limit, "node limit per solve");
  c_sw->add_option("--labels", sw.labels_path, "labels CSV")->check(CLI::ExistingFile);
  c_sw->add_option("--threads", sw.config.threads, "worker threads");
  c_sw->add_option("--out", sw.out_path, "sweep CSV output");

  cli::BoundArgs bd;
  bool greedy = false;
  auto* c_bd = app.add_subcommand("bound", "upper bound on the tolerable poison budget");
  c_bd->add_option("--membership", bd.membership_path, "membership JSON")
      ->required()
      ->check(CLI::ExistingFile);
  auto* f_exact = c_bd->add_flag("--exact", "exact minimum cover (default)");
  c_bd->add_flag("--greedy", greedy, "greedy cover (upper bound)")->excludes(f_exact);
  c_bd->add_option("--max-patterns", bd.max_patterns, "exact-search cap on distinct scopes");

  cli::OracleArgs orc;
  auto* c_orc = app.add_subcommand("oracle", "brute-force maximum attack on a small instance");
  add_votes(c_orc, orc.votes);
  add_structure(c_orc, orc.structure);
  add_budget(c_orc, orc.budget);
  c_orc->add_flag("--cross-check", orc.cross_check, "compare against certify, exit 4 on mismatch");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cli::kExitInputError;
  }

  try {
    if (*c_sub) return cli::cmd_subsample(sub, std::cout);
    if (*c_cert) return cli::cmd_certify(cert, std::cout);
    if (*c_sw) return cli::cmd_sweep(sw, std::cout);
    if (*c_bd) {
      bd.exact = !greedy;
      return cli::cmd_bound(bd, std::cout);
    }
    if (*c_orc) return cli::cmd_oracle(orc, std::cout);
  } catch (const TooLargeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitTooLarge;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitInputError;
  }
  return cli::kExitInputError;
}
