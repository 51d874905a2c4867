// Copyright 2026 The qinet Authors.
//
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

// Acceptance suite. `acceptance N` checks criterion N and prints one line;
// with no argument every criterion runs. Exit status is the failure count
// (capped at 1 per criterion).

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "qinet/adversary.hpp"
#include "qinet/analytics.hpp"
#include "qinet/auditor.hpp"
#include "qinet/mechanisms.hpp"
#include "qinet/querytree.hpp"
#include "qinet/sweeps.hpp"

namespace {

using namespace qinet;

struct Result {
  bool pass = true;
  std::string detail;
};

std::vector<double> alpha_grid() {
  std::vector<double> g;
  for (int k = 1; k <= 99; ++k) g.push_back(k / 100.0);
  return g;
}

std::string num(double v) { return format_number(v); }

// GCRM reward straight from the definition.
double gcrm_oracle(double a, int i, int n) {
  return std::pow(a, n - i) / std::pow(1 + a, i);
}

// Sybil factor as a term-wise sum over the attacker's identities.
double f_oracle(double a, int lambda) {
  double sum = 0.0;
  for (int k = 0; k <= lambda; ++k) sum += gcrm_oracle(a, 1 + k, 1 + lambda);
  return sum / gcrm_oracle(a, 1, 1);
}

double rel(double a, double b) {
  return std::abs(a - b) / std::max({1e-300, std::abs(a), std::abs(b)});
}

Result budget_balance() {
  const auto m = rho_mechanisms(0.6);
  Result r;
  if (std::abs(m.dgm.alpha / (1 + m.dgm.alpha) - 0.375) > 1e-12 ||
      std::abs(m.delta_geom.alpha - 0.6) > 1e-12 ||
      std::abs(m.gcrm.alpha - 0.42195) > 5e-6) {
    return {false, "rho = 0.6 mapping is off"};
  }
  double worst = 0.0, geom_err = 0.0;
  for (int n = 1; n <= 30; ++n) {
    for (const auto* s : {&m.dgm, &m.delta_geom, &m.gcrm}) {
      const double ratio = total_reward_sum(n, *s) / s->budget;
      worst = std::max(worst, ratio);
      if (detail::exceeds(ratio, 1.0)) r.pass = false;
    }
    geom_err = std::max(geom_err, std::abs(total_reward_sum(n, m.delta_geom) - 1.0));
  }
  if (geom_err > 1e-12) r.pass = false;
  r.detail = "max total/budget " + num(worst) + ", delta-GEOM |total - budget| " +
             num(geom_err);
  return r;
}

Result gcrm_single_sybil() {
  Result r;
  double worst = 0.0, min_f = 2.0;
  for (double a : alpha_grid()) {
    const double f = sybil_factor(a, 1);
    worst = std::max({worst, std::abs(f - f_oracle(a, 1)),
                      std::abs(f - (1 / (1 + a) + a))});
    min_f = std::min(min_f, f);
    if (!(f > 1.0)) r.pass = false;
  }
  if (worst > 1e-12) r.pass = false;
  r.detail = "max deviation " + num(worst) + ", min f(alpha, 1) " + num(min_f);
  return r;
}

Result lambda_star_correct() {
  Result r;
  int prev = 0;
  std::string bad;
  for (double a : alpha_grid()) {
    const int ls = lambda_star(a);
    int scan = 1;
    while (f_oracle(a, scan) > 1.0) ++scan;
    if (ls != scan) bad += " scan(" + num(a) + ")";
    if (ls < prev) bad += " monotone(" + num(a) + ")";
    if (ls < 2) bad += " floor(" + num(a) + ")";
    prev = ls;
  }
  if (lambda_star(0.5) != 3) bad += " lambda*(0.5)=" + std::to_string(lambda_star(0.5));
  r.pass = bad.empty();
  r.detail = bad.empty() ? "lambda*(0.5) = 3, scan agrees on 99 alphas"
                         : "mismatch:" + bad;
  return r;
}

Result lambda_prime_optimal() {
  int misses = 0, stationary_misses = 0;
  std::string examples;
  double sup = 0.0;
  for (double a : alpha_grid()) {
    const int rounded = nearest_count(lambda_prime(a));
    const int stat = nearest_count(lambda_prime_stationary(a));
    int best = 1;
    for (int l = 1; l <= 1000; ++l) {
      const double f = sybil_factor(a, l);
      sup = std::max(sup, f);
      if (f > sybil_factor(a, best)) best = l;
    }
    if (detail::exceeds(sybil_factor(a, best), sybil_factor(a, rounded))) {
      if (++misses <= 3) {
        examples += " alpha=" + num(a) + " rounded=" + std::to_string(rounded) +
                    " argmax=" + std::to_string(best);
      }
    }
    if (detail::exceeds(sybil_factor(a, best), sybil_factor(a, stat))) {
      ++stationary_misses;
    }
  }
  Result r;
  r.pass = misses == 0 && sup < 2.0;
  r.detail = "sup f " + num(sup) + "; rounded lambda' misses argmax at " +
             std::to_string(misses) + "/99 alphas" + examples +
             "; rounded stationary point misses " +
             std::to_string(stationary_misses);
  return r;
}

Result dgm_sybil_proof() {
  Result r;
  double eq_err = 0.0, cp_eq_err = 0.0, worst = 0.0;
  for (int k = 1; k <= 19; ++k) {
    const auto s = dgm(k / 20.0);
    for (int n = 1; n <= 20; ++n) {
      for (int i = 1; i <= n; ++i) {
        for (int l = 1; l <= 20; ++l) {
          const auto o = sybil_gain(s, i, n, l);
          worst = std::max(worst, o.ratio);
          if (o.profitable) r.pass = false;
          if (l == 1) eq_err = std::max(eq_err, std::abs(o.ratio - 1.0));
        }
        cp_eq_err = std::max(cp_eq_err,
                             std::abs(collusion_gain(s, i, n, 1).ratio - 1.0));
      }
    }
  }
  if (eq_err > 1e-12 || cp_eq_err > 1e-12) r.pass = false;
  r.detail = "max ratio " + num(worst) + ", |ratio - 1| at lambda = 1: " +
             num(eq_err) + ", at pair merge: " + num(cp_eq_err);
  return r;
}

Result delta_geom_cp_not_sp() {
  Result r;
  double worst = 0.0;
  int lambdas_failing = 0;
  for (int k = 1; k <= 19; ++k) {
    const auto s = delta_geom(k / 20.0);
    for (int n = 1; n <= 20; ++n) {
      for (int i = 1; i <= n; ++i) {
        for (int g = 1; g <= 20; ++g) {
          const auto o = collusion_gain(s, i, n, g);
          worst = std::max(worst, o.ratio);
          if (o.profitable) r.pass = false;
        }
      }
    }
    for (int l = 1; l <= 20; ++l) {
      bool fails = false;
      for (int n = 1; n <= 20 && !fails; ++n) {
        for (int i = 1; i <= n && !fails; ++i) {
          fails = sybil_gain(s, i, n, l).profitable;
        }
      }
      if (fails) ++lambdas_failing;
    }
  }
  if (lambdas_failing != 19 * 20) r.pass = false;
  r.detail = "max collusion ratio " + num(worst) + "; SP fails at " +
             std::to_string(lambdas_failing) + "/380 (delta, lambda) pairs";
  return r;
}

Result impossibility() {
  Result r;
  bool dgm_cp_fails = false, geom_sp_fails = false;
  for (int n = 1; n <= 20; ++n) {
    for (int i = 1; i <= n; ++i) {
      dgm_cp_fails = dgm_cp_fails || collusion_gain(dgm(0.6), i, n, 2).profitable;
      geom_sp_fails =
          geom_sp_fails || sybil_gain(delta_geom(0.6), i, n, 1).profitable;
    }
  }
  std::mt19937_64 gen(20260101);
  std::uniform_real_distribution<double> u(1e-6, 1.0);
  int escaped = 0;
  for (int t = 0; t < 1000; ++t) {
    RewardTable table;
    const int max_n = 3 + t % 4;
    for (int n = 1; n <= max_n; ++n) {
      std::vector<double> row(n);
      for (auto& x : row) x = u(gen);
      table.rows.push_back(row);
    }
    if (!impossibility_certificate(table).passed()) ++escaped;
  }
  r.pass = dgm_cp_fails && geom_sp_fails && escaped == 0;
  r.detail = std::string("DGM CP(2) ") + (dgm_cp_fails ? "fails" : "holds") +
             ", delta-GEOM SP(1) " + (geom_sp_fails ? "fails" : "holds") +
             ", random tables satisfying all three: " + std::to_string(escaped) +
             "/1000";
  return r;
}

Result n_prime_optimal() {
  Result r;
  const auto half = n_prime(0.5);
  if (!half || std::abs(*half - 1.864) > 5e-4) r.pass = false;
  const double total_half = total_reward_sum(2, gcrm(0.5));
  if (std::abs(total_half - 7.0 / 9.0) > 1e-9) r.pass = false;
  int misses = 0;
  std::string examples;
  for (double a : alpha_grid()) {
    const auto np = n_prime(a);
    if (!np) continue;
    const auto s = gcrm(a);
    int best = 1;
    for (int n = 2; n <= 200; ++n) {
      if (total_reward_sum(n, s) > total_reward_sum(best, s)) best = n;
    }
    if (best != nearest_count(*np)) {
      if (++misses <= 3) {
        examples += " alpha=" + num(a) + " n'=" + num(*np) +
                    " argmax=" + std::to_string(best);
      }
    }
  }
  if (misses) r.pass = false;
  r.detail = "n'(0.5) = " + (half ? num(*half) : std::string("none")) +
             ", total(2) = " + num(total_half) + "; rounded n' misses argmax at " +
             std::to_string(misses) + " alphas" + examples;
  return r;
}

RandomTreeParams tree_params(std::uint64_t seed, std::size_t max_nodes) {
  RandomTreeParams p;
  p.max_depth = 4;
  p.branching_mean = 1.6;
  p.solver_probability = 0.35;
  p.seed = seed;
  p.max_children = 3;
  p.max_nodes = max_nodes;
  return p;
}

Result incentive_compatible() {
  const auto m = rho_mechanisms(0.6);
  Result r;
  int gainers = 0;
  std::string first;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const QueryTree t = generate_random_tree(tree_params(seed, 10));
    for (const auto* s : {&m.dgm, &m.delta_geom, &m.gcrm}) {
      const auto rep = check_ic(t, *s, {10, false});
      if (!rep.passed()) {
        ++gainers;
        if (first.empty()) first = " first: seed " + std::to_string(seed) + " " +
                                   rep.mechanism + " " + rep.witness.dump();
      }
    }
  }
  r.pass = gainers == 0;
  r.detail = std::to_string(gainers) + "/600 (tree, mechanism) pairs with a "
             "profitable on-path deviation" + first;
  return r;
}

Result core_stable() {
  const auto m = rho_mechanisms(0.6);
  Result r;
  std::map<std::string, int> blocked;
  std::string first;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const QueryTree t = generate_random_tree(tree_params(seed, 8));
    for (const auto* s : {&m.dgm, &m.delta_geom, &m.gcrm}) {
      const auto rep = check_core(t, *s, {8, 0});
      if (!rep.passed()) {
        ++blocked[rep.mechanism];
        if (first.empty()) first = "; first: seed " + std::to_string(seed) + " " +
                                   rep.mechanism + " " + rep.witness.dump();
      }
    }
  }
  r.pass = blocked.empty();
  std::string counts;
  for (const auto* name : {"DGM", "delta-GEOM", "GCRM"}) {
    counts += (counts.empty() ? "" : ", ") + std::string(name) + " " +
              std::to_string(blocked.count(name) ? blocked[name] : 0);
  }
  r.detail = "trees with a blocking coalition (of 100): " + counts + first;
  return r;
}

Result split_ratios() {
  Result r;
  double worst = 0.0;
  std::string bad;
  for (double a : alpha_grid()) {
    for (const auto& s : {dgm(a), delta_geom(a), gcrm(a)}) {
      const double want = s.family == Family::kGcrm ? a * (1 + a) : a;
      for (int n = 2; n <= 20; ++n) {
        for (int i = 1; i < n; ++i) {
          worst = std::max(worst, rel(reward(i, n, s) / reward(i + 1, n, s), want));
        }
      }
    }
    const double gratio = reward(1, 2, gcrm(a)) / reward(2, 2, gcrm(a));
    if ((gratio <= 1.0) != (a <= kGoldenAlpha)) bad += " " + num(a);
  }
  if (worst > 1e-12 || !bad.empty()) r.pass = false;
  r.detail = "max relative deviation " + num(worst) +
             (bad.empty() ? ", golden threshold holds" : ", threshold broken at" + bad);
  return r;
}

Result figure_orderings() {
  ExperimentConfig c;
  c.experiment = Experiment::kSybilRatio;
  const auto sybil = run_sybil_ratio(c);
  c.experiment = Experiment::kCollusionRatio;
  c.gamma_max = 9;
  const auto coll = run_collusion_ratio(c);
  using Key = std::tuple<std::string, double, int>;
  std::map<Key, double> sy, co;
  for (const auto& row : sybil.rows) sy[{row.mechanism, row.parameter, row.index}] = row.value;
  for (const auto& row : coll.rows) co[{row.mechanism, row.parameter, row.index}] = row.value;
  int checked = 0, broken = 0;
  for (double rho : c.rho_values) {
    for (int l = 1; l <= 10; ++l, ++checked) {
      if (!(sy.at({"GCRM", rho, l}) < sy.at({"delta-GEOM", rho, l}))) ++broken;
    }
    for (int size = 2; size <= 10; ++size, ++checked) {
      if (!(co.at({"GCRM", rho, size}) < co.at({"DGM", rho, size}))) ++broken;
    }
  }
  return {broken == 0, std::to_string(checked - broken) + "/" +
                           std::to_string(checked) + " orderings hold"};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Result determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "qinet_acceptance";
  fs::remove_all(dir);
  int files = 0, differing = 0;
  for (auto e : {Experiment::kSybilRatio, Experiment::kCollusionRatio,
                 Experiment::kBudgetRatio, Experiment::kGcrmSybilAlpha,
                 Experiment::kGcrmCollusionAlpha}) {
    ExperimentConfig c;
    c.experiment = e;
    c.seed = 42;
    c.output_path = (dir / (std::string(to_string(e)) + ".csv")).string();
    std::string runs[2];
    for (auto& bytes : runs) {
      const auto out = write_sweep(c, run_experiment(c));
      bytes = slurp(out.csv) + '\0' + slurp(out.manifest);
    }
    files += 2;
    if (runs[0] != runs[1]) differing += 2;
  }
  // JSON reports and seeded allocations.
  const auto t = generate_random_tree(tree_params(7, 10));
  const auto s = gcrm(0.5);
  std::string docs[2];
  for (auto& doc : docs) {
    const auto a = allocate(t, 11);
    doc = to_json(check_ic(t, s)).dump() + to_json(check_sp(s)).dump() +
          (a ? to_json(*a).dump() : "null");
  }
  files += 1;
  if (docs[0] != docs[1]) ++differing;
  return {differing == 0, std::to_string(files - differing) + "/" +
                              std::to_string(files) + " artifacts byte-identical"};
}

struct Criterion {
  const char* title;
  std::function<Result()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {"budget balance at rho = 0.6", budget_balance},
      {"GCRM single-identity Sybil factor", gcrm_single_sybil},
      {"lambda* correctness", lambda_star_correct},
      {"rounded lambda' maximizes f, f < 2", lambda_prime_optimal},
      {"DGM Sybil-proof, equality at one identity", dgm_sybil_proof},
      {"delta-GEOM collusion-proof and never Sybil-proof", delta_geom_cp_not_sp},
      {"impossibility certificate", impossibility},
      {"rounded n' maximizes the GCRM total", n_prime_optimal},
      {"incentive compatibility on random trees", incentive_compatible},
      {"core on random trees", core_stable},
      {"split ratios and golden threshold", split_ratios},
      {"sweep orderings", figure_orderings},
      {"determinism", determinism},
  };
  return all;
}

bool run_one(std::size_t k) {
  const auto& c = criteria()[k - 1];
  Result r;
  try {
    r = c.run();
  } catch (const std::exception& e) {
    r = {false, std::string("exception: ") + e.what()};
  }
  std::cout << (r.pass ? "[PASS]" : "[FAIL]") << " criterion " << k << ": "
            << c.title << " (" << r.detail << ")\n";
  return r.pass;
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t total = criteria().size();
  if (argc > 2) {
    std::cerr << "usage: acceptance [1.." << total << "]\n";
    return 2;
  }
  if (argc == 2) {
    const int k = std::atoi(argv[1]);
    if (k < 1 || static_cast<std::size_t>(k) > total) {
      std::cerr << "criterion must lie in 1.." << total << "\n";
      return 2;
    }
    return run_one(k) ? 0 : 1;
  }
  int failed = 0;
  for (std::size_t k = 1; k <= total; ++k) failed += run_one(k) ? 0 : 1;
  return failed;
}
