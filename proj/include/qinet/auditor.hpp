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

// Property audits over bounded domains.
//
// Path-index properties (PO, BB, rho-split, lambda-SP, gamma-CP, monotone
// solver reward) scan 1 <= i <= n <= n_max directly. IC and core are decided
// on concrete trees by exhaustive enumeration of reports. Payoffs there are
// expectations over the uniform tie-break between minimum-depth solvers,
// computed exactly.
//
// Every failing report carries a witness that can be replayed through
// reward(), sybil_gain(), collusion_gain() or expected_rewards().

#ifndef QINET_AUDITOR_HPP
#define QINET_AUDITOR_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qinet/adversary.hpp"
#include "qinet/error.hpp"
#include "qinet/mechanisms.hpp"
#include "qinet/querytree.hpp"

namespace qinet {

enum class Property {
  kPO,
  kIC,
  kBB,
  kSplitRho,
  kSybilProof,
  kCollusionProof,
  kCore,
  kImpossibility,
  kMonotoneSolverReward,
};

inline const char* to_string(Property p) {
  switch (p) {
    case Property::kPO: return "PO";
    case Property::kIC: return "IC";
    case Property::kBB: return "BB";
    case Property::kSplitRho: return "SplitRho";
    case Property::kSybilProof: return "SybilProof";
    case Property::kCollusionProof: return "CollusionProof";
    case Property::kCore: return "Core";
    case Property::kImpossibility: return "Impossibility";
    case Property::kMonotoneSolverReward: return "MonotoneSolverReward";
  }
  return "?";
}

enum class Verdict { kPass, kFail };

struct PropertyReport {
  Property property = Property::kPO;
  Verdict verdict = Verdict::kPass;
  std::string mechanism;
  nlohmann::json witness;  // null unless the verdict needs one
  nlohmann::json domain = nlohmann::json::object();
  nlohmann::json details = nlohmann::json::object();

  bool passed() const { return verdict == Verdict::kPass; }
};

inline nlohmann::json to_json(const PropertyReport& r) {
  return {{"property", to_string(r.property)},
          {"mechanism", r.mechanism},
          {"verdict", r.passed() ? "pass" : "fail"},
          {"witness", r.witness},
          {"domain", r.domain},
          {"details", r.details}};
}

// One row per report; witnesses are printed compactly.
inline void print_table(std::ostream& os,
                        const std::vector<PropertyReport>& reports) {
  os << std::left << std::setw(22) << "property" << std::setw(12)
     << "mechanism" << std::setw(8) << "verdict" << "witness\n";
  for (const auto& r : reports) {
    os << std::left << std::setw(22) << to_string(r.property) << std::setw(12)
       << r.mechanism << std::setw(8) << (r.passed() ? "pass" : "FAIL")
       << (r.witness.is_null() ? "-" : r.witness.dump()) << "\n";
  }
}

namespace detail {

// Largest n the spec can price, clipped to `requested`.
inline int priced_limit(const MechanismSpec& spec, int requested) {
  const auto cap = max_path_length(spec);
  return cap ? std::min(*cap, requested) : requested;
}

inline PropertyReport start(Property p, const MechanismSpec& spec) {
  PropertyReport r;
  r.property = p;
  r.mechanism = mechanism_name(spec);
  return r;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Path-index properties
// ---------------------------------------------------------------------------

inline PropertyReport check_po(const MechanismSpec& spec, int n_max = 50) {
  detail::require(n_max >= 1, "n_max must be at least 1");
  auto r = detail::start(Property::kPO, spec);
  const int limit = detail::priced_limit(spec, n_max);
  r.domain = {{"n_max", limit}, {"alpha", spec.alpha}};
  for (int n = 1; n <= limit; ++n) {
    for (int i = 1; i <= n; ++i) {
      const double x = reward(i, n, spec);
      if (!(x > 0.0)) {
        r.verdict = Verdict::kFail;
        r.witness = {{"i", i}, {"n", n}, {"reward", x}};
        return r;
      }
    }
  }
  return r;
}

inline PropertyReport check_bb(const MechanismSpec& spec, int n_max = 50) {
  detail::require(n_max >= 1, "n_max must be at least 1");
  auto r = detail::start(Property::kBB, spec);
  const int limit = detail::priced_limit(spec, n_max);
  r.domain = {{"n_max", limit}, {"alpha", spec.alpha}, {"budget", spec.budget}};
  bool strongly = true;
  bool strictly_below = true;
  double max_ratio = 0.0;
  for (int n = 1; n <= limit; ++n) {
    const double total = total_reward_sum(n, spec);
    max_ratio = std::max(max_ratio, total / spec.budget);
    strongly = strongly && detail::nearly_equal(total, spec.budget);
    strictly_below = strictly_below && total < spec.budget;
    if (detail::exceeds(total, spec.budget) && r.passed()) {
      r.verdict = Verdict::kFail;
      r.witness = {{"n", n}, {"total", total}, {"budget", spec.budget}};
    }
  }
  r.details = {{"strongly_bb", strongly && r.passed()},
               {"strictly_below_budget", strictly_below},
               {"max_total_over_budget", max_ratio}};
  return r;
}

// x(i, n) >= rho * x(i+1, n) for all i < n <= n_max.
inline PropertyReport check_split(const MechanismSpec& spec,
                                  double rho_expected, int n_max = 50) {
  detail::require(rho_expected > 0.0 && rho_expected <= 1.0,
                  "rho must lie in (0, 1]");
  auto r = detail::start(Property::kSplitRho, spec);
  const int limit = detail::priced_limit(spec, n_max);
  r.domain = {{"n_max", limit}, {"rho", rho_expected}, {"alpha", spec.alpha}};
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (int n = 2; n <= limit; ++n) {
    for (int i = 1; i < n; ++i) {
      const double upper = reward(i, n, spec);
      const double lower = reward(i + 1, n, spec);
      const double ratio = upper / lower;
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      if (detail::exceeds(rho_expected * lower, upper) && r.passed()) {
        r.verdict = Verdict::kFail;
        r.witness = {{"i", i}, {"n", n}, {"ratio", ratio}};
      }
    }
  }
  if (limit >= 2) {
    r.details = {{"achieved_ratio_min", lo},
                 {"achieved_ratio_max", hi},
                 {"increasing_toward_root", lo > 1.0}};
  }
  return r;
}

// x(i, n) >= sum_{k=0..lambda} x(i+k, n+lambda), 1 <= i <= n <= n_max,
// 1 <= lambda <= lambda_max. Weak inequality; equality cases are reported.
inline PropertyReport check_sp(const MechanismSpec& spec, int lambda_max = 20,
                               int n_max = 50) {
  detail::require(lambda_max >= 1 && n_max >= 1, "scan bounds must be positive");
  auto r = detail::start(Property::kSybilProof, spec);
  const auto cap = max_path_length(spec);
  r.domain = {{"n_max", n_max}, {"lambda_max", lambda_max},
              {"alpha", spec.alpha}};
  std::map<std::pair<int, int>, int> smallest;  // (i, n) -> lambda
  nlohmann::json per_lambda = nlohmann::json::array();
  for (int lambda = 1; lambda <= lambda_max; ++lambda) {
    bool ok = true;
    bool any_equal = false;
    int checked = 0;
    double max_ratio = 0.0;
    for (int n = 1; n <= n_max; ++n) {
      if (cap && n + lambda > *cap) break;
      for (int i = 1; i <= n; ++i) {
        const AttackOutcome o = sybil_gain(spec, i, n, lambda);
        ++checked;
        max_ratio = std::max(max_ratio, o.ratio);
        if (detail::nearly_equal(o.reward_after, o.reward_before)) {
          any_equal = true;
        } else if (o.profitable) {
          ok = false;
          smallest.try_emplace({i, n}, lambda);
          if (r.passed()) {
            r.verdict = Verdict::kFail;
            r.witness = {{"i", i},
                         {"n", n},
                         {"lambda", lambda},
                         {"reward_before", o.reward_before},
                         {"reward_after", o.reward_after}};
          }
        }
      }
    }
    if (checked == 0) continue;
    per_lambda.push_back({{"lambda", lambda},
                          {"verdict", ok ? "pass" : "fail"},
                          {"equality", any_equal},
                          {"max_ratio", max_ratio}});
  }
  nlohmann::json first = nlohmann::json::array();
  for (const auto& [key, lambda] : smallest) {
    first.push_back({{"i", key.first}, {"n", key.second}, {"lambda", lambda}});
  }
  r.details = {{"per_lambda", per_lambda}, {"smallest_violating_lambda", first}};
  return r;
}

// x(i, n) <= sum_{k=0..gamma} x(i+k, n+gamma) for merged length n <= n_max,
// 1 <= gamma <= gamma_max. Merge size is gamma + 1.
inline PropertyReport check_cp(const MechanismSpec& spec, int gamma_max = 20,
                               int n_max = 50) {
  detail::require(gamma_max >= 1 && n_max >= 1, "scan bounds must be positive");
  auto r = detail::start(Property::kCollusionProof, spec);
  const auto cap = max_path_length(spec);
  r.domain = {{"n_max", n_max}, {"gamma_max", gamma_max},
              {"alpha", spec.alpha}};
  nlohmann::json per_gamma = nlohmann::json::array();
  for (int gamma = 1; gamma <= gamma_max; ++gamma) {
    bool ok = true;
    bool any_equal = false;
    int checked = 0;
    double max_ratio = 0.0;
    for (int n = 1; n <= n_max; ++n) {
      if (cap && n + gamma > *cap) break;
      for (int i = 1; i <= n; ++i) {
        const AttackOutcome o = collusion_gain(spec, i, n, gamma);
        ++checked;
        max_ratio = std::max(max_ratio, o.ratio);
        if (detail::nearly_equal(o.reward_after, o.reward_before)) {
          any_equal = true;
        } else if (o.profitable) {
          ok = false;
          if (r.passed()) {
            r.verdict = Verdict::kFail;
            r.witness = {{"i", i},
                         {"n", n},
                         {"gamma", gamma},
                         {"merge_size", gamma + 1},
                         {"reward_before", o.reward_before},
                         {"reward_after", o.reward_after}};
          }
        }
      }
    }
    if (checked == 0) continue;
    per_gamma.push_back({{"gamma", gamma},
                         {"merge_size", gamma + 1},
                         {"verdict", ok ? "pass" : "fail"},
                         {"equality", any_equal},
                         {"max_ratio", max_ratio}});
  }
  r.details = {{"per_gamma", per_gamma}};
  return r;
}

// Direction of the solver's reward x(n, n) in n. Asserted (non-increasing)
// only for the Sybil-proof schedule; other schedules are observed.
inline PropertyReport check_monotone_solver_reward(const MechanismSpec& spec,
                                                   int n_max = 50) {
  detail::require(n_max >= 2, "n_max must be at least 2");
  auto r = detail::start(Property::kMonotoneSolverReward, spec);
  const int limit = detail::priced_limit(spec, n_max);
  r.domain = {{"n_max", limit}, {"alpha", spec.alpha}};
  bool non_increasing = true;
  bool non_decreasing = true;
  bool strict = true;
  for (int n = 1; n < limit; ++n) {
    const double now = reward(n, n, spec);
    const double next = reward(n + 1, n + 1, spec);
    if (detail::exceeds(next, now)) non_increasing = false;
    if (detail::exceeds(now, next)) non_decreasing = false;
    if (detail::nearly_equal(now, next)) strict = false;
  }
  std::string direction = "mixed";
  if (non_increasing && non_decreasing) {
    direction = "constant";
  } else if (non_increasing) {
    direction = strict ? "strictly decreasing" : "non-increasing";
  } else if (non_decreasing) {
    direction = strict ? "strictly increasing" : "non-decreasing";
  }
  r.details = {{"direction", direction}, {"asserted", is_sp_schedule(spec)}};
  if (is_cp_schedule(spec)) {
    // The collusion-proof direction would be non-decreasing.
    r.details["cp_direction_observed"] = non_decreasing;
  }
  if (is_sp_schedule(spec) && !non_increasing) {
    r.verdict = Verdict::kFail;
    r.witness = {{"direction", direction}};
  }
  return r;
}

// ---------------------------------------------------------------------------
// Impossibility certificate
// ---------------------------------------------------------------------------

// rows[n - 1][i - 1] = x(i, n) for n = 1..N.
struct RewardTable {
  std::vector<std::vector<double>> rows;

  int max_n() const { return static_cast<int>(rows.size()); }
  double at(int i, int n) const { return rows[n - 1][i - 1]; }
};

inline RewardTable reward_table(const MechanismSpec& spec, int max_n) {
  RewardTable t;
  for (int n = 1; n <= max_n; ++n) t.rows.push_back(reward_vector(n, spec).rewards);
  return t;
}

// No positive table satisfies PO, SP at m = 1 and CP at m = 2 together: the
// two SP steps give x(i,n) >= x(i,n+2) + 2 x(i+1,n+2) + x(i+2,n+2), CP gives
// x(i,n) <= x(i,n+2) + x(i+1,n+2) + x(i+2,n+2), so x(i+1,n+2) <= 0. The
// report passes when at least one of the three fails, and names which.
inline PropertyReport impossibility_certificate(const RewardTable& table,
                                                const std::string& label = "table") {
  detail::require(table.max_n() >= 3, "table must cover n = 1..N with N >= 3");
  for (int n = 1; n <= table.max_n(); ++n) {
    detail::require(static_cast<int>(table.rows[n - 1].size()) == n,
                    "row " + std::to_string(n) + " must hold n entries");
    for (double v : table.rows[n - 1]) {
      detail::require(std::isfinite(v), "table entries must be finite");
    }
  }
  PropertyReport r;
  r.property = Property::kImpossibility;
  r.mechanism = label;
  r.domain = {{"max_n", table.max_n()}};

  nlohmann::json po_violation, sp_violation, cp_violation;
  for (int n = 1; n <= table.max_n() && po_violation.is_null(); ++n) {
    for (int i = 1; i <= n; ++i) {
      if (!(table.at(i, n) > 0.0)) {
        po_violation = {{"i", i}, {"n", n}, {"reward", table.at(i, n)}};
        break;
      }
    }
  }
  for (int n = 1; n + 1 <= table.max_n() && sp_violation.is_null(); ++n) {
    for (int i = 1; i <= n; ++i) {
      const double split = table.at(i, n + 1) + table.at(i + 1, n + 1);
      if (detail::exceeds(split, table.at(i, n))) {
        sp_violation = {{"i", i}, {"n", n}, {"lambda", 1},
                        {"reward_before", table.at(i, n)},
                        {"reward_after", split}};
        break;
      }
    }
  }
  for (int n = 1; n + 2 <= table.max_n() && cp_violation.is_null(); ++n) {
    for (int i = 1; i <= n; ++i) {
      const double apart =
          table.at(i, n + 2) + table.at(i + 1, n + 2) + table.at(i + 2, n + 2);
      if (detail::exceeds(table.at(i, n), apart)) {
        cp_violation = {{"i", i}, {"n", n}, {"gamma", 2},
                        {"merged", table.at(i, n)}, {"apart", apart}};
        break;
      }
    }
  }
  const double mid = table.at(2, 3);
  const double apart = table.at(1, 3) + mid + table.at(3, 3);
  r.details = {{"po_holds", po_violation.is_null()},
               {"sp_m1_holds", sp_violation.is_null()},
               {"cp_m2_holds", cp_violation.is_null()},
               {"certificate",
                {{"i", 1},
                 {"n", 1},
                 {"x_1_1", table.at(1, 1)},
                 {"sp_chain_lower_bound", apart + mid},
                 {"cp_upper_bound", apart},
                 {"x_middle", mid}}}};
  nlohmann::json failed = nlohmann::json::array();
  if (!po_violation.is_null()) failed.push_back({{"PO", po_violation}});
  if (!sp_violation.is_null()) failed.push_back({{"SP(m=1)", sp_violation}});
  if (!cp_violation.is_null()) failed.push_back({{"CP(m=2)", cp_violation}});
  r.witness = failed;
  if (failed.empty()) {
    // Unreachable for finite tables; kept so a bug here cannot read as a pass.
    r.verdict = Verdict::kFail;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Tree-level payoffs
// ---------------------------------------------------------------------------

// Expected reward of every agent in `tree` when agents report `profile`.
// Agents off every tied minimum-depth path get 0.
inline std::map<AgentId, double> expected_rewards(const QueryTree& tree,
                                                  const ReportProfile& profile,
                                                  const MechanismSpec& spec) {
  std::map<AgentId, double> out;
  for (AgentId id : tree.agents()) out[id] = 0.0;
  const QueryTree reported = derive_reported_tree(tree, profile);
  const auto tied = tied_allocations(reported);
  if (tied.empty()) return out;
  const int n = static_cast<int>(tied.front().n());
  const auto x = reward_vector(n, spec).rewards;
  const double share = 1.0 / static_cast<double>(tied.size());
  for (const auto& path : tied) {
    for (int k = 1; k <= n; ++k) out[path.agents[k]] += x[k - 1] * share;
  }
  return out;
}

namespace detail {

// Index-based copy of a small tree for enumeration. Index 0 is the root.
struct DenseTree {
  std::vector<AgentId> ids;
  std::vector<std::vector<int>> children;
  std::vector<bool> resp;

  explicit DenseTree(const QueryTree& tree) {
    std::map<AgentId, int> index;
    index[tree.root()] = 0;
    ids.push_back(tree.root());
    for (AgentId id : tree.agents()) {
      if (id == tree.root()) continue;
      index[id] = static_cast<int>(ids.size());
      ids.push_back(id);
    }
    children.resize(ids.size());
    resp.resize(ids.size());
    for (std::size_t k = 0; k < ids.size(); ++k) {
      resp[k] = tree.resp(ids[k]);
      for (AgentId c : tree.children(ids[k])) children[k].push_back(index[c]);
    }
  }

  int size() const { return static_cast<int>(ids.size()); }
};

// One agent's report: response bit plus a mask over its true children.
struct Choice {
  bool resp = false;
  std::uint32_t mask = 0;

  friend bool operator==(const Choice&, const Choice&) = default;
};

inline Choice truthful_choice(const DenseTree& t, int a) {
  return {t.resp[a], (1u << t.children[a].size()) - 1u};
}

inline std::vector<Choice> choices_of(const DenseTree& t, int a) {
  std::vector<Choice> out;
  const std::uint32_t masks = 1u << t.children[a].size();
  for (int r = 0; r <= (t.resp[a] ? 1 : 0); ++r) {
    for (std::uint32_t m = 0; m < masks; ++m) out.push_back({r == 1, m});
  }
  return out;
}

// Expected payoff per index; same semantics as expected_rewards().
inline std::vector<double> dense_payoffs(const DenseTree& t,
                                         const std::vector<Choice>& choice,
                                         const MechanismSpec& spec) {
  const int size = t.size();
  std::vector<int> parent(size, -1);
  std::vector<int> frontier{0};
  std::vector<int> solvers;
  int depth = 0;
  while (!frontier.empty() && solvers.empty()) {
    std::vector<int> next;
    for (int a : frontier) {
      if (a != 0 && choice[a].resp) solvers.push_back(a);
      for (std::size_t k = 0; k < t.children[a].size(); ++k) {
        if (choice[a].mask & (1u << k)) {
          parent[t.children[a][k]] = a;
          next.push_back(t.children[a][k]);
        }
      }
    }
    if (solvers.empty()) {
      frontier = std::move(next);
      ++depth;
    }
  }
  std::vector<double> pay(size, 0.0);
  if (solvers.empty()) return pay;
  const int n = depth;
  const auto x = reward_vector(n, spec).rewards;
  const double share = 1.0 / static_cast<double>(solvers.size());
  for (int s : solvers) {
    int pos = n;
    for (int a = s; a != 0; a = parent[a]) pay[a] += x[--pos] * share;
  }
  return pay;
}

inline Report to_report(const DenseTree& t, int a, Choice c) {
  Report r{c.resp, {}};
  for (std::size_t k = 0; k < t.children[a].size(); ++k) {
    if (c.mask & (1u << k)) r.children.push_back(t.ids[t.children[a][k]]);
  }
  return r;
}

inline nlohmann::json report_json(const Report& r) {
  nlohmann::json children = nlohmann::json::array();
  for (AgentId c : r.children) children.push_back(c.value);
  return {{"resp", r.resp ? 1 : 0}, {"children", children}};
}

}  // namespace detail

struct IcOptions {
  std::size_t node_cap = 10;
  bool include_off_path = false;  // let off-path gains decide the verdict too
};

// Every non-root agent, every feasible unilateral report, others truthful.
// The verdict covers agents on a truthful allocation path unless
// include_off_path is set; off-path gains are always counted in details.
inline PropertyReport check_ic(const QueryTree& tree, const MechanismSpec& spec,
                               const IcOptions& options = {}) {
  detail::require(tree.size() <= options.node_cap,
                  "IC enumeration is capped at " +
                      std::to_string(options.node_cap) + " nodes, tree has " +
                      std::to_string(tree.size()));
  auto r = detail::start(Property::kIC, spec);
  const detail::DenseTree t(tree);
  std::vector<detail::Choice> profile(t.size());
  for (int a = 0; a < t.size(); ++a) profile[a] = detail::truthful_choice(t, a);
  const auto truthful = detail::dense_payoffs(t, profile, spec);

  long deviations = 0;
  int on_path = 0;
  int off_path_gainers = 0;
  nlohmann::json off_path_witness;
  for (int a = 1; a < t.size(); ++a) {
    const bool listed = truthful[a] > 0.0;
    if (listed) ++on_path;
    const detail::Choice honest = profile[a];
    bool gained = false;
    for (const auto& c : detail::choices_of(t, a)) {
      if (c == honest) continue;
      ++deviations;
      profile[a] = c;
      const double got = detail::dense_payoffs(t, profile, spec)[a];
      profile[a] = honest;
      if (!detail::exceeds(got, truthful[a])) continue;
      const nlohmann::json w = {
          {"agent", t.ids[a].value},
          {"on_path", listed},
          {"deviation", detail::report_json(detail::to_report(t, a, c))},
          {"truthful_reward", truthful[a]},
          {"deviation_reward", got}};
      if (!listed && !gained) {
        ++off_path_gainers;
        if (off_path_witness.is_null()) off_path_witness = w;
      }
      gained = true;
      if ((listed || options.include_off_path) && r.passed()) {
        r.verdict = Verdict::kFail;
        r.witness = w;
      }
    }
  }
  r.domain = {{"nodes", tree.size()},
              {"agents_checked", t.size() - 1},
              {"on_path_agents", on_path},
              {"include_off_path", options.include_off_path},
              {"deviations", deviations},
              {"alpha", spec.alpha}};
  r.details = {{"off_path_gainers", off_path_gainers},
               {"off_path_witness", off_path_witness}};
  return r;
}

struct CoreOptions {
  std::size_t coalition_cap = 8;  // maximum tree size, root included
  int max_coalition_size = 0;     // 0 = no limit
};

// W(S) is the largest total expected reward the members of S can reach by any
// joint report, non-members truthful. The truthful outcome r is blocked by S
// when sum_{i in S} r_i < W(S). Pass iff no coalition S of non-root agents
// blocks.
inline PropertyReport check_core(const QueryTree& tree,
                                 const MechanismSpec& spec,
                                 const CoreOptions& options = {}) {
  detail::require(tree.size() <= options.coalition_cap,
                  "core enumeration is capped at " +
                      std::to_string(options.coalition_cap) +
                      " nodes, tree has " + std::to_string(tree.size()));
  auto r = detail::start(Property::kCore, spec);
  const detail::DenseTree t(tree);
  const int agents = t.size() - 1;  // coalition bit k <-> index k + 1
  const std::uint32_t all = (1u << agents) - 1u;
  const int size_limit = options.max_coalition_size > 0
                             ? options.max_coalition_size
                             : agents;

  std::vector<std::vector<detail::Choice>> options_of(t.size());
  std::vector<detail::Choice> honest(t.size());
  for (int a = 0; a < t.size(); ++a) {
    honest[a] = detail::truthful_choice(t, a);
    options_of[a] = a == 0 ? std::vector<detail::Choice>{honest[0]}
                           : detail::choices_of(t, a);
  }
  const auto truthful = detail::dense_payoffs(t, honest, spec);

  // best[S] and the profile achieving it.
  std::vector<double> best(all + 1u, -1.0);
  std::vector<std::vector<detail::Choice>> arg(all + 1u);
  std::vector<std::size_t> digit(t.size(), 0);
  std::vector<detail::Choice> profile = honest;
  long profiles = 0;
  for (;;) {
    std::uint32_t deviators = 0;
    for (int a = 1; a < t.size(); ++a) {
      profile[a] = options_of[a][digit[a]];
      if (!(profile[a] == honest[a])) deviators |= 1u << (a - 1);
    }
    if (std::popcount(deviators) <= size_limit) {
      ++profiles;
      const auto pay = detail::dense_payoffs(t, profile, spec);
      const std::uint32_t free = all & ~deviators;
      for (std::uint32_t extra = free;; extra = (extra - 1u) & free) {
        const std::uint32_t s = deviators | extra;
        if (s != 0 && std::popcount(s) <= size_limit) {
          double value = 0.0;
          for (int k = 0; k < agents; ++k) {
            if (s & (1u << k)) value += pay[k + 1];
          }
          if (value > best[s]) {
            best[s] = value;
            arg[s] = profile;
          }
        }
        if (extra == 0) break;
      }
    }
    int a = 1;
    while (a < t.size() && ++digit[a] == options_of[a].size()) digit[a++] = 0;
    if (a >= t.size()) break;
  }

  long blocking = 0;
  int witness_size = agents + 1;
  for (std::uint32_t s = 1; s <= all; ++s) {
    if (std::popcount(s) > size_limit) continue;
    double allocated = 0.0;
    for (int k = 0; k < agents; ++k) {
      if (s & (1u << k)) allocated += truthful[k + 1];
    }
    if (!detail::exceeds(best[s], allocated)) continue;
    ++blocking;
    if (std::popcount(s) >= witness_size) continue;
    witness_size = std::popcount(s);
    r.verdict = Verdict::kFail;
    nlohmann::json members = nlohmann::json::array();
    nlohmann::json deviation = nlohmann::json::object();
    for (int k = 0; k < agents; ++k) {
      if (!(s & (1u << k))) continue;
      const int a = k + 1;
      members.push_back(t.ids[a].value);
      if (!(arg[s][a] == honest[a])) {
        deviation[to_string(t.ids[a])] =
            detail::report_json(detail::to_report(t, a, arg[s][a]));
      }
    }
    r.witness = {{"coalition", members},
                 {"reports", deviation},
                 {"allocated", allocated},
                 {"coalition_value", best[s]}};
  }
  r.domain = {{"nodes", tree.size()},
              {"coalitions", static_cast<long>(all)},
              {"max_coalition_size", size_limit},
              {"profiles", profiles},
              {"alpha", spec.alpha}};
  r.details = {{"blocking_coalitions", blocking}};
  return r;
}

// Rebuilds the profile stored in a core or IC witness.
inline ReportProfile witness_profile(const nlohmann::json& reports) {
  ReportProfile p;
  for (const auto& [key, value] : reports.items()) {
    Report rep{value.at("resp").get<int>() == 1, {}};
    for (const auto& c : value.at("children")) {
      rep.children.push_back(AgentId{c.get<std::uint32_t>()});
    }
    p.reports[detail::parse_id_key(key, "witness")] = rep;
  }
  return p;
}

}  // namespace qinet

#endif  // QINET_AUDITOR_HPP
