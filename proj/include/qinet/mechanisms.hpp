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

// Geometric reward schedules over an allocation path of length n.
//
// Tree dependent geometric mechanism (TDGM):
//   x(i, n) = alpha^(n-i) * beta(n, budget),
//   0 < beta(n, budget) <= (1 - alpha) / (1 - alpha^n) * budget.
// The Sybil-proof schedule (DGM) takes beta = budget / (1 + alpha)^(n-1); the
// collusion-proof schedule (delta-GEOM) takes beta at its upper bound.
//
// Generalized contribution reward mechanism (GCRM):
//   x(i, n) = alpha^(n-i) / (1 + alpha)^i * budget.
//
// Positions run from 1 (the root's child) to n (the solver).

#ifndef QINET_MECHANISMS_HPP
#define QINET_MECHANISMS_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "qinet/error.hpp"
#include "qinet/querytree.hpp"

namespace qinet {

// alpha * (1 + alpha) == 1. GCRM pays every path agent alike here.
inline constexpr double kGoldenAlpha = 0.61803398874989484820;

inline constexpr double kIdentityTolerance = 1e-12;
inline constexpr double kSeriesTolerance = 1e-10;

enum class Family { kTdgm, kGcrm };

struct SpSchedule {
  friend bool operator==(const SpSchedule&, const SpSchedule&) = default;
};
struct CpSchedule {
  friend bool operator==(const CpSchedule&, const CpSchedule&) = default;
};
// beta(n, budget) given per path length. Covers n = 1..N contiguously.
struct BetaTable {
  std::map<int, double> values;
  friend bool operator==(const BetaTable&, const BetaTable&) = default;
};

using BetaSchedule = std::variant<SpSchedule, CpSchedule, BetaTable>;

// Plain aggregate so that deliberately broken schedules can be handed to the
// auditor. Use validate() or the factories below for checked construction.
struct MechanismSpec {
  Family family = Family::kTdgm;
  double alpha = 0.5;
  double budget = 1.0;
  BetaSchedule beta = SpSchedule{};  // ignored for GCRM, whose beta is the budget

  friend bool operator==(const MechanismSpec&, const MechanismSpec&) = default;
};

inline double beta_upper_bound(int n, double budget, double alpha) {
  return (1.0 - alpha) / (1.0 - std::pow(alpha, n)) * budget;
}

// DGM: (1 / (1 + alpha))^(n-1) * budget.
inline double beta_sp(int n, double budget, double alpha) {
  detail::require(n >= 1, "path length must be at least 1");
  return std::pow(1.0 / (1.0 + alpha), n - 1) * budget;
}

// delta-GEOM: the TDGM upper bound.
inline double beta_cp(int n, double budget, double alpha) {
  detail::require(n >= 1, "path length must be at least 1");
  return beta_upper_bound(n, budget, alpha);
}

inline bool is_sp_schedule(const MechanismSpec& s) {
  return s.family == Family::kTdgm && std::holds_alternative<SpSchedule>(s.beta);
}
inline bool is_cp_schedule(const MechanismSpec& s) {
  return s.family == Family::kTdgm && std::holds_alternative<CpSchedule>(s.beta);
}

inline std::string mechanism_name(const MechanismSpec& s) {
  if (s.family == Family::kGcrm) return "GCRM";
  if (is_sp_schedule(s)) return "DGM";
  if (is_cp_schedule(s)) return "delta-GEOM";
  return "TDGM";
}

// Longest path length the spec can price, or nullopt when unbounded.
inline std::optional<int> max_path_length(const MechanismSpec& s) {
  if (s.family == Family::kGcrm) return std::nullopt;
  const auto* table = std::get_if<BetaTable>(&s.beta);
  if (table == nullptr) return std::nullopt;
  int n = 0;
  while (table->values.count(n + 1) != 0) ++n;
  return n;
}

inline double tdgm_beta(int n, const MechanismSpec& s) {
  detail::require(n >= 1, "path length must be at least 1");
  if (std::holds_alternative<SpSchedule>(s.beta)) {
    return beta_sp(n, s.budget, s.alpha);
  }
  if (std::holds_alternative<CpSchedule>(s.beta)) {
    return beta_cp(n, s.budget, s.alpha);
  }
  const auto& table = std::get<BetaTable>(s.beta).values;
  auto it = table.find(n);
  detail::require(it != table.end(),
                  "beta table has no entry for n = " + std::to_string(n));
  return it->second;
}

namespace detail {

// a > b beyond relative rounding noise.
inline bool exceeds(double a, double b) {
  return a > b + kIdentityTolerance * std::max(std::abs(a), std::abs(b));
}

inline bool nearly_equal(double a, double b) {
  return std::abs(a - b) <=
         kIdentityTolerance * std::max(std::abs(a), std::abs(b));
}

inline void require_position(int i, int n) {
  require(n >= 1, "path length must be at least 1, got " + std::to_string(n));
  require(i >= 1 && i <= n, "position " + std::to_string(i) +
                                " outside 1.." + std::to_string(n));
}

}  // namespace detail

inline double tdgm_reward(int i, int n, const MechanismSpec& s) {
  detail::require(s.family == Family::kTdgm, "spec is not a TDGM spec");
  detail::require_position(i, n);
  return std::pow(s.alpha, n - i) * tdgm_beta(n, s);
}

inline double gcrm_reward(int i, int n, const MechanismSpec& s) {
  detail::require(s.family == Family::kGcrm, "spec is not a GCRM spec");
  detail::require_position(i, n);
  return std::pow(s.alpha, n - i) / std::pow(1.0 + s.alpha, i) * s.budget;
}

// x(i, n) under whichever family the spec names.
inline double reward(int i, int n, const MechanismSpec& s) {
  return s.family == Family::kTdgm ? tdgm_reward(i, n, s)
                                   : gcrm_reward(i, n, s);
}

struct RewardVector {
  std::vector<double> rewards;  // rewards[k] is position k + 1
  double total = 0.0;
};

inline RewardVector reward_vector(int n, const MechanismSpec& s) {
  detail::require(n >= 1, "path length must be at least 1");
  RewardVector v;
  v.rewards.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    v.rewards.push_back(reward(i, n, s));
    v.total += v.rewards.back();
  }
  return v;
}

inline RewardVector reward_vector(const AllocationPath& path,
                                  const MechanismSpec& s) {
  detail::require(path.agents.size() >= 2, "allocation path has no agents");
  return reward_vector(static_cast<int>(path.n()), s);
}

inline double total_reward_sum(int n, const MechanismSpec& s) {
  return reward_vector(n, s).total;
}

// Within this distance of alpha(1 + alpha) = 1 the GCRM closed forms lose
// digits to cancellation (and are 0/0 at the point itself), so callers sum.
inline constexpr double kGoldenBand = 1e-4;

inline bool near_golden(double alpha) {
  return std::abs(1.0 - alpha * (1.0 + alpha)) < kGoldenBand;
}

// Closed-form path total. The GCRM total
//   (1 - q^n) / ((1 + alpha)^n (1 - q)),  q = alpha (1 + alpha),
// is evaluated as ((1 + alpha)^-n - alpha^n) / (1 - q) to avoid overflow.
inline double total_reward_closed_form(int n, const MechanismSpec& s) {
  detail::require(n >= 1, "path length must be at least 1");
  const double a = s.alpha;
  if (s.family == Family::kTdgm) {
    return (1.0 - std::pow(a, n)) / (1.0 - a) * tdgm_beta(n, s);
  }
  if (near_golden(a)) return total_reward_sum(n, s);
  return (std::pow(1.0 + a, -n) - std::pow(a, n)) / (1.0 - a * (1.0 + a)) *
         s.budget;
}

// Throws InputError unless the spec satisfies its invariants, including the
// budget bound on every custom beta entry.
inline void validate(const MechanismSpec& s) {
  detail::require(s.alpha > 0.0 && s.alpha < 1.0,
                  "alpha must lie in (0, 1), got " + std::to_string(s.alpha));
  detail::require(s.budget > 0.0 && std::isfinite(s.budget),
                  "budget must be positive");
  if (s.family != Family::kTdgm) return;
  const auto* table = std::get_if<BetaTable>(&s.beta);
  if (table == nullptr) return;
  detail::require(!table->values.empty(), "beta table is empty");
  for (const auto& [n, beta] : table->values) {
    detail::require(n >= 1, "beta table key must be a path length >= 1");
    detail::require(table->values.count(n - 1) != 0 || n == 1,
                    "beta table must cover n = 1..N without gaps");
    const double bound = beta_upper_bound(n, s.budget, s.alpha);
    detail::require(beta > 0.0 && beta <= bound * (1.0 + kIdentityTolerance),
                    "beta(" + std::to_string(n) + ") = " +
                        std::to_string(beta) + " outside (0, " +
                        std::to_string(bound) + "]");
  }
}

inline MechanismSpec dgm(double alpha, double budget = 1.0) {
  MechanismSpec s{Family::kTdgm, alpha, budget, SpSchedule{}};
  validate(s);
  return s;
}

// DGM in its native parameterisation x = a^(n-i) (1-a)^(i-1) budget, which is
// TDGM with alpha = a / (1 - a).
inline MechanismSpec dgm_native(double alpha_dgm, double budget = 1.0) {
  detail::require(alpha_dgm > 0.0 && alpha_dgm < 0.5,
                  "native DGM alpha must lie in (0, 1/2)");
  return dgm(alpha_dgm / (1.0 - alpha_dgm), budget);
}

inline MechanismSpec delta_geom(double delta, double budget = 1.0) {
  MechanismSpec s{Family::kTdgm, delta, budget, CpSchedule{}};
  validate(s);
  return s;
}

inline MechanismSpec gcrm(double alpha, double budget = 1.0) {
  MechanismSpec s{Family::kGcrm, alpha, budget, SpSchedule{}};
  validate(s);
  return s;
}

inline MechanismSpec tdgm_table(double alpha, double budget,
                                std::map<int, double> table) {
  MechanismSpec s{Family::kTdgm, alpha, budget, BetaTable{std::move(table)}};
  validate(s);
  return s;
}

// Parameters that make DGM, delta-GEOM and GCRM all rho-split.
struct RhoMapping {
  double alpha_dgm;   // native DGM parameter rho / (1 + rho)
  double delta;       // delta-GEOM (and the TDGM alpha of both TDGM members)
  double alpha_gcrm;  // (sqrt(1 + 4 rho) - 1) / 2
};

inline RhoMapping map_rho(double rho) {
  detail::require(rho > 0.0 && rho <= 1.0,
                  "rho must lie in (0, 1], got " + std::to_string(rho));
  return {rho / (1.0 + rho), rho, (std::sqrt(1.0 + 4.0 * rho) - 1.0) / 2.0};
}

struct RhoMechanisms {
  MechanismSpec dgm;
  MechanismSpec delta_geom;
  MechanismSpec gcrm;
};

// rho = 1 leaves the TDGM members without a valid alpha, so it is GCRM only.
inline RhoMechanisms rho_mechanisms(double rho, double budget = 1.0) {
  const RhoMapping m = map_rho(rho);
  detail::require(rho < 1.0, "TDGM mechanisms need rho < 1");
  return {dgm_native(m.alpha_dgm, budget), delta_geom(m.delta, budget),
          gcrm(m.alpha_gcrm, budget)};
}

// {"family": "TDGM"|"GCRM", "alpha": a, "budget": b,
//  "beta": "sp"|"cp"|{"table": {"n": value}}}
inline nlohmann::json to_json(const MechanismSpec& s) {
  nlohmann::json j;
  j["family"] = s.family == Family::kTdgm ? "TDGM" : "GCRM";
  j["alpha"] = s.alpha;
  j["budget"] = s.budget;
  if (s.family == Family::kTdgm) {
    if (std::holds_alternative<SpSchedule>(s.beta)) {
      j["beta"] = "sp";
    } else if (std::holds_alternative<CpSchedule>(s.beta)) {
      j["beta"] = "cp";
    } else {
      nlohmann::json table = nlohmann::json::object();
      for (const auto& [n, v] : std::get<BetaTable>(s.beta).values) {
        table[std::to_string(n)] = v;
      }
      j["beta"] = {{"table", table}};
    }
  }
  return j;
}

inline MechanismSpec parse_mechanism_spec(const nlohmann::json& j) {
  detail::require(j.is_object(), "mechanism spec must be a JSON object");
  detail::require(j.contains("family") && j["family"].is_string(),
                  "mechanism spec lacks \"family\"");
  detail::require(j.contains("alpha") && j["alpha"].is_number(),
                  "mechanism spec lacks numeric \"alpha\"");
  MechanismSpec s;
  const std::string family = j["family"].get<std::string>();
  if (family == "TDGM") {
    s.family = Family::kTdgm;
  } else if (family == "GCRM") {
    s.family = Family::kGcrm;
  } else {
    throw InputError("unknown mechanism family \"" + family + "\"");
  }
  s.alpha = j["alpha"].get<double>();
  if (j.contains("budget")) {
    detail::require(j["budget"].is_number(), "\"budget\" must be a number");
    s.budget = j["budget"].get<double>();
  }
  if (s.family == Family::kTdgm) {
    detail::require(j.contains("beta"), "TDGM spec lacks \"beta\"");
    const auto& b = j["beta"];
    if (b == "sp") {
      s.beta = SpSchedule{};
    } else if (b == "cp") {
      s.beta = CpSchedule{};
    } else {
      detail::require(b.is_object() && b.contains("table") &&
                          b["table"].is_object(),
                      "\"beta\" must be \"sp\", \"cp\" or {\"table\": {...}}");
      BetaTable table;
      for (const auto& [key, value] : b["table"].items()) {
        detail::require(value.is_number(), "beta table values must be numbers");
        int n = 0;
        try {
          std::size_t used = 0;
          n = std::stoi(key, &used);
          detail::require(used == key.size(), "");
        } catch (const std::exception&) {
          throw InputError("beta table key \"" + key + "\" is not an integer");
        }
        table.values[n] = value.get<double>();
      }
      s.beta = std::move(table);
    }
  }
  validate(s);
  return s;
}

}  // namespace qinet

#endif  // QINET_MECHANISMS_HPP
