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

// Sybil and collusion attacks on an allocation path.
//
// A Sybil attacker at position i of a length-n path poses as lambda + 1
// consecutive identities and collects positions i..i+lambda of a length
// n+lambda path. Colluders do the reverse: gamma + 1 consecutive agents at
// positions i..i+gamma of a length n+gamma path present as one agent at
// position i of a length-n path. Mechanisms never see who controls which
// identity; that bookkeeping stays here.

#ifndef QINET_ADVERSARY_HPP
#define QINET_ADVERSARY_HPP

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "qinet/error.hpp"
#include "qinet/mechanisms.hpp"
#include "qinet/querytree.hpp"

namespace qinet {

enum class AttackKind { kSybil, kCollusion };

inline const char* to_string(AttackKind k) {
  return k == AttackKind::kSybil ? "sybil" : "collusion";
}

struct AttackOutcome {
  AttackKind kind = AttackKind::kSybil;
  int position = 1;
  int size = 1;  // lambda for Sybil, gamma + 1 (merged agents) for collusion
  int n = 1;     // honest path length (Sybil) or merged path length (collusion)
  double reward_before = 0.0;
  double reward_after = 0.0;
  double ratio = 0.0;
  bool profitable = false;  // after > before by more than rounding noise
};

namespace detail {

// sum_{k=0..extra} x(i+k, n+extra): the Sybil sum and the colluders'
// separate sum are the same quantity.
inline double spread_reward(const MechanismSpec& spec, int i, int n,
                            int extra) {
  double sum = 0.0;
  for (int k = 0; k <= extra; ++k) sum += reward(i + k, n + extra, spec);
  return sum;
}

inline AttackOutcome make_outcome(AttackKind kind, int i, int n, int size,
                                  double before, double after) {
  return {kind, i, size, n, before, after, after / before,
          exceeds(after, before)};
}

}  // namespace detail

inline AttackOutcome sybil_gain(const MechanismSpec& spec, int i, int n,
                                int lambda) {
  detail::require_position(i, n);
  detail::require(lambda >= 1, "lambda must be at least 1");
  const double before = reward(i, n, spec);
  const double after = detail::spread_reward(spec, i, n, lambda);
  return detail::make_outcome(AttackKind::kSybil, i, n, lambda, before, after);
}

inline AttackOutcome collusion_gain(const MechanismSpec& spec, int i,
                                    int n_merged, int gamma) {
  detail::require_position(i, n_merged);
  detail::require(gamma >= 1, "gamma must be at least 1");
  const double before = detail::spread_reward(spec, i, n_merged, gamma);
  const double after = reward(i, n_merged, spec);
  return detail::make_outcome(AttackKind::kCollusion, i, n_merged, gamma + 1,
                              before, after);
}

// {"kind": "sybil"|"collusion", "position": i, "size": k, "n": n}. For
// collusion, size counts merged agents (gamma + 1) and n is the merged length.
struct AttackScenario {
  AttackKind kind = AttackKind::kSybil;
  int position = 1;
  int size = 1;
  int n = 1;
};

inline AttackScenario parse_attack_scenario(const nlohmann::json& j) {
  detail::require(j.is_object(), "attack scenario must be a JSON object");
  for (const char* key : {"kind", "position", "size", "n"}) {
    detail::require(j.contains(key),
                    std::string("attack scenario lacks \"") + key + "\"");
  }
  detail::require(j["kind"].is_string(), "\"kind\" must be a string");
  AttackScenario s;
  const auto kind = j["kind"].get<std::string>();
  if (kind == "sybil") {
    s.kind = AttackKind::kSybil;
  } else if (kind == "collusion") {
    s.kind = AttackKind::kCollusion;
  } else {
    throw InputError("unknown attack kind \"" + kind + "\"");
  }
  for (const char* key : {"position", "size", "n"}) {
    detail::require(j[key].is_number_integer(),
                    std::string("\"") + key + "\" must be an integer");
  }
  s.position = j["position"].get<int>();
  s.size = j["size"].get<int>();
  s.n = j["n"].get<int>();
  return s;
}

inline AttackOutcome run_attack(const MechanismSpec& spec,
                                const AttackScenario& s) {
  if (s.kind == AttackKind::kSybil) {
    return sybil_gain(spec, s.position, s.n, s.size);
  }
  detail::require(s.size >= 2, "a collusion merges at least two agents");
  return collusion_gain(spec, s.position, s.n, s.size - 1);
}

inline nlohmann::json to_json(const AttackOutcome& o) {
  return {{"kind", to_string(o.kind)},
          {"position", o.position},
          {"size", o.size},
          {"n", o.n},
          {"reward_before", o.reward_before},
          {"reward_after", o.reward_after},
          {"ratio", o.ratio},
          {"profitable", o.profitable}};
}

struct SybilTree {
  QueryTree tree;
  std::map<AgentId, AgentId> principal;  // identity -> controlling agent
};

// Replaces `agent` by a chain agent -> s_1 -> ... -> s_lambda of identities it
// controls. The agent keeps its parent edge; its children hang off s_lambda,
// which also takes over the response bit.
inline SybilTree apply_sybil_to_tree(const QueryTree& tree, AgentId agent,
                                     int lambda) {
  detail::require(tree.contains(agent),
                  "agent " + to_string(agent) + " is not in the tree");
  detail::require(agent != tree.root(), "the owner cannot mount a Sybil attack");
  detail::require(lambda >= 1, "lambda must be at least 1");

  SybilTree out{tree, {}};
  for (AgentId id : tree.agents()) out.principal[id] = id;

  std::vector<AgentId> chain{agent};
  AgentId next = tree.next_free_id();
  for (int k = 0; k < lambda; ++k) {
    chain.push_back(next);
    out.principal[next] = agent;
    next.value++;
  }

  std::vector<Edge> edges;
  for (const Edge& e : tree.edges()) {
    edges.push_back(e.parent == agent ? Edge{chain.back(), e.child} : e);
  }
  for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
    edges.push_back({chain[k], chain[k + 1]});
  }
  auto resp = tree.responses();
  resp[chain.back()] = resp[agent];
  resp[agent] = false;
  out.tree = QueryTree::build(tree.root(), edges, resp);
  return out;
}

}  // namespace qinet

#endif  // QINET_ADVERSARY_HPP
