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

// Query trees, report profiles and shortest-path task allocation.
//
// A query tree is rooted at the task owner. An edge parent -> child means the
// parent informed the child of the task. Every non-root agent carries a true
// response bit (can it solve the task). Agents report a response and a subset
// of their children; the reported tree is what the mechanism sees.

#ifndef QINET_QUERYTREE_HPP
#define QINET_QUERYTREE_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qinet/error.hpp"
#include "qinet/rng.hpp"

namespace qinet {

struct AgentId {
  std::uint32_t value = 0;

  friend auto operator<=>(const AgentId&, const AgentId&) = default;
};

inline std::string to_string(AgentId id) { return std::to_string(id.value); }

struct Edge {
  AgentId parent;
  AgentId child;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct TrueType {
  bool resp = false;
  std::vector<AgentId> children;  // ascending

  friend bool operator==(const TrueType&, const TrueType&) = default;
};

class QueryTree {
 public:
  // Builds and validates a tree. Every child has exactly one parent, nobody
  // points at the root, and every node is reachable from the root. Nodes
  // absent from `resp` cannot solve. The root's response is cleared: the
  // owner never solves the task itself.
  static QueryTree build(AgentId root, const std::vector<Edge>& edges,
                         const std::map<AgentId, bool>& resp = {}) {
    QueryTree tree;
    tree.root_ = root;
    tree.nodes_[root];
    for (const Edge& e : edges) {
      detail::require(e.child != root, "root " + to_string(root) +
                                            " cannot be a child (edge " +
                                            to_string(e.parent) + "->" +
                                            to_string(e.child) + ")");
      detail::require(e.child != e.parent,
                      "self-loop at agent " + to_string(e.child));
      Node& child = tree.nodes_[e.child];
      detail::require(!child.parent.has_value(),
                      "agent " + to_string(e.child) + " has two parents");
      child.parent = e.parent;
      tree.nodes_[e.parent].type.children.push_back(e.child);
    }
    for (auto& [id, node] : tree.nodes_) {
      std::sort(node.type.children.begin(), node.type.children.end());
    }
    for (const auto& [id, can_solve] : resp) {
      auto it = tree.nodes_.find(id);
      detail::require(it != tree.nodes_.end(),
                      "response given for unknown agent " + to_string(id));
      it->second.type.resp = can_solve && id != root;
    }
    // Reachability also rules out cycles: a cycle detached from the root
    // would leave its members unreached.
    const auto depth = tree.depths();
    detail::require(depth.size() == tree.nodes_.size(),
                    "query tree is not connected to its root");
    return tree;
  }

  AgentId root() const { return root_; }
  std::size_t size() const { return nodes_.size(); }
  bool contains(AgentId id) const { return nodes_.count(id) != 0; }

  const TrueType& type(AgentId id) const { return node(id).type; }
  const std::vector<AgentId>& children(AgentId id) const {
    return node(id).type.children;
  }
  bool resp(AgentId id) const { return node(id).type.resp; }
  std::optional<AgentId> parent(AgentId id) const { return node(id).parent; }

  std::vector<AgentId> agents() const {
    std::vector<AgentId> out;
    out.reserve(nodes_.size());
    for (const auto& [id, n] : nodes_) out.push_back(id);
    return out;
  }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (const auto& [id, n] : nodes_) {
      for (AgentId c : n.type.children) out.push_back({id, c});
    }
    return out;
  }

  std::map<AgentId, bool> responses() const {
    std::map<AgentId, bool> out;
    for (const auto& [id, n] : nodes_) out[id] = n.type.resp;
    return out;
  }

  // Depth of every node reachable from the root (root = 0).
  std::map<AgentId, std::size_t> depths() const {
    std::map<AgentId, std::size_t> depth;
    std::deque<AgentId> queue{root_};
    depth[root_] = 0;
    while (!queue.empty()) {
      const AgentId at = queue.front();
      queue.pop_front();
      for (AgentId c : nodes_.at(at).type.children) {
        if (depth.count(c) != 0) continue;
        depth[c] = depth[at] + 1;
        queue.push_back(c);
      }
    }
    return depth;
  }

  AgentId next_free_id() const {
    return AgentId{nodes_.rbegin()->first.value + 1};
  }

  friend bool operator==(const QueryTree&, const QueryTree&) = default;

 private:
  struct Node {
    std::optional<AgentId> parent;
    TrueType type;

    friend bool operator==(const Node&, const Node&) = default;
  };

  const Node& node(AgentId id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) {
      throw InputError("agent " + to_string(id) + " is not in the tree");
    }
    return it->second;
  }

  AgentId root_{};
  std::map<AgentId, Node> nodes_;
};

// θ'_i = (resp'_i, c'_i).
struct Report {
  bool resp = false;
  std::vector<AgentId> children;

  friend bool operator==(const Report&, const Report&) = default;
};

// Reported actions keyed by agent. Agents without an entry report truthfully.
struct ReportProfile {
  std::map<AgentId, Report> reports;

  static ReportProfile truthful(const QueryTree& tree) {
    ReportProfile p;
    for (AgentId id : tree.agents()) {
      p.reports[id] = Report{tree.resp(id), tree.children(id)};
    }
    return p;
  }

  Report report_of(const QueryTree& tree, AgentId id) const {
    auto it = reports.find(id);
    if (it != reports.end()) return it->second;
    return Report{tree.resp(id), tree.children(id)};
  }
};

// Throws InputError unless every report is feasible: an agent cannot claim a
// solution it does not have and cannot invite a non-child.
inline void validate_profile(const QueryTree& tree,
                             const ReportProfile& profile) {
  for (const auto& [id, report] : profile.reports) {
    detail::require(tree.contains(id),
                    "report for unknown agent " + to_string(id));
    detail::require(!report.resp || tree.resp(id) || id == tree.root(),
                    "agent " + to_string(id) + " reports a solution it lacks");
    const auto& truth = tree.children(id);
    std::vector<AgentId> sorted = report.children;
    std::sort(sorted.begin(), sorted.end());
    detail::require(
        std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
        "agent " + to_string(id) + " lists a child twice");
    detail::require(std::includes(truth.begin(), truth.end(), sorted.begin(),
                                  sorted.end()),
                    "agent " + to_string(id) + " reports a non-child");
  }
}

// T_r(θ'): nodes reachable from the root along reported edges only. The
// response bits of the result are the reported ones.
inline QueryTree derive_reported_tree(const QueryTree& tree,
                                      const ReportProfile& profile) {
  validate_profile(tree, profile);
  std::vector<Edge> edges;
  std::map<AgentId, bool> resp;
  std::deque<AgentId> queue{tree.root()};
  while (!queue.empty()) {
    const AgentId at = queue.front();
    queue.pop_front();
    const Report r = profile.report_of(tree, at);
    resp[at] = r.resp;
    for (AgentId c : r.children) {
      edges.push_back({at, c});
      queue.push_back(c);
    }
  }
  return QueryTree::build(tree.root(), edges, resp);
}

// Root-to-solver path [root, a_1, ..., a_n]. Positions are 1-based along the
// path; the solver sits at position n.
struct AllocationPath {
  std::vector<AgentId> agents;

  std::size_t n() const { return agents.size() - 1; }
  AgentId solver() const { return agents.back(); }

  std::optional<std::size_t> position_of(AgentId id) const {
    for (std::size_t k = 1; k < agents.size(); ++k) {
      if (agents[k] == id) return k;
    }
    return std::nullopt;
  }

  friend bool operator==(const AllocationPath&, const AllocationPath&) = default;
};

inline AllocationPath path_to(const QueryTree& tree, AgentId target) {
  AllocationPath p;
  for (std::optional<AgentId> at = target; at; at = tree.parent(*at)) {
    p.agents.push_back(*at);
  }
  std::reverse(p.agents.begin(), p.agents.end());
  return p;
}

// Every minimum-depth solver path, ordered by solver id. Empty when nobody
// reachable reports a solution.
inline std::vector<AllocationPath> tied_allocations(const QueryTree& reported) {
  const auto depth = reported.depths();
  std::size_t best = 0;
  std::vector<AgentId> solvers;
  for (const auto& [id, d] : depth) {
    if (id == reported.root() || !reported.resp(id)) continue;
    if (solvers.empty() || d < best) {
      best = d;
      solvers.assign(1, id);
    } else if (d == best) {
      solvers.push_back(id);
    }
  }
  std::vector<AllocationPath> out;
  out.reserve(solvers.size());
  for (AgentId s : solvers) out.push_back(path_to(reported, s));
  return out;
}

// Shortest-path allocation. Ties between minimum-depth solvers are broken
// uniformly using an engine seeded with `seed`. std::nullopt is the
// no-solver outcome: nothing reachable reports a solution and nobody is paid.
inline std::optional<AllocationPath> allocate(const QueryTree& reported,
                                              std::uint64_t seed) {
  auto tied = tied_allocations(reported);
  if (tied.empty()) return std::nullopt;
  Rng rng = make_rng(seed);
  return tied[uniform_below(rng, tied.size())];
}

enum class ChildLaw { kPoisson, kFixed };

struct RandomTreeParams {
  int max_depth = 3;
  double branching_mean = 1.5;
  double solver_probability = 0.3;
  std::uint64_t seed = 0;
  // kPoisson draws Poisson(branching_mean) children per node, truncated at
  // max_children. kFixed gives every node round(branching_mean) children.
  ChildLaw law = ChildLaw::kPoisson;
  int max_children = 4;
  // 0 means unbounded. Generation stops adding children once reached.
  std::size_t max_nodes = 0;
};

// Branching-process fixture. Nodes are numbered in BFS order from root 0.
// For each dequeued node the response draw (non-root only) precedes the
// child-count draw.
inline QueryTree generate_random_tree(const RandomTreeParams& params) {
  detail::require(params.max_depth >= 1, "max_depth must be at least 1");
  detail::require(params.branching_mean > 0 &&
                      std::isfinite(params.branching_mean),
                  "branching_mean must be positive");
  detail::require(params.solver_probability >= 0 &&
                      params.solver_probability <= 1,
                  "solver_probability must lie in [0, 1]");
  detail::require(params.max_children >= 1, "max_children must be positive");

  Rng rng = make_rng(params.seed);
  const AgentId root{0};
  std::vector<Edge> edges;
  std::map<AgentId, bool> resp;
  std::uint32_t next = 1;
  std::deque<std::pair<AgentId, int>> queue{{root, 0}};
  while (!queue.empty()) {
    const auto [at, depth] = queue.front();
    queue.pop_front();
    if (at != root) resp[at] = bernoulli(rng, params.solver_probability);
    if (depth >= params.max_depth) continue;
    int count = params.law == ChildLaw::kFixed
                    ? static_cast<int>(std::lround(params.branching_mean))
                    : poisson(rng, params.branching_mean);
    count = std::min(count, params.max_children);
    for (int k = 0; k < count; ++k) {
      if (params.max_nodes != 0 && next >= params.max_nodes) break;
      const AgentId child{next++};
      edges.push_back({at, child});
      queue.push_back({child, depth + 1});
    }
  }
  return QueryTree::build(root, edges, resp);
}

// ---------------------------------------------------------------------------
// JSON documents:
//   {"root": id, "edges": [[parent, child], ...], "resp": {"id": 0|1},
//    "reports": {"id": {"resp": 0|1, "children": [id, ...]}}}
// ---------------------------------------------------------------------------

struct TreeDocument {
  QueryTree tree;
  ReportProfile profile;
};

namespace detail {

inline AgentId parse_id(const nlohmann::json& j, const std::string& where) {
  require(j.is_number_unsigned() ||
              (j.is_number_integer() && j.get<std::int64_t>() >= 0),
          where + ": agent ids must be non-negative integers");
  const auto v = j.get<std::uint64_t>();
  require(v <= UINT32_MAX, where + ": agent id out of range");
  return AgentId{static_cast<std::uint32_t>(v)};
}

inline AgentId parse_id_key(const std::string& key, const std::string& where) {
  std::uint32_t v = 0;
  const auto* end = key.data() + key.size();
  auto [ptr, ec] = std::from_chars(key.data(), end, v);
  require(ec == std::errc() && ptr == end && !key.empty(),
          where + ": bad agent id key '" + key + "'");
  return AgentId{v};
}

inline bool parse_bit(const nlohmann::json& j, const std::string& where) {
  if (j.is_boolean()) return j.get<bool>();
  require(j.is_number_integer() &&
              (j.get<std::int64_t>() == 0 || j.get<std::int64_t>() == 1),
          where + ": expected 0 or 1");
  return j.get<std::int64_t>() == 1;
}

}  // namespace detail

inline TreeDocument parse_tree_document(const nlohmann::json& doc) {
  detail::require(doc.is_object(), "tree document must be a JSON object");
  detail::require(doc.contains("root"), "tree document lacks \"root\"");
  const AgentId root = detail::parse_id(doc.at("root"), "root");
  std::vector<Edge> edges;
  if (doc.contains("edges")) {
    detail::require(doc.at("edges").is_array(), "\"edges\" must be an array");
    for (const auto& e : doc.at("edges")) {
      detail::require(e.is_array() && e.size() == 2,
                      "each edge must be [parent, child]");
      edges.push_back({detail::parse_id(e[0], "edge"),
                       detail::parse_id(e[1], "edge")});
    }
  }
  std::map<AgentId, bool> resp;
  if (doc.contains("resp")) {
    detail::require(doc.at("resp").is_object(), "\"resp\" must be an object");
    for (const auto& [key, value] : doc.at("resp").items()) {
      resp[detail::parse_id_key(key, "resp")] = detail::parse_bit(value, "resp");
    }
  }
  TreeDocument out{QueryTree::build(root, edges, resp), {}};
  if (doc.contains("reports")) {
    detail::require(doc.at("reports").is_object(),
                    "\"reports\" must be an object");
    for (const auto& [key, value] : doc.at("reports").items()) {
      const AgentId id = detail::parse_id_key(key, "reports");
      detail::require(value.is_object(), "each report must be an object");
      Report r = out.profile.report_of(out.tree, id);
      if (value.contains("resp")) r.resp = detail::parse_bit(value["resp"], "report resp");
      if (value.contains("children")) {
        r.children.clear();
        for (const auto& c : value["children"]) {
          r.children.push_back(detail::parse_id(c, "report children"));
        }
      }
      out.profile.reports[id] = r;
    }
    validate_profile(out.tree, out.profile);
  }
  return out;
}

inline nlohmann::json to_json(const QueryTree& tree,
                              const ReportProfile* profile = nullptr) {
  nlohmann::json doc;
  doc["root"] = tree.root().value;
  doc["edges"] = nlohmann::json::array();
  for (const Edge& e : tree.edges()) {
    doc["edges"].push_back({e.parent.value, e.child.value});
  }
  doc["resp"] = nlohmann::json::object();
  for (const auto& [id, r] : tree.responses()) {
    if (id != tree.root()) doc["resp"][to_string(id)] = r ? 1 : 0;
  }
  if (profile != nullptr && !profile->reports.empty()) {
    doc["reports"] = nlohmann::json::object();
    for (const auto& [id, r] : profile->reports) {
      nlohmann::json children = nlohmann::json::array();
      for (AgentId c : r.children) children.push_back(c.value);
      doc["reports"][to_string(id)] = {{"resp", r.resp ? 1 : 0},
                                       {"children", children}};
    }
  }
  return doc;
}

inline nlohmann::json to_json(const AllocationPath& path) {
  nlohmann::json agents = nlohmann::json::array();
  for (AgentId a : path.agents) agents.push_back(a.value);
  return {{"path", agents}, {"n", path.n()}, {"solver", path.solver().value}};
}

}  // namespace qinet

#endif  // QINET_QUERYTREE_HPP
