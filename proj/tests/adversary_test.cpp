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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "qinet/adversary.hpp"
#include "qinet/analytics.hpp"

namespace qinet {
namespace {

std::vector<double> alpha_grid() {
  std::vector<double> g;
  for (int k = 5; k <= 95; k += 5) g.push_back(k / 100.0);
  return g;
}

AgentId id(std::uint32_t v) { return AgentId{v}; }

TEST(SybilGain, DgmSingleSplitIsNeutral) {
  for (double a : alpha_grid()) {
    for (int n = 1; n <= 20; ++n) {
      for (int i = 1; i <= n; ++i) {
        const auto o = sybil_gain(dgm(a), i, n, 1);
        EXPECT_NEAR(o.ratio, 1.0, 1e-12);
      }
    }
  }
}

TEST(SybilGain, DgmNeverProfitable) {
  for (double a : alpha_grid()) {
    for (int n = 1; n <= 12; ++n) {
      for (int i = 1; i <= n; ++i) {
        for (int l = 2; l <= 20; ++l) {
          const auto o = sybil_gain(dgm(a), i, n, l);
          EXPECT_LE(o.ratio, 1.0 + 1e-12);
          EXPECT_FALSE(o.profitable);
        }
      }
    }
  }
}

TEST(SybilGain, GcrmHalfExample) {
  const auto o = sybil_gain(gcrm(0.5), 1, 2, 1);
  EXPECT_NEAR(o.ratio, 7.0 / 6.0, 1e-15);
  EXPECT_TRUE(o.profitable);
  EXPECT_EQ(o.kind, AttackKind::kSybil);
  EXPECT_EQ(o.size, 1);
  EXPECT_NEAR(o.reward_before, 1.0 / 3.0, 1e-15);
}

TEST(SybilGain, GcrmRatioIsSybilFactor) {
  for (double a : alpha_grid()) {
    for (int l = 1; l <= 10; ++l) {
      for (int n = 1; n <= 8; ++n) {
        for (int i = 1; i <= n; ++i) {
          EXPECT_NEAR(sybil_gain(gcrm(a), i, n, l).ratio, sybil_factor(a, l),
                      1e-10 * sybil_factor(a, l));
        }
      }
    }
  }
}

TEST(SybilGain, RejectsBadInput) {
  EXPECT_THROW(sybil_gain(gcrm(0.5), 0, 2, 1), InputError);
  EXPECT_THROW(sybil_gain(gcrm(0.5), 3, 2, 1), InputError);
  EXPECT_THROW(sybil_gain(gcrm(0.5), 1, 2, 0), InputError);
  EXPECT_THROW(collusion_gain(gcrm(0.5), 1, 2, 0), InputError);
}

TEST(SybilGain, TwoSingleSplitsEqualOneDoubleSplit) {
  for (const auto& s : {dgm(0.4), delta_geom(0.6), gcrm(0.5)}) {
    for (int n = 1; n <= 10; ++n) {
      for (int i = 1; i <= n; ++i) {
        // Split at i; then the second identity (now at i + 1 on n + 1) splits.
        const double composed =
            reward(i, n + 2, s) + sybil_gain(s, i + 1, n + 1, 1).reward_after;
        EXPECT_NEAR(composed, sybil_gain(s, i, n, 2).reward_after, 1e-15);
      }
    }
  }
}

TEST(CollusionGain, MirrorsSybilBookkeeping) {
  for (const auto& s : {dgm(0.4), delta_geom(0.6), gcrm(0.5)}) {
    for (int n = 1; n <= 10; ++n) {
      for (int i = 1; i <= n; ++i) {
        for (int k = 1; k <= 6; ++k) {
          const auto sy = sybil_gain(s, i, n, k);
          const auto co = collusion_gain(s, i, n, k);
          EXPECT_EQ(sy.reward_after, co.reward_before);
          EXPECT_EQ(sy.reward_before, co.reward_after);
          EXPECT_EQ(co.size, k + 1);
        }
      }
    }
  }
}

TEST(CollusionGain, DeltaGeomNeverProfitable) {
  for (double a : alpha_grid()) {
    for (int n = 1; n <= 12; ++n) {
      for (int i = 1; i <= n; ++i) {
        for (int g = 1; g <= 20; ++g) {
          const auto o = collusion_gain(delta_geom(a), i, n, g);
          EXPECT_LE(o.reward_after, o.reward_before * (1 + 1e-12));
        }
      }
    }
  }
}

TEST(CollusionGain, DgmPairMergeIsNeutral) {
  for (double a : alpha_grid()) {
    for (int n = 1; n <= 20; ++n) {
      for (int i = 1; i <= n; ++i) {
        EXPECT_NEAR(collusion_gain(dgm(a), i, n, 1).ratio, 1.0, 1e-12);
      }
    }
  }
}

TEST(CollusionGain, DgmLargerMergesProfit) {
  for (double a : alpha_grid()) {
    for (int n = 1; n <= 10; ++n) {
      for (int i = 1; i <= n; ++i) {
        for (int g = 2; g <= 10; ++g) {
          EXPECT_TRUE(collusion_gain(dgm(a), i, n, g).profitable);
        }
      }
    }
  }
}

// profitable means merged > separate. At alpha = 0.5 merging 2 or 3 agents
// loses (ratio 1 / f < 1 for lambda < 3) and merging 4 or more gains.
TEST(CollusionGain, GcrmHalfThresholdAtFour) {
  const auto s = gcrm(0.5);
  for (int n = 1; n <= 10; ++n) {
    for (int i = 1; i <= n; ++i) {
      EXPECT_FALSE(run_attack(s, {AttackKind::kCollusion, i, 2, n}).profitable);
      EXPECT_FALSE(run_attack(s, {AttackKind::kCollusion, i, 3, n}).profitable);
      for (int size = 4; size <= 10; ++size) {
        const auto o = run_attack(s, {AttackKind::kCollusion, i, size, n});
        EXPECT_TRUE(o.profitable);
        EXPECT_NEAR(o.ratio, 1.0 / sybil_factor(0.5, size - 1), 1e-12);
      }
    }
  }
}

TEST(AttackScenario, ParseAndRun) {
  const auto sc = parse_attack_scenario(nlohmann::json::parse(
      R"({"kind": "sybil", "position": 1, "size": 1, "n": 2})"));
  EXPECT_EQ(sc.kind, AttackKind::kSybil);
  const auto o = run_attack(gcrm(0.5), sc);
  EXPECT_NEAR(o.ratio, 7.0 / 6.0, 1e-15);
  const auto j = to_json(o);
  EXPECT_EQ(j["kind"], "sybil");
  EXPECT_EQ(j["profitable"], true);

  const auto co = parse_attack_scenario(nlohmann::json::parse(
      R"({"kind": "collusion", "position": 2, "size": 2, "n": 3})"));
  EXPECT_NEAR(run_attack(dgm(0.6), co).ratio, 1.0, 1e-12);
  EXPECT_THROW(run_attack(dgm(0.6), {AttackKind::kCollusion, 1, 1, 3}),
               InputError);
}

TEST(AttackScenario, RejectsJunk) {
  for (const char* bad : {
           R"([])",
           R"({"kind": "sybil", "position": 1, "size": 1})",
           R"({"kind": "bribe", "position": 1, "size": 1, "n": 1})",
           R"({"kind": 3, "position": 1, "size": 1, "n": 1})",
           R"({"kind": "sybil", "position": 1.5, "size": 1, "n": 1})",
       }) {
    EXPECT_THROW(parse_attack_scenario(nlohmann::json::parse(bad)), InputError)
        << bad;
  }
}

TEST(SybilTree, LeafSolverMovesDown) {
  const auto t = QueryTree::build(id(0), {{id(0), id(1)}, {id(1), id(2)}},
                                  {{id(2), true}});
  const auto st = apply_sybil_to_tree(t, id(2), 1);
  EXPECT_EQ(st.tree.size(), t.size() + 1);
  const auto p = allocate(st.tree, 0);
  ASSERT_TRUE(p.has_value());
  EXPECT_EQ(p->n(), 3u);
  EXPECT_EQ(st.principal.at(p->solver()), id(2));
  EXPECT_FALSE(st.tree.resp(id(2)));
}

TEST(SybilTree, NodeCountAndChildrenMove) {
  const auto t = generate_random_tree({3, 2.0, 0.4, 5, ChildLaw::kFixed, 4, 0});
  for (int lambda = 1; lambda <= 4; ++lambda) {
    const AgentId victim = t.children(t.root())[0];
    const auto st = apply_sybil_to_tree(t, victim, lambda);
    EXPECT_EQ(st.tree.size(), t.size() + lambda);
    const AgentId last{t.next_free_id().value + lambda - 1};
    EXPECT_EQ(st.tree.parent(last), lambda == 1 ? victim : AgentId{last.value - 1});
    EXPECT_EQ(st.tree.children(last), t.children(victim));
    EXPECT_EQ(st.tree.resp(last), t.resp(victim));
    EXPECT_EQ(st.tree.depths().at(last), t.depths().at(victim) + lambda);
    int owned = 0;
    for (const auto& [who, principal] : st.principal) {
      if (principal == victim) ++owned;
    }
    EXPECT_EQ(owned, lambda + 1);
  }
}

TEST(SybilTree, HonestSiblingWinsAfterAttack) {
  // Two solvers at depth 2; the attacker's branch grows by lambda.
  const auto t = QueryTree::build(
      id(0), {{id(0), id(1)}, {id(1), id(2)}, {id(0), id(3)}, {id(3), id(4)}},
      {{id(2), true}, {id(4), true}});
  EXPECT_EQ(tied_allocations(t).size(), 2u);
  for (int lambda = 1; lambda <= 3; ++lambda) {
    const auto st = apply_sybil_to_tree(t, id(2), lambda);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto p = allocate(st.tree, seed);
      EXPECT_EQ(p->solver(), id(4));
      EXPECT_EQ(p->n(), 2u);
    }
    const auto alone = QueryTree::build(id(0), {{id(0), id(1)}, {id(1), id(2)}},
                                        {{id(2), true}});
    EXPECT_EQ(allocate(apply_sybil_to_tree(alone, id(2), lambda).tree, 0)->n(),
              2u + lambda);
  }
}

TEST(SybilTree, RejectsRootAndStrangers) {
  const auto t = QueryTree::build(id(0), {{id(0), id(1)}}, {{id(1), true}});
  EXPECT_THROW(apply_sybil_to_tree(t, id(0), 1), InputError);
  EXPECT_THROW(apply_sybil_to_tree(t, id(5), 1), InputError);
  EXPECT_THROW(apply_sybil_to_tree(t, id(1), 0), InputError);
}

}  // namespace
}  // namespace qinet
