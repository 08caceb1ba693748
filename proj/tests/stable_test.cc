// Copyright 2026 The unimod Authors
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
#include <vector>

#include <gtest/gtest.h>

#include "oracles.h"
#include "unimod/error.h"
#include "unimod/generators.h"
#include "unimod/stable.h"
#include "unimod/transport.h"

namespace unimod {
namespace {

using Q = Rational;

MarkedNetwork edge() { return path_network(2); }

TEST(ApplicationStepTest, EdgeExampleStageOne) {
  auto s0 = initial_state<Q>(edge(), {Q(1), Q(1)}, {Q(2), Q(0)});
  auto s1 = application_step(s0);
  EXPECT_EQ(s1.application_radius[0], 0);
  EXPECT_EQ(s1.application_fraction[0], Q(1, 2));
  EXPECT_EQ(s1.applied(0, 0), Q(1));
  EXPECT_EQ(s1.application_radius[1], 1);
  EXPECT_EQ(s1.applied(1, 0), Q(1));
  EXPECT_EQ(s1.applied(1, 1), Q(0));
}

TEST(ApplicationStepTest, ZeroDemandAppliesNothingNew) {
  auto s0 = initial_state<Q>(path_network(3), {Q(0), Q(1), Q(0)}, {Q(1), Q(1), Q(1)});
  auto s1 = application_step(s0);
  EXPECT_EQ(s1.application_radius[0], 0);
  for (int xi = 0; xi < 3; ++xi) EXPECT_EQ(s1.applied(0, xi), s0.rejected(0, xi));
}

TEST(ApplicationStepTest, UnreachableDemandAppliesEverywhere) {
  auto s0 = initial_state<Q>(path_network(3), {Q(5), Q(0), Q(0)}, {Q(1), Q(1), Q(1)});
  auto s1 = application_step(s0);
  EXPECT_EQ(s1.application_radius[0], 2);
  for (int xi = 0; xi < 3; ++xi) EXPECT_EQ(s1.applied(0, xi), Q(1));
  auto r = stable_transport<Q>(path_network(3), {Q(5), Q(0), Q(0)}, {Q(1), Q(1), Q(1)});
  EXPECT_EQ(std::count(r.exhausted.begin(), r.exhausted.end(), 0), 0);
}

TEST(RejectionStepTest, Examples) {
  auto s1 = rejection_step(application_step(initial_state<Q>(edge(), {Q(1), Q(1)},
                                                             {Q(2), Q(0)})));
  EXPECT_EQ(s1.rejection_radius[0], 1);
  EXPECT_EQ(s1.rejection_fraction[0], Q(0));
  EXPECT_EQ(s1.rejected(0, 0), Q(0));
  EXPECT_EQ(s1.rejected(1, 0), Q(0));

  // Zero capacity rejects everything applied.
  auto s = initial_state<Q>(edge(), {Q(1), Q(0)}, {Q(0), Q(1)});
  s = rejection_step(application_step(s));
  EXPECT_EQ(s.rejected(0, 0), s.applied(0, 0));

  // Center u is over-applied (1 from itself, 1 from v): it keeps the near
  // application and rejects half of v's, with 1 + (1 - c') = 3/2.
  auto over = initial_state<Q>(edge(), {Q(1), Q(1)}, {Q(3, 2), Q(0)});
  over = rejection_step(application_step(over));
  EXPECT_EQ(over.applied(0, 0), Q(1));
  EXPECT_EQ(over.applied(1, 0), Q(1));
  EXPECT_EQ(over.rejection_radius[0], 1);
  EXPECT_EQ(over.rejection_fraction[0], Q(1, 2));
  EXPECT_EQ(over.rejected(1, 0), Q(1, 2));
  EXPECT_EQ(over.rejected(0, 0), Q(0));
}

TEST(StableTransportTest, EdgeExample) {
  auto r = stable_transport<Q>(edge(), {Q(1), Q(1)}, {Q(2), Q(0)});
  ASSERT_TRUE(r.converged);
  EXPECT_EQ(r.stages, 2);
  EXPECT_EQ(r.transport(0, 0), Q(1));
  EXPECT_EQ(r.transport(1, 0), Q(1));
  EXPECT_EQ(r.transport(0, 1), Q(0));
  EXPECT_EQ(r.transport(1, 1), Q(0));
  EXPECT_EQ(r.exhausted, (std::vector<VertexIndex>{0, 1}));
  EXPECT_EQ(r.sated, (std::vector<VertexIndex>{0, 1}));
  EXPECT_TRUE(check_stability<Q>(edge(), r.transport, {Q(1), Q(1)}, {Q(2), Q(0)}).empty());
  std::vector<std::vector<bool>> all(2, std::vector<bool>(2, true));
  EXPECT_TRUE(testing::balancing_transport_exists({1, 1}, {2, 0}, all));
}

TEST(StableTransportTest, ConstantWeightsOnTransitiveGraphStayHome) {
  MarkedNetwork c = cycle_network(6);
  auto r = stable_transport<Q>(c, std::vector<Q>(6, Q(3)), std::vector<Q>(6, Q(3)));
  ASSERT_TRUE(r.converged);
  for (int x = 0; x < 6; ++x) {
    for (int xi = 0; xi < 6; ++xi) EXPECT_EQ(r.transport(x, xi), x == xi ? Q(3) : Q(0));
  }
  EXPECT_EQ(r.trace.front().application_radius, std::vector<int>(6, 0));
  EXPECT_EQ(r.trace.front().rejection_radius, std::vector<int>(6, 0));
}

TEST(StableTransportTest, NoCapacity) {
  auto r = stable_transport<Q>(path_network(4), std::vector<Q>(4, Q(1)), std::vector<Q>(4, Q(0)));
  ASSERT_TRUE(r.converged);
  for (int x = 0; x < 4; ++x) EXPECT_EQ(r.transport.row_sum(x), Q(0));
  EXPECT_TRUE(r.exhausted.empty());
  EXPECT_EQ(r.sated.size(), 4u);
}

// Stage-by-stage invariants on random weighted graphs.
template <typename W>
void check_monotone_stages(int max_stages, double slack) {
  const W eps(slack);
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    Rng rng(seed, 0);
    MarkedNetwork g = random_connected_graph(rng, 2 + static_cast<int>(seed % 8));
    const int n = g.num_vertices();
    std::vector<W> w1(n), w2(n);
    for (int v = 0; v < n; ++v) {
      w1[v] = W(static_cast<long>(rng.uniform_int(0, 4)));
      w2[v] = W(static_cast<long>(rng.uniform_int(0, 4)));
    }
    StableState<W> s = initial_state(g, w1, w2);
    const int stages = std::min(max_stages, default_max_stages<W>(g));
    for (int stage = 0; stage < stages; ++stage) {
      StableState<W> next = rejection_step(application_step(s));
      for (int x = 0; x < n; ++x) {
        if (stage > 0) {
          EXPECT_GE(next.application_radius[x], s.application_radius[x]);
          EXPECT_LE(next.rejection_radius[x], s.rejection_radius[x]);
        }
        for (int xi = 0; xi < n; ++xi) {
          EXPECT_LE(W(0), next.rejected(x, xi) + eps);
          EXPECT_LE(next.rejected(x, xi), next.applied(x, xi) + eps);
          EXPECT_LE(next.applied(x, xi), w2[xi] + eps);
          EXPECT_GE(next.applied(x, xi) + eps, s.applied(x, xi));
          EXPECT_GE(next.rejected(x, xi) + eps, s.rejected(x, xi));
        }
      }
      SquareMatrix<W> t = current_transport(next);
      for (int v = 0; v < n; ++v) {
        EXPECT_LE(t.row_sum(v), w1[v] + eps);
        EXPECT_LE(t.col_sum(v), w2[v] + eps);
      }
      s = std::move(next);
    }
  }
}

// Exact denominators roughly square each stage, so the exact run stops early.
TEST(StableTransportTest, MonotoneStagesExact) { check_monotone_stages<Q>(6, 0.0); }

TEST(StableTransportTest, MonotoneStagesFullSchedule) {
  check_monotone_stages<double>(1 << 20, 1e-9);
}

TEST(StableTransportTest, ExhaustedOrSatedOnUnbalancedWeights) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(seed, 1);
    MarkedNetwork g = random_connected_graph(rng, 1 + static_cast<int>(seed % 10));
    const int n = g.num_vertices();
    std::vector<double> w1(n), w2(n);
    for (int v = 0; v < n; ++v) {
      w1[v] = static_cast<double>(rng.uniform_int(0, 5));
      w2[v] = static_cast<double>(rng.uniform_int(0, 5));
    }
    auto r = stable_transport(g, w1, w2, kLimitStages);
    ASSERT_TRUE(r.converged) << seed;
    bool unexhausted = static_cast<int>(r.exhausted.size()) < n;
    bool unsated = static_cast<int>(r.sated.size()) < n;
    EXPECT_FALSE(unexhausted && unsated) << seed;
    EXPECT_TRUE(check_stability(g, r.transport, w1, w2).empty()) << seed;
  }
}

TEST(CheckStabilityTest, Examples) {
  MarkedNetwork p = path_network(3);
  // Site 1 keeps its unit at distance 1 (center 2) while center 1, nearer,
  // is under-sated.
  std::vector<Q> w1{Q(0), Q(1), Q(0)}, w2{Q(0), Q(1), Q(1)};
  SquareMatrix<Q> t(3);
  t(1, 2) = 1;
  auto pairs = check_stability(p, t, w1, w2);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0], (DesirePair{1, 1}));

  std::vector<Q> zero(3, Q(0));
  EXPECT_TRUE(check_stability(p, SquareMatrix<Q>(3), zero, zero).empty());
}

TEST(BalancingKernelTest, Examples) {
  auto mu = Distribution<Q>::uniform_root(cycle_network(4));
  auto one = VertexFunction<Q>::constant(Q(1));
  Kernel<Q> self = balancing_kernel(mu, one, one);
  EXPECT_TRUE(is_balancing(mu, self, one, one, 0.0).pass);
  EXPECT_EQ(self(cycle_network(4), 0, 0), Q(1));

  // w2 = (2,0,2,0): odd vertices split between both neighbours.
  MarkedNetwork c = with_vertex_marks(cycle_network(4), {"hit", "", "hit", ""});
  auto marked = Distribution<Q>::uniform_root(c);
  auto w2 = VertexFunction<Q>::mark_value("hit", Q(2));
  Kernel<Q> k = balancing_kernel(marked, one, w2);
  EXPECT_TRUE(is_balancing(marked, k, one, w2, 0.0).pass);
  EXPECT_EQ(k(c, 1, 0), Q(1, 2));
  EXPECT_EQ(k(c, 1, 2), Q(1, 2));
  EXPECT_EQ(k(c, 0, 0), Q(1));
  std::vector<std::vector<bool>> near(4, std::vector<bool>(4));
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) near[i][j] = c.distance(i, j) <= 1;
  }
  EXPECT_TRUE(testing::balancing_transport_exists({1, 1, 1, 1}, {2, 0, 2, 0}, near));

  try {
    balancing_kernel(mu, one, VertexFunction<Q>::constant(Q(2)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIntensityMismatch);
  }
}

TEST(ExtraHeadKernelTest, Examples) {
  auto all_ones = gen_marked<Q>(cycle_network(4), 4);
  Kernel<Q> id = extra_head_kernel(all_ones, Q(1));
  auto ones_mark = VertexFunction<Q>::indicator_mark("1");
  EXPECT_EQ(max_difference(root_change(all_ones, id).atoms(), all_ones.atoms()).first, Q(0));

  MarkedNetwork c4 = with_vertex_marks(cycle_network(4), {"1", "0", "1", "0"});
  auto alt = Distribution<Q>::uniform_root(c4);
  Kernel<Q> k = extra_head_kernel(alt, Q(1, 2));
  EXPECT_EQ(k(c4, 1, 0), Q(1, 2));
  EXPECT_EQ(k(c4, 1, 2), Q(1, 2));

  MarkedNetwork c6 = with_vertex_marks(cycle_network(6), {"1", "1", "0", "0", "0", "0"});
  auto mu6 = Distribution<Q>::uniform_root(c6);
  Kernel<Q> k6 = extra_head_kernel(mu6, Q(1, 3));
  auto target = condition_on_subset(mu6, ones_mark).distribution;
  EXPECT_EQ(max_difference(root_change(mu6, k6).atoms(), target.atoms()).first, Q(0));

  try {
    extra_head_kernel(mu6, Q(1, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMarkCountMismatch);
  }
}

TEST(ConditioningKernelTest, Examples) {
  auto mu = Distribution<Q>::uniform_root(pendant_cycle_network(3));
  auto all = VertexFunction<Q>::constant(Q(1));
  Kernel<Q> id = conditioning_kernel(mu, all);
  EXPECT_EQ(max_difference(root_change(mu, id).atoms(), mu.atoms()).first, Q(0));

  auto cycle = not_pendant<Q>();
  Kernel<Q> k = conditioning_kernel(mu, cycle);
  auto target = condition_on_subset(mu, cycle).distribution;
  EXPECT_EQ(max_difference(root_change(mu, k).atoms(), target.atoms()).first, Q(0));

  RootedMeasure<Q> m;
  m.add(Q(1, 2), RootedNetwork(single_vertex(), 0));
  for (int v = 0; v < 3; ++v) m.add(Q(1, 6), RootedNetwork(path_network(3), v));
  auto leaves = VertexFunction<Q>("deg<=1", [](const MarkedNetwork& g, VertexIndex v) {
    return g.degree(v) <= 1 ? Q(1) : Q(0);
  });
  try {
    conditioning_kernel(Distribution<Q>::from_measure(m), leaves);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonConstantIntensity);
  }
}

}  // namespace
}  // namespace unimod
