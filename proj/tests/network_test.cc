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
#include <array>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.h"
#include "unimod/canonical.h"
#include "unimod/error.h"
#include "unimod/generators.h"
#include "unimod/network.h"

namespace unimod {
namespace {

using testing::brute_isomorphic;
using testing::brute_orbit_labels;

// Random relabeling: shuffled vertex and edge order, fresh ids, random edge
// orientation.
MarkedNetwork shuffled(const MarkedNetwork& g, std::mt19937_64& rng,
                       std::vector<int>* image = nullptr) {
  const int n = g.num_vertices();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<VertexId> new_id(n);
  std::vector<VertexId> ids(n);
  std::iota(ids.begin(), ids.end(), 100);
  std::shuffle(ids.begin(), ids.end(), rng);
  std::vector<Vertex> vs;
  for (int i = 0; i < n; ++i) new_id[order[i]] = ids[i];
  for (int i = 0; i < n; ++i) vs.push_back({new_id[order[i]], g.mark(order[i])});
  std::vector<Edge> es;
  std::int64_t next = 500;
  for (const Edge& e : g.edges()) {
    Edge f{next++, new_id[g.index_of(e.u)], new_id[g.index_of(e.v)], e.mark_u, e.mark_v};
    if (rng() % 2) {
      std::swap(f.u, f.v);
      std::swap(f.mark_u, f.mark_v);
    }
    es.push_back(f);
  }
  std::shuffle(es.begin(), es.end(), rng);
  MarkedNetwork h(vs, es);
  if (image) {
    image->resize(n);
    for (int v = 0; v < n; ++v) (*image)[v] = h.index_of(new_id[v]);
  }
  return h;
}

// Random small multigraphs with loops, parallel edges and marks.
MarkedNetwork random_multigraph(std::mt19937_64& rng, int n) {
  std::vector<Vertex> vs;
  for (int i = 0; i < n; ++i) vs.push_back({i, rng() % 3 == 0 ? "x" : ""});
  std::vector<Edge> es;
  std::int64_t id = 0;
  for (int i = 1; i < n; ++i) {
    es.push_back({id++, static_cast<int>(rng() % i), i, "", ""});
  }
  int extra = static_cast<int>(rng() % 4);
  const char* marks[] = {"", "", "a", "b"};
  for (int k = 0; k < extra; ++k) {
    es.push_back({id++, static_cast<int>(rng() % n), static_cast<int>(rng() % n),
                  marks[rng() % 4], marks[rng() % 4]});
  }
  return MarkedNetwork(vs, es);
}

TEST(MarkedNetworkTest, RejectsMalformedInput) {
  auto expect_invalid = [](std::vector<Vertex> vs, std::vector<Edge> es) {
    try {
      MarkedNetwork g(std::move(vs), std::move(es));
      FAIL() << "accepted";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidNetwork);
    }
  };
  expect_invalid({}, {});
  expect_invalid({{1, ""}, {1, ""}}, {{0, 1, 1, "", ""}});
  expect_invalid({{1, ""}, {2, ""}}, {{0, 1, 3, "", ""}});
  expect_invalid({{1, ""}, {2, ""}}, {});
  expect_invalid({{1, ""}, {2, ""}}, {{0, 1, 2, "", ""}, {0, 2, 1, "", ""}});
}

TEST(MarkedNetworkTest, DistancesMatchBfs) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    MarkedNetwork g = random_multigraph(rng, 1 + trial % 9);
    int diameter = 0;
    for (int v = 0; v < g.num_vertices(); ++v) {
      std::vector<int> d = testing::bfs_distances(g, v);
      for (int w = 0; w < g.num_vertices(); ++w) EXPECT_EQ(g.distance(v, w), d[w]);
      diameter = std::max(diameter, *std::max_element(d.begin(), d.end()));
    }
    EXPECT_EQ(g.diameter(), diameter);
  }
}

TEST(CanonicalKeyTest, SingleVertexIgnoresId) {
  MarkedNetwork a({{3, ""}}, {});
  MarkedNetwork b({{42, ""}}, {});
  EXPECT_EQ(canonical_key(a), canonical_key(b));
  EXPECT_EQ(canonical_key(a, 0), canonical_key(b, 0));
  EXPECT_NE(canonical_key(a), canonical_key(MarkedNetwork({{3, "m"}}, {})));
}

TEST(CanonicalKeyTest, PathEndsAgreeMiddleDiffers) {
  MarkedNetwork p = path_network(3);
  EXPECT_EQ(canonical_key(p, 0), canonical_key(p, 2));
  EXPECT_NE(canonical_key(p, 0), canonical_key(p, 1));
}

TEST(CanonicalKeyTest, MarkedFourCycleDoublyRooted) {
  MarkedNetwork c = with_vertex_marks(cycle_network(4), {"x", "", "", ""});
  const CanonicalKey& opposite = canonical_key(c, 0, 2);
  const CanonicalKey& adjacent = canonical_key(c, 0, 1);
  EXPECT_NE(opposite, adjacent);
  EXPECT_FALSE(brute_isomorphic(c, c, {0, 2}, {0, 1}));
  // The two adjacent choices are related by the reflection.
  EXPECT_EQ(canonical_key(c, 0, 1), canonical_key(c, 0, 3));
  EXPECT_TRUE(brute_isomorphic(c, c, {0, 1}, {0, 3}));
}

TEST(CanonicalKeyTest, KindsAreDistinct) {
  MarkedNetwork g = single_vertex();
  EXPECT_NE(canonical_key(g), canonical_key(g, 0));
  EXPECT_NE(canonical_key(g, 0), canonical_key(g, 0, 0));
}

TEST(CanonicalKeyTest, StableUnderRelabeling) {
  std::mt19937_64 rng(11);
  std::vector<MarkedNetwork> corpus = {pendant_cycle_network(3), star_network(4),
                                       random_multigraph(rng, 7), random_multigraph(rng, 6)};
  for (const MarkedNetwork& g : corpus) {
    const CanonicalKey base = canonical_key(g);
    const CanonicalKey rooted = canonical_key(g, 1);
    const CanonicalKey doubly = canonical_key(g, 1, 0);
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<int> image;
      MarkedNetwork h = shuffled(g, rng, &image);
      ASSERT_EQ(canonical_key(h), base);
      ASSERT_EQ(canonical_key(h, image[1]), rooted);
      ASSERT_EQ(canonical_key(h, image[1], image[0]), doubly);
    }
  }
}

TEST(CanonicalKeyTest, AgreesWithPermutationSearch) {
  std::mt19937_64 rng(3);
  std::vector<MarkedNetwork> corpus;
  for (int i = 0; i < 40; ++i) {
    MarkedNetwork g = random_multigraph(rng, 2 + i % 6);
    corpus.push_back(g);
    if (i % 3 == 0) corpus.push_back(shuffled(g, rng));
  }
  for (int n = 2; n <= 7; ++n) {
    corpus.push_back(path_network(n));
    corpus.push_back(cycle_network(n));
  }
  int positives = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    for (std::size_t j = i; j < corpus.size(); ++j) {
      const MarkedNetwork& g = corpus[i];
      const MarkedNetwork& h = corpus[j];
      bool keys = canonical_key(g) == canonical_key(h);
      bool brute = brute_isomorphic(g, h);
      ASSERT_EQ(keys, brute) << i << " vs " << j;
      positives += brute ? 1 : 0;
      if (g.num_vertices() != h.num_vertices()) continue;
      // Rooted: compare root 0 of g with every root of h.
      for (int v = 0; v < h.num_vertices(); ++v) {
        ASSERT_EQ(canonical_key(g, 0) == canonical_key(h, v), brute_isomorphic(g, h, {0}, {v}));
      }
      if (g.num_vertices() < 2) continue;
      for (int v = 0; v < h.num_vertices(); ++v) {
        ASSERT_EQ(canonical_key(g, 1, 0) == canonical_key(h, v, 0),
                  brute_isomorphic(g, h, {1, 0}, {v, 0}));
      }
    }
  }
  EXPECT_GT(positives, static_cast<int>(corpus.size()));
}

TEST(VertexOrbitsTest, Examples) {
  OrbitPartition star = vertex_orbits(star_network(3));
  ASSERT_EQ(star.cells.size(), 2u);
  EXPECT_EQ(star.cell_of[1], star.cell_of[2]);
  EXPECT_EQ(star.cell_of[2], star.cell_of[3]);
  EXPECT_NE(star.cell_of[0], star.cell_of[1]);

  OrbitPartition path = vertex_orbits(path_network(3));
  ASSERT_EQ(path.cells.size(), 2u);
  EXPECT_EQ(path.cell_of[0], path.cell_of[2]);

  MarkedNetwork pc = pendant_cycle_network(3);
  OrbitPartition orbits = vertex_orbits(pc);
  EXPECT_EQ(orbits.cells.size(), 3u);
  std::vector<int> brute = brute_orbit_labels(pc);
  for (int v = 0; v < pc.num_vertices(); ++v) {
    for (int w = 0; w < pc.num_vertices(); ++w) {
      EXPECT_EQ(orbits.cell_of[v] == orbits.cell_of[w], brute[v] == brute[w]);
    }
  }
}

TEST(VertexOrbitsTest, MatchAutomorphismEnumeration) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    MarkedNetwork g = random_multigraph(rng, 2 + trial % 6);
    OrbitPartition orbits = vertex_orbits(g);
    std::vector<int> brute = brute_orbit_labels(g);
    for (int v = 0; v < g.num_vertices(); ++v) {
      for (int w = 0; w < g.num_vertices(); ++w) {
        ASSERT_EQ(orbits.cell_of[v] == orbits.cell_of[w], brute[v] == brute[w]);
        ASSERT_EQ(canonical_key(g, v) == canonical_key(g, w), brute[v] == brute[w]);
      }
    }
  }
}

TEST(BallTest, Examples) {
  MarkedNetwork p = with_vertex_marks(path_network(3), {"a", "b", "c"});
  RootedNetwork b0 = ball(p, 1, 0);
  EXPECT_EQ(b0.network().num_vertices(), 1);
  EXPECT_EQ(b0.network().mark(b0.root()), "b");

  RootedNetwork whole = ball(p, 1, 1);
  EXPECT_EQ(canonical_key(whole), canonical_key(p, 1));

  MarkedNetwork c6 = cycle_network(6);
  RootedNetwork b2 = ball(c6, 0, 2);
  MarkedNetwork p5 = path_network(5);
  EXPECT_EQ(canonical_key(b2), canonical_key(p5, 2));
  std::vector<int> d = testing::bfs_distances(c6, 0);
  EXPECT_EQ(std::count_if(d.begin(), d.end(), [](int x) { return x <= 2; }),
            b2.network().num_vertices());
}

TEST(RootedDistanceTest, Examples) {
  MarkedNetwork p3 = path_network(3);
  MarkedNetwork p4 = path_network(4);
  EXPECT_EQ(rooted_distance(RootedNetwork(p3, 0), RootedNetwork(p3, 2)), 0.0);
  MarkedNetwork a({{0, "a"}}, {});
  MarkedNetwork b({{0, "b"}}, {});
  EXPECT_EQ(rooted_distance(RootedNetwork(a, 0), RootedNetwork(b, 0)), 1.0);
  EXPECT_DOUBLE_EQ(rooted_distance(RootedNetwork(p3, 0), RootedNetwork(p4, 0)), 1.0 / 3);
}

TEST(RootedDistanceTest, PseudometricOnCorpus) {
  std::mt19937_64 rng(9);
  std::vector<RootedNetwork> xs;
  for (int i = 0; i < 14; ++i) {
    MarkedNetwork g = random_multigraph(rng, 1 + i % 6);
    xs.emplace_back(g, static_cast<int>(rng() % g.num_vertices()));
  }
  xs.emplace_back(path_network(5), 0);
  xs.emplace_back(path_network(6), 0);
  for (const auto& x : xs) {
    for (const auto& y : xs) {
      double dxy = rooted_distance(x, y);
      EXPECT_EQ(dxy, rooted_distance(y, x));
      EXPECT_EQ(dxy == 0.0, canonical_key(x) == canonical_key(y));
      for (const auto& z : xs) {
        // Ultrametric, hence also the triangle inequality.
        EXPECT_LE(dxy, std::max(rooted_distance(x, z), rooted_distance(z, y)) + 1e-15);
      }
    }
  }
}

TEST(CanonicalRelabelTest, IsomorphicCopiesRelabelIdentically) {
  std::mt19937_64 rng(21);
  MarkedNetwork g = random_multigraph(rng, 6);
  std::vector<VertexIndex> none;
  CanonicalLabeling a = canonical_labeling(g, none);
  MarkedNetwork h = shuffled(g, rng);
  CanonicalLabeling b = canonical_labeling(h, none);
  EXPECT_EQ(a.key, b.key);
}

}  // namespace
}  // namespace unimod
