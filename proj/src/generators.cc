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

#include "unimod/generators.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace unimod {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw Error(ErrorCode::kInvalidArgument, "empty integer range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(next());  // full 64-bit range
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return lo + static_cast<std::int64_t>(x % span);
}

double Rng::uniform_real() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

MarkedNetwork network_from_edges(int n, const std::vector<std::pair<int, int>>& edges,
                                 const std::vector<Mark>& marks) {
  if (!marks.empty() && static_cast<int>(marks.size()) != n) {
    throw Error(ErrorCode::kInvalidArgument, "mark list size mismatch");
  }
  std::vector<Vertex> vs;
  for (int i = 0; i < n; ++i) vs.push_back({i, marks.empty() ? Mark() : marks[i]});
  std::vector<Edge> es;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    es.push_back({static_cast<std::int64_t>(i), edges[i].first, edges[i].second, "", ""});
  }
  return MarkedNetwork(std::move(vs), std::move(es));
}

MarkedNetwork single_vertex(const Mark& mark) { return network_from_edges(1, {}, {mark}); }

MarkedNetwork path_network(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return network_from_edges(n, edges);
}

MarkedNetwork cycle_network(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  return network_from_edges(n, edges);
}

MarkedNetwork star_network(int leaves) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 1; i <= leaves; ++i) edges.emplace_back(0, i);
  return network_from_edges(leaves + 1, edges);
}

MarkedNetwork with_vertex_marks(const MarkedNetwork& g, const std::vector<Mark>& marks) {
  if (static_cast<int>(marks.size()) != g.num_vertices()) {
    throw Error(ErrorCode::kInvalidArgument, "mark list size mismatch");
  }
  std::vector<Vertex> vs = g.vertices();
  for (std::size_t i = 0; i < vs.size(); ++i) vs[i].mark = marks[i];
  return MarkedNetwork(std::move(vs), g.edges());
}

MarkedNetwork pendant_cycle_network(int n) {
  std::vector<std::pair<int, int>> edges;
  std::vector<Mark> marks(3 * n, "");
  for (int i = 0; i < 2 * n; ++i) edges.emplace_back(i, (i + 1) % (2 * n));
  for (int k = 0; k < n; ++k) {
    edges.emplace_back(2 * k, 2 * n + k);
    marks[2 * n + k] = kPendantMark;
  }
  return network_from_edges(3 * n, edges, marks);
}

MarkedNetwork random_connected_graph(Rng& rng, int n, const RandomGraphOptions& options) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "need n >= 1");
  const double p = n == 1 ? 1.0 : std::min(1.0, 2.0 * std::log(static_cast<double>(n)) / n);
  while (true) {
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        if (rng.bernoulli(p)) edges.emplace_back(u, v);
      }
    }
    std::vector<Mark> marks(n, "");
    if (options.vertex_marks > 1) {
      for (Mark& m : marks) m = std::to_string(rng.uniform_int(0, options.vertex_marks - 1));
    }
    // Connectivity by union-find so rejected draws cost no exceptions.
    std::vector<int> parent(n);
    for (int i = 0; i < n; ++i) parent[i] = i;
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    int components = n;
    for (auto [u, v] : edges) {
      int a = find(u), b = find(v);
      if (a != b) {
        parent[a] = b;
        --components;
      }
    }
    if (components == 1) return network_from_edges(n, edges, marks);
  }
}

}  // namespace unimod
