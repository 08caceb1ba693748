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

#pragma once

// Brute-force reference implementations used only by the tests. They share
// no code with the library beyond the network container.

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <optional>
#include <tuple>
#include <vector>

#include "unimod/error.h"
#include "unimod/network.h"

namespace unimod::testing {

using EdgeTuple = std::tuple<int, int, Mark, Mark>;

inline EdgeTuple oriented(int a, int b, const Mark& ma, const Mark& mb) {
  if (std::tie(a, ma) <= std::tie(b, mb)) return {a, b, ma, mb};
  return {b, a, mb, ma};
}

inline std::vector<EdgeTuple> edge_multiset(const MarkedNetwork& g,
                                            const std::vector<int>& image) {
  std::vector<EdgeTuple> out;
  for (const Edge& e : g.edges()) {
    out.push_back(oriented(image[g.index_of(e.u)], image[g.index_of(e.v)], e.mark_u, e.mark_v));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Tries every bijection V(g) -> V(h). `roots_g[i]` must map to `roots_h[i]`.
inline bool brute_isomorphic(const MarkedNetwork& g, const MarkedNetwork& h,
                             const std::vector<int>& roots_g = {},
                             const std::vector<int>& roots_h = {}) {
  const int n = g.num_vertices();
  if (n != h.num_vertices() || g.num_edges() != h.num_edges()) return false;
  std::vector<int> identity(n);
  std::iota(identity.begin(), identity.end(), 0);
  const std::vector<EdgeTuple> target = edge_multiset(h, identity);
  std::vector<int> perm = identity;
  do {
    bool ok = true;
    for (std::size_t i = 0; i < roots_g.size() && ok; ++i) ok = perm[roots_g[i]] == roots_h[i];
    for (int v = 0; v < n && ok; ++v) ok = g.mark(v) == h.mark(perm[v]);
    if (ok && edge_multiset(g, perm) == target) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

// Orbits of Aut(g) by enumerating all automorphisms; cell label per vertex
// is the smallest vertex index in its orbit.
inline std::vector<int> brute_orbit_labels(const MarkedNetwork& g) {
  const int n = g.num_vertices();
  std::vector<int> identity(n);
  std::iota(identity.begin(), identity.end(), 0);
  const std::vector<EdgeTuple> target = edge_multiset(g, identity);
  std::vector<int> label = identity;
  std::vector<int> perm = identity;
  do {
    bool ok = true;
    for (int v = 0; v < n && ok; ++v) ok = g.mark(v) == g.mark(perm[v]);
    if (!ok || edge_multiset(g, perm) != target) continue;
    for (int v = 0; v < n; ++v) label[v] = std::min(label[v], perm[v]);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return label;
}

inline std::vector<int> bfs_distances(const MarkedNetwork& g, int source) {
  std::vector<int> dist(g.num_vertices(), -1);
  std::deque<int> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    int x = queue.front();
    queue.pop_front();
    for (const HalfEdge& h : g.incident(x)) {
      if (dist[h.neighbor] < 0) {
        dist[h.neighbor] = dist[x] + 1;
        queue.push_back(h.neighbor);
      }
    }
  }
  return dist;
}

// Dinic max-flow on a dense capacity matrix (doubles).
class MaxFlow {
 public:
  explicit MaxFlow(int n) : n_(n), cap_(n, std::vector<double>(n, 0.0)) {}
  void add(int u, int v, double c) { cap_[u][v] += c; }

  double run(int s, int t) {
    double flow = 0;
    while (levels(s, t)) {
      next_.assign(n_, 0);
      while (double f = push(s, t, std::numeric_limits<double>::infinity())) flow += f;
    }
    return flow;
  }

 private:
  bool levels(int s, int t) {
    level_.assign(n_, -1);
    std::deque<int> queue{s};
    level_[s] = 0;
    while (!queue.empty()) {
      int x = queue.front();
      queue.pop_front();
      for (int y = 0; y < n_; ++y) {
        if (level_[y] < 0 && cap_[x][y] > 1e-12) {
          level_[y] = level_[x] + 1;
          queue.push_back(y);
        }
      }
    }
    return level_[t] >= 0;
  }

  double push(int x, int t, double limit) {
    if (x == t) return limit;
    for (int& y = next_[x]; y < n_; ++y) {
      if (level_[y] != level_[x] + 1 || cap_[x][y] <= 1e-12) continue;
      double f = push(y, t, std::min(limit, cap_[x][y]));
      if (f > 0) {
        cap_[x][y] -= f;
        cap_[y][x] += f;
        return f;
      }
    }
    return 0;
  }

  int n_;
  std::vector<std::vector<double>> cap_;
  std::vector<int> level_;
  std::vector<int> next_;
};

// Whether some nonnegative T on V x V, zero off `allowed`, has row sums w1
// and column sums w2: a bipartite transportation feasibility question.
inline bool balancing_transport_exists(const std::vector<double>& w1,
                                       const std::vector<double>& w2,
                                       const std::vector<std::vector<bool>>& allowed,
                                       double tol = 1e-9) {
  const int n = static_cast<int>(w1.size());
  MaxFlow flow(2 * n + 2);
  const int s = 2 * n, t = 2 * n + 1;
  double total1 = 0, total2 = 0;
  for (int i = 0; i < n; ++i) {
    flow.add(s, i, w1[i]);
    flow.add(n + i, t, w2[i]);
    total1 += w1[i];
    total2 += w2[i];
    for (int j = 0; j < n; ++j) {
      if (allowed[i][j]) flow.add(i, n + j, std::numeric_limits<double>::infinity());
    }
  }
  if (std::abs(total1 - total2) > tol) return false;
  return std::abs(flow.run(s, t) - total1) <= tol;
}

// Code of the unimod::Error thrown by f, if any.
template <typename F>
std::optional<ErrorCode> thrown_code(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace unimod::testing
