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

// Deterministic example families and seeded random corpora.
//
// Randomness: item i of a run with seed s draws from a std::mt19937_64
// seeded with splitmix64(s + (i + 1) * 0x9E3779B97F4A7C15). Integers are
// mapped with rejection sampling and reals as (x >> 11) * 2^-53, so outputs
// do not depend on the standard library's distribution implementations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "unimod/distribution.h"
#include "unimod/error.h"
#include "unimod/extension.h"
#include "unimod/network.h"
#include "unimod/scalar.h"

namespace unimod {

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, std::uint64_t index) : engine_(derive_seed(seed, index)) {}

  std::uint64_t next() { return engine_(); }
  // Uniform on [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  // Uniform on [0, 1).
  double uniform_real();
  bool bernoulli(double p) { return uniform_real() < p; }

 private:
  std::mt19937_64 engine_;
};

// Vertices get ids 0..n-1 and the given mark; edges ids 0..m-1 with empty
// half-edge marks.
MarkedNetwork network_from_edges(int n, const std::vector<std::pair<int, int>>& edges,
                                 const std::vector<Mark>& marks = {});
MarkedNetwork single_vertex(const Mark& mark = "");
MarkedNetwork path_network(int n);
MarkedNetwork cycle_network(int n);
MarkedNetwork star_network(int leaves);
MarkedNetwork with_vertex_marks(const MarkedNetwork& g, const std::vector<Mark>& marks);

// Cycle 0..2n-1 with a pendant 2n+k (mark "pendant") on cycle vertex 2k.
MarkedNetwork pendant_cycle_network(int n);

inline constexpr const char* kPendantMark = "pendant";
inline constexpr const char* kMiddleMark = "S";

enum class PendantRootMode { kUniformCycle, kFixedDegree3, kUniformAll };

struct RandomGraphOptions {
  int vertex_marks = 1;  // marks drawn uniformly from "0".."k-1"; 1 means all ""
};

// Erdos-Renyi G(n, min(1, 2 ln n / n)) conditioned on connectivity.
MarkedNetwork random_connected_graph(Rng& rng, int n, const RandomGraphOptions& options = {});

template <typename W = double>
Distribution<W> uniform_mixture(const std::vector<MarkedNetwork>& graphs) {
  if (graphs.empty()) throw Error(ErrorCode::kInvalidArgument, "no graphs");
  RootedMeasure<W> m;
  const W per_graph = W(1) / W(static_cast<int>(graphs.size()));
  for (const MarkedNetwork& g : graphs) {
    W each = per_graph / W(g.num_vertices());
    for (VertexIndex v = 0; v < g.num_vertices(); ++v) m.add(each, RootedNetwork(g, v));
  }
  return Distribution<W>::normalize(m);
}

// Paths on l vertices (l odd) rooted at the middle vertex, which carries the
// mark "S"; S = {middle}.
template <typename W = double>
Extension<W> gen_path_extension(const std::map<int, W>& length_weights) {
  RootedMeasure<W> m;
  for (const auto& [length, weight] : length_weights) {
    if (length < 1 || length % 2 == 0) {
      throw Error(ErrorCode::kEvenLength, "path length " + std::to_string(length));
    }
    std::vector<Mark> marks(length, "");
    marks[length / 2] = kMiddleMark;
    MarkedNetwork g = with_vertex_marks(path_network(length), marks);
    m.add(weight, RootedNetwork(g, length / 2));
  }
  return {Distribution<W>::from_measure(std::move(m)),
          VertexFunction<W>::mark_prefix(kMiddleMark)};
}

template <typename W = double>
VertexFunction<W> not_pendant() {
  return VertexFunction<W>("not-mark:" + std::string(kPendantMark),
                           [](const MarkedNetwork& g, VertexIndex v) {
                             return g.mark(v) == kPendantMark ? W(0) : W(1);
                           });
}

template <typename W = double>
std::variant<Extension<W>, Distribution<W>> gen_pendant_cycle(int n, PendantRootMode mode) {
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "pendant cycle needs n >= 2");
  MarkedNetwork g = pendant_cycle_network(n);
  if (mode == PendantRootMode::kUniformAll) return Distribution<W>::uniform_root(g);
  RootedMeasure<W> m;
  if (mode == PendantRootMode::kFixedDegree3) {
    m.add(W(1), RootedNetwork(g, 0));
  } else {
    W each = W(1) / W(2 * n);
    for (VertexIndex v = 0; v < 2 * n; ++v) m.add(each, RootedNetwork(g, v));
  }
  return Extension<W>{Distribution<W>::from_measure(std::move(m)), not_pendant<W>()};
}

enum class MarkMode { kFixedSet, kUniformSubsets };

// Marks the chosen vertex ids "1" and the rest "0", uniform root.
template <typename W = double>
Distribution<W> gen_marked(const MarkedNetwork& g, const std::set<VertexId>& ones) {
  std::vector<Mark> marks(g.num_vertices(), "0");
  for (VertexId id : ones) {
    if (!g.has_vertex(id)) {
      throw Error(ErrorCode::kCountOutOfRange, "unknown vertex id " + std::to_string(id));
    }
    marks[g.index_of(id)] = "1";
  }
  return Distribution<W>::uniform_root(with_vertex_marks(g, marks));
}

// Uniform mixture over all size-k subsets marked "1", uniform root.
template <typename W = double>
Distribution<W> gen_marked(const MarkedNetwork& g, int count) {
  const int n = g.num_vertices();
  if (count < 0 || count > n) {
    throw Error(ErrorCode::kCountOutOfRange,
                std::to_string(count) + " ones on " + std::to_string(n) + " vertices");
  }
  std::vector<MarkedNetwork> patterns;
  std::vector<bool> chosen(n, false);
  std::fill(chosen.begin(), chosen.begin() + count, true);
  do {
    std::vector<Mark> marks(n, "0");
    for (int v = 0; v < n; ++v) {
      if (chosen[v]) marks[v] = "1";
    }
    patterns.push_back(with_vertex_marks(g, marks));
  } while (std::prev_permutation(chosen.begin(), chosen.end()));
  return uniform_mixture<W>(patterns);
}

// num_graphs random connected graphs on 1..max_vertices vertices, equally
// weighted, each with a uniform root.
template <typename W = double>
Distribution<W> gen_random_unimodular(int num_graphs, int max_vertices, std::uint64_t seed,
                                      const RandomGraphOptions& options = {}) {
  if (num_graphs < 1 || max_vertices < 1) {
    throw Error(ErrorCode::kInvalidArgument, "need num_graphs >= 1 and max_vertices >= 1");
  }
  std::vector<MarkedNetwork> graphs;
  for (int i = 0; i < num_graphs; ++i) {
    Rng rng(seed, static_cast<std::uint64_t>(i));
    int n = static_cast<int>(rng.uniform_int(1, max_vertices));
    graphs.push_back(random_connected_graph(rng, n, options));
  }
  return uniform_mixture<W>(graphs);
}

// Same unrooted law as mu, roots redistributed inside each network with
// random integer weights in [0, 4] (at least one positive per network).
template <typename W = double>
Distribution<W> random_rerooting(const Distribution<W>& mu, std::uint64_t seed) {
  UnrootedMeasure<W> classes = unroot(mu);
  RootedMeasure<W> m;
  std::uint64_t index = 0;
  for (const auto& [key, entry] : classes) {
    Rng rng(seed, index++);
    const MarkedNetwork& g = entry.representative;
    std::vector<int> weights(g.num_vertices());
    int total = 0;
    while (total == 0) {
      total = 0;
      for (int& w : weights) {
        w = static_cast<int>(rng.uniform_int(0, 4));
        total += w;
      }
    }
    for (VertexIndex v = 0; v < g.num_vertices(); ++v) {
      if (weights[v] == 0) continue;
      W mass = entry.mass * W(weights[v]) / W(total);
      m.add(mass, RootedNetwork(g, v));
    }
  }
  return Distribution<W>::normalize(m);
}

}  // namespace unimod
