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

#include "unimod/canonical.h"

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <tuple>

#include "network_cache.h"
#include "unimod/error.h"

namespace unimod {
namespace {

// Dense ranks of the distinct strings in `marks`.
std::vector<int> rank_strings(const std::vector<const Mark*>& marks) {
  std::vector<const Mark*> sorted = marks;
  std::sort(sorted.begin(), sorted.end(),
            [](const Mark* a, const Mark* b) { return *a < *b; });
  sorted.erase(std::unique(sorted.begin(), sorted.end(),
                           [](const Mark* a, const Mark* b) { return *a == *b; }),
               sorted.end());
  std::vector<int> ranks(marks.size());
  for (std::size_t i = 0; i < marks.size(); ++i) {
    ranks[i] = static_cast<int>(
        std::lower_bound(sorted.begin(), sorted.end(), marks[i],
                         [](const Mark* a, const Mark* b) { return *a < *b; }) -
        sorted.begin());
  }
  return ranks;
}

struct Arc {
  VertexIndex to;
  int own;    // rank of the half-edge mark at the source
  int other;  // rank of the half-edge mark at `to`
};

// Canonical search over one (network, distinguished roots) instance.
class Canonicalizer {
 public:
  Canonicalizer(const MarkedNetwork& g, std::span<const VertexIndex> roots)
      : g_(g), n_(g.num_vertices()) {
    std::vector<const Mark*> vertex_marks;
    for (VertexIndex v = 0; v < n_; ++v) vertex_marks.push_back(&g.mark(v));
    vertex_rank_ = rank_strings(vertex_marks);

    std::vector<const Mark*> half_marks;
    for (const Edge& e : g.edges()) {
      half_marks.push_back(&e.mark_u);
      half_marks.push_back(&e.mark_v);
    }
    std::vector<int> half_rank = rank_strings(half_marks);
    arcs_.resize(n_);
    for (VertexIndex v = 0; v < n_; ++v) {
      for (const HalfEdge& h : g.incident(v)) {
        const int base = 2 * h.edge;
        const int own = half_rank[base + (h.at_u ? 0 : 1)];
        const int other = half_rank[base + (h.at_u ? 1 : 0)];
        arcs_[v].push_back({h.neighbor, own, other});
      }
    }

    // Seed colours: (root flags, vertex mark). Root flags order the roots
    // first; a vertex that is both roots gets its own flag value.
    std::vector<std::pair<int, int>> seed(n_);
    for (VertexIndex v = 0; v < n_; ++v) {
      int flags = 0;
      if (roots.size() >= 1 && roots[0] == v) flags |= 1;
      if (roots.size() >= 2 && roots[1] == v) flags |= 2;
      // Lower values sort first: both roots, first root, second root, rest.
      static constexpr std::array<int, 4> kOrder = {3, 1, 2, 0};
      seed[v] = {kOrder[flags], vertex_rank_[v]};
    }
    colors_ = dense_rank(seed);
    kind_ = roots.empty()        ? KeyKind::kUnrooted
            : roots.size() == 1 ? KeyKind::kRooted
                                : KeyKind::kDoublyRooted;
    roots_.assign(roots.begin(), roots.end());
  }

  CanonicalLabeling run() {
    std::vector<VertexIndex> prefix;
    search(colors_, prefix);
    CanonicalLabeling out;
    out.order.resize(n_);
    for (VertexIndex v = 0; v < n_; ++v) out.order[best_position_[v]] = v;
    out.key.kind = kind_;
    out.key.encoding = final_encoding(best_position_);
    return out;
  }

 private:
  template <typename T>
  static std::vector<int> dense_rank(const std::vector<T>& values) {
    std::vector<T> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<int> ranks(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      ranks[i] = static_cast<int>(
          std::lower_bound(sorted.begin(), sorted.end(), values[i]) -
          sorted.begin());
    }
    return ranks;
  }

  static int count_colors(const std::vector<int>& colors) {
    return colors.empty() ? 0
                          : *std::max_element(colors.begin(), colors.end()) + 1;
  }

  // 1-dimensional Weisfeiler-Leman refinement; keeps the old colour as the
  // leading component so cells only split and their relative order is kept.
  void refine(std::vector<int>& colors) const {
    int num = count_colors(colors);
    using Signature = std::pair<int, std::vector<std::array<int, 3>>>;
    while (num < n_) {
      std::vector<Signature> sig(n_);
      for (VertexIndex v = 0; v < n_; ++v) {
        sig[v].first = colors[v];
        auto& nb = sig[v].second;
        nb.reserve(arcs_[v].size());
        for (const Arc& a : arcs_[v]) nb.push_back({colors[a.to], a.own, a.other});
        std::sort(nb.begin(), nb.end());
      }
      std::vector<int> next = dense_rank(sig);
      const int next_num = count_colors(next);
      colors.swap(next);
      if (next_num == num) break;
      num = next_num;
    }
  }

  // Edge list in position space; compared between leaves of this network.
  std::vector<std::array<int, 4>> leaf_edges(
      const std::vector<int>& position) const {
    std::vector<std::array<int, 4>> out;
    for (VertexIndex v = 0; v < n_; ++v) {
      for (const Arc& a : arcs_[v]) {
        std::array<int, 4> t = {position[v], position[a.to], a.own, a.other};
        // Each edge appears from both ends; keep the orientation with the
        // smaller (position, mark) head.
        if (std::tie(t[0], t[2]) <= std::tie(t[1], t[3])) out.push_back(t);
      }
    }
    std::sort(out.begin(), out.end());
    // A loop with equal end marks is listed twice from the same vertex; an
    // ordinary edge with equal (position, mark) ends is impossible. Halve the
    // duplicated loop entries.
    std::vector<std::array<int, 4>> dedup;
    for (std::size_t i = 0; i < out.size(); ++i) {
      const auto& t = out[i];
      if (t[0] == t[1] && t[2] == t[3]) {
        dedup.push_back(t);
        ++i;  // its twin follows immediately
        continue;
      }
      dedup.push_back(t);
    }
    return dedup;
  }

  void on_leaf(const std::vector<int>& position) {
    std::vector<std::array<int, 4>> edges = leaf_edges(position);
    if (best_position_.empty()) {
      best_position_ = position;
      best_edges_ = std::move(edges);
      return;
    }
    if (edges == best_edges_) {
      // Same leaf encoding: position^-1 composed with best is an automorphism.
      std::vector<VertexIndex> at_best(n_);
      for (VertexIndex v = 0; v < n_; ++v) at_best[best_position_[v]] = v;
      std::vector<VertexIndex> gamma(n_);
      for (VertexIndex v = 0; v < n_; ++v) gamma[v] = at_best[position[v]];
      automorphisms_.push_back(std::move(gamma));
      return;
    }
    if (edges < best_edges_) {
      best_position_ = position;
      best_edges_ = std::move(edges);
    }
  }

  // Orbits of the subgroup generated by the known automorphisms fixing the
  // prefix pointwise (union-find representatives).
  std::vector<int> stabilizer_orbits(const std::vector<VertexIndex>& prefix) const {
    std::vector<int> parent(n_);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const auto& gamma : automorphisms_) {
      bool fixes = std::all_of(prefix.begin(), prefix.end(),
                               [&](VertexIndex p) { return gamma[p] == p; });
      if (!fixes) continue;
      for (VertexIndex v = 0; v < n_; ++v) {
        int a = find(v), b = find(gamma[v]);
        if (a != b) parent[a] = b;
      }
    }
    for (VertexIndex v = 0; v < n_; ++v) parent[v] = find(v);
    return parent;
  }

  void search(std::vector<int> colors, std::vector<VertexIndex>& prefix) {
    refine(colors);
    const int num = count_colors(colors);
    if (num == n_) {
      on_leaf(colors);
      return;
    }
    // Target cell: the first colour class of size > 1.
    std::vector<int> size(num, 0);
    for (int c : colors) ++size[c];
    int target = 0;
    while (size[target] < 2) ++target;
    std::vector<VertexIndex> cell;
    for (VertexIndex v = 0; v < n_; ++v) {
      if (colors[v] == target) cell.push_back(v);
    }
    std::vector<VertexIndex> explored;
    for (VertexIndex v : cell) {
      if (!explored.empty()) {
        std::vector<int> orbit = stabilizer_orbits(prefix);
        bool redundant = std::any_of(explored.begin(), explored.end(),
                                     [&](VertexIndex u) { return orbit[u] == orbit[v]; });
        if (redundant) continue;
      }
      std::vector<int> child(n_);
      for (VertexIndex w = 0; w < n_; ++w) {
        child[w] = 2 * colors[w] + ((colors[w] == target && w != v) ? 1 : 0);
      }
      child = dense_rank(child);
      prefix.push_back(v);
      search(std::move(child), prefix);
      prefix.pop_back();
      explored.push_back(v);
    }
  }

  static void put_u32(std::string& out, std::uint32_t x) {
    for (int shift = 24; shift >= 0; shift -= 8) {
      out.push_back(static_cast<char>((x >> shift) & 0xff));
    }
  }
  static void put_bytes(std::string& out, const std::string& s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out += s;
  }

  // Big-endian fixed-width integers and length-prefixed byte strings, so the
  // byte order is a total order and equal strings mean equal structures.
  std::string final_encoding(const std::vector<int>& position) const {
    std::string out;
    out.push_back(static_cast<char>(kind_));
    put_u32(out, static_cast<std::uint32_t>(n_));
    put_u32(out, static_cast<std::uint32_t>(g_.num_edges()));
    for (VertexIndex r : roots_) put_u32(out, static_cast<std::uint32_t>(position[r]));
    std::vector<VertexIndex> at(n_);
    for (VertexIndex v = 0; v < n_; ++v) at[position[v]] = v;
    for (VertexIndex p = 0; p < n_; ++p) put_bytes(out, g_.mark(at[p]));
    // Edges re-derived with real mark strings, in the canonical edge order.
    std::vector<std::tuple<int, int, const Mark*, const Mark*>> edges;
    for (const Edge& e : g_.edges()) {
      int a = position[g_.index_of(e.u)], b = position[g_.index_of(e.v)];
      const Mark* ma = &e.mark_u;
      const Mark* mb = &e.mark_v;
      if (std::make_pair(b, *mb) < std::make_pair(a, *ma)) {
        std::swap(a, b);
        std::swap(ma, mb);
      }
      edges.emplace_back(a, b, ma, mb);
    }
    std::sort(edges.begin(), edges.end(), [](const auto& x, const auto& y) {
      return std::tie(std::get<0>(x), std::get<1>(x), *std::get<2>(x),
                      *std::get<3>(x)) < std::tie(std::get<0>(y), std::get<1>(y),
                                                  *std::get<2>(y), *std::get<3>(y));
    });
    for (const auto& [a, b, ma, mb] : edges) {
      put_u32(out, static_cast<std::uint32_t>(a));
      put_u32(out, static_cast<std::uint32_t>(b));
      put_bytes(out, *ma);
      put_bytes(out, *mb);
    }
    return out;
  }

  const MarkedNetwork& g_;
  const int n_;
  KeyKind kind_ = KeyKind::kUnrooted;
  std::vector<VertexIndex> roots_;
  std::vector<int> vertex_rank_;
  std::vector<std::vector<Arc>> arcs_;
  std::vector<int> colors_;
  std::vector<int> best_position_;
  std::vector<std::array<int, 4>> best_edges_;
  std::vector<std::vector<VertexIndex>> automorphisms_;
};

void ensure_rooted(const MarkedNetwork& g) {
  detail::NetworkCache& cache = g.cache();
  std::call_once(cache.rooted_once, [&] {
    const int n = g.num_vertices();
    cache.rooted.resize(n);
    for (VertexIndex v = 0; v < n; ++v) {
      cache.rooted[v] = compute_canonical_key(g, std::array{v});
    }
    // Orbits: vertices with equal rooted keys, cells ordered by first member.
    std::vector<int> cell_of(n, -1);
    std::vector<std::vector<VertexIndex>> cells;
    for (VertexIndex v = 0; v < n; ++v) {
      if (cell_of[v] >= 0) continue;
      cell_of[v] = static_cast<int>(cells.size());
      cells.push_back({v});
      for (VertexIndex w = v + 1; w < n; ++w) {
        if (cell_of[w] < 0 && cache.rooted[w] == cache.rooted[v]) {
          cell_of[w] = cell_of[v];
          cells.back().push_back(w);
        }
      }
    }
    cache.orbits.cells = std::move(cells);
    cache.orbits.cell_of = std::move(cell_of);
  });
}

void ensure_pairs(const MarkedNetwork& g) {
  detail::NetworkCache& cache = g.cache();
  std::call_once(cache.pairs_once, [&] {
    const int n = g.num_vertices();
    cache.pairs.resize(static_cast<std::size_t>(n) * n);
    for (VertexIndex u = 0; u < n; ++u) {
      for (VertexIndex v = 0; v < n; ++v) {
        cache.pairs[u * n + v] = compute_canonical_key(g, std::array{u, v});
      }
    }
  });
}

}  // namespace

CanonicalLabeling canonical_labeling(const MarkedNetwork& g,
                                     std::span<const VertexIndex> distinguished) {
  if (distinguished.size() > 2) {
    throw Error(ErrorCode::kInvalidArgument, "at most two roots");
  }
  for (VertexIndex r : distinguished) {
    if (r < 0 || r >= g.num_vertices()) {
      throw Error(ErrorCode::kInvalidArgument, "root out of range");
    }
  }
  return Canonicalizer(g, distinguished).run();
}

CanonicalKey compute_canonical_key(const MarkedNetwork& g,
                                   std::span<const VertexIndex> distinguished) {
  return canonical_labeling(g, distinguished).key;
}

const CanonicalKey& canonical_key(const MarkedNetwork& g) {
  detail::NetworkCache& cache = g.cache();
  std::call_once(cache.unrooted_once, [&] {
    cache.unrooted = compute_canonical_key(g, {});
  });
  return cache.unrooted;
}

const CanonicalKey& canonical_key(const MarkedNetwork& g, VertexIndex root) {
  ensure_rooted(g);
  return g.cache().rooted.at(root);
}

const CanonicalKey& canonical_key(const MarkedNetwork& g, VertexIndex first,
                                  VertexIndex second) {
  ensure_pairs(g);
  const int n = g.num_vertices();
  if (first < 0 || first >= n || second < 0 || second >= n) {
    throw Error(ErrorCode::kInvalidArgument, "root out of range");
  }
  return g.cache().pairs[first * n + second];
}

const CanonicalKey& canonical_key(const RootedNetwork& x) {
  return canonical_key(x.network(), x.root());
}

const CanonicalKey& canonical_key(const DoublyRootedNetwork& x) {
  return canonical_key(x.network(), x.first(), x.second());
}

const OrbitPartition& vertex_orbits(const MarkedNetwork& g) {
  ensure_rooted(g);
  return g.cache().orbits;
}

void prefetch_pair_keys(const MarkedNetwork& g) {
  ensure_rooted(g);
  ensure_pairs(g);
}

MarkedNetwork canonical_relabel(const MarkedNetwork& g,
                                std::span<const VertexIndex> distinguished,
                                std::vector<VertexIndex>* new_index) {
  CanonicalLabeling labeling = canonical_labeling(g, distinguished);
  const int n = g.num_vertices();
  std::vector<VertexIndex> position(n);
  for (int p = 0; p < n; ++p) position[labeling.order[p]] = p;
  std::vector<Vertex> vertices(n);
  for (int p = 0; p < n; ++p) vertices[p] = {p, g.mark(labeling.order[p])};
  std::vector<Edge> edges;
  for (const Edge& e : g.edges()) {
    Edge out{0, position[g.index_of(e.u)], position[g.index_of(e.v)], e.mark_u,
             e.mark_v};
    if (std::tie(out.v, out.mark_v) < std::tie(out.u, out.mark_u)) {
      std::swap(out.u, out.v);
      std::swap(out.mark_u, out.mark_v);
    }
    edges.push_back(std::move(out));
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.u, a.v, a.mark_u, a.mark_v) <
           std::tie(b.u, b.v, b.mark_u, b.mark_v);
  });
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i].id = static_cast<std::int64_t>(i);
  }
  if (new_index != nullptr) *new_index = position;
  return MarkedNetwork(std::move(vertices), std::move(edges));
}

}  // namespace unimod
