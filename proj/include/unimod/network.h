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

// Finite connected marked multigraphs and their rooted variants.
//
// Vertices carry a byte-string mark; every edge carries one mark per
// half-edge. Loops and parallel edges are allowed. Externally vertices and
// edges are named by integer ids; internally everything is addressed by the
// dense position of the vertex in the vertex list (`VertexIndex`).
//
// A MarkedNetwork is immutable. Derived data (canonical keys, orbits,
// distances) is computed lazily into a shared cache that is safe to populate
// from several threads.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace unimod {

using VertexIndex = int;
using VertexId = std::int64_t;
using Mark = std::string;

struct Vertex {
  VertexId id = 0;
  Mark mark;
};

struct Edge {
  std::int64_t id = 0;
  VertexId u = 0;
  VertexId v = 0;
  Mark mark_u;  // half-edge mark at u
  Mark mark_v;  // half-edge mark at v
};

// One end of an edge as seen from a vertex.
struct HalfEdge {
  VertexIndex neighbor = 0;
  int edge = 0;       // position in edges()
  bool at_u = true;   // this end is the edge's u end
};

namespace detail {
struct NetworkCache;

struct NetworkData {
  NetworkData();
  ~NetworkData();
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  std::vector<std::vector<HalfEdge>> adjacency;
  std::unordered_map<VertexId, VertexIndex> index;
  std::unique_ptr<NetworkCache> cache;
};
}  // namespace detail

class MarkedNetwork {
 public:
  // Throws Error(kInvalidNetwork) on duplicate ids, dangling endpoints, an
  // empty vertex list or a disconnected graph.
  MarkedNetwork(std::vector<Vertex> vertices, std::vector<Edge> edges);

  int num_vertices() const {
    return static_cast<int>(data_->vertices.size());
  }
  int num_edges() const { return static_cast<int>(data_->edges.size()); }
  const std::vector<Vertex>& vertices() const { return data_->vertices; }
  const std::vector<Edge>& edges() const { return data_->edges; }
  const Vertex& vertex(VertexIndex v) const { return data_->vertices[v]; }
  const Mark& mark(VertexIndex v) const { return data_->vertices[v].mark; }
  VertexId id(VertexIndex v) const { return data_->vertices[v].id; }
  std::span<const HalfEdge> incident(VertexIndex v) const {
    return data_->adjacency[v];
  }
  int degree(VertexIndex v) const {
    return static_cast<int>(data_->adjacency[v].size());
  }
  const Mark& own_mark(const HalfEdge& h) const {
    const Edge& e = data_->edges[h.edge];
    return h.at_u ? e.mark_u : e.mark_v;
  }
  const Mark& other_mark(const HalfEdge& h) const {
    const Edge& e = data_->edges[h.edge];
    return h.at_u ? e.mark_v : e.mark_u;
  }

  // Throws Error(kInvalidArgument) for an unknown id.
  VertexIndex index_of(VertexId id) const;
  bool has_vertex(VertexId id) const { return data_->index.count(id) > 0; }

  // Graph distance; cached all-pairs BFS.
  int distance(VertexIndex u, VertexIndex v) const;
  std::span<const int> distances_from(VertexIndex u) const;
  int eccentricity(VertexIndex v) const;
  int diameter() const;

  // The sub-multigraph induced on `keep` (edges with both ends kept), ids and
  // marks preserved. Throws kInvalidNetwork if the result is disconnected.
  MarkedNetwork induced(std::span<const VertexIndex> keep) const;

  detail::NetworkCache& cache() const { return *data_->cache; }

 private:
  std::shared_ptr<const detail::NetworkData> data_;
};

class RootedNetwork {
 public:
  RootedNetwork(MarkedNetwork network, VertexIndex root);
  static RootedNetwork by_id(MarkedNetwork network, VertexId root);

  const MarkedNetwork& network() const { return network_; }
  VertexIndex root() const { return root_; }

 private:
  MarkedNetwork network_;
  VertexIndex root_;
};

class DoublyRootedNetwork {
 public:
  DoublyRootedNetwork(MarkedNetwork network, VertexIndex first,
                      VertexIndex second);

  const MarkedNetwork& network() const { return network_; }
  VertexIndex first() const { return first_; }
  VertexIndex second() const { return second_; }

  RootedNetwork first_rooted() const { return {network_, first_}; }
  RootedNetwork second_rooted() const { return {network_, second_}; }
  DoublyRootedNetwork swapped() const { return {network_, second_, first_}; }

 private:
  MarkedNetwork network_;
  VertexIndex first_;
  VertexIndex second_;
};

// Closed ball of radius r around v, rooted at v.
RootedNetwork ball(const MarkedNetwork& g, VertexIndex v, int radius);

// Ultrametric on rooted classes: 1/(1+r*) with r* the largest radius whose
// balls are isomorphic (1 when already the 1-balls differ), 0 for equal classes.
double rooted_distance(const RootedNetwork& x, const RootedNetwork& y);

}  // namespace unimod
