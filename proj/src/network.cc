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

#include "unimod/network.h"

#include <algorithm>
#include <array>
#include <deque>
#include <unordered_set>

#include "network_cache.h"
#include "unimod/canonical.h"
#include "unimod/error.h"

namespace unimod {
namespace detail {

NetworkData::NetworkData() : cache(std::make_unique<NetworkCache>()) {}
NetworkData::~NetworkData() = default;

}  // namespace detail

namespace {

std::vector<int> bfs(const detail::NetworkData& data, VertexIndex source) {
  std::vector<int> dist(data.vertices.size(), -1);
  std::deque<VertexIndex> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    VertexIndex x = queue.front();
    queue.pop_front();
    for (const HalfEdge& h : data.adjacency[x]) {
      if (dist[h.neighbor] < 0) {
        dist[h.neighbor] = dist[x] + 1;
        queue.push_back(h.neighbor);
      }
    }
  }
  return dist;
}

void ensure_distances(const MarkedNetwork& g, const detail::NetworkData& data) {
  detail::NetworkCache& cache = *data.cache;
  std::call_once(cache.distances_once, [&] {
    const int n = g.num_vertices();
    cache.distances.assign(static_cast<std::size_t>(n) * n, 0);
    int diameter = 0;
    for (VertexIndex s = 0; s < n; ++s) {
      std::vector<int> row = bfs(data, s);
      std::copy(row.begin(), row.end(), cache.distances.begin() + s * n);
      diameter = std::max(diameter, *std::max_element(row.begin(), row.end()));
    }
    cache.diameter = diameter;
  });
}

}  // namespace

MarkedNetwork::MarkedNetwork(std::vector<Vertex> vertices,
                             std::vector<Edge> edges) {
  auto data = std::make_shared<detail::NetworkData>();
  if (vertices.empty()) {
    throw Error(ErrorCode::kInvalidNetwork, "network has no vertices");
  }
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (!data->index.emplace(vertices[i].id, static_cast<VertexIndex>(i))
             .second) {
      throw Error(ErrorCode::kInvalidNetwork,
                  "duplicate vertex id " + std::to_string(vertices[i].id));
    }
  }
  std::unordered_set<std::int64_t> edge_ids;
  data->adjacency.resize(vertices.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    if (!edge_ids.insert(e.id).second) {
      throw Error(ErrorCode::kInvalidNetwork,
                  "duplicate edge id " + std::to_string(e.id));
    }
    auto u = data->index.find(e.u);
    auto v = data->index.find(e.v);
    if (u == data->index.end() || v == data->index.end()) {
      throw Error(ErrorCode::kInvalidNetwork,
                  "edge " + std::to_string(e.id) + " has a dangling endpoint");
    }
    const int edge = static_cast<int>(i);
    data->adjacency[u->second].push_back({v->second, edge, true});
    data->adjacency[v->second].push_back({u->second, edge, false});
  }
  data->vertices = std::move(vertices);
  data->edges = std::move(edges);
  std::vector<int> reach = bfs(*data, 0);
  if (std::find(reach.begin(), reach.end(), -1) != reach.end()) {
    throw Error(ErrorCode::kInvalidNetwork, "network is disconnected");
  }
  data_ = std::move(data);
}

VertexIndex MarkedNetwork::index_of(VertexId id) const {
  auto it = data_->index.find(id);
  if (it == data_->index.end()) {
    throw Error(ErrorCode::kInvalidArgument,
                "unknown vertex id " + std::to_string(id));
  }
  return it->second;
}

int MarkedNetwork::distance(VertexIndex u, VertexIndex v) const {
  ensure_distances(*this, *data_);
  return data_->cache->distances[u * num_vertices() + v];
}

std::span<const int> MarkedNetwork::distances_from(VertexIndex u) const {
  ensure_distances(*this, *data_);
  const int n = num_vertices();
  return std::span<const int>(data_->cache->distances).subspan(u * n, n);
}

int MarkedNetwork::eccentricity(VertexIndex v) const {
  std::span<const int> row = distances_from(v);
  return *std::max_element(row.begin(), row.end());
}

int MarkedNetwork::diameter() const {
  ensure_distances(*this, *data_);
  return data_->cache->diameter;
}

MarkedNetwork MarkedNetwork::induced(std::span<const VertexIndex> keep) const {
  std::vector<bool> kept(num_vertices(), false);
  std::vector<Vertex> vertices;
  for (VertexIndex v : keep) {
    if (!kept[v]) {
      kept[v] = true;
      vertices.push_back(vertex(v));
    }
  }
  std::vector<Edge> edges;
  for (const Edge& e : data_->edges) {
    if (kept[index_of(e.u)] && kept[index_of(e.v)]) edges.push_back(e);
  }
  return MarkedNetwork(std::move(vertices), std::move(edges));
}

RootedNetwork::RootedNetwork(MarkedNetwork network, VertexIndex root)
    : network_(std::move(network)), root_(root) {
  if (root_ < 0 || root_ >= network_.num_vertices()) {
    throw Error(ErrorCode::kInvalidArgument, "root out of range");
  }
}

RootedNetwork RootedNetwork::by_id(MarkedNetwork network, VertexId root) {
  VertexIndex index = network.index_of(root);
  return RootedNetwork(std::move(network), index);
}

DoublyRootedNetwork::DoublyRootedNetwork(MarkedNetwork network,
                                         VertexIndex first, VertexIndex second)
    : network_(std::move(network)), first_(first), second_(second) {
  const int n = network_.num_vertices();
  if (first_ < 0 || first_ >= n || second_ < 0 || second_ >= n) {
    throw Error(ErrorCode::kInvalidArgument, "root out of range");
  }
}

RootedNetwork ball(const MarkedNetwork& g, VertexIndex v, int radius) {
  std::span<const int> dist = g.distances_from(v);
  std::vector<VertexIndex> keep;
  for (VertexIndex x = 0; x < g.num_vertices(); ++x) {
    if (dist[x] <= radius) keep.push_back(x);
  }
  MarkedNetwork sub = g.induced(keep);
  return RootedNetwork::by_id(std::move(sub), g.id(v));
}

double rooted_distance(const RootedNetwork& x, const RootedNetwork& y) {
  if (canonical_key(x) == canonical_key(y)) return 0.0;
  const int limit = std::max(x.network().eccentricity(x.root()),
                             y.network().eccentricity(y.root()));
  int agreed = 0;
  for (int r = 0; r <= limit; ++r) {
    RootedNetwork bx = ball(x.network(), x.root(), r);
    RootedNetwork by = ball(y.network(), y.root(), r);
    if (compute_canonical_key(bx.network(), std::array{bx.root()}) !=
        compute_canonical_key(by.network(), std::array{by.root()})) {
      break;
    }
    agreed = r;
  }
  return 1.0 / (1.0 + agreed);
}

}  // namespace unimod
