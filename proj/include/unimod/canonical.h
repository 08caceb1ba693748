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

// Canonical keys for unrooted, rooted and doubly-rooted marked networks.
//
// Colour refinement seeded by vertex marks (and root flags) followed by an
// individualise-and-refine search over the refined partition. The key is the
// lexicographically least leaf encoding, so equal keys <=> isomorphic
// (mark-preserving, root-preserving). Automorphisms found at equal leaves
// prune sibling branches. Exponential in the worst case; fine up to a few
// dozen vertices.

#include <compare>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "unimod/network.h"

namespace unimod {

enum class KeyKind : unsigned char { kUnrooted = 0, kRooted = 1, kDoublyRooted = 2 };

struct CanonicalKey {
  KeyKind kind = KeyKind::kUnrooted;
  std::string encoding;

  friend auto operator<=>(const CanonicalKey&, const CanonicalKey&) = default;
  friend bool operator==(const CanonicalKey&, const CanonicalKey&) = default;
};

struct CanonicalKeyHash {
  std::size_t operator()(const CanonicalKey& key) const {
    return std::hash<std::string>{}(key.encoding) ^
           static_cast<std::size_t>(key.kind);
  }
};

struct CanonicalLabeling {
  CanonicalKey key;
  // order[i] is the vertex placed at canonical position i.
  std::vector<VertexIndex> order;
};

// `distinguished` holds 0, 1 or 2 vertices (repeats allowed for coinciding
// roots) and selects the key kind.
CanonicalLabeling canonical_labeling(const MarkedNetwork& g,
                                     std::span<const VertexIndex> distinguished);

// Uncached.
CanonicalKey compute_canonical_key(const MarkedNetwork& g,
                                   std::span<const VertexIndex> distinguished);

// Cached on the network.
const CanonicalKey& canonical_key(const MarkedNetwork& g);
const CanonicalKey& canonical_key(const MarkedNetwork& g, VertexIndex root);
const CanonicalKey& canonical_key(const MarkedNetwork& g, VertexIndex first,
                                  VertexIndex second);
const CanonicalKey& canonical_key(const RootedNetwork& x);
const CanonicalKey& canonical_key(const DoublyRootedNetwork& x);

struct OrbitPartition {
  // Cells sorted by smallest member; members ascending.
  std::vector<std::vector<VertexIndex>> cells;
  std::vector<int> cell_of;  // vertex -> cell position
};

const OrbitPartition& vertex_orbits(const MarkedNetwork& g);

// Warms the rooted and doubly-rooted key caches.
void prefetch_pair_keys(const MarkedNetwork& g);

// Relabels vertices 0..n-1 in canonical order (ids = positions). Edge ids
// follow sorted edge order. Useful for stable output.
MarkedNetwork canonical_relabel(const MarkedNetwork& g,
                                std::span<const VertexIndex> distinguished,
                                std::vector<VertexIndex>* new_index = nullptr);

}  // namespace unimod
