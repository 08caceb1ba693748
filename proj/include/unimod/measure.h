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

// Finite measures on isomorphism classes, keyed by canonical key.
//
// A KeyedMeasure keeps, per class, its mass and one representative object
// (the first one added). Iteration is in canonical-key order, which makes
// every derived output deterministic.

#include <map>
#include <optional>
#include <utility>

#include "unimod/canonical.h"
#include "unimod/network.h"
#include "unimod/scalar.h"

namespace unimod {

template <typename W, typename Rep>
class KeyedMeasure {
 public:
  struct Entry {
    W mass;
    Rep representative;
  };
  using Map = std::map<CanonicalKey, Entry>;

  // Adds `mass` to the class of `rep`. Zero masses are dropped.
  void add(const W& mass, const Rep& rep) {
    if (mass == 0) return;
    add_with_key(canonical_key(rep), mass, rep);
  }

  void add_with_key(const CanonicalKey& key, const W& mass, const Rep& rep) {
    if (mass == 0) return;
    auto it = entries_.find(key);
    if (it == entries_.end()) {
      entries_.emplace(key, Entry{mass, rep});
    } else {
      it->second.mass += mass;
    }
  }

  W mass_of(const CanonicalKey& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? W(0) : it->second.mass;
  }

  const Entry* find(const CanonicalKey& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
  }

  W total() const {
    W sum = 0;
    for (const auto& [key, entry] : entries_) sum += entry.mass;
    return sum;
  }

  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  const Map& entries() const { return entries_; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  KeyedMeasure scaled(const W& factor) const {
    KeyedMeasure out;
    for (const auto& [key, entry] : entries_) {
      W m = entry.mass * factor;
      out.add_with_key(key, m, entry.representative);
    }
    return out;
  }

  // Drops entries whose mass is within `tol` of zero (float cleanup).
  void prune(double tol) {
    for (auto it = entries_.begin(); it != entries_.end();) {
      if (magnitude(it->second.mass) <= tolerance_as<W>(tol)) {
        it = entries_.erase(it);
      } else {
        ++it;
      }
    }
  }

 private:
  Map entries_;
};

template <typename W>
using RootedMeasure = KeyedMeasure<W, RootedNetwork>;
template <typename W>
using DoublyMeasure = KeyedMeasure<W, DoublyRootedNetwork>;
template <typename W>
using UnrootedMeasure = KeyedMeasure<W, MarkedNetwork>;

namespace detail {
// Entries below this are rounding debris in float mode; nothing is dropped
// in exact mode.
template <typename W>
double debris_threshold() {
  return ScalarTraits<W>::kExact ? 0.0 : 1e-15;
}

}  // namespace detail

// Largest |a[k] - b[k]| over the union of keys, with the key attaining it.
template <typename W, typename Rep>
std::pair<W, std::optional<CanonicalKey>> max_difference(
    const KeyedMeasure<W, Rep>& a, const KeyedMeasure<W, Rep>& b) {
  W best = 0;
  std::optional<CanonicalKey> where;
  auto visit = [&](const CanonicalKey& key) {
    W d = a.mass_of(key) - b.mass_of(key);
    W m = magnitude(d);
    if (best < m) {
      best = m;
      where = key;
    }
  };
  for (const auto& [key, entry] : a) visit(key);
  for (const auto& [key, entry] : b) visit(key);
  return {best, where};
}

template <typename W, typename Rep>
bool measures_close(const KeyedMeasure<W, Rep>& a,
                    const KeyedMeasure<W, Rep>& b, double tol) {
  return !(tolerance_as<W>(tol) < max_difference(a, b).first);
}

// Push a doubly-rooted measure to its first or second root.
template <typename W>
RootedMeasure<W> project(const DoublyMeasure<W>& q, int which) {
  RootedMeasure<W> out;
  for (const auto& [key, entry] : q) {
    const DoublyRootedNetwork& rep = entry.representative;
    out.add(entry.mass, which == 1 ? rep.first_rooted() : rep.second_rooted());
  }
  return out;
}

}  // namespace unimod
