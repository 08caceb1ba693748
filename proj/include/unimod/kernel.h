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

// Invariant transport kernels.
//
// A kernel assigns a nonnegative mass to every doubly-rooted class; on a
// concrete network it is read as the matrix T_G(u, v). Two representations:
//   * rule kernels compute the matrix from the network structure (identity,
//     uniform, nearest-in-subset); invariant by construction.
//   * table kernels store one value per doubly-rooted key, filled from
//     per-network matrices. Networks never filled in are outside the
//     kernel's domain and evaluate to the zero matrix.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "unimod/canonical.h"
#include "unimod/distribution.h"
#include "unimod/error.h"
#include "unimod/network.h"
#include "unimod/scalar.h"

namespace unimod {

template <typename W = double>
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(int n) : n_(n), data_(static_cast<std::size_t>(n) * n, W(0)) {}

  int size() const { return n_; }
  W& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * n_ + j]; }
  const W& operator()(int i, int j) const {
    return data_[static_cast<std::size_t>(i) * n_ + j];
  }

  W row_sum(int i) const {
    W s = 0;
    for (int j = 0; j < n_; ++j) s += (*this)(i, j);
    return s;
  }
  W col_sum(int j) const {
    W s = 0;
    for (int i = 0; i < n_; ++i) s += (*this)(i, j);
    return s;
  }

  friend SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b) {
    SquareMatrix c(a.n_);
    for (int i = 0; i < a.n_; ++i) {
      for (int k = 0; k < a.n_; ++k) {
        if (a(i, k) == 0) continue;
        for (int j = 0; j < a.n_; ++j) c(i, j) += a(i, k) * b(k, j);
      }
    }
    return c;
  }

  friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

 private:
  int n_ = 0;
  std::vector<W> data_;
};

template <typename W = double>
class Kernel {
 public:
  using Rule = std::function<SquareMatrix<W>(const MarkedNetwork&)>;
  struct TableEntry {
    W value;
    DoublyRootedNetwork representative;
  };
  using Table = std::map<CanonicalKey, TableEntry>;

  static Kernel from_rule(std::string name, Rule rule) {
    Kernel k;
    k.name_ = std::move(name);
    k.rule_ = std::move(rule);
    return k;
  }

  static Kernel identity() {
    return from_rule("identity", [](const MarkedNetwork& g) {
      SquareMatrix<W> m(g.num_vertices());
      for (int i = 0; i < g.num_vertices(); ++i) m(i, i) = 1;
      return m;
    });
  }

  static Kernel uniform() {
    return from_rule("uniform", [](const MarkedNetwork& g) {
      const int n = g.num_vertices();
      SquareMatrix<W> m(n);
      W each = W(1) / W(n);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m(i, j) = each;
      }
      return m;
    });
  }

  // Unit mass from each vertex split evenly over its nearest vertices in S.
  // Vertices of networks where S is empty keep their mass.
  static Kernel to_subset_nearest(const VertexFunction<W>& subset) {
    return from_rule("to-subset-nearest:" + subset.name(), [subset](const MarkedNetwork& g) {
      const int n = g.num_vertices();
      SquareMatrix<W> m(n);
      std::vector<bool> in_s(n);
      for (int v = 0; v < n; ++v) in_s[v] = W(0) < subset(g, v);
      for (int x = 0; x < n; ++x) {
        std::span<const int> dist = g.distances_from(x);
        int best = -1;
        for (int v = 0; v < n; ++v) {
          if (in_s[v] && (best < 0 || dist[v] < best)) best = dist[v];
        }
        if (best < 0) {
          m(x, x) = 1;
          continue;
        }
        int count = 0;
        for (int v = 0; v < n; ++v) count += (in_s[v] && dist[v] == best) ? 1 : 0;
        W each = W(1) / W(count);
        for (int v = 0; v < n; ++v) {
          if (in_s[v] && dist[v] == best) m(x, v) = each;
        }
      }
      return m;
    });
  }

  const std::string& name() const { return name_; }
  bool is_rule() const { return static_cast<bool>(rule_); }
  const Table& table() const { return table_; }
  const std::set<CanonicalKey>& domain() const { return domain_; }

  bool covers(const MarkedNetwork& g) const {
    return is_rule() || domain_.count(canonical_key(g)) > 0;
  }

  SquareMatrix<W> matrix(const MarkedNetwork& g) const {
    if (rule_) return rule_(g);
    const int n = g.num_vertices();
    SquareMatrix<W> m(n);
    if (!covers(g)) return m;
    for (int u = 0; u < n; ++u) {
      for (int v = 0; v < n; ++v) {
        auto it = table_.find(canonical_key(g, u, v));
        if (it != table_.end()) m(u, v) = it->second.value;
      }
    }
    return m;
  }

  W operator()(const MarkedNetwork& g, VertexIndex u, VertexIndex v) const {
    if (rule_) return rule_(g)(u, v);
    if (!covers(g)) return W(0);
    auto it = table_.find(canonical_key(g, u, v));
    return it == table_.end() ? W(0) : it->second.value;
  }

  // Table construction. `set_network` records every pair of g; a pair class
  // already present must carry the same value within `tol`, otherwise the
  // matrix is not invariant and kInvalidArgument is thrown.
  class Builder {
   public:
    explicit Builder(std::string name, double tol = 1e-9) : tol_(tol) {
      kernel_.name_ = std::move(name);
    }

    Builder& set_network(const MarkedNetwork& g, const SquareMatrix<W>& m) {
      if (m.size() != g.num_vertices()) {
        throw Error(ErrorCode::kInvalidArgument, "matrix size mismatch");
      }
      const CanonicalKey& unrooted = canonical_key(g);
      const bool known = kernel_.domain_.count(unrooted) > 0;
      for (int u = 0; u < m.size(); ++u) {
        for (int v = 0; v < m.size(); ++v) {
          const CanonicalKey& key = canonical_key(g, u, v);
          auto it = kernel_.table_.find(key);
          if (it != kernel_.table_.end()) {
            if (!nearly_equal(it->second.value, m(u, v), tol_)) {
              throw Error(ErrorCode::kInvalidArgument,
                          "kernel matrix is not invariant on " + kernel_.name_);
            }
            continue;
          }
          if (known && tolerance_as<W>(tol_) < magnitude(m(u, v))) {
            throw Error(ErrorCode::kInvalidArgument, "conflicting kernel rows");
          }
          if (m(u, v) != 0) {
            kernel_.table_.emplace(key, TableEntry{m(u, v), DoublyRootedNetwork(g, u, v)});
          }
        }
      }
      kernel_.domain_.insert(unrooted);
      return *this;
    }

    // Single entry, e.g. when loading from a file.
    Builder& set_entry(const DoublyRootedNetwork& x, const W& value) {
      kernel_.domain_.insert(canonical_key(x.network()));
      if (value != 0) {
        kernel_.table_.insert_or_assign(canonical_key(x), TableEntry{value, x});
      }
      return *this;
    }

    Kernel build() const { return kernel_; }

   private:
    double tol_;
    Kernel kernel_;
  };

 private:
  std::string name_;
  Rule rule_;
  Table table_;
  std::set<CanonicalKey> domain_;
};

template <typename W>
W out_mass(const Kernel<W>& t, const MarkedNetwork& g, VertexIndex v) {
  return t.matrix(g).row_sum(v);
}

template <typename W>
W in_mass(const Kernel<W>& t, const MarkedNetwork& g, VertexIndex v) {
  return t.matrix(g).col_sum(v);
}

}  // namespace unimod
