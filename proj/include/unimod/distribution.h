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

// Finite-support probability measures on rooted classes and the operations
// that act on them: biasing, unrooting, conditioning, the doubly-rooted
// measure induced by a distribution, and the exact unimodularity check.
//
// At finite support the mass transport principle over all g is the same as
// swap-symmetry of the induced doubly-rooted measure, since indicators of
// doubly-rooted classes span every g.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>

#include "unimod/canonical.h"
#include "unimod/error.h"
#include "unimod/measure.h"
#include "unimod/network.h"
#include "unimod/scalar.h"

namespace unimod {

inline constexpr double kDefaultTolerance = 1e-12;

// A class-invariant function of a rooted network, evaluated on a concrete
// (network, vertex) pair.
template <typename W = double>
class VertexFunction {
 public:
  using Evaluator = std::function<W(const MarkedNetwork&, VertexIndex)>;

  VertexFunction(std::string name, Evaluator evaluator)
      : name_(std::move(name)), evaluator_(std::move(evaluator)) {}

  const std::string& name() const { return name_; }
  W operator()(const MarkedNetwork& g, VertexIndex v) const {
    return evaluator_(g, v);
  }

  std::vector<W> values(const MarkedNetwork& g) const {
    std::vector<W> out;
    out.reserve(g.num_vertices());
    for (VertexIndex v = 0; v < g.num_vertices(); ++v) out.push_back((*this)(g, v));
    return out;
  }

  // Throws kNonInvariantFunction if two vertices with equal rooted keys get
  // different values.
  void validate_on(const MarkedNetwork& g, double tol = kDefaultTolerance) const {
    for (const auto& cell : vertex_orbits(g).cells) {
      W first = (*this)(g, cell.front());
      if (first < 0) {
        throw Error(ErrorCode::kNonInvariantFunction,
                    name_ + " takes a negative value");
      }
      for (VertexIndex v : cell) {
        if (!nearly_equal((*this)(g, v), first, tol)) {
          throw Error(ErrorCode::kNonInvariantFunction,
                      name_ + " differs on isomorphic roots");
        }
      }
    }
  }

  static VertexFunction constant(const W& c) {
    return VertexFunction("const", [c](const MarkedNetwork&, VertexIndex) { return c; });
  }
  // x if the vertex mark equals `mark`, else 0.
  static VertexFunction mark_value(const Mark& mark, const W& x) {
    return VertexFunction("mark:" + mark, [mark, x](const MarkedNetwork& g, VertexIndex v) {
      return g.mark(v) == mark ? x : W(0);
    });
  }
  static VertexFunction indicator_mark(const Mark& mark) {
    return mark_value(mark, W(1));
  }
  // 1 on vertices whose mark starts with `prefix`, else 0.
  static VertexFunction mark_prefix(const Mark& prefix) {
    return VertexFunction("mark-prefix:" + prefix, [prefix](const MarkedNetwork& g,
                                                           VertexIndex v) {
      return g.mark(v).compare(0, prefix.size(), prefix) == 0 ? W(1) : W(0);
    });
  }
  static VertexFunction degree() {
    return VertexFunction("degree", [](const MarkedNetwork& g, VertexIndex v) {
      return W(g.degree(v));
    });
  }
  static VertexFunction vertex_count() {
    return VertexFunction("vertex-count", [](const MarkedNetwork& g, VertexIndex) {
      return W(g.num_vertices());
    });
  }

  friend VertexFunction operator*(const VertexFunction& a, const VertexFunction& b) {
    return VertexFunction(a.name_ + "*" + b.name_,
                          [a, b](const MarkedNetwork& g, VertexIndex v) {
                            W x = a(g, v) * b(g, v);
                            return x;
                          });
  }

 private:
  std::string name_;
  Evaluator evaluator_;
};

template <typename W = double>
class Distribution {
 public:
  // Validates total mass 1 within `tol`. Throws kZeroMass for an empty
  // measure and kInvalidArgument for any other total.
  static Distribution from_measure(RootedMeasure<W> atoms,
                                   double tol = kDefaultTolerance) {
    if (atoms.empty()) throw Error(ErrorCode::kZeroMass, "empty distribution");
    W total = atoms.total();
    if (!nearly_equal(total, W(1), tol)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "weights sum to " + std::to_string(ScalarTraits<W>::to_double(total)));
    }
    for (const auto& [key, entry] : atoms) {
      if (entry.mass < 0) {
        throw Error(ErrorCode::kInvalidArgument, "negative atom weight");
      }
    }
    return Distribution(std::move(atoms));
  }

  // Rescales a finite measure to total mass 1. Throws kZeroMass.
  static Distribution normalize(const RootedMeasure<W>& atoms) {
    W total = atoms.total();
    if (!(W(0) < total)) throw Error(ErrorCode::kZeroMass, "measure has no mass");
    W inverse = W(1) / total;
    return Distribution(atoms.scaled(inverse));
  }

  static Distribution point(const RootedNetwork& x) {
    RootedMeasure<W> m;
    m.add(W(1), x);
    return Distribution(std::move(m));
  }

  static Distribution uniform_root(const MarkedNetwork& g) {
    RootedMeasure<W> m;
    W each = W(1) / W(g.num_vertices());
    for (VertexIndex v = 0; v < g.num_vertices(); ++v) m.add(each, RootedNetwork(g, v));
    return Distribution(std::move(m));
  }

  const RootedMeasure<W>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  W weight_of(const CanonicalKey& key) const { return atoms_.mass_of(key); }
  auto begin() const { return atoms_.begin(); }
  auto end() const { return atoms_.end(); }

  template <typename F>
  void validate(const VertexFunction<F>& f, double tol = kDefaultTolerance) const {
    for (const auto& [key, entry] : atoms_) f.validate_on(entry.representative.network(), tol);
  }

 private:
  explicit Distribution(RootedMeasure<W> atoms) : atoms_(std::move(atoms)) {}
  RootedMeasure<W> atoms_;
};

template <typename W>
bool distributions_close(const Distribution<W>& a, const Distribution<W>& b,
                         double tol = kDefaultTolerance) {
  return measures_close(a.atoms(), b.atoms(), tol);
}

// For each atom (p, [G,o]) and each admitted v, mass p on [G,o,v]. With no
// restriction every vertex is admitted; otherwise v is admitted iff
// restrict(G,v) > 0.
template <typename W>
DoublyMeasure<W> induced_doubly_measure(
    const Distribution<W>& mu,
    const std::optional<VertexFunction<W>>& restrict = std::nullopt) {
  DoublyMeasure<W> out;
  for (const auto& [key, atom] : mu) {
    const MarkedNetwork& g = atom.representative.network();
    const VertexIndex o = atom.representative.root();
    if (restrict) restrict->validate_on(g);
    for (VertexIndex v = 0; v < g.num_vertices(); ++v) {
      if (restrict && !(W(0) < (*restrict)(g, v))) continue;
      out.add_with_key(canonical_key(g, o, v), atom.mass, DoublyRootedNetwork(g, o, v));
    }
  }
  return out;
}

template <typename W>
DoublyMeasure<W> swap(const DoublyMeasure<W>& d) {
  DoublyMeasure<W> out;
  for (const auto& [key, entry] : d) out.add(entry.mass, entry.representative.swapped());
  return out;
}

template <typename W = double>
struct SymmetryReport {
  bool pass = true;
  W max_discrepancy = 0;
  // A class receiving more mass than it sends: the indicator g of this
  // class has E[g^-(o)] > E[g^+(o)].
  std::optional<DoublyRootedNetwork> witness;
};

template <typename W>
SymmetryReport<W> check_swap_symmetry(const DoublyMeasure<W>& d, double tol) {
  DoublyMeasure<W> s = swap(d);
  SymmetryReport<W> report;
  W worst_excess = 0;
  auto visit = [&](const CanonicalKey& key, const DoublyRootedNetwork& rep) {
    W excess = s.mass_of(key) - d.mass_of(key);
    W m = magnitude(excess);
    if (report.max_discrepancy < m) report.max_discrepancy = m;
    if (worst_excess < excess) {
      worst_excess = excess;
      report.witness = rep;
    }
  };
  for (const auto& [key, entry] : d) visit(key, entry.representative);
  for (const auto& [key, entry] : s) visit(key, entry.representative);
  report.pass = !(tolerance_as<W>(tol) < report.max_discrepancy);
  if (report.pass) report.witness.reset();
  return report;
}

template <typename W>
SymmetryReport<W> is_unimodular(const Distribution<W>& mu,
                                double tol = kDefaultTolerance) {
  return check_swap_symmetry(induced_doubly_measure(mu), tol);
}

// Weights multiplied by w at the root, renormalised. Throws kZeroMass.
template <typename W>
Distribution<W> bias(const Distribution<W>& mu, const VertexFunction<W>& w) {
  mu.validate(w);
  RootedMeasure<W> m;
  for (const auto& [key, atom] : mu) {
    W value = atom.mass * w(atom.representative.network(), atom.representative.root());
    m.add_with_key(key, value, atom.representative);
  }
  if (!(W(0) < m.total())) {
    throw Error(ErrorCode::kZeroMass, "bias by " + w.name() + " has no mass");
  }
  return Distribution<W>::normalize(m);
}

template <typename W>
UnrootedMeasure<W> unroot(const Distribution<W>& mu) {
  UnrootedMeasure<W> out;
  for (const auto& [key, atom] : mu) out.add(atom.mass, atom.representative.network());
  return out;
}

template <typename W>
bool agree_on_invariant(const Distribution<W>& a, const Distribution<W>& b,
                        double tol = kDefaultTolerance) {
  return measures_close(unroot(a), unroot(b), tol);
}

// Per unrooted class C: sum_{atoms in C} p w(root) / sum_{atoms in C} p.
template <typename W>
std::map<CanonicalKey, W> cond_expectation(const Distribution<W>& mu,
                                           const VertexFunction<W>& w) {
  mu.validate(w);
  std::map<CanonicalKey, std::pair<W, W>> sums;
  for (const auto& [key, atom] : mu) {
    const RootedNetwork& x = atom.representative;
    auto& [num, den] = sums[canonical_key(x.network())];
    num += atom.mass * w(x.network(), x.root());
    den += atom.mass;
  }
  std::map<CanonicalKey, W> out;
  for (const auto& [key, nd] : sums) out.emplace(key, W(nd.first / nd.second));
  return out;
}

template <typename W>
bool is_constant(const std::map<CanonicalKey, W>& values, double tol) {
  if (values.empty()) return true;
  const W& first = values.begin()->second;
  for (const auto& [key, value] : values) {
    if (!nearly_equal(value, first, tol)) return false;
  }
  return true;
}

template <typename W = double>
struct Conditioned {
  Distribution<W> distribution;
  // True iff P[o in S | I] is the same for every unrooted class, the
  // criterion for reaching the conditioned law by a root-change.
  bool constant_intensity;
};

template <typename W>
Conditioned<W> condition_on_subset(const Distribution<W>& mu,
                                   const VertexFunction<W>& subset,
                                   double tol = kDefaultTolerance) {
  Distribution<W> conditioned = bias(mu, subset);
  return {std::move(conditioned), is_constant(cond_expectation(mu, subset), tol)};
}

}  // namespace unimod
