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

// Root-changes, couplings and shift-couplings between finite-support
// distributions on rooted classes.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "unimod/canonical.h"
#include "unimod/distribution.h"
#include "unimod/error.h"
#include "unimod/kernel.h"
#include "unimod/measure.h"
#include "unimod/network.h"
#include "unimod/scalar.h"

namespace unimod {

namespace detail {

// Distinct networks (one representative per unrooted class) of a measure.
template <typename W, typename Rep>
std::map<CanonicalKey, MarkedNetwork> networks_of(const KeyedMeasure<W, Rep>& m) {
  std::map<CanonicalKey, MarkedNetwork> out;
  for (const auto& [key, entry] : m) {
    const MarkedNetwork& g = entry.representative.network();
    out.emplace(canonical_key(g), g);
  }
  return out;
}

}  // namespace detail

// Largest |T^+(o) - 1| over the atoms of mu.
template <typename W>
W markov_defect(const Distribution<W>& mu, const Kernel<W>& t) {
  W worst = 0;
  for (const auto& [key, atom] : mu) {
    const RootedNetwork& x = atom.representative;
    W d = out_mass(t, x.network(), x.root()) - W(1);
    worst = max_of(worst, magnitude(d));
  }
  return worst;
}

template <typename W>
void require_markovian(const Distribution<W>& mu, const Kernel<W>& t, double tol) {
  W defect = markov_defect(mu, t);
  if (tolerance_as<W>(tol) < defect) {
    throw Error(ErrorCode::kNotMarkovian,
                t.name() + " row sums deviate from 1 by " +
                    std::to_string(ScalarTraits<W>::to_double(defect)));
  }
}

// Pushforward of mu under "move the root to v with probability T_G(o,v)".
template <typename W>
Distribution<W> root_change(const Distribution<W>& mu, const Kernel<W>& t,
                            double tol = kDefaultTolerance) {
  require_markovian(mu, t, tol);
  RootedMeasure<W> out;
  for (const auto& [key, atom] : mu) {
    const MarkedNetwork& g = atom.representative.network();
    const VertexIndex o = atom.representative.root();
    SquareMatrix<W> m = t.matrix(g);
    for (VertexIndex v = 0; v < g.num_vertices(); ++v) {
      if (m(o, v) == 0) continue;
      W mass = atom.mass * m(o, v);
      out.add_with_key(canonical_key(g, v), mass, RootedNetwork(g, v));
    }
  }
  out.prune(detail::debris_threshold<W>());
  return Distribution<W>::normalize(out);
}

// Mass p T_G(o,v) on [G,o,v]; first marginal mu, second root_change(mu,T).
template <typename W>
DoublyMeasure<W> coupling_from_kernel(const Distribution<W>& mu, const Kernel<W>& t) {
  DoublyMeasure<W> out;
  for (const auto& [key, atom] : mu) {
    const MarkedNetwork& g = atom.representative.network();
    const VertexIndex o = atom.representative.root();
    SquareMatrix<W> m = t.matrix(g);
    for (VertexIndex v = 0; v < g.num_vertices(); ++v) {
      if (m(o, v) == 0) continue;
      W mass = atom.mass * m(o, v);
      out.add_with_key(canonical_key(g, o, v), mass, DoublyRootedNetwork(g, o, v));
    }
  }
  return out;
}

// Disintegrates Q along its first root. Given the first root [G,o], the
// conditional law of the second root class A is spread uniformly over the
// vertices of class A closest to o. Roots outside the first marginal keep
// their mass (identity row).
template <typename W>
Kernel<W> kernel_from_coupling(const DoublyMeasure<W>& q) {
  if (!(W(0) < q.total())) {
    throw Error(ErrorCode::kZeroMassAtom, "coupling has no mass");
  }
  // first-root class -> (second-root class -> mass)
  std::map<CanonicalKey, std::map<CanonicalKey, W>> conditional;
  std::map<CanonicalKey, W> first_mass;
  for (const auto& [key, entry] : q) {
    const DoublyRootedNetwork& x = entry.representative;
    const CanonicalKey& k1 = canonical_key(x.network(), x.first());
    const CanonicalKey& k2 = canonical_key(x.network(), x.second());
    conditional[k1][k2] += entry.mass;
    first_mass[k1] += entry.mass;
  }
  typename Kernel<W>::Builder builder("from-coupling");
  for (const auto& [ukey, g] : detail::networks_of(q)) {
    const int n = g.num_vertices();
    SquareMatrix<W> m(n);
    for (VertexIndex u = 0; u < n; ++u) {
      auto it = conditional.find(canonical_key(g, u));
      if (it == conditional.end() || !(W(0) < first_mass[it->first])) {
        m(u, u) = 1;
        continue;
      }
      const W& total = first_mass[it->first];
      std::span<const int> dist = g.distances_from(u);
      for (const auto& [k2, mass] : it->second) {
        int nearest = -1;
        std::vector<VertexIndex> closest;
        for (VertexIndex v = 0; v < n; ++v) {
          if (canonical_key(g, v) != k2) continue;
          if (nearest < 0 || dist[v] < nearest) {
            nearest = dist[v];
            closest.clear();
          }
          if (dist[v] == nearest) closest.push_back(v);
        }
        if (closest.empty()) {
          throw Error(ErrorCode::kInvalidArgument,
                      "coupling pairs networks of different classes");
        }
        W share = mass / (total * W(static_cast<int>(closest.size())));
        for (VertexIndex v : closest) m(u, v) += share;
      }
    }
    builder.set_network(g, m);
  }
  return builder.build();
}

// A kernel carrying root_change(mu, T) back to mu.
template <typename W>
Kernel<W> reverse_kernel(const Distribution<W>& mu, const Kernel<W>& t,
                         double tol = kDefaultTolerance) {
  require_markovian(mu, t, tol);
  return kernel_from_coupling(swap(coupling_from_kernel(mu, t)));
}

// t_G(o,v) = sum_z T1_G(o,z) T2_G(z,v) on every network of mu's support.
template <typename W>
Kernel<W> compose(const Kernel<W>& t1, const Kernel<W>& t2, const Distribution<W>& mu,
                  double tol = kDefaultTolerance) {
  require_markovian(mu, t1, tol);
  for (const auto& [key, atom] : mu) {
    const MarkedNetwork& g = atom.representative.network();
    SquareMatrix<W> m1 = t1.matrix(g);
    SquareMatrix<W> m2 = t2.matrix(g);
    const VertexIndex o = atom.representative.root();
    for (VertexIndex z = 0; z < g.num_vertices(); ++z) {
      if (m1(o, z) == 0) continue;
      if (!nearly_equal(m2.row_sum(z), W(1), tol)) {
        throw Error(ErrorCode::kSupportMismatch,
                    t2.name() + " is not Markovian where " + t1.name() + " lands");
      }
    }
  }
  typename Kernel<W>::Builder builder(t1.name() + "*" + t2.name());
  for (const auto& [ukey, g] : detail::networks_of(mu.atoms())) {
    builder.set_network(g, t1.matrix(g) * t2.matrix(g));
  }
  return builder.build();
}

// Q' <= Q with i-th marginal exactly P, by scaling each fibre of Q.
template <typename W>
DoublyMeasure<W> thorisson_split(const RootedMeasure<W>& p, const DoublyMeasure<W>& q,
                                 int which, double tol = kDefaultTolerance) {
  if (which != 1 && which != 2) {
    throw Error(ErrorCode::kInvalidArgument, "marginal index must be 1 or 2");
  }
  RootedMeasure<W> marginal = project(q, which);
  for (const auto& [key, entry] : p) {
    W excess = entry.mass - marginal.mass_of(key);
    if (tolerance_as<W>(tol) < excess) {
      throw Error(ErrorCode::kMarginalDominationViolated,
                  "target exceeds the marginal by " +
                      std::to_string(ScalarTraits<W>::to_double(excess)));
    }
  }
  DoublyMeasure<W> out;
  for (const auto& [key, entry] : q) {
    const DoublyRootedNetwork& x = entry.representative;
    const CanonicalKey& fibre =
        which == 1 ? canonical_key(x.network(), x.first()) : canonical_key(x.network(), x.second());
    W target = p.mass_of(fibre);
    if (target == 0) continue;
    W scaled = entry.mass * target / marginal.mass_of(fibre);
    out.add_with_key(key, scaled, x);
  }
  return out;
}

// Root-change carrying mu1 onto mu2: within each unrooted class C, the new
// root is drawn from mu2's root law on C, uniformly inside each orbit,
// independently of the old root.
template <typename W>
Kernel<W> direct_shift_coupling(const Distribution<W>& mu1, const Distribution<W>& mu2,
                                double tol = kDefaultTolerance) {
  if (!agree_on_invariant(mu1, mu2, tol)) {
    throw Error(ErrorCode::kInvariantMismatch, "unrooted laws differ");
  }
  std::map<CanonicalKey, std::map<CanonicalKey, W>> target;  // C -> [G,v] -> mass
  std::map<CanonicalKey, W> class_mass;
  for (const auto& [key, atom] : mu2) {
    const CanonicalKey& c = canonical_key(atom.representative.network());
    target[c][key] += atom.mass;
    class_mass[c] += atom.mass;
  }
  typename Kernel<W>::Builder builder("direct-shift-coupling");
  for (const auto& [c, g] : detail::networks_of(mu1.atoms())) {
    const int n = g.num_vertices();
    const OrbitPartition& orbits = vertex_orbits(g);
    std::vector<W> row(n, W(0));
    const auto& laws = target.at(c);
    for (VertexIndex v = 0; v < n; ++v) {
      auto it = laws.find(canonical_key(g, v));
      if (it == laws.end()) continue;
      const int orbit_size =
          static_cast<int>(orbits.cells[orbits.cell_of[v]].size());
      row[v] = it->second / (class_mass.at(c) * W(orbit_size));
    }
    SquareMatrix<W> m(n);
    for (VertexIndex o = 0; o < n; ++o) {
      for (VertexIndex v = 0; v < n; ++v) m(o, v) = row[v];
    }
    builder.set_network(g, m);
  }
  return builder.build();
}

template <typename W = double>
struct CouplingStage {
  int stage = 0;
  W lambda_mass = 0;
  W residual_first = 0;
  W residual_second = 0;
};

template <typename W = double>
struct IterativeCoupling {
  Kernel<W> kernel;
  std::vector<CouplingStage<W>> trace;
};

namespace detail {

// S^ up P: mass P[G,o]/|V| on every [G,o,v].
template <typename W>
DoublyMeasure<W> spread_up(const RootedMeasure<W>& p) {
  DoublyMeasure<W> out;
  for (const auto& [key, entry] : p) {
    const MarkedNetwork& g = entry.representative.network();
    const VertexIndex o = entry.representative.root();
    W each = entry.mass / W(g.num_vertices());
    for (VertexIndex v = 0; v < g.num_vertices(); ++v) {
      out.add_with_key(canonical_key(g, o, v), each, DoublyRootedNetwork(g, o, v));
    }
  }
  return out;
}

template <typename W>
RootedMeasure<W> minimum(const RootedMeasure<W>& a, const RootedMeasure<W>& b) {
  RootedMeasure<W> out;
  for (const auto& [key, entry] : a) {
    const auto* other = b.find(key);
    if (other == nullptr) continue;
    out.add_with_key(key, min_of(entry.mass, other->mass), entry.representative);
  }
  return out;
}

template <typename W>
void subtract(RootedMeasure<W>& from, const RootedMeasure<W>& what) {
  for (const auto& [key, entry] : what) {
    W negative = -entry.mass;
    from.add_with_key(key, negative, entry.representative);
  }
  // Clamp rounding undershoot.
  RootedMeasure<W> cleaned;
  for (const auto& [key, entry] : from) {
    if (tolerance_as<W>(debris_threshold<W>()) < entry.mass) {
      cleaned.add_with_key(key, entry.mass, entry.representative);
    }
  }
  from = std::move(cleaned);
}

template <typename W>
void accumulate(DoublyMeasure<W>& into, const DoublyMeasure<W>& what) {
  for (const auto& [key, entry] : what) into.add_with_key(key, entry.mass, entry.representative);
}

}  // namespace detail

// Stage-wise construction: with S the uniform kernel, repeatedly match the
// common part lambda_n of the two spread measures, peel it off both sides
// and accumulate the matched couplings Q and Q'. The final kernel composes
// the root-change mu1 -> alpha (from Q) with the reverse of mu2 -> alpha
// (from Q').
template <typename W>
IterativeCoupling<W> iterative_shift_coupling(const Distribution<W>& mu1,
                                              const Distribution<W>& mu2,
                                              int max_stages = 64, double tol = 1e-10) {
  if (!agree_on_invariant(mu1, mu2, std::max(tol, kDefaultTolerance))) {
    throw Error(ErrorCode::kInvariantMismatch, "unrooted laws differ");
  }
  RootedMeasure<W> p = mu1.atoms();
  RootedMeasure<W> p2 = mu2.atoms();
  DoublyMeasure<W> q, q2;
  IterativeCoupling<W> result;
  const W limit = tolerance_as<W>(tol);
  W residual = max_of(p.total(), p2.total());
  for (int stage = 1; stage <= max_stages && !(residual < limit); ++stage) {
    DoublyMeasure<W> up = detail::spread_up(p);
    DoublyMeasure<W> up2 = detail::spread_up(p2);
    RootedMeasure<W> lambda = detail::minimum(project(up, 2), project(up2, 2));
    DoublyMeasure<W> qn = thorisson_split(lambda, up, 2);
    DoublyMeasure<W> qn2 = thorisson_split(lambda, up2, 2);
    detail::subtract(p, project(qn, 1));
    detail::subtract(p2, project(qn2, 1));
    detail::accumulate(q, qn);
    detail::accumulate(q2, qn2);
    residual = max_of(p.total(), p2.total());
    result.trace.push_back({stage, lambda.total(), p.total(), p2.total()});
  }
  if (!(residual < limit)) {
    throw Error(ErrorCode::kMaxStagesExceeded,
                "residual " + std::to_string(ScalarTraits<W>::to_double(residual)));
  }
  Kernel<W> forward = kernel_from_coupling(q);
  Kernel<W> second_side = kernel_from_coupling(q2);
  // Tolerances here absorb the unmatched residual.
  const double slack = std::max(tol * 10, kDefaultTolerance);
  Kernel<W> backward = reverse_kernel(mu2, second_side, slack);
  result.kernel = compose(forward, backward, mu1, slack);
  return result;
}

template <typename W = double>
struct KernelReport {
  struct AtomReport {
    RootedNetwork atom;
    std::vector<W> out;
    std::vector<W> in;
    W out_discrepancy = 0;
    W in_discrepancy = 0;
    bool covered = true;
  };
  std::vector<AtomReport> atoms;
  bool pass = true;
  W max_discrepancy = 0;
  // Vertex of the worst mismatch, and which side failed ("out" / "in").
  std::optional<RootedNetwork> witness;
  std::string witness_side;
};

// Checks T^+(v) = w1(v) and T^-(v) = w2(v) at every vertex of every atom.
template <typename W>
KernelReport<W> is_balancing(const Distribution<W>& mu, const Kernel<W>& t,
                             const VertexFunction<W>& w1, const VertexFunction<W>& w2,
                             double tol = 1e-9) {
  mu.validate(w1);
  mu.validate(w2);
  KernelReport<W> report;
  for (const auto& [key, atom] : mu) {
    const MarkedNetwork& g = atom.representative.network();
    SquareMatrix<W> m = t.matrix(g);
    typename KernelReport<W>::AtomReport a{atom.representative, {}, {}, W(0), W(0),
                                           t.covers(g)};
    for (VertexIndex v = 0; v < g.num_vertices(); ++v) {
      a.out.push_back(m.row_sum(v));
      a.in.push_back(m.col_sum(v));
      W dout = magnitude(W(a.out.back() - w1(g, v)));
      W din = magnitude(W(a.in.back() - w2(g, v)));
      a.out_discrepancy = max_of(a.out_discrepancy, dout);
      a.in_discrepancy = max_of(a.in_discrepancy, din);
      if (report.max_discrepancy < dout) {
        report.max_discrepancy = dout;
        report.witness = RootedNetwork(g, v);
        report.witness_side = "out";
      }
      if (report.max_discrepancy < din) {
        report.max_discrepancy = din;
        report.witness = RootedNetwork(g, v);
        report.witness_side = "in";
      }
    }
    report.atoms.push_back(std::move(a));
  }
  report.pass = !(tolerance_as<W>(tol) < report.max_discrepancy);
  if (report.pass) report.witness.reset();
  return report;
}

}  // namespace unimod
