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

// Stable transport between site weights w1 and center weights w2 on one
// finite network, by staged applications and rejections: every site applies
// to its closest centers, every center rejects its farthest applicants.
// Plus the balancing, extra-head and conditioning kernels built from it.

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "unimod/distribution.h"
#include "unimod/error.h"
#include "unimod/kernel.h"
#include "unimod/network.h"
#include "unimod/scalar.h"

namespace unimod {

template <typename W = double>
struct StableState {
  MarkedNetwork network;
  std::vector<W> w1;
  std::vector<W> w2;
  SquareMatrix<W> applied;   // A_n, site x center
  SquareMatrix<W> rejected;  // R_n
  std::vector<int> application_radius;
  std::vector<int> rejection_radius;
  std::vector<W> application_fraction;  // c_n
  std::vector<W> rejection_fraction;    // c'_n
  int stage = 0;
};

template <typename W = double>
struct StableStage {
  int stage = 0;
  std::vector<int> application_radius;
  std::vector<int> rejection_radius;
  W sup_change = 0;
};

template <typename W = double>
struct StableResult {
  SquareMatrix<W> transport;
  bool converged = false;
  int stages = 0;
  W sup_change = 0;
  std::vector<VertexIndex> exhausted;
  std::vector<VertexIndex> sated;
  std::vector<StableStage<W>> trace;
};

namespace detail {

// Sums in ascending order so automorphic vertices see bit-identical totals.
template <typename W>
W ordered_sum(std::vector<W>& values) {
  if constexpr (!ScalarTraits<W>::kExact) std::sort(values.begin(), values.end());
  W s = 0;
  for (const W& x : values) s += x;
  return s;
}

// Rounding slack for the radius thresholds.
template <typename W>
W threshold_slack(const W& target) {
  if constexpr (ScalarTraits<W>::kExact) {
    return W(0);
  } else {
    return 1e-12 * std::max(1.0, target);
  }
}

template <typename W>
W clamp_unit(const W& x) {
  if (x < 0) return W(0);
  if (W(1) < x) return W(1);
  return x;
}

template <typename W>
void check_weights(const MarkedNetwork& g, const std::vector<W>& w1,
                   const std::vector<W>& w2) {
  if (static_cast<int>(w1.size()) != g.num_vertices() ||
      static_cast<int>(w2.size()) != g.num_vertices()) {
    throw Error(ErrorCode::kInvalidArgument, "weight vector size mismatch");
  }
  for (int v = 0; v < g.num_vertices(); ++v) {
    if (w1[v] < 0 || w2[v] < 0) {
      throw Error(ErrorCode::kInvalidArgument, "weights must be nonnegative");
    }
  }
}

}  // namespace detail

template <typename W>
StableState<W> initial_state(const MarkedNetwork& g, std::vector<W> w1, std::vector<W> w2) {
  detail::check_weights(g, w1, w2);
  const int n = g.num_vertices();
  StableState<W> s{g,
                   std::move(w1),
                   std::move(w2),
                   SquareMatrix<W>(n),
                   SquareMatrix<W>(n),
                   std::vector<int>(n, 0),
                   std::vector<int>(n, 0),
                   std::vector<W>(n, W(0)),
                   std::vector<W>(n, W(0)),
                   0};
  return s;
}

// Step (i) of stage n+1: A from the previous rejections.
template <typename W>
StableState<W> application_step(const StableState<W>& prev) {
  StableState<W> s = prev;
  s.stage = prev.stage + 1;
  const MarkedNetwork& g = s.network;
  const int n = g.num_vertices();
  const int diameter = g.diameter();
  for (VertexIndex x = 0; x < n; ++x) {
    std::span<const int> dist = g.distances_from(x);
    // Free capacity per distance shell.
    std::vector<std::vector<W>> shells(diameter + 1);
    for (VertexIndex xi = 0; xi < n; ++xi) {
      shells[dist[xi]].push_back(s.w2[xi] - prev.rejected(x, xi));
    }
    const W& demand = s.w1[x];
    const W need = demand - detail::threshold_slack(demand);
    W inner = 0;
    W boundary = 0;
    int radius = -1;
    for (int a = 0; a <= diameter; ++a) {
      boundary = detail::ordered_sum(shells[a]);
      if (!(inner + boundary < need)) {
        radius = a;
        break;
      }
      inner += boundary;
    }
    // open = 1 - c is kept separately: with a huge w2 and a small demand,
    // forming 1 - c from c would lose most of its digits.
    W open = 1;
    if (radius < 0) {
      // Demand exceeds everything reachable: apply fully everywhere.
      radius = diameter;
    } else if (boundary == 0) {
      open = 0;
    } else {
      open = detail::clamp_unit(W((demand - inner) / boundary));
    }
    s.application_radius[x] = radius;
    s.application_fraction[x] = W(1) - open;
    for (VertexIndex xi = 0; xi < n; ++xi) {
      if (dist[xi] < radius) {
        s.applied(x, xi) = s.w2[xi];
      } else if (dist[xi] == radius) {
        const W& r = prev.rejected(x, xi);
        s.applied(x, xi) = r + open * (s.w2[xi] - r);
      } else {
        s.applied(x, xi) = 0;
      }
    }
  }
  return s;
}

// Step (ii): R from the current applications.
template <typename W>
StableState<W> rejection_step(const StableState<W>& prev) {
  StableState<W> s = prev;
  const MarkedNetwork& g = s.network;
  const int n = g.num_vertices();
  const int diameter = g.diameter();
  for (VertexIndex xi = 0; xi < n; ++xi) {
    std::span<const int> dist = g.distances_from(xi);
    std::vector<std::vector<W>> shells(diameter + 1);
    for (VertexIndex x = 0; x < n; ++x) shells[dist[x]].push_back(s.applied(x, xi));
    const W& capacity = s.w2[xi];
    const W need = capacity - detail::threshold_slack(capacity);
    W inner = 0;
    W boundary = 0;
    int radius = -1;
    for (int r = 0; r <= diameter; ++r) {
      boundary = detail::ordered_sum(shells[r]);
      if (!(inner + boundary < need)) {
        radius = r;
        break;
      }
      inner += boundary;
    }
    W kept = 1;  // 1 - c'
    if (radius < 0) {
      // Under-applied: keep everything.
      radius = diameter;
    } else if (boundary == 0) {
      kept = 0;
    } else {
      kept = detail::clamp_unit(W((capacity - inner) / boundary));
    }
    s.rejection_radius[xi] = radius;
    s.rejection_fraction[xi] = W(1) - kept;
    for (VertexIndex x = 0; x < n; ++x) {
      if (dist[x] < radius) {
        s.rejected(x, xi) = 0;
      } else if (dist[x] == radius) {
        s.rejected(x, xi) = s.applied(x, xi) - kept * s.applied(x, xi);
      } else {
        s.rejected(x, xi) = s.applied(x, xi);
      }
    }
  }
  return s;
}

template <typename W>
SquareMatrix<W> current_transport(const StableState<W>& s) {
  const int n = s.network.num_vertices();
  SquareMatrix<W> t(n);
  for (int x = 0; x < n; ++x) {
    for (int xi = 0; xi < n; ++xi) t(x, xi) = s.applied(x, xi) - s.rejected(x, xi);
  }
  return t;
}

template <typename W>
int default_max_stages(const MarkedNetwork& g) {
  return 4 * (g.diameter() + 2);
}

// The boundary fractions approach their limits geometrically, often far past
// default_max_stages. Constructions that need the limit itself use this cap.
inline constexpr int kLimitStages = 200000;

// Iterates stages until no entry of A or R moves by `tol` or more. A result
// that hit `max_stages` first is returned with converged = false.
template <typename W>
StableResult<W> stable_transport(const MarkedNetwork& g, std::vector<W> w1, std::vector<W> w2,
                                 int max_stages = -1, double tol = 1e-12,
                                 double flag_tol = 1e-9) {
  if (max_stages < 0) max_stages = default_max_stages<W>(g);
  StableState<W> state = initial_state(g, std::move(w1), std::move(w2));
  StableResult<W> result;
  const int n = g.num_vertices();
  const W limit = tolerance_as<W>(tol);
  while (state.stage < max_stages) {
    StableState<W> next = rejection_step(application_step(state));
    W change = 0;
    for (int x = 0; x < n; ++x) {
      for (int xi = 0; xi < n; ++xi) {
        change = max_of(change, magnitude(W(next.applied(x, xi) - state.applied(x, xi))));
        change = max_of(change, magnitude(W(next.rejected(x, xi) - state.rejected(x, xi))));
      }
    }
    state = std::move(next);
    result.trace.push_back(
        {state.stage, state.application_radius, state.rejection_radius, change});
    result.sup_change = change;
    if (change < limit) {
      result.converged = true;
      break;
    }
  }
  result.stages = state.stage;
  result.transport = current_transport(state);
  for (VertexIndex v = 0; v < n; ++v) {
    if (nearly_equal(result.transport.row_sum(v), state.w1[v], flag_tol)) {
      result.exhausted.push_back(v);
    }
    if (nearly_equal(result.transport.col_sum(v), state.w2[v], flag_tol)) {
      result.sated.push_back(v);
    }
  }
  return result;
}

template <typename W>
StableResult<W> stable_transport(const MarkedNetwork& g, const VertexFunction<W>& w1,
                                 const VertexFunction<W>& w2, int max_stages = -1,
                                 double tol = 1e-12) {
  w1.validate_on(g);
  w2.validate_on(g);
  return stable_transport(g, w1.values(g), w2.values(g), max_stages, tol);
}

struct DesirePair {
  VertexIndex site;
  VertexIndex center;
  friend bool operator==(const DesirePair&, const DesirePair&) = default;
};

// Site x desires center xi if T(x,xi) < w2(xi) and x is unexhausted or sends
// mass to some center farther than xi. Center xi desires x if T(x,xi) < w2(xi)
// and xi is unsated or receives mass from some site farther than x. Returns
// the pairs desiring each other.
template <typename W>
std::vector<DesirePair> check_stability(const MarkedNetwork& g, const SquareMatrix<W>& t,
                                        const std::vector<W>& w1, const std::vector<W>& w2,
                                        double tol = 1e-9) {
  detail::check_weights(g, w1, w2);
  const int n = g.num_vertices();
  const W eps = tolerance_as<W>(tol);
  std::vector<bool> exhausted(n), sated(n);
  for (int v = 0; v < n; ++v) {
    exhausted[v] = nearly_equal(t.row_sum(v), w1[v], tol);
    sated[v] = nearly_equal(t.col_sum(v), w2[v], tol);
  }
  std::vector<DesirePair> out;
  for (VertexIndex x = 0; x < n; ++x) {
    for (VertexIndex xi = 0; xi < n; ++xi) {
      if (!(t(x, xi) + eps < w2[xi])) continue;
      const int d = g.distance(x, xi);
      bool site_wants = !exhausted[x];
      for (VertexIndex far = 0; far < n && !site_wants; ++far) {
        site_wants = g.distance(x, far) > d && eps < t(x, far);
      }
      if (!site_wants) continue;
      bool center_wants = !sated[xi];
      for (VertexIndex far = 0; far < n && !center_wants; ++far) {
        center_wants = g.distance(far, xi) > d && eps < t(far, xi);
      }
      if (center_wants) out.push_back({x, xi});
    }
  }
  return out;
}

// Stable transport on every supported network, required to balance w1 and
// w2 exactly.
template <typename W>
Kernel<W> balancing_kernel(const Distribution<W>& mu, const VertexFunction<W>& w1,
                           const VertexFunction<W>& w2, double tol = 1e-9,
                           int max_stages = kLimitStages) {
  std::map<CanonicalKey, W> e1 = cond_expectation(mu, w1);
  std::map<CanonicalKey, W> e2 = cond_expectation(mu, w2);
  for (const auto& [key, value] : e1) {
    if (!nearly_equal(value, e2.at(key), tol)) {
      throw Error(ErrorCode::kIntensityMismatch,
                  "E[" + w1.name() + "|I] differs from E[" + w2.name() + "|I]");
    }
  }
  typename Kernel<W>::Builder builder("stable:" + w1.name() + "->" + w2.name());
  std::map<CanonicalKey, MarkedNetwork> networks;
  for (const auto& [key, atom] : mu) {
    const MarkedNetwork& g = atom.representative.network();
    networks.emplace(canonical_key(g), g);
  }
  for (const auto& [key, g] : networks) {
    std::vector<W> v1 = w1.values(g);
    std::vector<W> v2 = w2.values(g);
    StableResult<W> r = stable_transport(g, v1, v2, max_stages);
    for (VertexIndex v = 0; v < g.num_vertices(); ++v) {
      if (!nearly_equal(r.transport.row_sum(v), v1[v], tol) ||
          !nearly_equal(r.transport.col_sum(v), v2[v], tol)) {
        throw Error(ErrorCode::kBalanceFailed,
                    "stable transport does not balance at vertex id " +
                        std::to_string(g.id(v)));
      }
    }
    builder.set_network(g, r.transport);
  }
  return builder.build();
}

// Vertex marks "1"/"0". Each supported network must carry exactly p|V| ones.
template <typename W>
Kernel<W> extra_head_kernel(const Distribution<W>& mu, const W& p, double tol = 1e-9) {
  if (!(W(0) < p) || W(1) < p) {
    throw Error(ErrorCode::kInvalidArgument, "p must lie in (0, 1]");
  }
  for (const auto& [key, atom] : mu) {
    const MarkedNetwork& g = atom.representative.network();
    int ones = 0;
    for (VertexIndex v = 0; v < g.num_vertices(); ++v) ones += g.mark(v) == "1" ? 1 : 0;
    W expected = p * W(g.num_vertices());
    if (!nearly_equal(W(ones), expected, tol)) {
      throw Error(ErrorCode::kMarkCountMismatch,
                  std::to_string(ones) + " ones on " + std::to_string(g.num_vertices()) +
                      " vertices");
    }
  }
  W inverse = W(1) / p;
  return balancing_kernel(mu, VertexFunction<W>::constant(W(1)),
                          VertexFunction<W>::mark_value("1", inverse), tol);
}

template <typename W>
Kernel<W> conditioning_kernel(const Distribution<W>& mu, const VertexFunction<W>& subset,
                              double tol = 1e-9) {
  std::map<CanonicalKey, W> intensity = cond_expectation(mu, subset);
  if (!is_constant(intensity, tol)) {
    throw Error(ErrorCode::kNonConstantIntensity,
                "P[o in S | I] varies across classes");
  }
  W p = 0;
  for (const auto& [key, atom] : mu) {
    p += atom.mass * subset(atom.representative.network(), atom.representative.root());
  }
  if (!(W(0) < p)) throw Error(ErrorCode::kZeroMass, "P[o in S] = 0");
  W inverse = W(1) / p;
  VertexFunction<W> target(subset.name() + "/P", [subset, inverse](const MarkedNetwork& g,
                                                                  VertexIndex v) {
    W x = subset(g, v) * inverse;
    return x;
  });
  return balancing_kernel(mu, VertexFunction<W>::constant(W(1)), target, tol);
}

}  // namespace unimod
