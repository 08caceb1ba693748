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

// Extensions: a rooted distribution together with a covariant subnetwork S
// containing the root; properness, and the P_T / P'_T unimodularizers.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "unimod/distribution.h"
#include "unimod/error.h"
#include "unimod/kernel.h"
#include "unimod/measure.h"
#include "unimod/network.h"
#include "unimod/scalar.h"
#include "unimod/stable.h"

namespace unimod {

template <typename W = double>
struct Extension {
  Distribution<W> mu;
  VertexFunction<W> subnetwork;  // 0/1 indicator of S

  bool in_s(const MarkedNetwork& g, VertexIndex v) const { return W(0) < subnetwork(g, v); }
  std::vector<VertexIndex> s_vertices(const MarkedNetwork& g) const {
    std::vector<VertexIndex> out;
    for (VertexIndex v = 0; v < g.num_vertices(); ++v) {
      if (in_s(g, v)) out.push_back(v);
    }
    return out;
  }
};

// Throws kRootOutsideS or kSDisconnected.
template <typename W>
void validate_extension(const Extension<W>& ext) {
  ext.mu.validate(ext.subnetwork);
  for (const auto& [key, atom] : ext.mu) {
    const MarkedNetwork& g = atom.representative.network();
    if (!ext.in_s(g, atom.representative.root())) {
      throw Error(ErrorCode::kRootOutsideS, "root vertex id " +
                                                std::to_string(g.id(atom.representative.root())) +
                                                " is outside S");
    }
    std::vector<VertexIndex> s = ext.s_vertices(g);
    try {
      g.induced(s);
    } catch (const Error&) {
      throw Error(ErrorCode::kSDisconnected, "S is disconnected");
    }
  }
}

template <typename W>
bool check_extension_valid(const Extension<W>& ext) {
  try {
    validate_extension(ext);
  } catch (const Error&) {
    return false;
  }
  return true;
}

// Law of [S_G, o].
template <typename W>
Distribution<W> restrict_to_s(const Extension<W>& ext) {
  validate_extension(ext);
  RootedMeasure<W> out;
  for (const auto& [key, atom] : ext.mu) {
    const MarkedNetwork& g = atom.representative.network();
    std::vector<VertexIndex> s = ext.s_vertices(g);
    MarkedNetwork h = g.induced(s);
    VertexIndex root = h.index_of(g.id(atom.representative.root()));
    out.add(atom.mass, RootedNetwork(h, root));
  }
  return Distribution<W>::normalize(out);
}

// Swap-symmetry of the S-restricted doubly-rooted measure.
template <typename W>
SymmetryReport<W> check_proper(const Extension<W>& ext, double tol = kDefaultTolerance) {
  validate_extension(ext);
  return check_swap_symmetry(induced_doubly_measure(ext.mu, std::optional(ext.subnetwork)), tol);
}

enum class Unimodularizer { kPT, kPTPrime };

// Mass p T_G(v,o) / E[M] (P_T) or / E[M | I] (P'_T) on [G,v], where
// M = T^-(o).
template <typename W>
Distribution<W> unimodularize(const Extension<W>& ext, const Kernel<W>& t,
                              Unimodularizer variant, double tol = 1e-9) {
  if (!check_proper(ext, tol).pass) {
    throw Error(ErrorCode::kImproperExtension, "extension is not proper");
  }
  for (const auto& [key, atom] : ext.mu) {
    const MarkedNetwork& g = atom.representative.network();
    SquareMatrix<W> m = t.matrix(g);
    for (VertexIndex v = 0; v < g.num_vertices(); ++v) {
      if (!nearly_equal(m.row_sum(v), W(1), tol)) {
        throw Error(ErrorCode::kNotMarkovianIntoS,
                    t.name() + " is not Markovian at vertex id " + std::to_string(g.id(v)));
      }
      for (VertexIndex w = 0; w < g.num_vertices(); ++w) {
        if (!ext.in_s(g, w) && tolerance_as<W>(tol) < m(v, w)) {
          throw Error(ErrorCode::kNotMarkovianIntoS,
                      t.name() + " sends mass outside S");
        }
      }
    }
  }
  std::map<CanonicalKey, W> class_intensity;  // E[M|I] numerators, then ratios
  std::map<CanonicalKey, W> class_mass;
  W expected = 0;
  for (const auto& [key, atom] : ext.mu) {
    const RootedNetwork& x = atom.representative;
    W m = in_mass(t, x.network(), x.root());
    W pm = atom.mass * m;
    const CanonicalKey& c = canonical_key(x.network());
    class_intensity[c] += pm;
    class_mass[c] += atom.mass;
    expected += pm;
  }
  for (auto& [c, value] : class_intensity) {
    if (!(W(0) < value)) {
      throw Error(ErrorCode::kZeroClassIntensity, "E[M | I] vanishes on a class");
    }
    value /= class_mass.at(c);
  }
  RootedMeasure<W> out;
  for (const auto& [key, atom] : ext.mu) {
    const MarkedNetwork& g = atom.representative.network();
    const VertexIndex o = atom.representative.root();
    const W& normalizer =
        variant == Unimodularizer::kPT ? expected : class_intensity.at(canonical_key(g));
    SquareMatrix<W> m = t.matrix(g);
    for (VertexIndex v = 0; v < g.num_vertices(); ++v) {
      if (m(v, o) == 0) continue;
      W mass = atom.mass * m(v, o) / normalizer;
      out.add_with_key(canonical_key(g, v), mass, RootedNetwork(g, v));
    }
  }
  out.prune(detail::debris_threshold<W>());
  return Distribution<W>::from_measure(std::move(out), tol);
}

template <typename W = double>
struct Allocation {
  Kernel<W> kernel;
  // False when some vertex has several nearest S-vertices and its mass is
  // split: then the kernel is not a single-target allocation.
  bool strict = true;
};

template <typename W>
Allocation<W> allocation_kernel(const Extension<W>& ext) {
  validate_extension(ext);
  Allocation<W> out{Kernel<W>::to_subset_nearest(ext.subnetwork), true};
  for (const auto& [key, atom] : ext.mu) {
    const MarkedNetwork& g = atom.representative.network();
    SquareMatrix<W> m = out.kernel.matrix(g);
    for (VertexIndex v = 0; v < g.num_vertices() && out.strict; ++v) {
      for (VertexIndex w = 0; w < g.num_vertices(); ++w) {
        if (W(0) < m(v, w) && m(v, w) < W(1)) {
          out.strict = false;
          break;
        }
      }
    }
  }
  return out;
}

// Stable transport from w1 = 1 to w2 = (1/lambda) 1_S on one network, float.
inline StableResult<double> intensity_transport(const MarkedNetwork& g,
                                                const VertexFunction<double>& subnetwork,
                                                double lambda) {
  std::vector<double> w1(g.num_vertices(), 1.0);
  std::vector<double> w2 = subnetwork.values(g);
  for (double& x : w2) x = x > 0 ? 1.0 / lambda : 0.0;
  return stable_transport(g, std::move(w1), std::move(w2), kLimitStages);
}

// Bisection for the largest lambda in (lo, hi] at which every site is fully
// exhausted (min T^+ > 1 - 10 tol). Returns the feasible end of the final
// bracket. Throws kBracketInvalid if the bracket is malformed or lo itself
// is infeasible.
inline double lambda_search(const MarkedNetwork& g, const VertexFunction<double>& subnetwork,
                            double lo, double hi, double tol = 1e-9) {
  if (!(0 < lo) || !(lo < hi) || !(tol > 0)) {
    throw Error(ErrorCode::kBracketInvalid, "need 0 < lo < hi and tol > 0");
  }
  const double sites = g.num_vertices();
  double centers = 0;
  for (double x : subnetwork.values(g)) centers += x > 0 ? 1 : 0;
  auto feasible = [&](double lambda) {
    // Total capacity below total demand leaves a site unexhausted. Past the
    // threshold the stages creep toward that limit at a rate proportional
    // to the shortfall, so running them is both slow and pointless.
    if (centers / lambda < sites) return false;
    StableResult<double> r = intensity_transport(g, subnetwork, lambda);
    double least = 1.0;
    for (VertexIndex v = 0; v < g.num_vertices(); ++v) {
      least = std::min(least, r.transport.row_sum(v));
    }
    return least > 1.0 - 10 * tol;
  };
  if (!feasible(lo)) {
    throw Error(ErrorCode::kBracketInvalid, "lower end of the bracket is infeasible");
  }
  if (feasible(hi)) return hi;
  while (hi - lo > tol) {
    double mid = lo + (hi - lo) / 2;
    if (feasible(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

// Extensions must have a single unrooted class here; see lambda_search_all.
inline double lambda_search(const Extension<double>& ext, double lo, double hi,
                            double tol = 1e-9) {
  validate_extension(ext);
  UnrootedMeasure<double> classes = unroot(ext.mu);
  if (classes.size() != 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "lambda search runs on one unrooted class at a time");
  }
  return lambda_search(classes.begin()->second.representative, ext.subnetwork, lo, hi, tol);
}

// Per unrooted class.
inline std::map<CanonicalKey, double> lambda_search_all(const Extension<double>& ext,
                                                        double lo, double hi,
                                                        double tol = 1e-9) {
  validate_extension(ext);
  std::map<CanonicalKey, double> out;
  for (const auto& [key, entry] : unroot(ext.mu)) {
    out.emplace(key, lambda_search(entry.representative, ext.subnetwork, lo, hi, tol));
  }
  return out;
}

// The kernel of the intensity transports, one per class.
inline Kernel<double> intensity_kernel(const Extension<double>& ext,
                                       const std::map<CanonicalKey, double>& lambdas) {
  Kernel<double>::Builder builder("intensity:" + ext.subnetwork.name());
  for (const auto& [key, entry] : unroot(ext.mu)) {
    const MarkedNetwork& g = entry.representative;
    builder.set_network(g, intensity_transport(g, ext.subnetwork, lambdas.at(key)).transport);
  }
  return builder.build();
}

template <typename W = double>
struct UnimodularizationReport {
  bool pass = false;
  SymmetryReport<W> unimodular;
  bool unrooted_equal = false;  // strong
  bool same_support = false;    // weak
  // Conditioning the result on S gives back mu; only checked for P_T.
  std::optional<bool> conditioning;
  W unrooted_discrepancy = 0;
};

template <typename W>
UnimodularizationReport<W> verify_unimodularization(
    const Extension<W>& ext, const Distribution<W>& result, bool strong,
    std::optional<Unimodularizer> variant = std::nullopt, double tol = 1e-9) {
  UnimodularizationReport<W> r;
  r.unimodular = is_unimodular(result, tol);
  UnrootedMeasure<W> a = unroot(ext.mu);
  UnrootedMeasure<W> b = unroot(result);
  r.unrooted_discrepancy = max_difference(a, b).first;
  r.unrooted_equal = !(tolerance_as<W>(tol) < r.unrooted_discrepancy);
  r.same_support = a.size() == b.size();
  for (const auto& [key, entry] : a) {
    if (!(tolerance_as<W>(tol) < b.mass_of(key))) r.same_support = false;
  }
  for (const auto& [key, entry] : b) {
    if (!(tolerance_as<W>(tol) < entry.mass)) r.same_support = false;
  }
  if (variant == Unimodularizer::kPT) {
    r.conditioning =
        distributions_close(bias(result, ext.subnetwork), ext.mu, tol);
  }
  r.pass = r.unimodular.pass && (strong ? r.unrooted_equal : r.same_support) &&
           r.conditioning.value_or(true);
  return r;
}

}  // namespace unimod
