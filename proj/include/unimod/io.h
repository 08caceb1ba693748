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

// JSON and DOT formats. Networks are written in canonical labeling (ids are
// canonical positions, edges sorted), so equal classes serialize to equal
// bytes; collections are written in canonical-key order. Weights are JSON
// numbers in float mode and "p/q" strings in exact mode. Readers accept
// either form.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "unimod/distribution.h"
#include "unimod/error.h"
#include "unimod/extension.h"
#include "unimod/generators.h"
#include "unimod/kernel.h"
#include "unimod/network.h"
#include "unimod/scalar.h"
#include "unimod/stable.h"
#include "unimod/transport.h"

namespace unimod::io {

using Json = nlohmann::ordered_json;

// Throws kParse with the parser's message.
Json parse_json(const std::string& text);
std::string dump_json(const Json& j);  // two-space indent, trailing newline

struct NetworkDoc {
  MarkedNetwork network;
  std::optional<VertexIndex> root;
  std::optional<VertexIndex> root2;
};

NetworkDoc network_from_json(const Json& j);
// As given, ids and order untouched.
Json network_to_json(const MarkedNetwork& g, std::optional<VertexIndex> root = {},
                     std::optional<VertexIndex> root2 = {});
// Canonical representative of the class of (g, roots...).
Json canonical_network_json(const MarkedNetwork& g, std::span<const VertexIndex> roots);
Json rooted_to_json(const RootedNetwork& x);
Json doubly_to_json(const DoublyRootedNetwork& x);
RootedNetwork rooted_from_json(const Json& j);
DoublyRootedNetwork doubly_from_json(const Json& j);

// Graphviz; the root is double-circled and a second root drawn as a box.
std::string network_to_dot(const MarkedNetwork& g, std::optional<VertexIndex> root = {},
                           std::optional<VertexIndex> root2 = {},
                           const std::string& name = "G");

template <typename W>
Json scalar_to_json(const W& x) {
  if constexpr (ScalarTraits<W>::kExact) {
    return ScalarTraits<W>::to_string(x);
  } else {
    return x;
  }
}

template <typename W>
W scalar_from_json(const Json& j) {
  if (j.is_string()) return ScalarTraits<W>::from_string(j.get<std::string>());
  if (j.is_number_integer()) {
    if constexpr (ScalarTraits<W>::kExact) {
      return W(std::to_string(j.get<std::int64_t>()));
    } else {
      return static_cast<W>(j.get<std::int64_t>());
    }
  }
  if (j.is_number()) {
    // dump() gives the shortest round-trip text, so 0.1 reads as 1/10.
    if constexpr (ScalarTraits<W>::kExact) return ScalarTraits<W>::from_string(j.dump());
    return j.get<double>();
  }
  throw Error(ErrorCode::kParse, "expected a number, got " + j.dump());
}

template <typename W>
Json scalars_to_json(const std::vector<W>& xs) {
  Json out = Json::array();
  for (const W& x : xs) out.push_back(scalar_to_json(x));
  return out;
}

// Flag mini-language: const:<x>, mark:<value>:<x>, degree,
// indicator-mark:<value>. The function is named by its spec.
template <typename W>
VertexFunction<W> parse_vertex_function(const std::string& spec) {
  auto named = [&](VertexFunction<W> f) {
    return VertexFunction<W>(spec, [f](const MarkedNetwork& g, VertexIndex v) { return f(g, v); });
  };
  if (spec == "degree") return named(VertexFunction<W>::degree());
  if (spec.rfind("const:", 0) == 0) {
    return named(VertexFunction<W>::constant(ScalarTraits<W>::from_string(spec.substr(6))));
  }
  if (spec.rfind("indicator-mark:", 0) == 0) {
    return named(VertexFunction<W>::indicator_mark(spec.substr(15)));
  }
  if (spec.rfind("mark:", 0) == 0) {
    const std::size_t cut = spec.rfind(':');
    if (cut > 4) {
      const W x = ScalarTraits<W>::from_string(spec.substr(cut + 1));
      return named(VertexFunction<W>::mark_value(spec.substr(5, cut - 5), x));
    }
  }
  throw Error(ErrorCode::kParse, "unknown vertex function '" + spec + "'");
}

// Subnetwork indicators: {"subnetwork_mark": prefix} or
// {"subnetwork": "predicate:<all | not-pendant | mark:<value>>"}.
template <typename W>
VertexFunction<W> subnetwork_from_json(const Json& j) {
  if (j.contains("subnetwork_mark")) {
    return VertexFunction<W>::mark_prefix(j.at("subnetwork_mark").get<std::string>());
  }
  if (!j.contains("subnetwork")) throw Error(ErrorCode::kParse, "no subnetwork given");
  const std::string spec = j.at("subnetwork").get<std::string>();
  if (spec == "predicate:all") return VertexFunction<W>::constant(W(1));
  if (spec == "predicate:not-pendant") return not_pendant<W>();
  if (spec.rfind("predicate:mark:", 0) == 0) {
    return VertexFunction<W>::indicator_mark(spec.substr(15));
  }
  throw Error(ErrorCode::kParse, "unknown subnetwork '" + spec + "'");
}

// Writes the field read back by subnetwork_from_json, given the indicator's
// name. Throws kInvalidArgument for indicators without a JSON form.
void subnetwork_to_json(const std::string& name, Json& into);

template <typename W>
Json distribution_to_json(const Distribution<W>& mu) {
  Json atoms = Json::array();
  for (const auto& [key, atom] : mu) {
    Json a;
    a["weight"] = scalar_to_json(atom.mass);
    a["network"] = rooted_to_json(atom.representative);
    atoms.push_back(std::move(a));
  }
  Json out;
  out["atoms"] = std::move(atoms);
  return out;
}

template <typename W>
Distribution<W> distribution_from_json(const Json& j, double tol = kDefaultTolerance) {
  if (!j.is_object() || !j.contains("atoms") || !j.at("atoms").is_array()) {
    throw Error(ErrorCode::kParse, "distribution needs an \"atoms\" array");
  }
  RootedMeasure<W> m;
  for (const Json& a : j.at("atoms")) {
    if (!a.contains("weight") || !a.contains("network")) {
      throw Error(ErrorCode::kParse, "atom needs \"weight\" and \"network\"");
    }
    W w = scalar_from_json<W>(a.at("weight"));
    if (w < 0) throw Error(ErrorCode::kParse, "negative atom weight");
    m.add(w, rooted_from_json(a.at("network")));
  }
  return Distribution<W>::from_measure(std::move(m), tol);
}

template <typename W>
Json kernel_to_json(const Kernel<W>& t) {
  Json out;
  if (t.is_rule()) {
    const std::string& name = t.name();
    const std::string nearest = "to-subset-nearest:";
    if (name == "identity" || name == "uniform") {
      out["builtin"] = name;
      out["params"] = Json::object();
    } else if (name.rfind(nearest, 0) == 0) {
      out["builtin"] = "to-subset-nearest";
      Json params = Json::object();
      subnetwork_to_json(name.substr(nearest.size()), params);
      out["params"] = std::move(params);
    } else {
      throw Error(ErrorCode::kInvalidArgument, "rule kernel '" + name + "' has no JSON form");
    }
    return out;
  }
  out["name"] = t.name();
  Json entries = Json::array();
  for (const auto& [key, entry] : t.table()) {
    Json e;
    e["class"] = doubly_to_json(entry.representative);
    e["value"] = scalar_to_json(entry.value);
    entries.push_back(std::move(e));
  }
  out["entries"] = std::move(entries);
  return out;
}

template <typename W>
Kernel<W> kernel_from_json(const Json& j) {
  if (j.contains("builtin")) {
    const std::string b = j.at("builtin").get<std::string>();
    if (b == "identity") return Kernel<W>::identity();
    if (b == "uniform") return Kernel<W>::uniform();
    if (b == "to-subset-nearest") {
      const Json params = j.value("params", Json::object());
      return Kernel<W>::to_subset_nearest(subnetwork_from_json<W>(params));
    }
    throw Error(ErrorCode::kParse, "unknown builtin kernel '" + b + "'");
  }
  if (!j.contains("entries") || !j.at("entries").is_array()) {
    throw Error(ErrorCode::kParse, "kernel needs \"builtin\" or an \"entries\" array");
  }
  typename Kernel<W>::Builder builder(j.value("name", std::string("table")));
  for (const Json& e : j.at("entries")) {
    W value = scalar_from_json<W>(e.at("value"));
    if (value < 0) throw Error(ErrorCode::kParse, "negative kernel value");
    builder.set_entry(doubly_from_json(e.at("class")), value);
  }
  return builder.build();
}

template <typename W>
Json extension_to_json(const Extension<W>& ext) {
  Json out;
  out["distribution"] = distribution_to_json(ext.mu);
  subnetwork_to_json(ext.subnetwork.name(), out);
  return out;
}

template <typename W>
Extension<W> extension_from_json(const Json& j, double tol = kDefaultTolerance) {
  if (!j.is_object() || !j.contains("distribution")) {
    throw Error(ErrorCode::kParse, "extension needs a \"distribution\"");
  }
  return {distribution_from_json<W>(j.at("distribution"), tol), subnetwork_from_json<W>(j)};
}

template <typename W>
Json symmetry_report_to_json(const SymmetryReport<W>& r) {
  Json out;
  out["pass"] = r.pass;
  out["max_discrepancy"] = scalar_to_json(r.max_discrepancy);
  out["witness"] = r.witness ? doubly_to_json(*r.witness) : Json(nullptr);
  return out;
}

template <typename W>
Json kernel_report_to_json(const KernelReport<W>& r) {
  Json out;
  out["pass"] = r.pass;
  out["max_discrepancy"] = scalar_to_json(r.max_discrepancy);
  out["witness"] = r.witness ? rooted_to_json(*r.witness) : Json(nullptr);
  if (r.witness) out["witness_side"] = r.witness_side;
  return out;
}

template <typename W>
Json unimodularization_report_to_json(const UnimodularizationReport<W>& r) {
  Json out;
  out["pass"] = r.pass;
  out["unimodular"] = symmetry_report_to_json(r.unimodular);
  out["unrooted_equal"] = r.unrooted_equal;
  out["same_support"] = r.same_support;
  out["conditioning"] = r.conditioning ? Json(*r.conditioning) : Json(nullptr);
  out["unrooted_discrepancy"] = scalar_to_json(r.unrooted_discrepancy);
  return out;
}

template <typename W>
Json coupling_trace_to_json(const std::vector<CouplingStage<W>>& trace) {
  Json out = Json::array();
  for (const CouplingStage<W>& s : trace) {
    Json e;
    e["stage"] = s.stage;
    e["lambda_mass"] = scalar_to_json(s.lambda_mass);
    e["residual_first"] = scalar_to_json(s.residual_first);
    e["residual_second"] = scalar_to_json(s.residual_second);
    out.push_back(std::move(e));
  }
  return out;
}

// Rows and columns of T follow "vertices"; site and center lists are ids.
template <typename W>
Json stable_result_to_json(const MarkedNetwork& g, const StableResult<W>& r) {
  auto ids = [&](const std::vector<VertexIndex>& vs) {
    Json out = Json::array();
    for (VertexIndex v : vs) out.push_back(g.id(v));
    return out;
  };
  Json out;
  Json vertices = Json::array();
  Json rows = Json::array();
  for (VertexIndex x = 0; x < g.num_vertices(); ++x) {
    vertices.push_back(g.id(x));
    Json row = Json::array();
    for (VertexIndex xi = 0; xi < g.num_vertices(); ++xi) {
      row.push_back(scalar_to_json(r.transport(x, xi)));
    }
    rows.push_back(std::move(row));
  }
  out["vertices"] = std::move(vertices);
  out["T"] = std::move(rows);
  out["stages"] = r.stages;
  out["converged"] = r.converged;
  out["sup_change"] = scalar_to_json(r.sup_change);
  out["exhausted"] = ids(r.exhausted);
  out["sated"] = ids(r.sated);
  Json trace = Json::array();
  for (const StableStage<W>& s : r.trace) {
    Json e;
    e["stage"] = s.stage;
    e["a"] = s.application_radius;
    e["r"] = s.rejection_radius;
    trace.push_back(std::move(e));
  }
  out["trace"] = std::move(trace);
  return out;
}

// A graph is either network JSON or {"family": path|cycle|star|pendant-cycle,
// "n": k}; star n counts leaves and pendant-cycle n is half the cycle.
MarkedNetwork graph_from_spec(const Json& spec);

// Generator specs, each producing distribution or extension JSON:
//   {"generator":"path-extension","length_weights":{"1":"1/2","3":"1/2"}}
//   {"generator":"pendant-cycle","n":3,"root_mode":"uniform-cycle"|"fixed-deg3"|"uniform-all"}
//   {"generator":"marked","graph":G,"count":k} or {..., "ones":[ids]}
//   {"generator":"random-unimodular","num_graphs":5,"max_vertices":8,"seed":1,"vertex_marks":1}
//   {"generator":"uniform-root","graph":G}
// `seed` overrides the spec's seed when given.
template <typename W>
Json generate(const Json& spec, std::optional<std::uint64_t> seed = {}) {
  try {
    const std::string name = spec.at("generator").get<std::string>();
    if (name == "path-extension") {
      std::map<int, W> weights;
      for (const auto& [length, w] : spec.at("length_weights").items()) {
        weights[std::stoi(length)] = scalar_from_json<W>(w);
      }
      return extension_to_json(gen_path_extension<W>(weights));
    }
    if (name == "pendant-cycle") {
      const std::string mode = spec.value("root_mode", std::string("uniform-cycle"));
      PendantRootMode m;
      if (mode == "uniform-cycle") {
        m = PendantRootMode::kUniformCycle;
      } else if (mode == "fixed-deg3") {
        m = PendantRootMode::kFixedDegree3;
      } else if (mode == "uniform-all") {
        m = PendantRootMode::kUniformAll;
      } else {
        throw Error(ErrorCode::kParse, "unknown root_mode '" + mode + "'");
      }
      auto out = gen_pendant_cycle<W>(spec.at("n").get<int>(), m);
      if (auto* ext = std::get_if<Extension<W>>(&out)) return extension_to_json(*ext);
      return distribution_to_json(std::get<Distribution<W>>(out));
    }
    if (name == "marked") {
      MarkedNetwork g = graph_from_spec(spec.at("graph"));
      if (spec.contains("ones")) {
        return distribution_to_json(gen_marked<W>(g, spec.at("ones").get<std::set<VertexId>>()));
      }
      return distribution_to_json(gen_marked<W>(g, spec.at("count").get<int>()));
    }
    if (name == "random-unimodular") {
      RandomGraphOptions options;
      options.vertex_marks = spec.value("vertex_marks", 1);
      return distribution_to_json(gen_random_unimodular<W>(
          spec.at("num_graphs").get<int>(), spec.at("max_vertices").get<int>(),
          seed.value_or(spec.value("seed", std::uint64_t{0})), options));
    }
    if (name == "uniform-root") {
      return distribution_to_json(Distribution<W>::uniform_root(graph_from_spec(spec.at("graph"))));
    }
    throw Error(ErrorCode::kParse, "unknown generator '" + name + "'");
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
}

}  // namespace unimod::io
