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

#include "unimod/io.h"

#include <sstream>

#include "unimod/canonical.h"

namespace unimod::io {

namespace {

VertexId id_field(const Json& j, const char* field) {
  const Json& x = j.at(field);
  if (!x.is_number_integer() || x.get<std::int64_t>() < 0) {
    throw Error(ErrorCode::kParse, std::string("\"") + field + "\" must be a nonnegative integer");
  }
  return x.get<VertexId>();
}

std::string mark_field(const Json& j, const char* field) {
  if (!j.contains(field)) return "";
  if (!j.at(field).is_string()) {
    throw Error(ErrorCode::kParse, std::string("\"") + field + "\" must be a string");
  }
  return j.at(field).get<std::string>();
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

NetworkDoc network_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("vertices") || !j.at("vertices").is_array()) {
    throw Error(ErrorCode::kParse, "network needs a \"vertices\" array");
  }
  try {
    std::vector<Vertex> vertices;
    for (const Json& v : j.at("vertices")) {
      vertices.push_back({id_field(v, "id"), mark_field(v, "mark")});
    }
    std::vector<Edge> edges;
    if (j.contains("edges")) {
      for (const Json& e : j.at("edges")) {
        edges.push_back({static_cast<std::int64_t>(id_field(e, "id")), id_field(e, "u"),
                         id_field(e, "v"), mark_field(e, "mu"), mark_field(e, "mv")});
      }
    }
    NetworkDoc doc{MarkedNetwork(std::move(vertices), std::move(edges)), {}, {}};
    if (j.contains("root")) doc.root = doc.network.index_of(id_field(j, "root"));
    if (j.contains("root2")) doc.root2 = doc.network.index_of(id_field(j, "root2"));
    return doc;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
}

Json network_to_json(const MarkedNetwork& g, std::optional<VertexIndex> root,
                     std::optional<VertexIndex> root2) {
  Json out;
  Json vertices = Json::array();
  for (const Vertex& v : g.vertices()) vertices.push_back({{"id", v.id}, {"mark", v.mark}});
  Json edges = Json::array();
  for (const Edge& e : g.edges()) {
    edges.push_back({{"id", e.id}, {"u", e.u}, {"v", e.v}, {"mu", e.mark_u}, {"mv", e.mark_v}});
  }
  out["vertices"] = std::move(vertices);
  out["edges"] = std::move(edges);
  if (root) out["root"] = g.id(*root);
  if (root2) out["root2"] = g.id(*root2);
  return out;
}

Json canonical_network_json(const MarkedNetwork& g, std::span<const VertexIndex> roots) {
  std::vector<VertexIndex> moved;
  MarkedNetwork h = canonical_relabel(g, roots, &moved);
  std::optional<VertexIndex> r1, r2;
  if (roots.size() > 0) r1 = moved[roots[0]];
  if (roots.size() > 1) r2 = moved[roots[1]];
  return network_to_json(h, r1, r2);
}

Json rooted_to_json(const RootedNetwork& x) {
  const VertexIndex roots[] = {x.root()};
  return canonical_network_json(x.network(), roots);
}

Json doubly_to_json(const DoublyRootedNetwork& x) {
  const VertexIndex roots[] = {x.first(), x.second()};
  return canonical_network_json(x.network(), roots);
}

RootedNetwork rooted_from_json(const Json& j) {
  NetworkDoc doc = network_from_json(j);
  if (!doc.root) throw Error(ErrorCode::kParse, "network has no \"root\"");
  return {doc.network, *doc.root};
}

DoublyRootedNetwork doubly_from_json(const Json& j) {
  NetworkDoc doc = network_from_json(j);
  if (!doc.root || !doc.root2) throw Error(ErrorCode::kParse, "need \"root\" and \"root2\"");
  return {doc.network, *doc.root, *doc.root2};
}

void subnetwork_to_json(const std::string& name, Json& into) {
  if (name.rfind("mark-prefix:", 0) == 0) {
    into["subnetwork_mark"] = name.substr(12);
  } else if (name == "const") {
    into["subnetwork"] = "predicate:all";
  } else if (name == "not-mark:pendant") {
    into["subnetwork"] = "predicate:not-pendant";
  } else if (name.rfind("mark:", 0) == 0) {
    into["subnetwork"] = "predicate:" + name;
  } else {
    throw Error(ErrorCode::kInvalidArgument, "subnetwork '" + name + "' has no JSON form");
  }
}

MarkedNetwork graph_from_spec(const Json& spec) {
  if (spec.contains("vertices")) return network_from_json(spec).network;
  try {
    const std::string family = spec.at("family").get<std::string>();
    const int n = spec.at("n").get<int>();
    if (n < 1) throw Error(ErrorCode::kInvalidArgument, "graph size must be positive");
    if (family == "path") return path_network(n);
    if (family == "cycle") return cycle_network(n);
    if (family == "star") return star_network(n);
    if (family == "pendant-cycle") return pendant_cycle_network(n);
    throw Error(ErrorCode::kParse, "unknown graph family '" + family + "'");
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
}

std::string network_to_dot(const MarkedNetwork& g, std::optional<VertexIndex> root,
                           std::optional<VertexIndex> root2, const std::string& name) {
  std::ostringstream out;
  out << "graph " << quoted(name) << " {\n";
  for (VertexIndex v = 0; v < g.num_vertices(); ++v) {
    std::string label = std::to_string(g.id(v));
    if (!g.mark(v).empty()) label += ":" + g.mark(v);
    out << "  v" << g.id(v) << " [label=" << quoted(label);
    if (root && *root == v) {
      out << ", shape=doublecircle";
    } else if (root2 && *root2 == v) {
      out << ", shape=box";
    } else {
      out << ", shape=circle";
    }
    out << "];\n";
  }
  for (const Edge& e : g.edges()) {
    out << "  v" << e.u << " -- v" << e.v;
    if (!e.mark_u.empty() || !e.mark_v.empty()) {
      out << " [taillabel=" << quoted(e.mark_u) << ", headlabel=" << quoted(e.mark_v) << "]";
    }
    out << ";\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace unimod::io
