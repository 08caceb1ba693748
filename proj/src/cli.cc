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

#include "unimod/cli.h"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "unimod/extension.h"
#include "unimod/stable.h"
#include "unimod/transport.h"

namespace unimod::cli {

int exit_code(Status s) {
  switch (s) {
    case Status::kOk: return 0;
    case Status::kCheckFailed: return 1;
    case Status::kError: return 2;
  }
  return 2;
}

namespace {

using io::Json;

struct Options {
  std::string command;
  std::vector<std::string> inputs;
  double tol = 1e-9;
  bool exact = false;
  std::string output;
  std::string dot;
  int jobs = 1;
  std::optional<std::uint64_t> seed;
  int max_stages = -1;

  std::string w = "const:1";
  std::string w1;
  std::string w2;
  std::string subset;
  std::string kernel;
  std::string method = "direct";
  std::string variant = "PTprime";
  std::string emit = "distribution";
  std::string p;
  double lo = 1e-9;
  double hi = 1;
};

class Inputs {
 public:
  Inputs(const std::vector<std::string>& names, std::istream& in) : names_(names), in_(in) {}

  std::string text(std::size_t i) { return named(i < names_.size() ? names_[i] : "-"); }

  std::string named(const std::string& name) {
    if (name == "-") {
      if (stdin_used_) throw Error(ErrorCode::kInvalidArgument, "standard input read twice");
      stdin_used_ = true;
      std::ostringstream s;
      s << in_.rdbuf();
      return s.str();
    }
    return read_file(name);
  }

  Json json(std::size_t i) { return io::parse_json(text(i)); }

  static std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::kInvalidArgument, "cannot read '" + path + "'");
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
  }

 private:
  const std::vector<std::string>& names_;
  std::istream& in_;
  bool stdin_used_ = false;
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << text)) throw Error(ErrorCode::kInvalidArgument, "cannot write '" + path + "'");
}

// Fills every network's key caches across `jobs` threads. The checks that
// follow run serially over the warm caches, so their output does not depend
// on the job count.
template <typename W>
void warm_caches(const Distribution<W>& mu, int jobs) {
  if (jobs <= 1) return;
  std::vector<const MarkedNetwork*> networks;
  for (const auto& [key, atom] : mu) networks.push_back(&atom.representative.network());
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const int threads = std::min<int>(jobs, static_cast<int>(networks.size()));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t k; (k = next++) < networks.size();) {
        canonical_key(*networks[k]);
        canonical_key(*networks[k], 0);
        canonical_key(*networks[k], 0, 0);
      }
    });
  }
  for (std::thread& t : pool) t.join();
}

std::string pass_word(bool pass) { return pass ? "pass" : "FAIL"; }

template <typename W>
std::string number(const W& x) {
  std::ostringstream s;
  s << ScalarTraits<W>::to_double(x);
  return s.str();
}

template <typename W>
Kernel<W> load_kernel(const std::string& spec, Inputs& inputs) {
  if (spec.empty()) throw Error(ErrorCode::kInvalidArgument, "--kernel is required");
  if (spec == "identity") return Kernel<W>::identity();
  if (spec == "uniform") return Kernel<W>::uniform();
  return io::kernel_from_json<W>(io::parse_json(inputs.named(spec)));
}

template <typename W>
class Runner {
 public:
  Runner(const Options& o, Inputs& inputs) : o_(o), in_(inputs) {}

  CommandResult operator()() {
    const std::string& c = o_.command;
    if (c == "check-unimodular") return check_unimodular();
    if (c == "check-proper") return check_proper_cmd();
    if (c == "bias") return bias_cmd();
    if (c == "root-change") return root_change_cmd();
    if (c == "shift-couple") return shift_couple();
    if (c == "stable-transport") return stable_cmd();
    if (c == "balance-check") return balance_check();
    if (c == "extra-head") return extra_head();
    if (c == "condition") return condition();
    if (c == "unimodularize") return unimodularize_cmd();
    if (c == "lambda-search") return lambda_cmd();
    if (c == "gen") return gen();
    if (c == "dist") return dist();
    if (c == "export-dot") return export_dot();
    throw Error(ErrorCode::kInvalidArgument, "unknown command '" + c + "'");
  }

 private:
  Distribution<W> distribution(std::size_t i) {
    return io::distribution_from_json<W>(in_.json(i), o_.tol);
  }

  Extension<W> extension(std::size_t i) { return io::extension_from_json<W>(in_.json(i), o_.tol); }

  CommandResult ok(Json payload, std::string summary, bool pass = true) {
    return {pass ? Status::kOk : Status::kCheckFailed, std::move(payload), std::move(summary), {}};
  }

  CommandResult check_unimodular() {
    Distribution<W> mu = distribution(0);
    warm_caches(mu, o_.jobs);
    SymmetryReport<W> r = is_unimodular(mu, o_.tol);
    return ok(io::symmetry_report_to_json(r),
              "unimodular: " + pass_word(r.pass) + " (max discrepancy " +
                  number(r.max_discrepancy) + ")",
              r.pass);
  }

  CommandResult check_proper_cmd() {
    Extension<W> ext = extension(0);
    warm_caches(ext.mu, o_.jobs);
    SymmetryReport<W> r = check_proper(ext, o_.tol);
    return ok(io::symmetry_report_to_json(r),
              "proper: " + pass_word(r.pass) + " (max discrepancy " + number(r.max_discrepancy) +
                  ")",
              r.pass);
  }

  CommandResult bias_cmd() {
    Distribution<W> mu = distribution(0);
    VertexFunction<W> w = io::parse_vertex_function<W>(o_.w);
    Distribution<W> out = bias(mu, w);
    return ok(io::distribution_to_json(out),
              "biased by " + w.name() + ": " + std::to_string(out.size()) + " atoms");
  }

  CommandResult root_change_cmd() {
    Distribution<W> mu = distribution(0);
    Kernel<W> t = load_kernel<W>(o_.kernel, in_);
    Distribution<W> out = root_change(mu, t, o_.tol);
    return ok(io::distribution_to_json(out),
              "root-change by " + t.name() + ": " + std::to_string(out.size()) + " atoms");
  }

  CommandResult shift_couple() {
    Distribution<W> from = distribution(0);
    Distribution<W> to = distribution(1);
    Json payload;
    Kernel<W> t;
    if (o_.method == "direct") {
      t = direct_shift_coupling(from, to, o_.tol);
      payload = io::kernel_to_json(t);
    } else {
      IterativeCoupling<W> c = iterative_shift_coupling(
          from, to, o_.max_stages < 0 ? 64 : o_.max_stages, std::min(o_.tol, 1e-10));
      t = c.kernel;
      payload = io::kernel_to_json(t);
      payload["trace"] = io::coupling_trace_to_json(c.trace);
    }
    const bool verified = distributions_close(root_change(from, t, o_.tol), to, o_.tol);
    payload["verified"] = verified;
    return ok(std::move(payload),
              o_.method + " shift-coupling: target reproduced " + pass_word(verified), verified);
  }

  CommandResult stable_cmd() {
    io::NetworkDoc doc = io::network_from_json(in_.json(0));
    const MarkedNetwork& g = doc.network;
    VertexFunction<W> w1 = io::parse_vertex_function<W>(o_.w1);
    VertexFunction<W> w2 = io::parse_vertex_function<W>(o_.w2);
    StableResult<W> r = stable_transport(g, w1, w2, o_.max_stages);
    Json payload = io::stable_result_to_json(g, r);
    Json unstable = Json::array();
    for (const DesirePair& d : check_stability(g, r.transport, w1.values(g), w2.values(g))) {
      unstable.push_back({g.id(d.site), g.id(d.center)});
    }
    const bool stable = unstable.empty();
    payload["unstable_pairs"] = std::move(unstable);
    return ok(std::move(payload),
              "stable transport: " + std::string(r.converged ? "converged" : "NOT converged") +
                  " after " + std::to_string(r.stages) + " stages, " +
                  (stable ? "stable" : "UNSTABLE"),
              r.converged && stable);
  }

  CommandResult balance_check() {
    Distribution<W> mu = distribution(0);
    VertexFunction<W> w1 = io::parse_vertex_function<W>(o_.w1);
    VertexFunction<W> w2 = io::parse_vertex_function<W>(o_.w2);
    Json payload;
    Kernel<W> t;
    if (o_.kernel.empty()) {
      t = balancing_kernel(mu, w1, w2, o_.tol);
      payload["kernel"] = io::kernel_to_json(t);
    } else {
      t = load_kernel<W>(o_.kernel, in_);
    }
    KernelReport<W> r = is_balancing(mu, t, w1, w2, o_.tol);
    payload["report"] = io::kernel_report_to_json(r);
    return ok(std::move(payload),
              "balancing: " + pass_word(r.pass) + " (max discrepancy " +
                  number(r.max_discrepancy) + ")",
              r.pass);
  }

  // Kernel JSON with a "verified" flag: its root-change reaches `target`.
  CommandResult verified_kernel(const Distribution<W>& mu, const Kernel<W>& t,
                                const Distribution<W>& target, const std::string& what) {
    const bool verified = distributions_close(root_change(mu, t, o_.tol), target, o_.tol);
    Json payload = io::kernel_to_json(t);
    payload["verified"] = verified;
    return ok(std::move(payload), what + ": pushforward matches conditioned law " +
                                      pass_word(verified),
              verified);
  }

  CommandResult extra_head() {
    Distribution<W> mu = distribution(0);
    if (o_.p.empty()) throw Error(ErrorCode::kInvalidArgument, "--p is required");
    const W p = ScalarTraits<W>::from_string(o_.p);
    Kernel<W> t = extra_head_kernel(mu, p, o_.tol);
    Distribution<W> target =
        condition_on_subset(mu, VertexFunction<W>::indicator_mark("1"), o_.tol).distribution;
    return verified_kernel(mu, t, target, "extra head");
  }

  CommandResult condition() {
    Distribution<W> mu = distribution(0);
    VertexFunction<W> s = io::parse_vertex_function<W>(o_.subset);
    Conditioned<W> c = condition_on_subset(mu, s, o_.tol);
    if (o_.emit == "kernel") {
      return verified_kernel(mu, conditioning_kernel(mu, s, o_.tol), c.distribution,
                             "conditioning kernel");
    }
    if (o_.emit != "distribution") {
      throw Error(ErrorCode::kInvalidArgument, "--emit is distribution or kernel");
    }
    Json payload = io::distribution_to_json(c.distribution);
    payload["constant_intensity"] = c.constant_intensity;
    return ok(std::move(payload),
              "conditioned on " + s.name() + "; intensity " +
                  (c.constant_intensity ? "constant" : "varies across classes"));
  }

  Kernel<W> extension_kernel(const Extension<W>& ext) {
    const std::string& k = o_.kernel.empty() ? std::string("allocation") : o_.kernel;
    if (k == "allocation") return allocation_kernel(ext).kernel;
    if (k == "intensity") {
      if constexpr (std::is_same_v<W, double>) {
        return intensity_kernel(ext, lambda_search_all(ext, o_.lo, o_.hi, std::min(o_.tol, 1e-9)));
      } else {
        throw Error(ErrorCode::kInvalidArgument, "the intensity kernel is float only");
      }
    }
    return load_kernel<W>(k, in_);
  }

  CommandResult unimodularize_cmd() {
    Extension<W> ext = extension(0);
    Unimodularizer v;
    if (o_.variant == "PT") {
      v = Unimodularizer::kPT;
    } else if (o_.variant == "PTprime") {
      v = Unimodularizer::kPTPrime;
    } else {
      throw Error(ErrorCode::kInvalidArgument, "--variant is PT or PTprime");
    }
    warm_caches(ext.mu, o_.jobs);
    Kernel<W> t = extension_kernel(ext);
    Distribution<W> out = unimodularize(ext, t, v, o_.tol);
    const bool strong = v == Unimodularizer::kPTPrime;
    UnimodularizationReport<W> r = verify_unimodularization(ext, out, strong, v, o_.tol);
    return ok(io::distribution_to_json(out),
              o_.variant + " via " + t.name() + ": " + (strong ? "strong" : "weak") +
                  " unimodularization " + pass_word(r.pass),
              r.pass);
  }

  CommandResult lambda_cmd() {
    Extension<double> ext = io::extension_from_json<double>(in_.json(0), o_.tol);
    Json classes = Json::array();
    for (const auto& [key, entry] : unroot(ext.mu)) {
      const MarkedNetwork& g = entry.representative;
      const double lambda = lambda_search(g, ext.subnetwork, o_.lo, o_.hi, o_.tol);
      double in_s = 0;
      for (double x : ext.subnetwork.values(g)) in_s += x > 0 ? 1 : 0;
      Json c;
      c["network"] = io::canonical_network_json(g, {});
      c["lambda"] = lambda;
      c["sample_intensity"] = in_s / g.num_vertices();
      classes.push_back(std::move(c));
    }
    Json payload;
    payload["classes"] = classes;
    std::string summary = "lambda:";
    for (const Json& c : classes) summary += " " + c.at("lambda").dump();
    return ok(std::move(payload), summary);
  }

  CommandResult gen() {
    Json out = io::generate<W>(in_.json(0), o_.seed);
    const std::string kind = out.contains("atoms") ? "distribution" : "extension";
    return ok(out, "generated " + kind);
  }

  CommandResult dist() {
    RootedNetwork a = io::rooted_from_json(in_.json(0));
    RootedNetwork b = io::rooted_from_json(in_.json(1));
    const double d = rooted_distance(a, b);
    Json payload;
    payload["distance"] = d;
    return ok(std::move(payload), "distance " + number(d));
  }

  CommandResult export_dot() {
    std::string dot = dot_of_json(in_.json(0));
    CommandResult r{Status::kOk, Json(), "exported DOT", {}};
    r.output = dot;
    return r;
  }

  const Options& o_;
  Inputs& in_;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--tol", o.tol, "numeric tolerance")->check(CLI::NonNegativeNumber);
  sub->add_flag("--exact", o.exact, "exact rational arithmetic");
  sub->add_option("--output", o.output, "write the result here instead of standard output");
  sub->add_option("--dot", o.dot, "also write a DOT rendering of the result");
  sub->add_option("--jobs", o.jobs, "threads for per-atom work")->check(CLI::PositiveNumber);
  sub->add_option("--seed", o.seed, "random seed");
}

struct Command {
  const char* name;
  const char* help;
  int inputs;
};

constexpr Command kCommands[] = {
    {"check-unimodular", "mass transport check of a distribution", 1},
    {"check-proper", "properness check of an extension", 1},
    {"bias", "bias a distribution by --w", 1},
    {"root-change", "push a distribution through --kernel", 1},
    {"shift-couple", "kernel carrying the first distribution onto the second", 2},
    {"stable-transport", "stable transport between --w1 and --w2 on one network", 1},
    {"balance-check", "check or build a kernel balancing --w1 and --w2", 1},
    {"extra-head", "extra head kernel for {0,1} marks with density --p", 1},
    {"condition", "condition on the subset --s", 1},
    {"unimodularize", "P_T or P'_T of an extension", 1},
    {"lambda-search", "sample intensity of each class of an extension", 1},
    {"gen", "run a generator spec", 1},
    {"dist", "distance between two rooted networks", 2},
    {"export-dot", "DOT rendering of a network, distribution or extension", 1},
};

}  // namespace

std::string dot_of_json(const Json& j) {
  if (j.is_object() && j.contains("distribution")) return dot_of_json(j.at("distribution"));
  if (j.is_object() && j.contains("atoms")) {
    std::string out;
    int i = 0;
    for (const Json& a : j.at("atoms")) {
      io::NetworkDoc doc = io::network_from_json(a.at("network"));
      const Json& w = a.at("weight");
      out += io::network_to_dot(doc.network, doc.root, doc.root2,
                                "atom" + std::to_string(i++) + " weight " +
                                    (w.is_string() ? w.get<std::string>() : w.dump()));
    }
    return out;
  }
  if (j.is_object() && j.contains("vertices")) {
    io::NetworkDoc doc = io::network_from_json(j);
    return io::network_to_dot(doc.network, doc.root, doc.root2);
  }
  throw Error(ErrorCode::kInvalidArgument, "no network, distribution or extension to draw");
}

CommandResult run(const std::vector<std::string>& args, std::istream& in) {
  Options o;
  CLI::App app{"Finite random rooted networks: unimodularity, transports, extensions.", "unimod"};
  app.require_subcommand(1);
  for (const Command& c : kCommands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    add_common(sub, o);
    const std::string what = c.inputs == 1 ? "input JSON (default: standard input)"
                                           : "two input JSON files";
    sub->add_option("inputs", o.inputs, what)->expected(0, c.inputs);
    sub->callback([&o, name = std::string(c.name)] { o.command = name; });
    const std::string n = c.name;
    if (n == "bias") sub->add_option("--w", o.w, "vertex function");
    if (n == "root-change" || n == "balance-check") {
      sub->add_option("--kernel", o.kernel,
                      "identity, uniform, or a kernel JSON file (- for standard input)");
    }
    if (n == "unimodularize") {
      sub->add_option("--kernel", o.kernel,
                      "allocation (default), intensity, or a kernel JSON file");
      sub->add_option("--variant", o.variant, "PT or PTprime")
          ->check(CLI::IsMember({"PT", "PTprime"}));
    }
    if (n == "stable-transport" || n == "balance-check") {
      sub->add_option("--w1", o.w1, "site weights")->required();
      sub->add_option("--w2", o.w2, "center weights")->required();
    }
    if (n == "stable-transport" || n == "shift-couple") {
      sub->add_option("--max-stages", o.max_stages, "stage budget");
    }
    if (n == "shift-couple") {
      sub->add_option("--method", o.method, "direct or iterative")
          ->check(CLI::IsMember({"direct", "iterative"}));
    }
    if (n == "extra-head") sub->add_option("--p", o.p, "density of ones")->required();
    if (n == "condition") {
      sub->add_option("--s", o.subset, "0/1 vertex function")->required();
      sub->add_option("--emit", o.emit, "distribution or kernel")
          ->check(CLI::IsMember({"distribution", "kernel"}));
    }
    if (n == "lambda-search" || n == "unimodularize") {
      sub->add_option("--lo", o.lo, "lower end of the bracket");
      sub->add_option("--hi", o.hi, "upper end of the bracket");
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    return {Status::kOk, Json(), "", app.help()};
  } catch (const CLI::CallForAllHelp&) {
    return {Status::kOk, Json(), "", app.help("", CLI::AppFormatMode::All)};
  } catch (const CLI::ParseError& e) {
    return {Status::kError, Json(), std::string("usage: ") + e.what(), {}};
  }
  for (CLI::App* sub : app.get_subcommands()) {
    const Command* c = std::find_if(std::begin(kCommands), std::end(kCommands),
                                    [&](const Command& k) { return sub->get_name() == k.name; });
    if (c->inputs == 2 && o.inputs.size() != 2) {
      return {Status::kError, Json(), "usage: " + sub->get_name() + " takes two input files", {}};
    }
  }

  CommandResult r;
  try {
    Inputs inputs(o.inputs, in);
    r = o.exact ? Runner<Rational>(o, inputs)() : Runner<double>(o, inputs)();
    if (r.output.empty() && !r.payload.is_null()) r.output = io::dump_json(r.payload);
    if (!o.dot.empty()) {
      write_file(o.dot, o.command == "export-dot" ? r.output : dot_of_json(r.payload));
      if (o.command == "export-dot") r.output.clear();
    }
    if (!o.output.empty()) {
      write_file(o.output, r.output);
      r.output.clear();
    }
  } catch (const Error& e) {
    return {Status::kError, Json(), std::string("error: ") + e.what(), {}};
  } catch (const nlohmann::json::exception& e) {
    return {Status::kError, Json(), std::string("error: Parse: ") + e.what(), {}};
  }
  return r;
}

}  // namespace unimod::cli
