#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nply/classes.hpp"
#include "nply/generators.hpp"
#include "nply/harness.hpp"
#include "nply/io.hpp"
#include "nply/operators.hpp"
#include "nply/svg.hpp"

namespace nply::cli {

/// Relative output paths resolve against this directory when it is set.
inline constexpr const char* kOutputDirEnv = "NPLY_OUTPUT_DIR";

enum ExitCode : int { kPass = 0, kFail = 1, kUsage = 2 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::filesystem::path output_path(const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative()) {
    if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) return std::filesystem::path(dir) / path;
  }
  return path;
}

inline ClassId require_class(const std::string& name) {
  auto id = parse_class_id(name);
  if (!id) throw UsageError("unknown class id '" + name + "'");
  return *id;
}

struct ProbeOptions {
  std::vector<double> radii;
  int samples = 0;
  double tol = -1.0;

  void add(CLI::App* cmd) {
    cmd->add_option("--radii", radii, "Probe radii (comma separated)")->delimiter(',');
    cmd->add_option("--samples", samples, "Samples per probe circle");
    cmd->add_option("--tol", tol, "Acceptance tolerance");
  }
  ProbeConfig build() const {
    ProbeConfig p;
    if (!radii.empty()) p.radii = radii;
    if (samples > 0) p.samples = samples;
    if (tol >= 0.0) p.tol_accept = tol;
    p.validate();
    return p;
  }
};

inline std::vector<double> resolve_weights(std::vector<double> weights, std::size_t m) {
  if (weights.empty()) {
    if (m == 0) m = 1;
    return std::vector<double>(m, 1.0 / static_cast<double>(m));
  }
  if (m != 0 && weights.size() != m) {
    throw UsageError("--alpha lists " + std::to_string(weights.size()) + " weights but --m is " +
                     std::to_string(m));
  }
  return weights;
}

inline int report_verdict(const MembershipVerdict& v, std::ostream& out, std::ostream& err) {
  out << io::dump(io::to_json(v));
  if (v.decided == Decision::boundary) {
    err << "warning: boundary verdict (|margin| <= tol_accept)\n";
  }
  return v.decided == Decision::non_member ? kFail : kPass;
}

struct GenArgs {
  std::string class_name;
  int n = 1;
  std::size_t m = 0;
  std::vector<double> weights;
  std::string target = "halfplane:0";
  std::uint64_t seed = 0;
  std::size_t order = kProbeOrder;
  int degree = 2;
  bool real_only = false;
  double perturb = 0.0;
  double prestarlike_alpha = 0.0;
  std::string out;
};

inline int run_gen(const GenArgs& a, std::ostream& out, std::ostream& err) {
  const ClassId id = require_class(a.class_name);
  GenConfig gen{a.order, a.degree, a.seed, a.real_only};
  const ProbeConfig probe_cfg;
  io::json doc;
  MembershipVerdict verdict;

  if (id == ClassId::prestarlike) {
    const auto phi = prestarlike_member(a.prestarlike_alpha, gen);
    verdict = prestarlike_test(phi, a.prestarlike_alpha, probe_cfg);
    doc = io::to_json(phi);
    doc["alpha"] = a.prestarlike_alpha;
  } else if (id == ClassId::close_to_convex) {
    throw UsageError("close_to_convex has no generator; use check with --witness");
  } else {
    const ConvexTarget h = io::parse_target_spec(a.target);
    const Family family = part_kind(id);
    if (family == Family::conjugate || family == Family::symmetric_conjugate) gen.real_only = true;
    const auto weights = resolve_weights(a.weights, a.m);
    TupleSystem t = tuple_member(h, a.n, weights, family, gen).tuple;
    const ClassId st = starlike_class(family);
    if (a.perturb > 0.0) {
      if (auto p = perturb_member(t, a.n, st, h, probe_cfg, derive_seed(a.seed, 99), a.perturb)) {
        t = *p;
      } else {
        err << "warning: every perturbation was rejected; writing the unperturbed member\n";
      }
    }
    if (is_convex_type(id)) t = alexander(t, AlexanderDirection::inverse);
    verdict = membership(t, a.n, id, h, std::nullopt, probe_cfg);
    doc = io::to_json(t);
    doc["n"] = a.n;
    doc["target"] = io::to_json(h);
  }
  doc["class_id"] = std::string(to_string(id));
  doc["gen"] = io::to_json(gen);
  doc["certificate"] = io::to_json(verdict);
  io::write_json_file(output_path(a.out), doc);
  out << io::dump(io::to_json(verdict));
  if (verdict.decided != Decision::member) {
    err << "error: generated object failed its own certificate\n";
    return kFail;
  }
  return kPass;
}

struct CheckArgs {
  std::string class_name;
  std::string input;
  std::string target = "halfplane:0";
  std::string g;
  std::string witness;
  int n = 0;
  std::optional<double> prestarlike_alpha;
  ProbeOptions probe;
};

inline int run_check(const CheckArgs& a, std::ostream& out, std::ostream& err) {
  const ClassId id = require_class(a.class_name);
  const io::json doc = io::read_json_file(a.input);
  const ProbeConfig probe_cfg = a.probe.build();

  if (id == ClassId::prestarlike) {
    const auto phi = doc.contains("members") ? io::tuple_from_json(doc)[0] : io::series_from_json(doc);
    const double alpha = a.prestarlike_alpha.value_or(doc.value("alpha", 0.0));
    return report_verdict(prestarlike_test(phi, alpha, probe_cfg), out, err);
  }
  const ConvexTarget h = io::parse_target_spec(a.target);
  const TupleSystem t = io::tuple_or_series_from_json(doc);
  const int n = a.n > 0 ? a.n : doc.value("n", 1);
  if (id == ClassId::close_to_convex) {
    if (a.witness.empty()) throw UsageError("close_to_convex needs --witness");
    const auto w = io::series_from_json(io::read_json_file(a.witness));
    return report_verdict(close_to_convex_check(t[0], w, h, probe_cfg), out, err);
  }
  std::optional<ComplexSeries> g;
  if (!a.g.empty()) g = io::series_from_json(io::read_json_file(a.g));
  return report_verdict(membership(t, n, id, h, g, probe_cfg), out, err);
}

struct VerifyArgs {
  std::string theorem;
  std::size_t trials = 10;
  std::uint64_t seed = 42;
  int n = 1;
  std::size_t m = 0;
  std::vector<double> weights;
  std::string target = "halfplane:0";
  std::size_t order = kProbeOrder;
  int degree = 2;
  unsigned threads = 0;
  bool zero_inner_witness = false;
  std::string out;
  ProbeOptions probe;
};

inline int run_verify(const VerifyArgs& a, std::ostream& out, std::ostream&) {
  const auto id = parse_theorem_id(a.theorem);
  if (!id) throw UsageError("unknown theorem id '" + a.theorem + "'");
  TrialParams p;
  p.n = a.n;
  p.weights = resolve_weights(a.weights, a.m);
  p.target = io::parse_target_spec(a.target);
  p.gen = GenConfig{a.order, a.degree, a.seed, false};
  p.probe = a.probe.build();
  p.zero_inner_witness = a.zero_inner_witness;
  const auto report = verify(*id, a.trials, p, a.threads);
  const auto j = to_json(report);
  if (!a.out.empty()) io::write_json_file(output_path(a.out), j);
  out << io::dump(j);
  return report.passed() ? kPass : kFail;
}

inline int run_suite_cmd(const std::string& config, std::ostream& out) {
  const auto result = run_suite(std::filesystem::path(config));
  for (const auto& r : result.reports) {
    char line[256];
    std::snprintf(line, sizeof line, "%-10s n=%d m=%zu trials=%zu min_margin=%.6g failures=%zu gen_failures=%zu %s\n",
                  std::string(to_string(r.theorem_id)).c_str(), r.params.at("n").get<int>(),
                  r.params.at("m").get<std::size_t>(), r.trials, r.min_margin, r.failures.size(),
                  r.generation_failures.size(), r.passed() ? "PASS" : "FAIL");
    out << line;
  }
  return result.exit_code();
}

struct PlotArgs {
  std::string class_name;
  std::string input;
  std::string target = "halfplane:0";
  std::string out;
  int n = 0;
  ProbeOptions probe;
};

inline int run_plot(const PlotArgs& a, std::ostream& out, std::ostream&) {
  const ClassId id = require_class(a.class_name);
  if (!is_tuple_class(id)) throw UsageError("plot supports the eight tuple classes");
  const io::json doc = io::read_json_file(a.input);
  const TupleSystem t = io::tuple_or_series_from_json(doc);
  const ConvexTarget h = io::parse_target_spec(a.target);
  const int n = a.n > 0 ? a.n : doc.value("n", 1);
  const ProbeConfig probe_cfg = a.probe.build();
  std::vector<svg::Curve> curves;
  const auto quotients = class_quotients(t, n, id);
  for (std::size_t k = 0; k < quotients.size(); ++k) {
    for (double r : probe_cfg.radii) {
      char label[64];
      std::snprintf(label, sizeof label, "member %zu, r = %.3g", k + 1, r);
      curves.push_back({evaluate_on_circle(quotients[k], r, probe_cfg.samples), label, true});
    }
  }
  const auto path = output_path(a.out);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream file(path);
  if (!file) throw std::runtime_error("cannot write " + path.string());
  file << svg::render(curves, h, std::string(to_string(id)) + " quotient images");
  const auto v = membership(t, n, id, h, std::nullopt, probe_cfg);
  out << "wrote " << path.string() << " (margin " << v.margin << ")\n";
  return kPass;
}

/// Entry point shared by the executable and the tests; args excludes argv[0].
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"nply: n-ply starlike/convex class toolkit"};
  app.require_subcommand(1, 1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a certified class member");
  g->add_option("--class", gen.class_name, "Class id")->required();
  g->add_option("--n", gen.n, "n-ply parameter")->check(CLI::PositiveNumber);
  g->add_option("--m", gen.m, "Number of members");
  g->add_option("--alpha", gen.weights, "Convex weights alpha_1,...,alpha_m")->delimiter(',');
  g->add_option("--target", gen.target, "halfplane:<alpha> or sampled:<path>");
  g->add_option("--seed", gen.seed, "Generator seed");
  g->add_option("--order", gen.order, "Truncation order");
  g->add_option("--degree", gen.degree, "Blaschke degree of the Schur witnesses");
  g->add_flag("--real-only", gen.real_only, "Real generator parameters");
  g->add_option("--perturb", gen.perturb, "Complex perturbation scale (re-verified)");
  g->add_option("--prestarlike-alpha", gen.prestarlike_alpha, "Order of the prestarlike class");
  g->add_option("--out", gen.out, "Output file")->required();

  CheckArgs check;
  auto* c = app.add_subcommand("check", "Test class membership of a tuple or series");
  c->add_option("--class", check.class_name, "Class id")->required();
  c->add_option("--input", check.input, "Tuple or series JSON")->required();
  c->add_option("--target", check.target, "halfplane:<alpha> or sampled:<path>");
  c->add_option("--g", check.g, "Series g for the (g,h) variant");
  c->add_option("--witness", check.witness, "Witness series for close_to_convex");
  c->add_option("--n", check.n, "n-ply parameter (default: from file, else 1)");
  c->add_option("--prestarlike-alpha", check.prestarlike_alpha, "Order of the prestarlike class");
  check.probe.add(c);

  VerifyArgs ver;
  auto* v = app.add_subcommand("verify", "Randomized check of one theorem");
  v->add_option("--theorem", ver.theorem, "Theorem id (T1_1 ... T5_4, IDENTITIES)")->required();
  v->add_option("--trials", ver.trials, "Number of trials")->check(CLI::PositiveNumber);
  v->add_option("--seed", ver.seed, "Master seed");
  v->add_option("--n", ver.n, "n-ply parameter")->check(CLI::PositiveNumber);
  v->add_option("--m", ver.m, "Number of members");
  v->add_option("--alpha", ver.weights, "Convex weights")->delimiter(',');
  v->add_option("--target", ver.target, "halfplane:<alpha> or sampled:<path>");
  v->add_option("--order", ver.order, "Truncation order");
  v->add_option("--degree", ver.degree, "Blaschke degree");
  v->add_option("--threads", ver.threads, "Worker threads (0 = hardware)");
  v->add_flag("--zero-inner-witness", ver.zero_inner_witness, "T1_2: force w~ = 0");
  v->add_option("--out", ver.out, "Report JSON file");
  ver.probe.add(v);

  std::string suite_config;
  auto* s = app.add_subcommand("suite", "Run a configured theorem suite");
  s->add_option("--config", suite_config, "Suite config JSON")->required();

  PlotArgs plot;
  auto* p = app.add_subcommand("plot", "SVG of quotient images over the target boundary");
  p->add_option("--class", plot.class_name, "Class id")->required();
  p->add_option("--input", plot.input, "Tuple or series JSON")->required();
  p->add_option("--target", plot.target, "halfplane:<alpha> or sampled:<path>");
  p->add_option("--out", plot.out, "SVG file")->required();
  p->add_option("--n", plot.n, "n-ply parameter");
  plot.probe.add(p);

  std::vector<std::string> argv_store{"nply"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kUsage;
  }

  try {
    if (g->parsed()) return run_gen(gen, out, err);
    if (c->parsed()) return run_check(check, out, err);
    if (v->parsed()) return run_verify(ver, out, err);
    if (s->parsed()) return run_suite_cmd(suite_config, out);
    if (p->parsed()) return run_plot(plot, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kUsage;
  } catch (const io::FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace nply::cli
