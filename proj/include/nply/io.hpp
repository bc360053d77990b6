#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "nply/classes.hpp"
#include "nply/generators.hpp"
#include "nply/operators.hpp"
#include "nply/series.hpp"
#include "nply/targets.hpp"

namespace nply::io {

using json = nlohmann::json;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void write_number(std::ostream& os, double x) {
  if (std::isnan(x)) {
    os << "\"nan\"";
  } else if (std::isinf(x)) {
    os << (x > 0 ? "\"inf\"" : "\"-inf\"");
  } else {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    os << buf;
  }
}

inline bool is_flat(const json& j) {
  if (!j.is_array()) return !j.is_object();
  for (const auto& e : j) {
    if (e.is_object()) return false;
    if (e.is_array()) {
      for (const auto& x : e) {
        if (x.is_structured()) return false;
      }
    }
  }
  return true;
}

inline void write(std::ostream& os, const json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case json::value_t::number_float:
      write_number(os, j.get<double>());
      return;
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad << json(it.key()).dump() << ": ";
        write(os, it.value(), indent, depth + 1);
      }
      os << "\n" << close_pad << "}";
      return;
    }
    case json::value_t::array: {
      if (is_flat(j)) {
        os << "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) os << ", ";
          write(os, j[i], indent, depth + 1);
        }
        os << "]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << pad;
        write(os, j[i], indent, depth + 1);
      }
      os << "\n" << close_pad << "]";
      return;
    }
    default:
      os << j.dump();
  }
}

}  // namespace detail

/// Serializes with 17 significant digits for every floating-point value;
/// non-finite values become the strings "inf", "-inf", "nan".
inline std::string dump(const json& j, int indent = 2) {
  std::ostringstream os;
  detail::write(os, j, indent, 0);
  os << "\n";
  return os.str();
}

inline double number_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw FormatError("expected a number, got " + j.dump());
}

inline json complex_to_json(cplx c) { return json::array({c.real(), c.imag()}); }

inline cplx complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw FormatError("complex value must be [re, im]");
  return {number_from_json(j[0]), number_from_json(j[1])};
}

inline json to_json(const ComplexSeries& f) {
  json coeffs = json::array();
  for (const auto& c : f.coeffs()) coeffs.push_back(complex_to_json(c));
  return json{{"order", f.order()}, {"coeffs", std::move(coeffs)}};
}

inline ComplexSeries series_from_json(const json& j) {
  try {
    const auto order = j.at("order").get<std::size_t>();
    const auto& coeffs = j.at("coeffs");
    if (!coeffs.is_array() || coeffs.size() != order + 1) {
      throw FormatError("series needs exactly order + 1 coefficients");
    }
    std::vector<cplx> c;
    c.reserve(coeffs.size());
    for (const auto& e : coeffs) c.push_back(complex_from_json(e));
    return ComplexSeries(order, std::move(c));
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed series: ") + e.what());
  }
}

inline json to_json(const TupleSystem& t) {
  json members = json::array();
  for (const auto& f : t.members()) members.push_back(to_json(f));
  return json{{"weights", t.weights()}, {"members", std::move(members)}};
}

inline TupleSystem tuple_from_json(const json& j) {
  try {
    std::vector<ComplexSeries> members;
    for (const auto& m : j.at("members")) members.push_back(series_from_json(m));
    std::vector<double> weights;
    for (const auto& w : j.at("weights")) weights.push_back(number_from_json(w));
    return TupleSystem(std::move(members), std::move(weights));
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed tuple: ") + e.what());
  }
}

/// Accepts a tuple file or a bare series file (read as a one-member tuple).
inline TupleSystem tuple_or_series_from_json(const json& j) {
  if (j.contains("members")) return tuple_from_json(j);
  return TupleSystem(series_from_json(j));
}

inline json to_json(const ConvexTarget& t) {
  if (const auto* hp = t.as_half_plane()) return json{{"kind", "half_plane"}, {"alpha", hp->alpha}};
  const auto& s = *t.as_sampled();
  return json{{"kind", "sampled"}, {"series", to_json(s.series)}, {"rho", s.rho}, {"M", s.samples}};
}

inline ConvexTarget target_from_json(const json& j) {
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "half_plane") return ConvexTarget::half_plane(number_from_json(j.at("alpha")));
    if (kind == "sampled") {
      return ConvexTarget::sampled(series_from_json(j.at("series")), j.value("rho", 0.999),
                                   j.value("M", 2048));
    }
    throw FormatError("unknown target kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed target: ") + e.what());
  }
}

inline json to_json(const GenConfig& g) {
  return json{{"order", g.order},
              {"blaschke_degree", g.blaschke_degree},
              {"seed", g.seed},
              {"real_only", g.real_only}};
}

inline GenConfig gen_config_from_json(const json& j, GenConfig base = {}) {
  base.order = j.value("order", base.order);
  base.blaschke_degree = j.value("blaschke_degree", base.blaschke_degree);
  base.seed = j.value("seed", base.seed);
  base.real_only = j.value("real_only", base.real_only);
  base.validate();
  return base;
}

inline json to_json(const ProbeConfig& p) {
  return json{{"order", p.order}, {"radii", p.radii}, {"samples", p.samples}, {"tol_accept", p.tol_accept}};
}

inline ProbeConfig probe_config_from_json(const json& j, ProbeConfig base = {}) {
  base.order = j.value("order", base.order);
  if (j.contains("radii")) base.radii = j.at("radii").get<std::vector<double>>();
  base.samples = j.value("samples", base.samples);
  base.tol_accept = j.value("tol_accept", base.tol_accept);
  base.validate();
  return base;
}

inline json to_json(const MembershipVerdict& v) {
  return json{{"class_id", std::string(to_string(v.class_id))},
              {"margin", v.margin},
              {"worst_z", complex_to_json(v.worst_z)},
              {"worst_value", complex_to_json(v.worst_value)},
              {"decided", std::string(to_string(v.decided))}};
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

inline void write_json_file(const std::filesystem::path& path, const json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << dump(j);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

/// Command-line target grammar: "halfplane:<alpha>" or "sampled:<path>".
inline ConvexTarget parse_target_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw FormatError("target must look like kind:value, got '" + spec + "'");
  const auto kind = spec.substr(0, colon);
  const auto value = spec.substr(colon + 1);
  if (kind == "halfplane") {
    std::size_t used = 0;
    double alpha = 0.0;
    try {
      alpha = std::stod(value, &used);
    } catch (const std::exception&) {
      throw FormatError("bad half-plane alpha '" + value + "'");
    }
    if (used != value.size()) throw FormatError("bad half-plane alpha '" + value + "'");
    return ConvexTarget::half_plane(alpha);
  }
  if (kind == "sampled") {
    const json j = read_json_file(value);
    return j.contains("kind") ? target_from_json(j) : ConvexTarget::sampled(series_from_json(j));
  }
  throw FormatError("unknown target kind '" + kind + "'");
}

}  // namespace nply::io
