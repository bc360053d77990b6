#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nply/operators.hpp"
#include "nply/series.hpp"
#include "nply/targets.hpp"

namespace nply {

/// Order used wherever verdicts are taken at the desk radius 0.95. At order 64
/// the truncated Koebe quotient already dips below zero there.
inline constexpr std::size_t kProbeOrder = 256;

enum class ClassId {
  ST_nm,
  CV_nm,
  STS_nm,
  CVS_nm,
  STC_nm,
  CVC_nm,
  STSC_nm,
  CVSC_nm,
  prestarlike,
  close_to_convex,
};

inline constexpr std::array<std::pair<ClassId, std::string_view>, 10> kClassNames{{
    {ClassId::ST_nm, "ST_nm"},
    {ClassId::CV_nm, "CV_nm"},
    {ClassId::STS_nm, "STS_nm"},
    {ClassId::CVS_nm, "CVS_nm"},
    {ClassId::STC_nm, "STC_nm"},
    {ClassId::CVC_nm, "CVC_nm"},
    {ClassId::STSC_nm, "STSC_nm"},
    {ClassId::CVSC_nm, "CVSC_nm"},
    {ClassId::prestarlike, "prestarlike"},
    {ClassId::close_to_convex, "close_to_convex"},
}};

inline std::string_view to_string(ClassId id) {
  for (const auto& [c, name] : kClassNames) {
    if (c == id) return name;
  }
  return "?";
}

inline std::optional<ClassId> parse_class_id(std::string_view s) {
  for (const auto& [c, name] : kClassNames) {
    if (name == s) return c;
  }
  return std::nullopt;
}

/// The eight tuple classes; prestarlike and close_to_convex have their own tests.
inline bool is_tuple_class(ClassId id) {
  return id != ClassId::prestarlike && id != ClassId::close_to_convex;
}

inline bool is_convex_type(ClassId id) {
  return id == ClassId::CV_nm || id == ClassId::CVS_nm || id == ClassId::CVC_nm ||
         id == ClassId::CVSC_nm;
}

inline PartKind part_kind(ClassId id) {
  switch (id) {
    case ClassId::STS_nm:
    case ClassId::CVS_nm: return PartKind::symmetric;
    case ClassId::STC_nm:
    case ClassId::CVC_nm: return PartKind::conjugate;
    case ClassId::STSC_nm:
    case ClassId::CVSC_nm: return PartKind::symmetric_conjugate;
    default: return PartKind::plain;
  }
}

inline bool needs_real_symmetric_target(ClassId id) {
  const auto kind = part_kind(id);
  return is_tuple_class(id) && (kind == PartKind::conjugate || kind == PartKind::symmetric_conjugate);
}

/// Starlike-type class of the same family (CV_nm -> ST_nm and so on).
inline ClassId starlike_counterpart(ClassId id) {
  switch (id) {
    case ClassId::CV_nm: return ClassId::ST_nm;
    case ClassId::CVS_nm: return ClassId::STS_nm;
    case ClassId::CVC_nm: return ClassId::STC_nm;
    case ClassId::CVSC_nm: return ClassId::STSC_nm;
    default: return id;
  }
}

enum class Decision { member, non_member, boundary };

inline std::string_view to_string(Decision d) {
  switch (d) {
    case Decision::member: return "member";
    case Decision::non_member: return "non_member";
    case Decision::boundary: return "boundary";
  }
  return "?";
}

struct ProbeConfig {
  std::size_t order = kProbeOrder;
  std::vector<double> radii{0.5, 0.8, 0.95};
  int samples = 720;
  double tol_accept = 1e-8;

  void validate() const {
    if (radii.empty()) throw std::invalid_argument("probe needs at least one radius");
    for (double r : radii) {
      if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("probe radii must lie in (0, 1)");
    }
    if (samples < 8) throw std::invalid_argument("probe needs at least 8 samples per circle");
    if (!(tol_accept >= 0.0)) throw std::invalid_argument("tol_accept must be non-negative");
  }

  double max_radius() const { return *std::max_element(radii.begin(), radii.end()); }
};

struct MembershipVerdict {
  ClassId class_id = ClassId::ST_nm;
  double margin = std::numeric_limits<double>::infinity();
  cplx worst_z{};
  cplx worst_value{};
  Decision decided = Decision::member;
};

inline Decision decide(double margin, double tol) {
  if (margin > tol) return Decision::member;
  if (margin < -tol) return Decision::non_member;
  return Decision::boundary;
}

/// Minimum of margin_fn over the probe circles.
template <class MarginFn>
MembershipVerdict probe(const ComplexSeries& q, MarginFn&& margin_fn, const ProbeConfig& cfg,
                        ClassId id) {
  cfg.validate();
  MembershipVerdict v;
  v.class_id = id;
  std::vector<cplx> values(static_cast<std::size_t>(cfg.samples));
  for (double r : cfg.radii) {
    const auto z = circle_points(r, cfg.samples);
    evaluate_batch(q, z, values);
    for (std::size_t j = 0; j < z.size(); ++j) {
      const double m = margin_fn(values[j]);
      if (m < v.margin || std::isnan(m)) {
        v.margin = m;
        v.worst_z = z[j];
        v.worst_value = values[j];
      }
    }
  }
  v.decided = decide(v.margin, cfg.tol_accept);
  return v;
}

/// Formal quotient num/den. With den(0) != 0 the result keeps order N. When
/// both vanish at 0 the common factor z is removed first, which leaves an
/// exact quotient of order N-1.
inline ComplexSeries quotient_series(const ComplexSeries& num, const ComplexSeries& den) {
  detail::require_same_order(num, den, "quotient_series");
  constexpr double kZero = 1e-12;
  const ComplexSeries* a = &num;
  const ComplexSeries* b = &den;
  ComplexSeries num_shift, den_shift;
  if (std::abs(den[0]) <= kZero) {
    if (std::abs(num[0]) > kZero) {
      throw std::domain_error("quotient_series: denominator vanishes at 0 but numerator does not");
    }
    num_shift = divide_by_z(map_coefficients(num, [](std::size_t k, cplx c) {
      return k == 0 ? cplx(0.0) : c;
    }));
    den_shift = divide_by_z(map_coefficients(den, [](std::size_t k, cplx c) {
      return k == 0 ? cplx(0.0) : c;
    }));
    a = &num_shift;
    b = &den_shift;
  }
  const cplx lead = (*b)[0];
  if (std::abs(lead) <= kZero) {
    throw std::domain_error("quotient_series: degenerate denominator");
  }
  const std::size_t n = a->order();
  std::vector<cplx> q(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    cplx acc = (*a)[k];
    for (std::size_t j = 1; j <= k; ++j) acc -= detail::mul((*b)[j], q[k - j]);
    q[k] = acc / lead;
  }
  return make_series_unchecked(std::move(q));
}

/// Denominator series shared by all members: the class's part of F_n, or its
/// z-derivative for convex-type classes.
inline ComplexSeries class_denominator(const TupleSystem& t, int n, ClassId id) {
  const ComplexSeries G = part(nply_points(build_F(t), n), part_kind(id));
  return is_convex_type(id) ? z_derivative(G) : G;
}

/// One quotient per member:
///   starlike type  z f_k' / G_n
///   convex type    (z f_k')' / G_n' = z (z f_k')' / (z G_n')
/// where G_n is the family's part of F_n. With g, members are first replaced
/// by f_k * g (Hadamard).
inline std::vector<ComplexSeries> class_quotients(const TupleSystem& tuple, int n, ClassId id,
                                                  const std::optional<ComplexSeries>& g = {}) {
  if (!is_tuple_class(id)) {
    throw std::invalid_argument("class_quotients: " + std::string(to_string(id)) +
                                " is not a tuple class");
  }
  const TupleSystem t = g ? convolve(tuple, *g) : tuple;
  const ComplexSeries den = class_denominator(t, n, id);
  std::vector<ComplexSeries> out;
  out.reserve(t.size());
  for (const auto& f : t.members()) {
    ComplexSeries num = z_derivative(f);
    if (is_convex_type(id)) num = z_derivative(num);
    out.push_back(quotient_series(num, den));
  }
  return out;
}

/// Single-function quotient built from the pointwise defining formulas via
/// reflections rather than coefficient masks, e.g. 2 z f'/(f(z) - f(-z)).
/// `base` replaces f in the denominator (an n-ply function of f); defaults to f.
inline ComplexSeries classical_quotient(const ComplexSeries& f, ClassId id,
                                        const std::optional<ComplexSeries>& base = std::nullopt) {
  if (!is_tuple_class(id)) {
    throw std::invalid_argument("classical_quotient: not a tuple class");
  }
  const ComplexSeries& b = base ? *base : f;
  const bool convex = is_convex_type(id);
  // Convex-type quotients use z times numerator and denominator.
  const ComplexSeries D = convex ? z_derivative(b) : b;
  ComplexSeries num = z_derivative(f);
  if (convex) num = z_derivative(num);
  switch (part_kind(id)) {
    case PartKind::plain:
      return quotient_series(num, D);
    case PartKind::symmetric:
      return quotient_series(2.0 * num, D - reflect(D, ReflectMode::negate_arg));
    case PartKind::conjugate:
      return quotient_series(2.0 * num, D + reflect(D, ReflectMode::conj_arg));
    case PartKind::symmetric_conjugate:
      return quotient_series(2.0 * num, D - reflect(D, ReflectMode::conj_negate_arg));
  }
  return quotient_series(num, D);
}

/// Subordination-margin test of the tuple against h for one of the eight
/// tuple classes; the verdict margin is the minimum over members.
inline MembershipVerdict membership(const TupleSystem& t, int n, ClassId id, const ConvexTarget& h,
                                    const std::optional<ComplexSeries>& g, const ProbeConfig& cfg) {
  if (needs_real_symmetric_target(id) && !h.real_symmetric()) {
    throw std::invalid_argument(std::string(to_string(id)) +
                                " requires a target symmetric about the real axis");
  }
  MembershipVerdict worst;
  worst.class_id = id;
  for (const auto& q : class_quotients(t, n, id, g)) {
    if (std::abs(q[0] - 1.0) > 1e-10) {
      throw std::domain_error("quotient does not equal 1 at the origin");
    }
    auto v = probe(q, [&](cplx w) { return h.margin(w); }, cfg, id);
    if (v.margin < worst.margin || std::isnan(v.margin)) worst = v;
  }
  worst.decided = decide(worst.margin, cfg.tol_accept);
  return worst;
}

/// Membership of phi in the prestarlike class R_alpha. For alpha < 1 the
/// convolution with the generalized Koebe function is tested for starlikeness
/// of order alpha; alpha = 1 tests Re(phi(z)/z) > 1/2.
inline MembershipVerdict prestarlike_test(const ComplexSeries& phi, double alpha,
                                          const ProbeConfig& cfg) {
  if (!phi.is_normalized()) throw std::invalid_argument("prestarlike_test: phi must be normalized");
  if (alpha > 1.0) throw std::invalid_argument("prestarlike_test: alpha must be <= 1");
  if (alpha == 1.0) {
    return probe(divide_by_z(phi), [](cplx w) { return w.real() - 0.5; }, cfg,
                 ClassId::prestarlike);
  }
  const ComplexSeries s = hadamard(phi, koebe(alpha, phi.order()));
  const ComplexSeries q = quotient_series(z_derivative(s), s);
  return probe(q, [alpha](cplx w) { return w.real() - alpha; }, cfg, ClassId::prestarlike);
}

/// Close-to-convexity with a given witness: the witness must lie in ST(h_w)
/// and Re(z f'/witness) > 0. The margin is the smaller of the two.
inline MembershipVerdict close_to_convex_check(const ComplexSeries& f, const ComplexSeries& witness,
                                               const ConvexTarget& h_w, const ProbeConfig& cfg) {
  if (!witness.is_normalized()) {
    throw std::invalid_argument("close_to_convex_check: witness must be normalized");
  }
  auto starlike = membership(TupleSystem(witness), 1, ClassId::ST_nm, h_w, std::nullopt, cfg);
  auto positive = probe(quotient_series(z_derivative(f), witness),
                        [](cplx w) { return w.real(); }, cfg, ClassId::close_to_convex);
  auto& worst = starlike.margin < positive.margin ? starlike : positive;
  worst.class_id = ClassId::close_to_convex;
  worst.decided = decide(worst.margin, cfg.tol_accept);
  return worst;
}

}  // namespace nply
