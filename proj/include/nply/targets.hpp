#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "nply/series.hpp"

namespace nply {

namespace detail {

inline double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

inline double segment_distance(cplx p, cplx a, cplx b) {
  const cplx ab = b - a;
  const double len2 = std::norm(ab);
  double t = len2 > 0.0 ? ((p - a).real() * ab.real() + (p - a).imag() * ab.imag()) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(p - (a + t * ab));
}

}  // namespace detail

/// Counter-clockwise convex polygon with a signed distance: positive inside,
/// negative outside.
class ConvexPolygon {
 public:
  /// Validates a closed boundary trace (last vertex connects to the first).
  /// The trace must be convex and wind exactly once around `interior`;
  /// clockwise traces are reversed.
  static ConvexPolygon from_boundary(std::vector<cplx> vertices, cplx interior) {
    std::vector<cplx> v;
    v.reserve(vertices.size());
    for (const auto& p : vertices) {
      if (!std::isfinite(p.real()) || !std::isfinite(p.imag())) {
        throw std::domain_error("polygon vertex is not finite");
      }
      if (v.empty() || p != v.back()) v.push_back(p);
    }
    while (v.size() > 1 && v.back() == v.front()) v.pop_back();
    if (v.size() < 3) throw std::invalid_argument("degenerate polygon: fewer than 3 distinct vertices");

    double winding = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const cplx a = v[i] - interior;
      const cplx b = v[(i + 1) % v.size()] - interior;
      winding += std::arg(b / a);
    }
    const double turns = winding / (2.0 * std::numbers::pi);
    if (std::abs(std::abs(turns) - 1.0) > 1e-6) {
      throw std::invalid_argument("boundary does not wind once around the interior point");
    }
    if (turns < 0.0) std::reverse(v.begin(), v.end());

    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
      const cplx e1 = v[(i + 1) % n] - v[i];
      const cplx e2 = v[(i + 2) % n] - v[(i + 1) % n];
      if (detail::cross(e1, e2) < -1e-9 * std::abs(e1) * std::abs(e2)) {
        throw std::invalid_argument("boundary polygon is not convex at vertex " +
                                    std::to_string((i + 1) % n));
      }
    }
    return ConvexPolygon(std::move(v));
  }

  /// Convex hull of a point cloud (Andrew's monotone chain).
  static ConvexPolygon hull(std::span<const cplx> points) {
    std::vector<cplx> p(points.begin(), points.end());
    std::sort(p.begin(), p.end(), [](cplx a, cplx b) {
      return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
    });
    p.erase(std::unique(p.begin(), p.end()), p.end());
    if (p.size() < 3) throw std::invalid_argument("degenerate polygon: fewer than 3 distinct vertices");
    std::vector<cplx> h(2 * p.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      while (k >= 2 && detail::cross(h[k - 1] - h[k - 2], p[i] - h[k - 2]) <= 0.0) --k;
      h[k++] = p[i];
    }
    for (std::size_t i = p.size() - 1, lower = k + 1; i-- > 0;) {
      while (k >= lower && detail::cross(h[k - 1] - h[k - 2], p[i] - h[k - 2]) <= 0.0) --k;
      h[k++] = p[i];
    }
    h.resize(k - 1);
    if (h.size() < 3) throw std::invalid_argument("degenerate polygon: collinear points");
    return ConvexPolygon(std::move(h));
  }

  const std::vector<cplx>& vertices() const { return vertices_; }

  double signed_distance(cplx w) const {
    const std::size_t n = vertices_.size();
    double inward = std::numeric_limits<double>::infinity();
    for (const auto& e : edges_) {
      inward = std::min(inward, e.nx * w.real() + e.ny * w.imag() - e.offset);
    }
    if (inward >= 0.0) return inward;
    double outside = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      outside = std::min(outside, detail::segment_distance(w, vertices_[i], vertices_[(i + 1) % n]));
    }
    return -outside;
  }

 private:
  // Unit inward normal (nx, ny) and offset of each non-degenerate edge.
  struct Edge {
    double nx, ny, offset;
  };

  explicit ConvexPolygon(std::vector<cplx> v) : vertices_(std::move(v)) {
    const std::size_t n = vertices_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const cplx a = vertices_[i];
      const cplx e = vertices_[(i + 1) % n] - a;
      const double len = std::abs(e);
      if (len == 0.0) continue;
      const double nx = -e.imag() / len, ny = e.real() / len;
      edges_.push_back({nx, ny, nx * a.real() + ny * a.imag()});
    }
  }

  std::vector<cplx> vertices_;
  std::vector<Edge> edges_;
};

/// A convex univalent h with h(0) = 1: either the half-plane map
/// h_alpha(z) = (1 + (1 - 2 alpha) z)/(1 - z), or a general series whose image
/// is approximated by the polygon h(rho e^{i theta_j}).
class ConvexTarget {
 public:
  struct HalfPlane {
    double alpha;
  };
  struct Sampled {
    ComplexSeries series;
    double rho;
    int samples;
    ConvexPolygon polygon;
  };

  static ConvexTarget half_plane(double alpha) {
    if (!(alpha >= 0.0 && alpha < 1.0)) {
      throw std::invalid_argument("half-plane target needs 0 <= alpha < 1");
    }
    return ConvexTarget(HalfPlane{alpha}, true);
  }

  static ConvexTarget sampled(ComplexSeries series, double rho = 0.999, int samples = 2048) {
    if (std::abs(series[0] - 1.0) > 1e-12) {
      throw std::invalid_argument("target must satisfy h(0) = 1");
    }
    if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("sampled target needs 0 < rho < 1");
    if (samples < 8) throw std::invalid_argument("sampled target needs at least 8 samples");
    auto boundary = evaluate_on_circle(series, rho, samples);
    auto polygon = ConvexPolygon::from_boundary(std::move(boundary), series[0]);
    const bool real = series.has_real_coefficients(1e-12);
    return ConvexTarget(Sampled{std::move(series), rho, samples, std::move(polygon)}, real);
  }

  bool is_half_plane() const { return std::holds_alternative<HalfPlane>(variant_); }
  const HalfPlane* as_half_plane() const { return std::get_if<HalfPlane>(&variant_); }
  const Sampled* as_sampled() const { return std::get_if<Sampled>(&variant_); }
  bool real_symmetric() const { return real_symmetric_; }

  /// Positive iff w lies in h(D).
  double margin(cplx w) const {
    if (const auto* hp = as_half_plane()) return w.real() - hp->alpha;
    return std::get<Sampled>(variant_).polygon.signed_distance(w);
  }

  ComplexSeries series_of(std::size_t order) const {
    if (const auto* hp = as_half_plane()) {
      ComplexSeries s = ComplexSeries::geometric(order);
      return ComplexSeries::constant(order, 1.0) + (2.0 * (1.0 - hp->alpha)) * s;
    }
    return std::get<Sampled>(variant_).series.with_order(order);
  }

  /// h(w(z)) for a Schur function w with w(0) = 0.
  ComplexSeries subordinate(const ComplexSeries& w) const {
    if (const auto* hp = as_half_plane()) {
      detail::require_zero_constant(w, "subordinate");
      // u = w/(1 - w) solves u = w + w u.
      const std::size_t n = w.order();
      std::vector<cplx> u(n + 1);
      for (std::size_t k = 1; k <= n; ++k) {
        cplx acc = w[k];
        for (std::size_t j = 1; j < k; ++j) detail::fma(acc, w[j], u[k - j]);
        u[k] = acc;
      }
      const double scale = 2.0 * (1.0 - hp->alpha);
      for (auto& c : u) c *= scale;
      u[0] = 1.0;
      return make_series_unchecked(std::move(u));
    }
    return compose(series_of(w.order()), w);
  }

 private:
  ConvexTarget(std::variant<HalfPlane, Sampled> v, bool real)
      : variant_(std::move(v)), real_symmetric_(real) {}

  std::variant<HalfPlane, Sampled> variant_;
  bool real_symmetric_;
};

}  // namespace nply
