#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "nply/series.hpp"

namespace nply {

/// An m-tuple of normalized series (f_1, ..., f_m) together with convex
/// weights alpha_k.
class TupleSystem {
 public:
  TupleSystem(std::vector<ComplexSeries> members, std::vector<double> weights)
      : members_(std::move(members)), weights_(std::move(weights)) {
    if (members_.empty()) throw std::invalid_argument("tuple needs at least one member");
    if (members_.size() != weights_.size()) {
      throw std::invalid_argument("tuple has " + std::to_string(members_.size()) +
                                  " members but " + std::to_string(weights_.size()) +
                                  " weights");
    }
    double total = 0.0;
    for (double w : weights_) {
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw std::invalid_argument("tuple weights must be finite and non-negative");
      }
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) {
      throw std::invalid_argument("tuple weights must sum to 1");
    }
    for (std::size_t k = 0; k < members_.size(); ++k) {
      if (members_[k].order() != members_.front().order()) {
        throw std::invalid_argument("tuple members must share one order");
      }
      if (!members_[k].is_normalized()) {
        throw std::invalid_argument("tuple member " + std::to_string(k) +
                                    " is not normalized");
      }
    }
  }

  /// Single function with weight 1.
  explicit TupleSystem(ComplexSeries f)
      : TupleSystem(std::vector<ComplexSeries>{std::move(f)}, {1.0}) {}

  std::size_t size() const { return members_.size(); }
  std::size_t order() const { return members_.front().order(); }
  const std::vector<ComplexSeries>& members() const { return members_; }
  const std::vector<double>& weights() const { return weights_; }
  const ComplexSeries& operator[](std::size_t k) const { return members_[k]; }

  /// Same weights, every member replaced by fn(member).
  template <class Fn>
  TupleSystem map(Fn&& fn) const {
    std::vector<ComplexSeries> out;
    out.reserve(members_.size());
    for (const auto& f : members_) out.push_back(fn(f));
    return TupleSystem(std::move(out), weights_);
  }

 private:
  std::vector<ComplexSeries> members_;
  std::vector<double> weights_;
};

/// F = sum_k alpha_k f_k.
inline ComplexSeries build_F(const TupleSystem& t) {
  std::vector<WeightedSeries> terms;
  terms.reserve(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) terms.push_back({t.weights()[k], t[k]});
  return linear_combine(terms);
}

/// n-ply points function F_n(z) = (1/n) sum_j eps^{-j} F(eps^j z).
inline ComplexSeries nply_points(const ComplexSeries& F, int n) {
  return project_residue(F, n, false);
}

enum class PartKind { plain, symmetric, conjugate, symmetric_conjugate };

/// Denominator extractors for the point-symmetry families:
///   symmetric            (F(z) - F(-z)) / 2
///   conjugate            (F(z) + conj F(conj z)) / 2
///   symmetric_conjugate  (F(z) - conj F(-conj z)) / 2
inline ComplexSeries part(const ComplexSeries& Fn, PartKind kind) {
  switch (kind) {
    case PartKind::plain:
      return Fn;
    case PartKind::symmetric:
      return map_coefficients(
          Fn, [](std::size_t k, cplx c) { return k % 2 == 1 ? c : cplx(0.0); });
    case PartKind::conjugate:
      return map_coefficients(Fn, [](std::size_t, cplx c) { return cplx(c.real()); });
    case PartKind::symmetric_conjugate:
      return map_coefficients(Fn, [](std::size_t k, cplx c) {
        return k % 2 == 1 ? cplx(c.real()) : cplx(0.0, c.imag());
      });
  }
  return Fn;
}

enum class AlexanderDirection { forward, inverse };

/// forward: f -> z f'; inverse: f -> integral_0^z f(t)/t dt.
inline ComplexSeries alexander(const ComplexSeries& f, AlexanderDirection direction) {
  return direction == AlexanderDirection::forward ? z_derivative(f) : integrate_div_z(f);
}

inline TupleSystem alexander(const TupleSystem& t, AlexanderDirection direction) {
  return t.map([&](const ComplexSeries& f) { return alexander(f, direction); });
}

/// Componentwise Hadamard product with a fixed g.
inline TupleSystem convolve(const TupleSystem& t, const ComplexSeries& g) {
  return t.map([&](const ComplexSeries& f) { return hadamard(f, g); });
}

/// Generalized Koebe function z/(1-z)^{2-2 alpha}; c_k = (2-2alpha)_{k-1}/(k-1)!.
inline ComplexSeries koebe(double alpha, std::size_t order) {
  if (!(alpha < 1.0)) {
    throw std::invalid_argument("koebe: alpha must be < 1");
  }
  std::vector<cplx> c(order + 1);
  const double a = 2.0 - 2.0 * alpha;
  double ck = 1.0;
  c[1] = ck;
  for (std::size_t k = 1; k < order; ++k) {
    // multiply before dividing so integer cases (alpha = 0, 1/2) stay exact
    ck = ck * (a + static_cast<double>(k) - 1.0) / static_cast<double>(k);
    c[k + 1] = ck;
  }
  return ComplexSeries(order, std::move(c));
}

}  // namespace nply
