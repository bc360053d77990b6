#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nply {

using cplx = std::complex<double>;

inline constexpr std::size_t kDefaultOrder = 64;

namespace detail {

// std::complex operator* goes through the C99 Annex G slow path; every
// operand here is finite, so plain arithmetic is enough.
inline cplx mul(cplx a, cplx b) {
  return {a.real() * b.real() - a.imag() * b.imag(),
          a.real() * b.imag() + a.imag() * b.real()};
}

inline void fma(cplx& acc, cplx a, cplx b) {
  acc = {acc.real() + a.real() * b.real() - a.imag() * b.imag(),
         acc.imag() + a.real() * b.imag() + a.imag() * b.real()};
}

}  // namespace detail

/// Truncated Taylor expansion c_0 + c_1 z + ... + c_N z^N with complex
/// coefficients. Values are immutable once built; every operation returns a
/// new series.
class ComplexSeries {
 public:
  ComplexSeries() : ComplexSeries(2) {}

  /// Zero series of the given order.
  explicit ComplexSeries(std::size_t order) : coeffs_(order + 1) {
    if (order < 2) {
      throw std::invalid_argument("series order must be at least 2, got " +
                                  std::to_string(order));
    }
  }

  /// Takes coefficients c_0..c_k; shorter input is zero padded up to `order`,
  /// longer input is rejected.
  ComplexSeries(std::size_t order, std::vector<cplx> coeffs)
      : ComplexSeries(order) {
    if (coeffs.size() > order + 1) {
      throw std::invalid_argument("too many coefficients for order " +
                                  std::to_string(order));
    }
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
      if (!std::isfinite(coeffs[k].real()) || !std::isfinite(coeffs[k].imag())) {
        throw std::domain_error("non-finite coefficient at index " +
                                std::to_string(k));
      }
      coeffs_[k] = coeffs[k];
    }
  }

  static ComplexSeries constant(std::size_t order, cplx c) {
    return ComplexSeries(order, {c});
  }
  static ComplexSeries monomial(std::size_t order, std::size_t k, cplx c = 1.0) {
    ComplexSeries s(order);
    if (k <= order) s.coeffs_[k] = c;
    return s;
  }
  /// z
  static ComplexSeries identity(std::size_t order) { return monomial(order, 1); }
  /// z/(1-z) = z + z^2 + ...
  static ComplexSeries geometric(std::size_t order) {
    ComplexSeries s(order);
    for (std::size_t k = 1; k <= order; ++k) s.coeffs_[k] = 1.0;
    return s;
  }

  std::size_t order() const { return coeffs_.size() - 1; }
  const cplx& operator[](std::size_t k) const { return coeffs_[k]; }
  std::span<const cplx> coeffs() const { return coeffs_; }

  /// Member of the class A: c_0 = 0 and c_1 = 1.
  bool is_normalized(double tol = 1e-12) const {
    return std::abs(coeffs_[0]) <= tol && std::abs(coeffs_[1] - 1.0) <= tol;
  }
  bool has_real_coefficients(double tol = 0.0) const {
    for (const auto& c : coeffs_) {
      if (std::abs(c.imag()) > tol) return false;
    }
    return true;
  }

  /// Drops or zero-pads coefficients to reach `order`.
  ComplexSeries with_order(std::size_t order) const {
    ComplexSeries s(order);
    for (std::size_t k = 0; k <= std::min(order, this->order()); ++k) {
      s.coeffs_[k] = coeffs_[k];
    }
    return s;
  }

  friend bool operator==(const ComplexSeries&, const ComplexSeries&) = default;

 private:
  template <class Fn>
  friend ComplexSeries map_coefficients(const ComplexSeries& f, Fn&& fn);
  friend ComplexSeries make_series_unchecked(std::vector<cplx> coeffs);

  std::vector<cplx> coeffs_;
};

/// Builds a series from coefficients that are finite by construction.
inline ComplexSeries make_series_unchecked(std::vector<cplx> coeffs) {
  ComplexSeries s(coeffs.size() - 1);
  s.coeffs_ = std::move(coeffs);
  return s;
}

/// Applies fn(k, c_k) to every coefficient.
template <class Fn>
ComplexSeries map_coefficients(const ComplexSeries& f, Fn&& fn) {
  ComplexSeries out(f.order());
  for (std::size_t k = 0; k <= f.order(); ++k) out.coeffs_[k] = fn(k, f[k]);
  return out;
}

namespace detail {

inline void require_same_order(const ComplexSeries& a, const ComplexSeries& b,
                               const char* op) {
  if (a.order() != b.order()) {
    throw std::invalid_argument(std::string(op) + ": mismatched orders " +
                                std::to_string(a.order()) + " and " +
                                std::to_string(b.order()));
  }
}

inline void require_zero_constant(const ComplexSeries& f, const char* op) {
  if (f[0] != cplx(0.0)) {
    throw std::domain_error(std::string(op) +
                            ": series has a non-vanishing constant term");
  }
}

}  // namespace detail

struct WeightedSeries {
  double weight;
  ComplexSeries series;
};

/// Coefficientwise weighted sum of series sharing one order.
inline ComplexSeries linear_combine(std::span<const WeightedSeries> terms) {
  if (terms.empty()) {
    throw std::invalid_argument("linear_combine: no terms");
  }
  const std::size_t order = terms.front().series.order();
  std::vector<cplx> out(order + 1);
  for (const auto& [w, s] : terms) {
    detail::require_same_order(terms.front().series, s, "linear_combine");
    if (!std::isfinite(w)) {
      throw std::domain_error("linear_combine: non-finite weight");
    }
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += w * s[k];
  }
  return ComplexSeries(order, std::move(out));
}

inline ComplexSeries operator+(const ComplexSeries& a, const ComplexSeries& b) {
  detail::require_same_order(a, b, "operator+");
  return map_coefficients(a, [&](std::size_t k, cplx c) { return c + b[k]; });
}

inline ComplexSeries operator-(const ComplexSeries& a, const ComplexSeries& b) {
  detail::require_same_order(a, b, "operator-");
  return map_coefficients(a, [&](std::size_t k, cplx c) { return c - b[k]; });
}

inline ComplexSeries operator*(cplx s, const ComplexSeries& f) {
  return map_coefficients(f, [&](std::size_t, cplx c) { return s * c; });
}

/// Ordinary product, truncated at the common order.
inline ComplexSeries cauchy_product(const ComplexSeries& f, const ComplexSeries& g) {
  detail::require_same_order(f, g, "cauchy_product");
  const std::size_t n = f.order();
  std::vector<cplx> out(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const cplx fi = f[i];
    if (fi == cplx(0.0)) continue;
    for (std::size_t j = 0; i + j <= n; ++j) detail::fma(out[i + j], fi, g[j]);
  }
  return make_series_unchecked(std::move(out));
}

/// z f'(z): coefficient k becomes k c_k.
inline ComplexSeries z_derivative(const ComplexSeries& f) {
  return map_coefficients(
      f, [](std::size_t k, cplx c) { return static_cast<double>(k) * c; });
}

/// Inverse of z_derivative on series without constant term: c_k -> c_k / k.
inline ComplexSeries integrate_div_z(const ComplexSeries& f) {
  detail::require_zero_constant(f, "integrate_div_z");
  return map_coefficients(f, [](std::size_t k, cplx c) {
    return k == 0 ? cplx(0.0) : c / static_cast<double>(k);
  });
}

/// f'(z). The top coefficient is unknown after truncation and is set to zero.
inline ComplexSeries derivative(const ComplexSeries& f) {
  return map_coefficients(f, [&](std::size_t k, cplx) {
    return k < f.order() ? static_cast<double>(k + 1) * f[k + 1] : cplx(0.0);
  });
}

/// Primitive vanishing at 0. The input's top coefficient falls off the end.
inline ComplexSeries antiderivative(const ComplexSeries& f) {
  return map_coefficients(f, [&](std::size_t k, cplx) {
    return k == 0 ? cplx(0.0) : f[k - 1] / static_cast<double>(k);
  });
}

/// f(z)/z for f with c_0 = 0. Exact only up to order N-1, so the result has
/// order N-1.
inline ComplexSeries divide_by_z(const ComplexSeries& f) {
  detail::require_zero_constant(f, "divide_by_z");
  std::vector<cplx> out(f.coeffs().begin() + 1, f.coeffs().end());
  return make_series_unchecked(std::move(out));
}

/// z f(z), dropping the top coefficient of f.
inline ComplexSeries multiply_by_z(const ComplexSeries& f) {
  return map_coefficients(
      f, [&](std::size_t k, cplx) { return k == 0 ? cplx(0.0) : f[k - 1]; });
}

/// outer(inner(z)) by Horner's rule on series. inner must vanish at 0.
inline ComplexSeries compose(const ComplexSeries& outer, const ComplexSeries& inner) {
  detail::require_zero_constant(inner, "compose");
  const std::size_t n = inner.order();
  const std::size_t top = std::min(outer.order(), n);
  std::vector<cplx> acc(n + 1), next(n + 1);
  acc[0] = outer[top];
  for (std::size_t j = top; j-- > 0;) {
    std::fill(next.begin(), next.end(), cplx(0.0));
    // acc * inner; inner[0] == 0 so index i + l with l >= 1.
    for (std::size_t i = 0; i < n; ++i) {
      const cplx a = acc[i];
      if (a == cplx(0.0)) continue;
      for (std::size_t l = 1; i + l <= n; ++l) detail::fma(next[i + l], a, inner[l]);
    }
    next[0] += outer[j];
    std::swap(acc, next);
  }
  return make_series_unchecked(std::move(acc));
}

/// exp(p) for p(0) = 0, from E' = p' E: k e_k = sum_{j=1..k} j p_j e_{k-j}.
inline ComplexSeries exp_series(const ComplexSeries& p) {
  detail::require_zero_constant(p, "exp_series");
  const std::size_t n = p.order();
  std::vector<cplx> e(n + 1);
  e[0] = 1.0;
  for (std::size_t k = 1; k <= n; ++k) {
    cplx acc = 0.0;
    for (std::size_t j = 1; j <= k; ++j) {
      detail::fma(acc, static_cast<double>(j) * p[j], e[k - j]);
    }
    e[k] = acc / static_cast<double>(k);
  }
  return make_series_unchecked(std::move(e));
}

/// Hadamard (coefficientwise) product.
inline ComplexSeries hadamard(const ComplexSeries& f, const ComplexSeries& g) {
  detail::require_same_order(f, g, "hadamard");
  return map_coefficients(f, [&](std::size_t k, cplx c) { return detail::mul(c, g[k]); });
}

/// Coefficientwise quotient f_k / g_k; indices where f_k = 0 stay zero.
inline ComplexSeries deconvolve(const ComplexSeries& f, const ComplexSeries& g) {
  detail::require_same_order(f, g, "deconvolve");
  return map_coefficients(f, [&](std::size_t k, cplx c) {
    if (c == cplx(0.0)) return cplx(0.0);
    if (g[k] == cplx(0.0)) {
      throw std::domain_error("deconvolve: divisor coefficient " +
                              std::to_string(k) + " vanishes");
    }
    return c / g[k];
  });
}

/// Keeps indices k = 1 (mod n), and additionally k odd when odd_only is set.
/// Equals (1/n) sum_j e^{-2 pi i j/n} f(e^{2 pi i j/n} z) coefficientwise.
inline ComplexSeries project_residue(const ComplexSeries& f, int n, bool odd_only) {
  if (n < 1) throw std::invalid_argument("project_residue: n must be >= 1");
  const auto nn = static_cast<std::size_t>(n);
  return map_coefficients(f, [&](std::size_t k, cplx c) {
    const bool keep = (k % nn == 1 % nn) && (!odd_only || k % 2 == 1);
    return keep ? c : cplx(0.0);
  });
}

enum class ReflectMode {
  negate_arg,       // f(-z)
  conj_arg,         // conj f(conj z)
  conj_negate_arg,  // conj f(-conj z)
};

inline ComplexSeries reflect(const ComplexSeries& f, ReflectMode mode) {
  return map_coefficients(f, [&](std::size_t k, cplx c) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    switch (mode) {
      case ReflectMode::negate_arg: return sign * c;
      case ReflectMode::conj_arg: return std::conj(c);
      case ReflectMode::conj_negate_arg: return sign * std::conj(c);
    }
    return c;
  });
}

/// Horner evaluation of the truncated polynomial.
inline cplx evaluate(const ComplexSeries& f, cplx z) {
  cplx acc = f[f.order()];
  for (std::size_t k = f.order(); k-- > 0;) acc = detail::mul(acc, z) + f[k];
  return acc;
}

/// Horner at several points; blocks of 8 run interleaved, each point keeps
/// exactly the operation sequence of evaluate().
inline void evaluate_batch(const ComplexSeries& f, std::span<const cplx> z, std::span<cplx> out) {
  constexpr std::size_t B = 8;
  const std::size_t N = f.order();
  std::size_t j = 0;
  for (; j + B <= z.size(); j += B) {
    double ar[B], ai[B], zr[B], zi[B];
    for (std::size_t b = 0; b < B; ++b) {
      ar[b] = f[N].real();
      ai[b] = f[N].imag();
      zr[b] = z[j + b].real();
      zi[b] = z[j + b].imag();
    }
    for (std::size_t k = N; k-- > 0;) {
      const double cr = f[k].real(), ci = f[k].imag();
      for (std::size_t b = 0; b < B; ++b) {
        const double r = ar[b] * zr[b] - ai[b] * zi[b];
        const double i = ar[b] * zi[b] + ai[b] * zr[b];
        ar[b] = r + cr;
        ai[b] = i + ci;
      }
    }
    for (std::size_t b = 0; b < B; ++b) out[j + b] = {ar[b], ai[b]};
  }
  for (; j < z.size(); ++j) out[j] = evaluate(f, z[j]);
}

inline std::vector<cplx> circle_points(double r, int samples) {
  if (samples < 8) throw std::invalid_argument("evaluate_on_circle: M must be >= 8");
  std::vector<cplx> z(static_cast<std::size_t>(samples));
  for (int j = 0; j < samples; ++j) {
    z[static_cast<std::size_t>(j)] = std::polar(r, 2.0 * std::numbers::pi * j / samples);
  }
  return z;
}

/// Values at z_j = r e^{2 pi i j / M}, j = 0..M-1.
inline std::vector<cplx> evaluate_on_circle(const ComplexSeries& f, double r, int samples) {
  const auto z = circle_points(r, samples);
  std::vector<cplx> out(z.size());
  evaluate_batch(f, z, out);
  return out;
}

inline double max_abs_difference(const ComplexSeries& a, const ComplexSeries& b) {
  const std::size_t n = std::min(a.order(), b.order());
  double worst = 0.0;
  for (std::size_t k = 0; k <= n; ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
  return worst;
}

}  // namespace nply
