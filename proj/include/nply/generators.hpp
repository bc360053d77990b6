#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nply/classes.hpp"
#include "nply/operators.hpp"
#include "nply/series.hpp"
#include "nply/targets.hpp"

namespace nply {

/// Families a tuple can be generated for. The conjugate families are sampled
/// with real parameters only.
using Family = PartKind;

struct GenConfig {
  std::size_t order = kProbeOrder;
  int blaschke_degree = 2;
  std::uint64_t seed = 0;
  bool real_only = false;

  void validate() const {
    if (blaschke_degree < 0 || blaschke_degree > 8) {
      throw std::invalid_argument("blaschke_degree must lie in [0, 8]");
    }
    if (order < 3) throw std::invalid_argument("generation order must be at least 3");
  }
};

class GenerationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Per-trial seed; independent of scheduling.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// Seeded source with a platform-independent mapping to doubles.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Parameters of w(z) = eta z prod_i (a_i - z)/(1 - conj(a_i) z).
struct SchurParams {
  cplx eta{1.0};
  std::vector<cplx> zeros;
};

inline constexpr double kMaxBlaschkeZero = 0.8;

inline SchurParams draw_schur_params(Rng& rng, int degree, bool real_only) {
  SchurParams p;
  if (real_only) {
    p.eta = rng.uniform() < 0.5 ? 1.0 : -1.0;
  } else {
    p.eta = std::polar(1.0, rng.uniform(0.0, 2.0 * std::numbers::pi));
  }
  for (int i = 0; i < degree; ++i) {
    if (real_only) {
      p.zeros.emplace_back(rng.uniform(-kMaxBlaschkeZero, kMaxBlaschkeZero));
    } else {
      const double r = kMaxBlaschkeZero * std::sqrt(rng.uniform());
      p.zeros.push_back(std::polar(r, rng.uniform(0.0, 2.0 * std::numbers::pi)));
    }
  }
  return p;
}

inline ComplexSeries schur_series(const SchurParams& p, std::size_t order) {
  ComplexSeries w = ComplexSeries::monomial(order, 1, p.eta);
  for (const cplx a : p.zeros) {
    if (std::abs(a) >= 1.0) throw std::invalid_argument("Blaschke zero must lie in the open disc");
    // (a - z) * sum_k conj(a)^k z^k
    std::vector<cplx> factor(order + 1);
    const cplx ca = std::conj(a);
    cplx power = 1.0;
    for (std::size_t k = 0; k <= order; ++k) {
      factor[k] += a * power;
      if (k + 1 <= order) factor[k + 1] -= power;
      power *= ca;
    }
    w = cauchy_product(w, ComplexSeries(order, std::move(factor)));
  }
  return w;
}

/// Random Blaschke product with w(0) = 0 and |w| < 1 on the disc.
inline ComplexSeries random_schur(const GenConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  return schur_series(draw_schur_params(rng, cfg.blaschke_degree, cfg.real_only), cfg.order);
}

/// f = z exp(int_0^z (h(w(t)) - 1)/t dt), so z f'/f = h(w) exactly.
inline ComplexSeries st_member(const ConvexTarget& h, const ComplexSeries& w, std::size_t order) {
  const ComplexSeries ww = w.with_order(order);
  const ComplexSeries p = h.subordinate(ww);
  const ComplexSeries e = exp_series(integrate_div_z(p - ComplexSeries::constant(order, 1.0)));
  return multiply_by_z(e);
}

struct GeneratedTuple {
  TupleSystem tuple;
  /// Denominator S of the family (F_n, or its symmetric part); z f_k'/S = h(w_k).
  ComplexSeries denominator;
};

inline bool family_index(std::size_t t, int n, Family family) {
  const auto nn = static_cast<std::size_t>(n);
  const bool residue = t % nn == 1 % nn;
  const bool odd_needed = family == Family::symmetric || family == Family::symmetric_conjugate;
  return residue && (!odd_needed || t % 2 == 1);
}

/// Builds the tuple whose quotients are exactly h(w_k). The denominator S is
/// the solution of z S' = P(Q S), P the family's coefficient projector and
/// Q = sum alpha_k h(w_k):
///   s_1 = 1,  s_t = (1/(t-1)) sum_{j in I, j < t} Q_{t-j} s_j  for t in I.
inline GeneratedTuple tuple_from_witnesses(const ConvexTarget& h, int n,
                                           const std::vector<double>& weights, Family family,
                                           const std::vector<ComplexSeries>& witnesses) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (witnesses.size() != weights.size() || witnesses.empty()) {
    throw std::invalid_argument("need one witness per weight");
  }
  const std::size_t order = witnesses.front().order();
  std::vector<ComplexSeries> q;
  std::vector<WeightedSeries> terms;
  for (std::size_t k = 0; k < witnesses.size(); ++k) {
    q.push_back(h.subordinate(witnesses[k]));
    terms.push_back({weights[k], q.back()});
  }
  const ComplexSeries Q = linear_combine(terms);

  std::vector<cplx> s(order + 1);
  std::vector<std::size_t> support{1};
  s[1] = 1.0;
  for (std::size_t t = 2; t <= order; ++t) {
    if (!family_index(t, n, family)) continue;
    cplx acc = 0.0;
    for (const std::size_t j : support) detail::fma(acc, Q[t - j], s[j]);
    s[t] = acc / static_cast<double>(t - 1);
    if (!(std::abs(s[t]) <= 1e12)) {
      throw GenerationFailure("denominator recursion diverged at index " + std::to_string(t));
    }
    support.push_back(t);
  }
  ComplexSeries S(order, std::move(s));

  std::vector<ComplexSeries> members;
  for (const auto& qk : q) members.push_back(integrate_div_z(cauchy_product(qk, S)));
  return {TupleSystem(std::move(members), weights), std::move(S)};
}

inline void require_generation_family(const ConvexTarget& h, Family family, const GenConfig& cfg) {
  if (family == Family::conjugate || family == Family::symmetric_conjugate) {
    if (!cfg.real_only) {
      throw std::invalid_argument("conjugate families are generated with real_only parameters");
    }
    if (!h.real_symmetric()) {
      throw std::invalid_argument("conjugate families need a real-symmetric target");
    }
  }
}

inline constexpr int kMaxGenerationAttempts = 16;

/// Random member of the family's starlike-type class, resampling up to 16
/// times if the denominator recursion blows up.
inline GeneratedTuple tuple_member(const ConvexTarget& h, int n, const std::vector<double>& weights,
                                   Family family, const GenConfig& cfg) {
  cfg.validate();
  require_generation_family(h, family, cfg);
  Rng rng(cfg.seed);
  for (int attempt = 0; attempt < kMaxGenerationAttempts; ++attempt) {
    std::vector<ComplexSeries> ws;
    for (std::size_t k = 0; k < weights.size(); ++k) {
      ws.push_back(schur_series(draw_schur_params(rng, cfg.blaschke_degree, cfg.real_only),
                                cfg.order));
    }
    try {
      return tuple_from_witnesses(h, n, weights, family, ws);
    } catch (const GenerationFailure&) {
    }
  }
  throw GenerationFailure("tuple generation failed after " +
                          std::to_string(kMaxGenerationAttempts) + " attempts");
}

/// Class id certified by a generated tuple of this family (starlike type).
inline ClassId starlike_class(Family family) {
  switch (family) {
    case Family::plain: return ClassId::ST_nm;
    case Family::symmetric: return ClassId::STS_nm;
    case Family::conjugate: return ClassId::STC_nm;
    case Family::symmetric_conjugate: return ClassId::STSC_nm;
  }
  return ClassId::ST_nm;
}

inline ClassId convex_class(Family family) {
  switch (family) {
    case Family::plain: return ClassId::CV_nm;
    case Family::symmetric: return ClassId::CVS_nm;
    case Family::conjugate: return ClassId::CVC_nm;
    case Family::symmetric_conjugate: return ClassId::CVSC_nm;
  }
  return ClassId::CV_nm;
}

/// Complex member of a class near a real one: adds a small complex
/// perturbation with geometric decay to every member and keeps it only if
/// the membership verdict still clears tol_accept. The scale halves on each
/// rejection.
inline std::optional<TupleSystem> perturb_member(const TupleSystem& t, int n, ClassId id,
                                                 const ConvexTarget& h, const ProbeConfig& probe_cfg,
                                                 std::uint64_t seed, double scale = 1e-2,
                                                 int attempts = 4) {
  Rng rng(seed);
  for (int a = 0; a < attempts; ++a, scale *= 0.5) {
    std::vector<ComplexSeries> members;
    for (const auto& f : t.members()) {
      members.push_back(map_coefficients(f, [&](std::size_t k, cplx c) {
        if (k < 2) return c;
        const double decay = scale * std::pow(0.5, static_cast<double>(k - 2));
        return c + decay * cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
      }));
    }
    TupleSystem candidate(std::move(members), t.weights());
    const auto v = membership(candidate, n, id, h, std::nullopt, probe_cfg);
    if (v.margin > probe_cfg.tol_accept) return candidate;
  }
  return std::nullopt;
}

/// phi with phi * k_alpha = s for a random s in ST(alpha); hence phi is in R_alpha.
inline ComplexSeries prestarlike_member(double alpha, const GenConfig& cfg) {
  const ComplexSeries s = st_member(ConvexTarget::half_plane(alpha), random_schur(cfg), cfg.order);
  return deconvolve(s, koebe(alpha, cfg.order));
}

struct MMPair {
  ComplexSeries S;
  ComplexSeries T;
  double starlike_order;
  ComplexSeries inner_witness;
};

/// S in ST(starlike_order) and T = int_0^z S'(t) h(w~(t)) dt, so T'/S' = h(w~).
inline MMPair mm_pair_from(const ConvexTarget& h, double starlike_order, const ComplexSeries& w,
                           const ComplexSeries& w_tilde) {
  const std::size_t order = w.order();
  ComplexSeries S = st_member(ConvexTarget::half_plane(starlike_order), w, order);
  ComplexSeries T = antiderivative(cauchy_product(derivative(S), h.subordinate(w_tilde)));
  return {std::move(S), std::move(T), starlike_order, w_tilde};
}

inline MMPair mm_pair(const ConvexTarget& h, const GenConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const double order_alpha = rng.uniform();
  const auto w = schur_series(draw_schur_params(rng, cfg.blaschke_degree, cfg.real_only), cfg.order);
  const auto w_tilde =
      schur_series(draw_schur_params(rng, cfg.blaschke_degree, cfg.real_only), cfg.order);
  return mm_pair_from(h, order_alpha, w, w_tilde);
}

}  // namespace nply
