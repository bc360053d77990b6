#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "nply/classes.hpp"
#include "nply/generators.hpp"
#include "nply/io.hpp"
#include "nply/operators.hpp"
#include "nply/series.hpp"
#include "nply/targets.hpp"

namespace nply {

enum class TheoremId {
  T1_1, T1_2,
  T2_2, T2_3, T2_4,
  T3_1, T3_2, T3_3, T3_4,
  T4_1, T4_2, T4_3, T4_4,
  T5_1, T5_2, T5_3, T5_4,
  IDENTITIES,
};

inline constexpr std::size_t kTheoremCount = 18;

/// Everything a trial needs besides its seed.
struct TrialParams {
  int n = 1;
  std::vector<double> weights{1.0};
  ConvexTarget target = ConvexTarget::half_plane(0.0);
  GenConfig gen;  // gen.seed is the master seed
  ProbeConfig probe;
  /// Allowance for the sampled convex hull in the hull-containment check.
  double hull_tolerance = 1e-6;
  /// Hull polygon uses this many H samples per probe sample.
  int hull_oversampling = 8;
  /// Forces w~ = 0 in the T'/S' pair, so T = S.
  bool zero_inner_witness = false;
  /// Test hook: applied to the certified tuple after its hypothesis check and
  /// before the conclusion is tested.
  std::function<TupleSystem(const TupleSystem&)> corrupt;
};

/// Hypothesis certificate did not clear tol_accept; the trial resamples.
class HypothesisRejected : public GenerationFailure {
 public:
  using GenerationFailure::GenerationFailure;
};

struct TrialResult {
  double margin = std::numeric_limits<double>::infinity();
  /// Convolution theorems: margin of the same quotients against Re w > alpha.
  std::optional<double> secondary;
};

namespace harness_detail {

inline void require_hypothesis(double margin, const ProbeConfig& probe, const char* what) {
  if (!(margin > probe.tol_accept)) {
    throw HypothesisRejected(std::string("hypothesis certificate failed: ") + what);
  }
}

inline bool is_conjugate(Family f) {
  return f == Family::conjugate || f == Family::symmetric_conjugate;
}

/// Independent generator stream for one role inside a trial.
inline GenConfig gen_for(const TrialParams& p, std::uint64_t seed, std::uint64_t salt,
                         bool real_only) {
  GenConfig g = p.gen;
  g.seed = derive_seed(seed, salt);
  g.real_only = g.real_only || real_only;
  return g;
}

/// Largest alpha in [0, 1) with Re h > alpha on the sampled boundary.
inline double real_floor(const ConvexTarget& h) {
  if (const auto* hp = h.as_half_plane()) return hp->alpha;
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& v : h.as_sampled()->polygon.vertices()) lo = std::min(lo, v.real());
  if (lo < 0.0) throw std::invalid_argument("target has points with negative real part");
  return std::min(lo, 0.999);
}

inline MembershipVerdict check(const TupleSystem& t, int n, ClassId id, const ConvexTarget& h,
                               const ProbeConfig& probe,
                               const std::optional<ComplexSeries>& g = std::nullopt) {
  return membership(t, n, id, h, g, probe);
}

inline TupleSystem apply_hook(const TrialParams& p, TupleSystem t) {
  return p.corrupt ? p.corrupt(t) : t;
}

/// Starlike-type member of the family with its certificate re-verified. For
/// the conjugate families a complex perturbation is attempted so the
/// conjugate part extractors act non-trivially.
inline TupleSystem certified_tuple(const TrialParams& p, std::uint64_t seed, Family family) {
  const GenConfig g = gen_for(p, seed, 1, is_conjugate(family));
  auto generated = tuple_member(p.target, p.n, p.weights, family, g);
  const ClassId id = starlike_class(family);
  require_hypothesis(check(generated.tuple, p.n, id, p.target, p.probe).margin, p.probe,
                     "generated tuple");
  if (is_conjugate(family)) {
    if (auto perturbed = perturb_member(generated.tuple, p.n, id, p.target, p.probe,
                                        derive_seed(seed, 2))) {
      return *perturbed;
    }
  }
  return generated.tuple;
}

/// Convex-type member: Alexander inverse of a starlike-type member.
inline TupleSystem certified_convex_tuple(const TrialParams& p, std::uint64_t seed, Family family) {
  auto cv = alexander(certified_tuple(p, seed, family), AlexanderDirection::inverse);
  require_hypothesis(check(cv, p.n, convex_class(family), p.target, p.probe).margin, p.probe,
                     "convex tuple");
  return cv;
}

inline ComplexSeries certified_prestarlike(const TrialParams& p, std::uint64_t seed, double alpha,
                                           bool real_only) {
  auto phi = prestarlike_member(alpha, gen_for(p, seed, 3, real_only));
  require_hypothesis(prestarlike_test(phi, alpha, p.probe).margin, p.probe, "prestarlike phi");
  return phi;
}

inline TrialResult hull_containment(const TrialParams& p, std::uint64_t seed) {
  const double alpha = real_floor(p.target);
  const ConvexTarget h_alpha = ConvexTarget::half_plane(alpha);
  const auto phi = certified_prestarlike(p, seed, alpha, false);
  const auto f = st_member(h_alpha, random_schur(gen_for(p, seed, 4, false)), p.gen.order);
  require_hypothesis(check(TupleSystem(f), 1, ClassId::ST_nm, h_alpha, p.probe).margin, p.probe,
                     "f in ST(alpha)");
  const auto H = p.target.subordinate(random_schur(gen_for(p, seed, 5, false)));

  const auto q = quotient_series(hadamard(phi, cauchy_product(H, f)), hadamard(phi, f));
  const auto hull = ConvexPolygon::hull(
      evaluate_on_circle(H, p.probe.max_radius(), p.probe.samples * p.hull_oversampling));
  return {probe(q, [&](cplx w) { return hull.signed_distance(w); }, p.probe, ClassId::ST_nm).margin,
          std::nullopt};
}

inline TrialResult miller_mocanu(const TrialParams& p, std::uint64_t seed) {
  const auto g = gen_for(p, seed, 6, false);
  MMPair pair = [&] {
    if (!p.zero_inner_witness) return mm_pair(p.target, g);
    Rng rng(g.seed);
    const double order_alpha = rng.uniform();
    const auto w = schur_series(draw_schur_params(rng, g.blaschke_degree, g.real_only), g.order);
    return mm_pair_from(p.target, order_alpha, w, ComplexSeries(g.order));
  }();
  require_hypothesis(check(TupleSystem(pair.S), 1, ClassId::ST_nm, ConvexTarget::half_plane(0.0),
                           p.probe).margin,
                     p.probe, "Re zS'/S > 0");
  const auto ratio_prime = quotient_series(z_derivative(pair.T), z_derivative(pair.S));
  require_hypothesis(
      probe(ratio_prime, [&](cplx w) { return p.target.margin(w); }, p.probe, ClassId::ST_nm).margin,
      p.probe, "T'/S' subordinate to h");
  const auto ratio = quotient_series(pair.T, pair.S);
  return {probe(ratio, [&](cplx w) { return p.target.margin(w); }, p.probe, ClassId::ST_nm).margin,
          std::nullopt};
}

inline double nply_starlike_margin(const TrialParams& p, const TupleSystem& t, Family family) {
  const auto G = part(nply_points(build_F(t), p.n), family);
  return check(TupleSystem(G), 1, ClassId::ST_nm, p.target, p.probe).margin;
}

inline TrialResult close_to_convex(const TrialParams& p, std::uint64_t seed) {
  const auto t = apply_hook(p, certified_tuple(p, seed, Family::plain));
  const auto Fn = nply_points(build_F(t), p.n);
  double margin = nply_starlike_margin(p, t, Family::plain);
  for (const auto& f : t.members()) {
    margin = std::min(margin, close_to_convex_check(f, Fn, p.target, p.probe).margin);
  }
  return {margin, std::nullopt};
}

/// Odd, conjugate or symmetric-conjugate part of each member lands in ST_nm.
inline TrialResult part_tuple(const TrialParams& p, std::uint64_t seed, Family family) {
  const auto t = apply_hook(p, certified_tuple(p, seed, family));
  const auto g = t.map([&](const ComplexSeries& f) { return part(f, family); });
  return {check(g, p.n, ClassId::ST_nm, p.target, p.probe).margin, std::nullopt};
}

/// The family's part of F_n is in ST(h).
inline TrialResult part_starlike(const TrialParams& p, std::uint64_t seed, Family family) {
  const auto t = apply_hook(p, certified_tuple(p, seed, family));
  return {nply_starlike_margin(p, t, family), std::nullopt};
}

/// Convex-type class contained in the starlike-type class of the family.
inline TrialResult containment(const TrialParams& p, std::uint64_t seed, Family family) {
  const auto cv = apply_hook(p, certified_convex_tuple(p, seed, family));
  double margin = check(cv, p.n, starlike_class(family), p.target, p.probe).margin;
  if (family == Family::plain) {
    const auto Fn = nply_points(build_F(cv), p.n);
    margin = std::min(margin, check(TupleSystem(Fn), 1, ClassId::CV_nm, p.target, p.probe).margin);
  }
  return {margin, std::nullopt};
}

/// Closure under convolution with prestarlike phi of order alpha, where
/// Re h > alpha; phi has real coefficients for the conjugate families.
/// Checks the starlike class, the convex class, and the (g, h) variant.
inline TrialResult convolution_closure(const TrialParams& p, std::uint64_t seed, Family family) {
  const double alpha = real_floor(p.target);
  const bool real = is_conjugate(family);
  const ClassId st = starlike_class(family);
  const ClassId cv = convex_class(family);
  const auto t = certified_tuple(p, seed, family);
  const auto phi = certified_prestarlike(p, seed, alpha, real);
  const ConvexTarget floor_target = ConvexTarget::half_plane(alpha);

  const auto cv_tuple = alexander(t, AlexanderDirection::inverse);
  require_hypothesis(check(cv_tuple, p.n, cv, p.target, p.probe).margin, p.probe, "convex tuple");

  // (g, h) variant: f = t / g coefficientwise, so f * g = t is a member.
  const auto g = alexander(
      st_member(ConvexTarget::half_plane(0.0), random_schur(gen_for(p, seed, 7, real)), p.gen.order),
      AlexanderDirection::inverse);
  const auto f_g = t.map([&](const ComplexSeries& f) { return deconvolve(f, g); });
  require_hypothesis(check(f_g, p.n, st, p.target, p.probe, g).margin, p.probe, "(g,h) tuple");

  const auto t_phi = apply_hook(p, convolve(t, phi));
  const auto cv_phi = apply_hook(p, convolve(cv_tuple, phi));
  const auto fg_phi = apply_hook(p, convolve(f_g, phi));

  TrialResult r;
  r.margin = std::min({check(t_phi, p.n, st, p.target, p.probe).margin,
                       check(cv_phi, p.n, cv, p.target, p.probe).margin,
                       check(fg_phi, p.n, st, p.target, p.probe, g).margin});
  r.secondary = std::min({check(t_phi, p.n, st, floor_target, p.probe).margin,
                          check(cv_phi, p.n, cv, floor_target, p.probe).margin,
                          check(fg_phi, p.n, st, floor_target, p.probe, g).margin});
  return r;
}

/// Pointwise route for F_n: coefficient c_k (1/n) sum_j eps^{j(k-1)}.
inline ComplexSeries nply_by_average(const ComplexSeries& F, int n) {
  return map_coefficients(F, [&](std::size_t k, cplx c) {
    cplx acc = 0.0;
    for (int j = 0; j < n; ++j) {
      acc += std::polar(1.0, 2.0 * std::numbers::pi * j * (static_cast<double>(k) - 1.0) / n);
    }
    return c * acc / static_cast<double>(n);
  });
}

inline double relative_gap(const ComplexSeries& a, const ComplexSeries& b) {
  double scale = 1.0;
  for (const auto& c : a.coeffs()) scale = std::max(scale, std::abs(c));
  return max_abs_difference(a, b) / scale;
}

/// Exact coefficient identities and parameter-setting reductions. Returns
/// +inf when every identity holds; a violated identity yields
/// -(1 + discrepancy), always below any tolerance.
inline TrialResult identities(const TrialParams& p, std::uint64_t seed) {
  const auto gen = gen_for(p, seed, 8, false);
  const auto t = apply_hook(p, tuple_member(p.target, p.n, p.weights, Family::plain, gen).tuple);
  const std::size_t order = t.order();
  const auto ones = ComplexSeries::geometric(order);
  const auto k0 = koebe(0.0, order);

  double worst = 0.0;  // discrepancy beyond tolerance
  auto expect = [&](double gap, double tol) {
    if (gap > tol) worst = std::max(worst, gap);
  };

  for (const auto& f : t.members()) {
    expect(max_abs_difference(hadamard(f, ones), f), 0.0);
    expect(max_abs_difference(hadamard(f, k0), z_derivative(f)), 0.0);
  }

  for (const auto& [id, name] : kClassNames) {
    if (!is_tuple_class(id)) continue;
    if (needs_real_symmetric_target(id) && !p.target.real_symmetric()) continue;
    const auto plain = class_quotients(t, p.n, id);
    const auto with_ones = class_quotients(t, p.n, id, ones);
    for (std::size_t k = 0; k < plain.size(); ++k) expect(max_abs_difference(plain[k], with_ones[k]), 0.0);
    if (is_convex_type(id)) {
      const ClassId st = starlike_class(part_kind(id));
      const auto via_koebe = class_quotients(t, p.n, st, k0);
      const auto via_alexander = class_quotients(alexander(t, AlexanderDirection::forward), p.n, st);
      for (std::size_t k = 0; k < plain.size(); ++k) {
        expect(relative_gap(plain[k], via_koebe[k]), 1e-10);
        expect(relative_gap(plain[k], via_alexander[k]), 1e-10);
      }
    }
  }

  // m = 1: general predicates against the classical ones.
  for (const auto& f : t.members()) {
    const TupleSystem single(f);
    for (const auto& [id, name] : kClassNames) {
      if (!is_tuple_class(id)) continue;
      const auto reduced = class_quotients(single, 1, id, ones).front();
      expect(max_abs_difference(reduced, classical_quotient(f, id)), 0.0);
      const auto general_n = class_quotients(single, p.n, id).front();
      expect(relative_gap(general_n, classical_quotient(f, id, nply_by_average(f, p.n))), 1e-12);
    }
    // R_0 is CV and R_{1/2} is ST(1/2).
    const auto r0 = prestarlike_test(f, 0.0, p.probe).margin;
    const auto cv0 = membership(single, 1, ClassId::CV_nm, ConvexTarget::half_plane(0.0), std::nullopt,
                                p.probe).margin;
    expect(std::abs(r0 - cv0), 0.0);
    const auto rhalf = prestarlike_test(f, 0.5, p.probe).margin;
    const auto st_half = membership(single, 1, ClassId::ST_nm, ConvexTarget::half_plane(0.5),
                                    std::nullopt, p.probe).margin;
    expect(std::abs(rhalf - st_half), 0.0);
  }

  TrialResult r;
  r.margin = worst > 0.0 ? -(1.0 + worst) : std::numeric_limits<double>::infinity();
  return r;
}

}  // namespace harness_detail

using TrialFn = TrialResult (*)(const TrialParams&, std::uint64_t);

struct TheoremEntry {
  TheoremId id;
  std::string_view name;
  std::string_view statement;
  TrialFn run;
  /// Judged against hull_tolerance instead of tol_accept.
  bool hull_check;
};

namespace harness_detail {
template <Family F>
TrialResult part_tuple_of(const TrialParams& p, std::uint64_t s) { return part_tuple(p, s, F); }
template <Family F>
TrialResult part_starlike_of(const TrialParams& p, std::uint64_t s) { return part_starlike(p, s, F); }
template <Family F>
TrialResult containment_of(const TrialParams& p, std::uint64_t s) { return containment(p, s, F); }
template <Family F>
TrialResult closure_of(const TrialParams& p, std::uint64_t s) { return convolution_closure(p, s, F); }
}  // namespace harness_detail

/// Every theorem id with the property its trials check.
inline constexpr std::array<TheoremEntry, kTheoremCount> kTheorems{{
    {TheoremId::T1_1, "T1_1", "(phi*(Hf))/(phi*f) stays in the convex hull of H for phi in R_alpha, f in ST(alpha)",
     harness_detail::hull_containment, true},
    {TheoremId::T1_2, "T1_2", "T'/S' subordinate to convex h and S starlike imply T/S subordinate to h",
     harness_detail::miller_mocanu, false},
    {TheoremId::T2_2, "T2_2", "ST_nm(h): F_n in ST(h), each f_k close-to-convex with witness F_n",
     harness_detail::close_to_convex, false},
    {TheoremId::T2_3, "T2_3", "CV_nm(h) is contained in ST_nm(h), and F_n is in CV(h)",
     harness_detail::containment_of<Family::plain>, false},
    {TheoremId::T2_4, "T2_4", "ST_nm(g,h), CV_nm(g,h) closed under convolution with R_alpha",
     harness_detail::closure_of<Family::plain>, false},
    {TheoremId::T3_1, "T3_1", "STS_nm(h): odd parts (f(z)-f(-z))/2 form a member of ST_nm(h)",
     harness_detail::part_tuple_of<Family::symmetric>, false},
    {TheoremId::T3_2, "T3_2", "STS_nm(h): G_n = (F_n(z)-F_n(-z))/2 is in ST(h)",
     harness_detail::part_starlike_of<Family::symmetric>, false},
    {TheoremId::T3_3, "T3_3", "CVS_nm(h) is contained in STS_nm(h)",
     harness_detail::containment_of<Family::symmetric>, false},
    {TheoremId::T3_4, "T3_4", "STS_nm(g,h), CVS_nm(g,h) closed under convolution with R_alpha",
     harness_detail::closure_of<Family::symmetric>, false},
    {TheoremId::T4_1, "T4_1", "STC_nm(h): conjugate parts (f(z)+conj f(conj z))/2 form a member of ST_nm(h)",
     harness_detail::part_tuple_of<Family::conjugate>, false},
    {TheoremId::T4_2, "T4_2", "STC_nm(h): G_n = (F_n(z)+conj F_n(conj z))/2 is in ST(h)",
     harness_detail::part_starlike_of<Family::conjugate>, false},
    {TheoremId::T4_3, "T4_3", "CVC_nm(h) is contained in STC_nm(h)",
     harness_detail::containment_of<Family::conjugate>, false},
    {TheoremId::T4_4, "T4_4", "STC_nm(g,h), CVC_nm(g,h) closed under convolution with real R_alpha",
     harness_detail::closure_of<Family::conjugate>, false},
    {TheoremId::T5_1, "T5_1", "STSC_nm(h): parts (f(z)-conj f(-conj z))/2 form a member of ST_nm(h)",
     harness_detail::part_tuple_of<Family::symmetric_conjugate>, false},
    {TheoremId::T5_2, "T5_2", "STSC_nm(h): G_n = (F_n(z)-conj F_n(-conj z))/2 is in ST(h)",
     harness_detail::part_starlike_of<Family::symmetric_conjugate>, false},
    {TheoremId::T5_3, "T5_3", "CVSC_nm(h) is contained in STSC_nm(h)",
     harness_detail::containment_of<Family::symmetric_conjugate>, false},
    {TheoremId::T5_4, "T5_4", "STSC_nm(g,h), CVSC_nm(g,h) closed under convolution with real R_alpha",
     harness_detail::closure_of<Family::symmetric_conjugate>, false},
    {TheoremId::IDENTITIES, "IDENTITIES",
     "convolution identities, Alexander relation, m = 1 and m = n = 1 reductions, R_0 = CV, R_1/2 = ST(1/2)",
     harness_detail::identities, false},
}};

static_assert([] {
  for (std::size_t i = 0; i < kTheorems.size(); ++i) {
    if (static_cast<std::size_t>(kTheorems[i].id) != i) return false;
  }
  return true;
}(), "dispatch table must list every theorem id in enum order");

inline const TheoremEntry& theorem_entry(TheoremId id) {
  return kTheorems[static_cast<std::size_t>(id)];
}

inline std::string_view to_string(TheoremId id) { return theorem_entry(id).name; }

inline std::optional<TheoremId> parse_theorem_id(std::string_view s) {
  for (const auto& e : kTheorems) {
    if (e.name == s) return e.id;
  }
  return std::nullopt;
}

struct TrialRecord {
  std::size_t index;
  std::uint64_t seed;
  double margin;
  std::optional<double> secondary;
};

struct GenerationFailureRecord {
  std::size_t index;
  std::uint64_t seed;
  std::string reason;
};

struct TrialReport {
  TheoremId theorem_id = TheoremId::IDENTITIES;
  std::size_t trials = 0;
  io::json params;
  double tolerance = 0.0;
  double r_test = 0.0;
  /// Successful trials in trial-index order.
  std::vector<TrialRecord> records;
  std::vector<TrialRecord> failures;
  std::vector<GenerationFailureRecord> generation_failures;
  double min_margin = std::numeric_limits<double>::infinity();
  double median_margin = std::numeric_limits<double>::infinity();
  long long runtime_ms = 0;

  std::vector<double> margins() const {
    std::vector<double> m;
    for (const auto& r : records) m.push_back(r.margin);
    return m;
  }
  bool passed() const { return failures.empty(); }
};

inline std::string target_spec_string(const ConvexTarget& t) {
  if (const auto* hp = t.as_half_plane()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "halfplane:%.17g", hp->alpha);
    return buf;
  }
  return "sampled";
}

inline io::json params_to_json(const TrialParams& p) {
  return io::json{{"n", p.n},
                  {"m", p.weights.size()},
                  {"weights", p.weights},
                  {"target", io::to_json(p.target)},
                  {"gen", io::to_json(p.gen)},
                  {"probe", io::to_json(p.probe)},
                  {"hull_tolerance", p.hull_tolerance}};
}

/// Runs `trials` independent trials of one theorem. Trial i uses the seed
/// derive_seed(params.gen.seed, i); up to 16 reseeds are made when a
/// hypothesis certificate or generation fails, after which the trial is
/// recorded as a generation failure.
inline TrialReport verify(TheoremId id, std::size_t trials, const TrialParams& params,
                          unsigned threads = 0) {
  if (trials < 1) throw std::invalid_argument("verify needs at least one trial");
  params.probe.validate();
  params.gen.validate();
  if (params.n < 1) throw std::invalid_argument("n must be >= 1");
  TupleSystem(std::vector<ComplexSeries>(params.weights.size(), ComplexSeries::identity(3)),
              params.weights);  // validates the weights

  const auto& entry = theorem_entry(id);
  const auto start = std::chrono::steady_clock::now();

  struct Slot {
    std::optional<TrialRecord> record;
    std::optional<GenerationFailureRecord> failure;
  };
  std::vector<Slot> slots(trials);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < trials; i = next++) {
      const std::uint64_t seed = derive_seed(params.gen.seed, i);
      std::string reason;
      for (int attempt = 0; attempt < kMaxGenerationAttempts; ++attempt) {
        const std::uint64_t s = attempt == 0 ? seed : derive_seed(seed, 1000 + attempt);
        try {
          const TrialResult r = entry.run(params, s);
          slots[i].record = TrialRecord{i, s, r.margin, r.secondary};
          break;
        } catch (const GenerationFailure& e) {
          reason = e.what();
        }
      }
      if (!slots[i].record) slots[i].failure = GenerationFailureRecord{i, seed, reason};
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, trials));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  TrialReport report;
  report.theorem_id = id;
  report.trials = trials;
  report.params = params_to_json(params);
  report.tolerance = entry.hull_check ? params.hull_tolerance : params.probe.tol_accept;
  report.r_test = params.probe.max_radius();
  for (auto& slot : slots) {
    if (slot.record) {
      report.records.push_back(*slot.record);
      if (slot.record->margin < -report.tolerance || std::isnan(slot.record->margin)) {
        report.failures.push_back(*slot.record);
      }
    } else if (slot.failure) {
      report.generation_failures.push_back(*slot.failure);
    }
  }
  auto m = report.margins();
  if (!m.empty()) {
    std::sort(m.begin(), m.end());
    report.min_margin = m.front();
    report.median_margin = m.size() % 2 ? m[m.size() / 2] : 0.5 * (m[m.size() / 2 - 1] + m[m.size() / 2]);
  }
  report.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  return report;
}

inline io::json to_json(const TrialReport& r) {
  using io::json;
  json margins = json::array(), secondary = json::array(), failures = json::array(),
       gen_failures = json::array();
  for (const auto& rec : r.records) {
    margins.push_back(rec.margin);
    if (rec.secondary) secondary.push_back(*rec.secondary);
  }
  for (const auto& f : r.failures) {
    failures.push_back(json{{"trial", f.index}, {"seed", f.seed}, {"margin", f.margin}});
  }
  for (const auto& f : r.generation_failures) {
    gen_failures.push_back(json{{"trial", f.index}, {"seed", f.seed}, {"reason", f.reason}});
  }
  json j{{"theorem_id", std::string(to_string(r.theorem_id))},
         {"statement", std::string(theorem_entry(r.theorem_id).statement)},
         {"trials", r.trials},
         {"params", r.params},
         {"r_test", r.r_test},
         {"tolerance", r.tolerance},
         {"margins", margins},
         {"min_margin", r.min_margin},
         {"median_margin", r.median_margin},
         {"failures", failures},
         {"generation_failures", gen_failures},
         {"runtime_ms", r.runtime_ms}};
  if (!secondary.empty()) j["halfplane_margins"] = secondary;
  return j;
}

struct SuiteConfig {
  std::vector<TheoremId> theorems;
  std::vector<TrialParams> grid;
  std::size_t trials = 100;
  /// When true every grid point runs `trials` trials; otherwise the trials
  /// are dealt round-robin over the grid points.
  bool trials_per_point = true;
  std::uint64_t seed = 42;
  std::filesystem::path json_dir;
  std::filesystem::path csv_path;
  unsigned threads = 0;
};

/// Weights proportional to 1, 2, ..., m.
inline std::vector<double> ramp_weights(std::size_t m) {
  std::vector<double> w(m);
  const double total = static_cast<double>(m * (m + 1)) / 2.0;
  for (std::size_t k = 0; k < m; ++k) w[k] = static_cast<double>(k + 1) / total;
  return w;
}

/// Grid n x m x alpha with half-plane targets and ramp weights.
inline std::vector<TrialParams> cartesian_grid(const std::vector<int>& ns, const std::vector<std::size_t>& ms,
                                               const std::vector<double>& alphas, const TrialParams& base) {
  std::vector<TrialParams> grid;
  for (int n : ns) {
    for (std::size_t m : ms) {
      for (double a : alphas) {
        TrialParams p = base;
        p.n = n;
        p.weights = ramp_weights(m);
        p.target = ConvexTarget::half_plane(a);
        grid.push_back(std::move(p));
      }
    }
  }
  return grid;
}

inline SuiteConfig suite_config_from_json(const io::json& j, const std::filesystem::path& base_dir = {}) {
  using io::json;
  SuiteConfig cfg;
  try {
    TrialParams base;
    if (j.contains("probe")) base.probe = io::probe_config_from_json(j.at("probe"));
    if (j.contains("gen")) base.gen = io::gen_config_from_json(j.at("gen"));
    base.hull_tolerance = j.value("hull_tolerance", base.hull_tolerance);
    if (j.value("inject_corruption", false)) {
      base.corrupt = [](const TupleSystem& t) {
        auto members = t.members();
        members[0] = members[0] + ComplexSeries::monomial(t.order(), 2, 0.9);
        return TupleSystem(std::move(members), t.weights());
      };
    }

    const json& th = j.contains("theorems") ? j.at("theorems") : json("all");
    if (th.is_string() && th.get<std::string>() == "all") {
      for (const auto& e : kTheorems) cfg.theorems.push_back(e.id);
    } else {
      for (const auto& name : th) {
        const auto id = parse_theorem_id(name.get<std::string>());
        if (!id) throw io::FormatError("unknown theorem id '" + name.get<std::string>() + "'");
        cfg.theorems.push_back(*id);
      }
    }

    const json& grid = j.contains("grid") ? j.at("grid") : json::object();
    if (grid.is_array()) {
      for (const auto& pt : grid) {
        TrialParams p = base;
        p.n = pt.value("n", 1);
        p.weights = pt.contains("weights") ? pt.at("weights").get<std::vector<double>>()
                                           : ramp_weights(pt.value("m", std::size_t{1}));
        if (pt.contains("target")) p.target = io::target_from_json(pt.at("target"));
        cfg.grid.push_back(std::move(p));
      }
    } else {
      cfg.grid = cartesian_grid(grid.value("n", std::vector<int>{1, 2, 3}),
                                grid.value("m", std::vector<std::size_t>{1, 2, 3}),
                                grid.value("alpha", std::vector<double>{0.0, 0.25, 0.5}), base);
    }
    cfg.trials = j.value("trials", cfg.trials);
    cfg.trials_per_point = j.value("trials_per_point", cfg.trials_per_point);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.threads = j.value("threads", 0u);
    if (j.contains("output")) {
      const auto& out = j.at("output");
      if (out.contains("json_dir")) cfg.json_dir = base_dir / out.at("json_dir").get<std::string>();
      if (out.contains("csv")) cfg.csv_path = base_dir / out.at("csv").get<std::string>();
    }
  } catch (const json::exception& e) {
    throw io::FormatError(std::string("malformed suite config: ") + e.what());
  }
  return cfg;
}

struct SuiteResult {
  /// One report per (theorem, grid point) that received trials.
  std::vector<TrialReport> reports;
  bool passed() const {
    return std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.passed(); });
  }
  int exit_code() const { return passed() ? 0 : 1; }
};

inline std::string weights_spec(const std::vector<double>& w) {
  std::ostringstream os;
  for (std::size_t i = 0; i < w.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", w[i]);
    os << (i ? ";" : "") << buf;
  }
  return os.str();
}

inline void write_suite_outputs(const SuiteConfig& cfg, const SuiteResult& result) {
  if (!cfg.json_dir.empty()) {
    std::filesystem::create_directories(cfg.json_dir);
    for (const auto id : cfg.theorems) {
      io::json arr = io::json::array();
      bool pass = true;
      double min_margin = std::numeric_limits<double>::infinity();
      for (const auto& r : result.reports) {
        if (r.theorem_id != id) continue;
        arr.push_back(to_json(r));
        pass = pass && r.passed();
        min_margin = std::min(min_margin, r.min_margin);
      }
      io::write_json_file(cfg.json_dir / (std::string(to_string(id)) + ".json"),
                          io::json{{"theorem_id", std::string(to_string(id))},
                                   {"passed", pass},
                                   {"min_margin", min_margin},
                                   {"reports", arr}});
    }
  }
  if (!cfg.csv_path.empty()) {
    if (cfg.csv_path.has_parent_path()) std::filesystem::create_directories(cfg.csv_path.parent_path());
    std::ofstream csv(cfg.csv_path);
    if (!csv) throw std::runtime_error("cannot write " + cfg.csv_path.string());
    csv << "theorem_id,trial,seed,n,m,alpha_spec,margin,decided\n";
    for (const auto& r : result.reports) {
      const auto n = r.params.at("n").get<int>();
      const auto weights = r.params.at("weights").get<std::vector<double>>();
      const auto target = r.params.at("target");
      std::string tspec = target.at("kind").get<std::string>() == "half_plane"
                              ? target_spec_string(ConvexTarget::half_plane(target.at("alpha").get<double>()))
                              : "sampled";
      for (const auto& rec : r.records) {
        char margin[40];
        std::snprintf(margin, sizeof margin, "%.17g", rec.margin);
        csv << to_string(r.theorem_id) << ',' << rec.index << ',' << rec.seed << ',' << n << ','
            << weights.size() << ',' << weights_spec(weights) << '|' << tspec << ',' << margin << ','
            << to_string(decide(rec.margin, r.tolerance)) << '\n';
      }
    }
  }
}

inline SuiteResult run_suite(const SuiteConfig& cfg) {
  SuiteResult result;
  if (cfg.grid.empty()) return result;
  for (const auto id : cfg.theorems) {
    for (std::size_t g = 0; g < cfg.grid.size(); ++g) {
      std::size_t trials = cfg.trials;
      if (!cfg.trials_per_point) {
        trials = cfg.trials / cfg.grid.size() + (g < cfg.trials % cfg.grid.size() ? 1 : 0);
      }
      if (trials == 0) continue;
      TrialParams p = cfg.grid[g];
      p.gen.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(id) * 1000003ULL + g);
      result.reports.push_back(verify(id, trials, p, cfg.threads));
    }
  }
  write_suite_outputs(cfg, result);
  return result;
}

inline SuiteResult run_suite(const std::filesystem::path& config_file) {
  const auto j = io::read_json_file(config_file);
  return run_suite(suite_config_from_json(j, config_file.parent_path()));
}

}  // namespace nply
