#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "nply/generators.hpp"
#include "test_support.hpp"

using namespace nply;

namespace {

constexpr std::size_t N = kProbeOrder;

ComplexSeries blaschke(cplx eta, std::vector<cplx> zeros, std::size_t order = N) {
  return schur_series(SchurParams{eta, std::move(zeros)}, order);
}

cplx blaschke_value(cplx eta, const std::vector<cplx>& zeros, cplx z) {
  cplx v = eta * z;
  for (cplx a : zeros) v *= (a - z) / (1.0 - std::conj(a) * z);
  return v;
}

TEST(Schur, ClosedForms) {
  EXPECT_EQ(blaschke(1.0, {}), ComplexSeries::identity(N));
  for (int d = 0; d <= 4; ++d) {
    std::vector<cplx> zeros(static_cast<std::size_t>(d), 0.0);
    auto w = blaschke(1.0, zeros, 16);
    EXPECT_EQ(w, ComplexSeries::monomial(16, d + 1, d % 2 == 0 ? 1.0 : -1.0)) << d;
  }
  const std::vector<cplx> zeros{{0.5, 0.3}, {-0.7, 0.1}, {0.0, -0.8}};
  const cplx eta = std::polar(1.0, 0.7);
  auto w = blaschke(eta, zeros);
  for (cplx z : {cplx(0.3, 0.4), cplx(-0.9, 0.1), cplx(0.6, -0.7)}) {
    EXPECT_LT(std::abs(evaluate(w, z) - blaschke_value(eta, zeros, z)), 1e-12);
  }
  EXPECT_THROW(blaschke(1.0, {1.0}), std::invalid_argument);
}

TEST(Schur, RandomSamplesAreSelfMaps) {
  for (bool real : {false, true}) {
    for (int d : {0, 1, 2, 5, 8}) {
      for (std::uint64_t seed = 0; seed < 10; ++seed) {
        GenConfig cfg{N, d, seed, real};
        auto w = random_schur(cfg);
        EXPECT_EQ(w[0], cplx(0.0));
        double mx = 0.0;
        for (const auto& v : evaluate_on_circle(w, 0.99, 2048)) mx = std::max(mx, std::abs(v));
        EXPECT_LT(mx, 1.0);
        if (real) {
          EXPECT_TRUE(w.has_real_coefficients(1e-15));
        }
      }
    }
  }
}

TEST(Schur, ParamsRespectCaps) {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    auto p = draw_schur_params(rng, 3, false);
    EXPECT_NEAR(std::abs(p.eta), 1.0, 1e-15);
    for (cplx a : p.zeros) EXPECT_LE(std::abs(a), kMaxBlaschkeZero);
    auto q = draw_schur_params(rng, 3, true);
    EXPECT_TRUE(q.eta == cplx(1.0) || q.eta == cplx(-1.0));
    for (cplx a : q.zeros) EXPECT_EQ(a.imag(), 0.0);
  }
}

TEST(GenConfig, Validation) {
  EXPECT_THROW((GenConfig{N, 9, 0, false}.validate()), std::invalid_argument);
  EXPECT_THROW((GenConfig{N, -1, 0, false}.validate()), std::invalid_argument);
  EXPECT_THROW((GenConfig{2, 1, 0, false}.validate()), std::invalid_argument);
}

TEST(Rng, DeterministicAndInRange) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const double x = a.uniform();
    EXPECT_EQ(x, b.uniform());
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
    differs |= x != c.uniform();
  }
  EXPECT_TRUE(differs);
  EXPECT_NE(derive_seed(42, 0), derive_seed(42, 1));
  EXPECT_NE(derive_seed(42, 0), derive_seed(43, 0));
  EXPECT_EQ(derive_seed(7, 9), derive_seed(7, 9));
}

TEST(StMember, KoebeFromIdentityWitness) {
  for (double a : {0.0, 0.25, 0.5, 0.75}) {
    auto f = st_member(ConvexTarget::half_plane(a), ComplexSeries::identity(64), 64);
    auto k = koebe(a, 64);
    for (std::size_t j = 0; j <= 64; ++j) {
      EXPECT_LE(std::abs(f[j] - k[j]), 1e-10 * std::max(1.0, std::abs(k[j]))) << a << " " << j;
    }
  }
  EXPECT_EQ(st_member(ConvexTarget::half_plane(0.3), ComplexSeries(64), 64), ComplexSeries::identity(64));
}

TEST(StMember, QuotientIsSubordinateSeries) {
  auto h = ConvexTarget::half_plane(0.2);
  auto w = random_schur(GenConfig{N, 2, 5, false});
  auto f = st_member(h, w, N);
  auto q = quotient_series(z_derivative(f), f);
  EXPECT_LT(max_abs_difference(q, h.subordinate(w)), 1e-10);
}

TEST(TupleMember, ReducesToKoebe) {
  auto h0 = ConvexTarget::half_plane(0.0);
  auto g = tuple_from_witnesses(h0, 1, {1.0}, Family::plain, {ComplexSeries::identity(64)});
  auto k0 = koebe(0.0, 64);
  EXPECT_LT(max_abs_difference(g.tuple[0], k0), 1e-9);
  EXPECT_LT(max_abs_difference(g.denominator, k0), 1e-9);
}

TEST(TupleMember, ZeroWitnesses) {
  auto g = tuple_from_witnesses(ConvexTarget::half_plane(0.5), 3, {0.2, 0.3, 0.5}, Family::plain,
                                {ComplexSeries(32), ComplexSeries(32), ComplexSeries(32)});
  EXPECT_EQ(g.denominator, ComplexSeries::identity(32));
  for (const auto& f : g.tuple.members()) EXPECT_EQ(f, ComplexSeries::identity(32));
}

TEST(TupleMember, TwoMemberClosedForm) {
  auto z = ComplexSeries::identity(32);
  auto g = tuple_from_witnesses(ConvexTarget::half_plane(0.0), 1, {0.5, 0.5}, Family::plain,
                                {z, -1.0 * z});
  for (std::size_t k = 1; k <= 32; ++k) {
    EXPECT_NEAR(std::abs(g.denominator[k] - (k % 2 == 1 ? 1.0 : 0.0)), 0.0, 1e-10) << k;
    EXPECT_NEAR(std::abs(g.tuple[0][k] - 1.0), 0.0, 1e-10) << k;
    EXPECT_NEAR(std::abs(g.tuple[1][k] - (k % 2 == 1 ? 1.0 : -1.0)), 0.0, 1e-10) << k;
  }
}

TEST(TupleMember, Errors) {
  auto h = ConvexTarget::half_plane(0.0);
  GenConfig complex_cfg{64, 2, 1, false};
  EXPECT_THROW(tuple_member(h, 1, {1.0}, Family::conjugate, complex_cfg), std::invalid_argument);
  EXPECT_THROW(tuple_member(h, 1, {1.0}, Family::symmetric_conjugate, complex_cfg), std::invalid_argument);
  const cplx i{0.0, 1.0};
  auto tilted = ConvexTarget::sampled(nply::testing::from(64, {1.0, 0.5 * i}));
  EXPECT_THROW(tuple_member(tilted, 1, {1.0}, Family::conjugate, GenConfig{64, 2, 1, true}),
               std::invalid_argument);
  EXPECT_THROW(tuple_from_witnesses(h, 0, {1.0}, Family::plain, {ComplexSeries::identity(8)}),
               std::invalid_argument);
  EXPECT_THROW(tuple_from_witnesses(h, 1, {0.5, 0.5}, Family::plain, {ComplexSeries::identity(8)}),
               std::invalid_argument);
}

struct Case {
  Family family;
  int n;
  std::size_t m;
  double alpha;
};

std::vector<double> ramp(std::size_t m) {
  std::vector<double> w(m);
  double total = 0.0;
  for (std::size_t k = 0; k < m; ++k) total += static_cast<double>(k + 1);
  for (std::size_t k = 0; k < m; ++k) w[k] = static_cast<double>(k + 1) / total;
  return w;
}

TEST(TupleMember, SoundnessAndProjectionConsistency) {
  std::uint64_t seed = 0;
  for (auto family : {Family::plain, Family::symmetric, Family::conjugate, Family::symmetric_conjugate}) {
    const bool real = family == Family::conjugate || family == Family::symmetric_conjugate;
    for (int n : {1, 2, 3}) {
      for (std::size_t m : {1u, 3u}) {
        const double alpha = 0.25 * static_cast<double>(seed % 3);
        auto h = ConvexTarget::half_plane(alpha);
        GenConfig cfg{N, 2, ++seed, real};
        auto g = tuple_member(h, n, ramp(m), family, cfg);
        const auto F = build_F(g.tuple);
        const auto Fn = nply_points(F, n);
        if (family == Family::plain || family == Family::conjugate) {
          EXPECT_LT(max_abs_difference(Fn, g.denominator), 1e-10);
        } else {
          EXPECT_LT(max_abs_difference(part(Fn, PartKind::symmetric), g.denominator), 1e-10);
        }
        if (real) {
          EXPECT_TRUE(F.has_real_coefficients(1e-12));
        }
        auto v = membership(g.tuple, n, starlike_class(family), h, std::nullopt, {});
        EXPECT_GT(v.margin, 0.0) << static_cast<int>(family) << " n=" << n << " m=" << m;
        auto cv = alexander(g.tuple, AlexanderDirection::inverse);
        EXPECT_GT(membership(cv, n, convex_class(family), h, std::nullopt, {}).margin, 0.0);
      }
    }
  }
}

TEST(TupleMember, Deterministic) {
  auto h = ConvexTarget::half_plane(0.25);
  GenConfig cfg{N, 3, 1234, false};
  auto a = tuple_member(h, 2, {0.5, 0.5}, Family::symmetric, cfg);
  auto b = tuple_member(h, 2, {0.5, 0.5}, Family::symmetric, cfg);
  for (std::size_t k = 0; k < 2; ++k) EXPECT_EQ(a.tuple[k], b.tuple[k]);
  cfg.seed = 1235;
  auto c = tuple_member(h, 2, {0.5, 0.5}, Family::symmetric, cfg);
  EXPECT_NE(a.tuple[0], c.tuple[0]);
}

TEST(PerturbMember, YieldsComplexMembers) {
  auto h = ConvexTarget::half_plane(0.0);
  auto g = tuple_member(h, 2, {0.5, 0.5}, Family::conjugate, GenConfig{N, 2, 9, true});
  auto p = perturb_member(g.tuple, 2, ClassId::STC_nm, h, {}, 77);
  ASSERT_TRUE(p.has_value());
  EXPECT_FALSE(build_F(*p).has_real_coefficients(1e-6));
  EXPECT_GT(membership(*p, 2, ClassId::STC_nm, h, std::nullopt, {}).margin, 0.0);
}

TEST(Prestarlike, ClosedForms) {
  for (double a : {0.0, 0.25, 0.75}) {
    auto k = koebe(a, 64);
    EXPECT_LT(max_abs_difference(deconvolve(k, k), ComplexSeries::geometric(64)), 1e-15);
    auto s = st_member(ConvexTarget::half_plane(a), ComplexSeries(64), 64);
    EXPECT_EQ(deconvolve(s, k), ComplexSeries::identity(64));
  }
  GenConfig cfg{N, 2, 11, false};
  EXPECT_EQ(prestarlike_member(0.5, cfg),
            st_member(ConvexTarget::half_plane(0.5), random_schur(cfg), N));
}

TEST(Prestarlike, Soundness) {
  for (double a : {0.0, 0.25, 0.5, 0.9}) {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      GenConfig cfg{N, 2, seed, seed % 2 == 0};
      auto phi = prestarlike_member(a, cfg);
      EXPECT_TRUE(phi.is_normalized());
      if (cfg.real_only) {
        EXPECT_TRUE(phi.has_real_coefficients(1e-12));
      }
      EXPECT_GT(prestarlike_test(phi, a, {}).margin, 0.0) << a << " " << seed;
    }
  }
}

TEST(MMPair, Examples) {
  auto h0 = ConvexTarget::half_plane(0.0);
  auto w = random_schur(GenConfig{N, 2, 3, false});
  auto same = mm_pair_from(h0, 0.3, w, ComplexSeries(N));
  // the top coefficient of T is lost to the derivative
  EXPECT_LT(max_abs_difference(same.T.with_order(N - 1), same.S.with_order(N - 1)), 1e-13);

  auto p = mm_pair_from(h0, 0.0, ComplexSeries(32), ComplexSeries::identity(32));
  EXPECT_EQ(p.S, ComplexSeries::identity(32));
  for (std::size_t k = 1; k <= 32; ++k) {
    const double expect = k == 1 ? 1.0 : 2.0 / static_cast<double>(k);
    EXPECT_NEAR(std::abs(p.T[k] - expect), 0.0, 1e-15) << k;
  }
}

TEST(MMPair, DerivativeRatioIsSubordinateSeries) {
  auto h = ConvexTarget::half_plane(0.25);
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    auto pair = mm_pair(h, GenConfig{N, 2, seed, false});
    EXPECT_EQ(pair.T[0], cplx(0.0));
    auto ratio = quotient_series(derivative(pair.T), derivative(pair.S));
    EXPECT_LT(max_abs_difference(ratio.with_order(N - 2), h.subordinate(pair.inner_witness).with_order(N - 2)),
              1e-11);
  }
}

}  // namespace
