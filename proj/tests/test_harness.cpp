#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include <unistd.h>

#include "nply/harness.hpp"

using namespace nply;

namespace {

std::filesystem::path temp_dir(const std::string& tag) {
  auto d = std::filesystem::temp_directory_path() / ("nply_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

TrialParams params(int n, std::size_t m, double alpha, std::uint64_t seed = 42) {
  TrialParams p;
  p.n = n;
  p.weights = ramp_weights(m);
  p.target = ConvexTarget::half_plane(alpha);
  p.gen.seed = seed;
  return p;
}

TEST(Dispatch, EveryTheoremListedOnce) {
  std::set<std::string_view> names;
  for (std::size_t i = 0; i < kTheoremCount; ++i) {
    const auto id = static_cast<TheoremId>(i);
    EXPECT_EQ(theorem_entry(id).id, id);
    EXPECT_EQ(parse_theorem_id(to_string(id)), id);
    EXPECT_FALSE(theorem_entry(id).statement.empty());
    names.insert(to_string(id));
  }
  EXPECT_EQ(names.size(), kTheoremCount);
  EXPECT_FALSE(parse_theorem_id("T9_9").has_value());
  EXPECT_TRUE(theorem_entry(TheoremId::T1_1).hull_check);
}

TEST(Verify, ContainmentGolden) {
  auto r = verify(TheoremId::T2_3, 1, params(2, 2, 0.0), 1);
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_GT(r.min_margin, 0.0);
  EXPECT_TRUE(r.passed());
  // Recorded from this implementation; guards against silent drift.
  EXPECT_NEAR(r.min_margin, 0.12119099415273138, 1e-12);
}

TEST(Verify, ContainmentMatchesPointwiseQuotients) {
  // Rebuild the trial's convex tuple and evaluate zf_k'/F_n and (zF_n')'/F_n'
  // pointwise, with no series division.
  const auto p = params(2, 2, 0.0);
  auto r = verify(TheoremId::T2_3, 1, p, 1);
  const auto cv = harness_detail::certified_convex_tuple(p, r.records[0].seed, Family::plain);
  const auto Fn = nply_points(build_F(cv), p.n);
  const auto dF = derivative(Fn), d2F = derivative(dF);
  double oracle = INFINITY;
  for (double rad : p.probe.radii) {
    for (const auto& z : circle_points(rad, p.probe.samples)) {
      for (const auto& f : cv.members()) {
        const cplx q = z * evaluate(derivative(f), z) / evaluate(Fn, z);
        oracle = std::min(oracle, q.real());
      }
      const cplx c = 1.0 + z * evaluate(d2F, z) / evaluate(dF, z);
      oracle = std::min(oracle, c.real());
    }
  }
  // Both sides truncate at the generation order; at the outer radius the
  // dropped tail is of size r^N.
  EXPECT_NEAR(r.min_margin, oracle, 1e-5);
}

TEST(Verify, MillerMocanuWithZeroInnerWitness) {
  for (double a : {0.0, 0.25, 0.5}) {
    auto p = params(1, 1, a);
    p.zero_inner_witness = true;
    auto r = verify(TheoremId::T1_2, 1, p, 1);
    EXPECT_NEAR(r.min_margin, 1.0 - a, 1e-12);
  }
}

TEST(Verify, IdentitiesAreExact) {
  for (int n : {1, 2, 3}) {
    auto r = verify(TheoremId::IDENTITIES, 2, params(n, 2, 0.25), 1);
    EXPECT_TRUE(r.passed());
    EXPECT_EQ(r.min_margin, INFINITY);
  }
}

TEST(Verify, DeterministicAndScheduleIndependent) {
  auto p = params(3, 3, 0.25, 7);
  auto a = verify(TheoremId::T3_1, 6, p, 1);
  auto b = verify(TheoremId::T3_1, 6, p, 3);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].index, i);
    EXPECT_EQ(a.records[i].seed, b.records[i].seed);
    EXPECT_EQ(a.records[i].margin, b.records[i].margin);
  }
}

TEST(Verify, EveryTheoremPassesOnSmallGrid) {
  for (std::size_t i = 0; i < kTheoremCount; ++i) {
    const auto id = static_cast<TheoremId>(i);
    for (auto [n, m, a] : {std::tuple{1, 1, 0.0}, {2, 3, 0.5}, {3, 2, 0.25}}) {
      auto r = verify(id, 2, params(n, static_cast<std::size_t>(m), a, 100 + i), 1);
      EXPECT_TRUE(r.passed()) << to_string(id) << " n=" << n << " min " << r.min_margin;
      EXPECT_TRUE(r.generation_failures.empty()) << to_string(id);
    }
  }
}

TEST(Verify, ConvolutionRecordsHalfPlaneMargins) {
  auto r = verify(TheoremId::T2_4, 2, params(2, 2, 0.25), 1);
  auto j = to_json(r);
  ASSERT_TRUE(j.contains("halfplane_margins"));
  EXPECT_EQ(j.at("halfplane_margins").size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    // h is the half-plane itself here, so both margins coincide.
    EXPECT_EQ(j.at("halfplane_margins")[i].get<double>(), r.records[i].margin);
  }
}

TEST(Verify, CorruptionIsCaughtWithSeed) {
  auto p = params(1, 2, 0.0);
  p.corrupt = [](const TupleSystem& t) {
    auto members = t.members();
    members[0] = members[0] + ComplexSeries::monomial(t.order(), 2, 0.9);
    return TupleSystem(std::move(members), t.weights());
  };
  auto r = verify(TheoremId::T2_2, 3, p, 1);
  EXPECT_FALSE(r.passed());
  ASSERT_FALSE(r.failures.empty());
  EXPECT_EQ(r.failures[0].seed, r.records[r.failures[0].index].seed);
  EXPECT_LT(r.failures[0].margin, -1e-8);
}

TEST(Verify, BadParams) {
  EXPECT_THROW(verify(TheoremId::T2_2, 0, params(1, 1, 0.0)), std::invalid_argument);
  auto p = params(1, 1, 0.0);
  p.n = 0;
  EXPECT_THROW(verify(TheoremId::T2_2, 1, p), std::invalid_argument);
  p = params(1, 1, 0.0);
  p.weights = {0.5, 0.6};
  EXPECT_THROW(verify(TheoremId::T2_2, 1, p), std::invalid_argument);
}

TEST(Verify, ReportJsonFields) {
  auto r = verify(TheoremId::T3_2, 3, params(2, 2, 0.5), 1);
  auto j = to_json(r);
  for (const char* key : {"theorem_id", "trials", "params", "margins", "min_margin", "median_margin",
                          "failures", "runtime_ms", "r_test", "tolerance"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j.at("margins").size(), 3u);
  EXPECT_EQ(j.at("params").at("n"), 2);
  EXPECT_EQ(j.at("params").at("m"), 2);
  EXPECT_EQ(j.at("r_test").get<double>(), 0.95);
  auto m = r.margins();
  std::sort(m.begin(), m.end());
  EXPECT_EQ(r.median_margin, m[1]);
}

TEST(Suite, EmptyTheoremListExitsZero) {
  auto cfg = suite_config_from_json(io::json::parse(R"({"theorems": []})"));
  auto result = run_suite(cfg);
  EXPECT_TRUE(result.reports.empty());
  EXPECT_EQ(result.exit_code(), 0);
}

TEST(Suite, ConfigParsing) {
  auto cfg = suite_config_from_json(io::json::parse(R"({
    "theorems": ["T1_2", "T3_1"], "trials": 5, "seed": 3, "trials_per_point": false,
    "grid": {"n": [1, 2], "m": [2], "alpha": [0.25]},
    "probe": {"samples": 64}, "gen": {"blaschke_degree": 1}})"));
  EXPECT_EQ(cfg.theorems.size(), 2u);
  EXPECT_EQ(cfg.grid.size(), 2u);
  EXPECT_EQ(cfg.grid[1].n, 2);
  EXPECT_EQ(cfg.grid[0].weights.size(), 2u);
  EXPECT_EQ(cfg.grid[0].probe.samples, 64);
  EXPECT_EQ(cfg.grid[0].gen.blaschke_degree, 1);
  EXPECT_FALSE(cfg.trials_per_point);
  auto def = suite_config_from_json(io::json::object());
  EXPECT_EQ(def.theorems.size(), kTheoremCount);
  EXPECT_EQ(def.grid.size(), 27u);
  EXPECT_EQ(def.trials, 100u);
  EXPECT_TRUE(def.trials_per_point);
  EXPECT_THROW(suite_config_from_json(io::json::parse(R"({"theorems": ["T0"]})")), io::FormatError);
  EXPECT_THROW(suite_config_from_json(io::json::parse(R"({"grid": [{"n": "x"}]})")), io::FormatError);
}

TEST(Suite, WritesReportsAndDetectsCorruption) {
  const auto dir = temp_dir("suite");
  std::ofstream(dir / "c.json") << R"({
    "theorems": ["T2_2", "T1_2"], "trials": 4, "trials_per_point": false, "seed": 5,
    "grid": [{"n": 2, "m": 2, "target": {"kind": "half_plane", "alpha": 0.25}}, {"n": 1, "m": 1}],
    "inject_corruption": true,
    "output": {"json_dir": "reports", "csv": "out/all.csv"}})";
  auto result = run_suite(dir / "c.json");
  EXPECT_EQ(result.exit_code(), 1);
  ASSERT_TRUE(std::filesystem::exists(dir / "reports" / "T2_2.json"));
  ASSERT_TRUE(std::filesystem::exists(dir / "reports" / "T1_2.json"));
  auto t22 = io::read_json_file(dir / "reports" / "T2_2.json");
  EXPECT_FALSE(t22.at("passed").get<bool>());
  EXPECT_FALSE(t22.at("reports")[0].at("failures").empty());
  EXPECT_TRUE(io::read_json_file(dir / "reports" / "T1_2.json").at("passed").get<bool>());

  std::ifstream csv(dir / "out" / "all.csv");
  std::string header, line;
  std::getline(csv, header);
  EXPECT_EQ(header, "theorem_id,trial,seed,n,m,alpha_spec,margin,decided");
  std::size_t rows = 0;
  bool saw_failure = false;
  while (std::getline(csv, line)) {
    ++rows;
    saw_failure |= line.find("non_member") != std::string::npos;
  }
  EXPECT_EQ(rows, 8u);
  EXPECT_TRUE(saw_failure);
  std::filesystem::remove_all(dir);
}

}  // namespace
