#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include <unistd.h>

#include "nply/io.hpp"
#include "test_support.hpp"

using namespace nply;
using nply::io::json;

namespace {

std::filesystem::path temp_dir() {
  auto d = std::filesystem::temp_directory_path() / ("nply_io_" + std::to_string(::getpid()));
  std::filesystem::create_directories(d);
  return d;
}

TEST(Io, SeriesRoundTripIsBitExact) {
  auto f = nply::testing::random_series(64, 1, false);
  const auto text = io::dump(io::to_json(f));
  EXPECT_EQ(io::series_from_json(json::parse(text)), f);
  const auto j = json::parse(text);
  EXPECT_EQ(j.at("order").get<int>(), 64);
  EXPECT_EQ(j.at("coeffs").size(), 65u);
}

TEST(Io, SeriesErrors) {
  EXPECT_THROW(io::series_from_json(json::parse(R"({"order":2,"coeffs":[[0,0],[1,0]]})")), io::FormatError);
  EXPECT_THROW(io::series_from_json(json::parse(R"({"coeffs":[[0,0],[1,0],[0,0]]})")), io::FormatError);
  EXPECT_THROW(io::series_from_json(json::parse(R"({"order":2,"coeffs":[[0,0],[1],[0,0]]})")),
               io::FormatError);
  EXPECT_THROW(io::series_from_json(json::parse(R"({"order":2,"coeffs":[[0,0],["x",0],[0,0]]})")),
               io::FormatError);
}

TEST(Io, TupleRoundTrip) {
  TupleSystem t({nply::testing::random_series(16, 2), nply::testing::random_series(16, 3)}, {0.25, 0.75});
  auto back = io::tuple_from_json(json::parse(io::dump(io::to_json(t))));
  EXPECT_EQ(back.weights(), t.weights());
  EXPECT_EQ(back[0], t[0]);
  EXPECT_EQ(back[1], t[1]);
  auto single = io::tuple_or_series_from_json(io::to_json(t[0]));
  EXPECT_EQ(single.size(), 1u);
  EXPECT_THROW(io::tuple_from_json(json::parse(R"({"members":[]})")), io::FormatError);
}

TEST(Io, TargetRoundTrip) {
  auto hp = io::target_from_json(io::to_json(ConvexTarget::half_plane(0.25)));
  ASSERT_TRUE(hp.is_half_plane());
  EXPECT_EQ(hp.as_half_plane()->alpha, 0.25);
  EXPECT_EQ(io::to_json(ConvexTarget::half_plane(0.25)), json::parse(R"({"kind":"half_plane","alpha":0.25})"));
  auto s = ConvexTarget::sampled(nply::testing::from(8, {1.0, 0.5}), 0.99, 512);
  auto back = io::target_from_json(json::parse(io::dump(io::to_json(s))));
  ASSERT_NE(back.as_sampled(), nullptr);
  EXPECT_EQ(back.as_sampled()->samples, 512);
  EXPECT_EQ(back.as_sampled()->rho, 0.99);
  EXPECT_EQ(back.margin(1.2), s.margin(1.2));
  EXPECT_THROW(io::target_from_json(json::parse(R"({"kind":"disc"})")), io::FormatError);
}

TEST(Io, ConfigsAndVerdict) {
  GenConfig g{128, 3, 99, true};
  auto g2 = io::gen_config_from_json(io::to_json(g));
  EXPECT_EQ(g2.order, 128u);
  EXPECT_EQ(g2.blaschke_degree, 3);
  EXPECT_EQ(g2.seed, 99u);
  EXPECT_TRUE(g2.real_only);
  EXPECT_THROW(io::gen_config_from_json(json::parse(R"({"blaschke_degree":12})")), std::invalid_argument);

  ProbeConfig p;
  p.radii = {0.3, 0.9};
  p.samples = 64;
  auto p2 = io::probe_config_from_json(io::to_json(p));
  EXPECT_EQ(p2.radii, p.radii);
  EXPECT_EQ(p2.samples, 64);

  MembershipVerdict v{ClassId::STS_nm, -0.5, {0.1, 0.2}, {0.3, 0.4}, Decision::non_member};
  auto j = io::to_json(v);
  EXPECT_EQ(j.at("class_id"), "STS_nm");
  EXPECT_EQ(j.at("margin").get<double>(), -0.5);
  EXPECT_EQ(j.at("worst_z"), json::parse("[0.1,0.2]"));
  EXPECT_EQ(j.at("worst_value"), json::parse("[0.3,0.4]"));
  EXPECT_EQ(j.at("decided"), "non_member");
}

TEST(Io, DumpFormatting) {
  json j{{"a", 0.1}, {"b", std::numeric_limits<double>::infinity()}, {"c", json::array({1, 2, 3})}};
  const auto text = io::dump(j);
  EXPECT_NE(text.find("0.10000000000000001"), std::string::npos);
  EXPECT_NE(text.find("\"inf\""), std::string::npos);
  EXPECT_NE(text.find("[1, 2, 3]"), std::string::npos) << text;
  auto back = json::parse(text);
  EXPECT_EQ(io::number_from_json(back.at("b")), std::numeric_limits<double>::infinity());
  EXPECT_TRUE(std::isnan(io::number_from_json(json("nan"))));
  EXPECT_THROW(io::number_from_json(json("x")), io::FormatError);
}

TEST(Io, TargetSpecGrammar) {
  EXPECT_EQ(io::parse_target_spec("halfplane:0.5").as_half_plane()->alpha, 0.5);
  EXPECT_THROW(io::parse_target_spec("halfplane:abc"), io::FormatError);
  EXPECT_THROW(io::parse_target_spec("halfplane:0.5x"), io::FormatError);
  EXPECT_THROW(io::parse_target_spec("halfplane"), io::FormatError);
  EXPECT_THROW(io::parse_target_spec("disc:1"), io::FormatError);
  EXPECT_THROW(io::parse_target_spec("halfplane:1.5"), std::invalid_argument);

  const auto dir = temp_dir();
  io::write_json_file(dir / "h.json", io::to_json(nply::testing::from(8, {1.0, 0.5})));
  auto t = io::parse_target_spec("sampled:" + (dir / "h.json").string());
  EXPECT_NE(t.as_sampled(), nullptr);
  io::write_json_file(dir / "t.json", io::to_json(ConvexTarget::half_plane(0.1)));
  EXPECT_TRUE(io::parse_target_spec("sampled:" + (dir / "t.json").string()).is_half_plane());
  EXPECT_THROW(io::parse_target_spec("sampled:" + (dir / "missing.json").string()), std::runtime_error);
  std::ofstream(dir / "bad.json") << "{not json";
  EXPECT_THROW(io::read_json_file(dir / "bad.json"), io::FormatError);
  std::filesystem::remove_all(dir);
}

}  // namespace
