#include <filesystem>

#include <gtest/gtest.h>

#include "corrsched/errors.hpp"
#include "corrsched/io.hpp"
#include "oracles.hpp"

using namespace corrsched;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "corrsched_io_test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(MatrixIo, FixtureRoundTrip) {
  const std::string text = io::read_file(oracle::fixture("a8.json"));
  const auto a = io::parse_matrix_json(text);
  EXPECT_EQ(io::format_matrix_json(a), text);
}

TEST(MatrixIo, CsvRoundTrip) {
  const auto a = io::load_matrix(oracle::fixture("a10.json"));
  const auto b = io::parse_matrix_csv(io::format_matrix_csv(a));
  EXPECT_EQ(a.entries(), b.entries());
  const fs::path p = scratch("a10.csv");
  io::save_matrix(p, a);
  EXPECT_EQ(io::load_matrix(p).entries(), a.entries());
}

TEST(MatrixIo, MissingDim) {
  try {
    io::parse_matrix_json(R"({"entries": [[0]]})");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("dim"), std::string::npos);
  }
}

TEST(MatrixIo, NaNIsValidationError) {
  EXPECT_THROW(io::parse_matrix_csv("0.1,nan\nnan,0.1\n"), ValidationError);
  EXPECT_THROW(io::parse_matrix_json(R"({"dim": 2, "entries": [[0.3, 0.5], [0.5, 0.3]]})"),
               ValidationError);
  EXPECT_NO_THROW(io::parse_matrix_json(R"({"dim": 2, "entries": [[0.3, 0.5], [0.5, 0.3]]})", false));
}

TEST(MatrixIo, ShapeMismatch) {
  EXPECT_THROW(io::parse_matrix_json(R"({"dim": 3, "entries": [[0, 0], [0, 0]]})"), Error);
  EXPECT_THROW(io::parse_matrix_csv("0,0.1\n0.1\n"), Error);
  EXPECT_THROW(io::parse_matrix_json("{not json"), ParseError);
}

TEST(ScheduleIo, CsvAndJson) {
  const auto e = io::parse_schedule_csv("0.5,0.5\n1,0\n");
  EXPECT_EQ(e.rows(), 2u);
  EXPECT_EQ(e(0, 1), 0.5);
  const auto j = io::parse_schedule_json(R"({"rows": 2, "cols": 2, "entries": [[0.5, 0.5], [1, 0]]})");
  EXPECT_EQ(e.entries(), j.entries());
  EXPECT_EQ(io::parse_schedule_csv(io::format_schedule_csv(e)).entries(), e.entries());
  EXPECT_THROW(io::parse_schedule_csv("0.5,0.4\n"), ValidationError);
}

TEST(AssignmentIo, RoundTrip) {
  const Assignment x{{2, 0, 1, 1}};
  const std::string text = io::format_assignment_csv(x);
  EXPECT_EQ(text, "device,channel\n0,2\n1,0\n2,1\n3,1\n");
  EXPECT_EQ(io::parse_assignment_csv(text), x);
  EXPECT_THROW(io::parse_assignment_csv("device,channel\n1,0\n"), ParseError);
  EXPECT_THROW(io::parse_assignment_csv("dev,chan\n0,0\n"), ParseError);
}

TEST(LayoutIo, FixtureRoundTrip) {
  const auto l = io::load_layout(oracle::fixture("layout3.csv"));
  ASSERT_EQ(l.size(), 3u);
  EXPECT_EQ(l.positions[1].x, 1.0);
  EXPECT_EQ(l.positions[2].y, -1.2);
  EXPECT_NEAR(l.region_radius, 2.1850968611841584, 1e-15);
  const fs::path p = scratch("layout.csv");
  io::save_layout(p, l);
  EXPECT_TRUE(fs::exists(io::sidecar_path(p)));
  const auto back = io::load_layout(p);
  EXPECT_EQ(back.positions[2].x, l.positions[2].x);
  EXPECT_EQ(back.region_radius, l.region_radius);
}

TEST(LayoutIo, SidecarPath) {
  EXPECT_EQ(io::sidecar_path("out/layout.csv"), fs::path("out/layout.json"));
}

TEST(Reports, Json) {
  CollisionReport r{{0.5, 0.0}, 0.25, 0.25};
  const auto j = io::to_json(r);
  EXPECT_EQ(j["network_average"], 0.25);
  EXPECT_EQ(j["per_channel"].size(), 2u);
  EXPECT_EQ(io::format_double(0.1), "0.10000000000000001");
}

TEST(Files, MissingFile) {
  EXPECT_THROW(io::read_file("/nonexistent/definitely/missing.json"), Error);
}
