#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "aer/error.hpp"
#include "aer/io.hpp"
#include "doctest.h"

using namespace aer;

namespace {

std::filesystem::path scratch_dir(const char* name) {
  auto p = std::filesystem::temp_directory_path() / "aer_unit" / name;
  std::filesystem::remove_all(p);
  return p;
}

bool bits_equal(double a, double b) { return std::isnan(a) ? std::isnan(b) : a == b; }

}  // namespace

TEST_CASE("doubles round-trip bit-exactly through 17 digits") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng) * std::pow(10.0, (i % 40) - 20);
    CHECK(io::parse_double(io::format_double(v)) == v);
  }
  CHECK(io::format_double(0.1) == "0.10000000000000001");
  CHECK(std::isnan(io::parse_double("")));
  CHECK(std::isnan(io::parse_double("nan")));
  CHECK_THROWS_AS(io::parse_double("1.5x"), Error);
}

TEST_CASE("field series round-trip") {
  FieldSeries fs;
  fs.grid = SpatialGrid::uniform(4);
  fs.times = {0.0, 0.1};
  for (int i = 0; i < 10; ++i) fs.values.push_back(std::sin(i) / 3.0);
  const auto back = io::parse_field_series(io::parse_csv(io::field_series_csv(fs)));
  CHECK(back.times == fs.times);
  CHECK(back.grid.centers == fs.grid.centers);
  CHECK(back.values == fs.values);
}

TEST_CASE("observations round-trip with and without gradients") {
  Observations obs;
  obs.xs = {0.0, 0.25, 0.5};
  obs.u = {1.0 / 3.0, -2.0, 7e-300};
  obs.mask = {1, 0, 1};
  auto back = io::parse_observations(io::parse_csv(io::observations_csv(obs)));
  CHECK(back.xs == obs.xs);
  CHECK(back.u == obs.u);
  CHECK(back.mask == obs.mask);
  CHECK_FALSE(back.w.has_value());

  obs.w = std::vector<double>{0.1, 0.2, 0.3};
  back = io::parse_observations(io::parse_csv(io::observations_csv(obs)));
  REQUIRE(back.w.has_value());
  CHECK(*back.w == *obs.w);
}

TEST_CASE("malformed observation files are rejected") {
  CHECK_THROWS_AS(io::parse_observations(io::parse_csv("x,u,w,mask\n0,1,,1\n1,2,3,1\n")), Error);
  CHECK_THROWS_AS(io::parse_observations(io::parse_csv("x,u,w,mask\n0,1,,2\n")), Error);
  CHECK_THROWS_AS(io::parse_observations(io::parse_csv("x,w,mask\n0,1,1\n")), Error);
  CHECK_THROWS_AS(io::parse_csv("a,b\n1\n"), Error);
}

TEST_CASE("error report round-trip keeps NaN and flags") {
  ErrorReport r;
  r.xs = {0.0, 0.5, 1.0};
  r.f_delta = {1.0, 2.0, 3.0};
  r.f_low = {0.9, 1.9, 2.9};
  r.f_up = {1.1, 2.1, 3.1};
  r.delta2 = {0.2, 0.2, 0.2};
  r.delta1 = 0.125;
  r.delta1_bar = std::numeric_limits<double>::quiet_NaN();
  r.feasible = true;
  const auto back = io::parse_error_report(io::parse_csv(io::error_report_csv(r)),
                                           io::parse_csv(io::error_report_scalars_csv(r)));
  CHECK(back.xs == r.xs);
  CHECK(back.f_delta == r.f_delta);
  CHECK(back.f_low == r.f_low);
  CHECK(back.f_up == r.f_up);
  CHECK(back.delta2 == r.delta2);
  CHECK(back.delta1 == r.delta1);
  CHECK(bits_equal(back.delta1_bar, r.delta1_bar));
  CHECK(back.feasible);
}

TEST_CASE("atomic write replaces the file and leaves no temporary") {
  const auto dir = scratch_dir("atomic");
  const auto path = dir / "nested" / "a.csv";
  io::write_atomic(path, "first\n");
  io::write_atomic(path, "second\n");
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "second");
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(path.parent_path())) {
    ++files;
    CHECK(e.path().extension() != ".tmp");
  }
  CHECK(files == 1);
  CHECK_THROWS_AS(io::read_csv(dir / "missing.csv"), Error);
  std::filesystem::remove_all(dir);
}
