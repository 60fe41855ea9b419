#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "aer/error.hpp"
#include "aer/fvm.hpp"
#include "aer/kernels.hpp"
#include "doctest.h"

using namespace aer;

namespace {

double f1(double x) { return x - x * x + x * x * x; }

FieldSeries solve(const PhysicalSetup& s, const SourceFunction& src, std::size_t n, FvmOptions o = {}) {
  const auto g = SpatialGrid::uniform(n);
  return solve_forward(s, src, default_initial_condition(s, g, s.x0_init), g, o);
}

/// Relative l2 distance at t = T between a fine and a coarse solution on the coarse nodes.
double coarse_distance(const FieldSeries& coarse, const FieldSeries& fine) {
  const std::size_t ratio = fine.grid.n_cells / coarse.grid.n_cells;
  const auto a = coarse.snapshot(coarse.times.size() - 1);
  const auto b = fine.snapshot(fine.times.size() - 1);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i * ratio]) * (a[i] - b[i * ratio]);
    den += b[i * ratio] * b[i * ratio];
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("source-free solution obeys the maximum principle") {
  PhysicalSetup s;
  const auto src = SourceFunction::from_callable([](double) { return 0.0; });
  const auto fs = solve(s, src, 200);
  const auto [lo, hi] = std::minmax_element(fs.values.begin(), fs.values.end());
  CHECK(*lo >= s.u_left - 1e-12);
  CHECK(*hi <= s.u_right + 1e-12);
}

TEST_CASE("symmetric boundary values give a stationary front") {
  PhysicalSetup s;
  s.u_left = -5.0;
  s.u_right = 5.0;
  s.x0_init = 0.5;
  const auto src = SourceFunction::from_callable([](double) { return 0.0; });
  const auto fs = solve(s, src, 400);
  const auto last = fs.snapshot(fs.times.size() - 1);
  std::size_t cross = 0;
  while (last[cross + 1] < 0.0) ++cross;
  const double x = fs.grid.centers[cross] +
                   fs.grid.h * (-last[cross]) / (last[cross + 1] - last[cross]);
  CHECK(std::abs(x - 0.5) <= 2 * fs.grid.h);
}

TEST_CASE("grid refinement converges") {
  PhysicalSetup s;
  const auto src = SourceFunction::from_callable(f1);
  const auto c = solve(s, src, 250);
  const auto m = solve(s, src, 500);
  const auto f = solve(s, src, 1000);
  const double e1 = coarse_distance(c, f);
  const double e2 = coarse_distance(m, f);
  CHECK(e2 < e1);
  CHECK(e1 / e2 >= 1.5);
}

TEST_CASE("MUSCL and Rusanov agree to discretisation error") {
  PhysicalSetup s;
  const auto src = SourceFunction::from_callable(f1);
  FvmOptions o;
  o.reconstruction = Reconstruction::muscl_minmod;
  const auto a = solve(s, src, 500);
  const auto b = solve(s, src, 500, o);
  CHECK(coarse_distance(a, b) < 0.05);
}

TEST_CASE("user step above the stability limit is rejected") {
  PhysicalSetup s;
  const auto src = SourceFunction::from_callable(f1);
  FvmOptions o;
  o.dt = 1e-2;
  try {
    solve(s, src, 100, o);
    FAIL("expected CFLViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CFLViolation);
  }
}

TEST_CASE("output instants are sorted, deduplicated and exact") {
  PhysicalSetup s;
  const auto src = SourceFunction::from_callable(f1);
  FvmOptions o;
  o.output_times = {0.2, 0.0, 0.1, 0.2, 0.3};
  const auto fs = solve(s, src, 100, o);
  REQUIRE(fs.times.size() == 4);
  CHECK(fs.times == std::vector<double>{0.0, 0.1, 0.2, 0.3});
  CHECK(fs.time_index(0.1) == 1);
  CHECK_THROWS_AS(fs.time_index(0.15), Error);
  CHECK(uniform_times(0.3, 201).size() == 201);
}

TEST_CASE("sampled gradients are exact for quadratics") {
  FieldSeries fs;
  fs.grid = SpatialGrid::uniform(10);
  fs.times = {0.0};
  for (double x : fs.grid.centers) fs.values.push_back(3 * x * x - x + 2);
  const std::vector<std::size_t> idx = {0, 3, 5, 10};
  const auto ex = sample_observations(fs, 0.0, idx);
  for (std::size_t k = 0; k < idx.size(); ++k) {
    CHECK(ex.w[k] == doctest::Approx(6 * ex.xs[k] - 1).epsilon(1e-12));
  }
}

TEST_CASE("parallel and serial lattice kernels agree") {
  PhysicalSetup s;
  const auto sol = AsymptoticSolution::build(s, SourceFunction::from_callable(f1));
  std::vector<double> xs;
  std::vector<double> ts;
  for (int i = 0; i <= 300; ++i) xs.push_back(i / 300.0);
  for (int j = 0; j <= 50; ++j) ts.push_back(0.3 * j / 50.0);
  for (auto part : {kernels::Part::full, kernels::Part::regular}) {
    CHECK(kernels::u0_lattice(sol, xs, ts, part) == kernels::u0_lattice_serial(sol, xs, ts, part));
  }
  const auto a = kernels::u0_lattice_serial(sol, xs, ts);
  const auto b = kernels::u0_lattice_serial(sol, xs, ts, kernels::Part::regular);
  std::vector<unsigned char> keep(a.size());
  for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = i % 3 != 0;
  const auto p = kernels::l2_sums(a, b, keep);
  const auto q = kernels::l2_sums_serial(a, b, keep);
  CHECK(p.diff2 == doctest::Approx(q.diff2).epsilon(1e-12));
  CHECK(p.ref2 == doctest::Approx(q.ref2).epsilon(1e-12));
}

TEST_CASE("lattice error of U0 matches the pointwise overload") {
  PhysicalSetup s;
  const auto src = SourceFunction::from_callable(f1);
  const auto sol = AsymptoticSolution::build(s, src);
  const auto fs = solve(s, src, 200);
  const double a = relative_l2_error(sol, fs);
  const double b = relative_l2_error([&](double x, double t) { return evaluate_u0(sol, x, t); }, fs);
  CHECK(a == doctest::Approx(b).epsilon(1e-12));
  Region outer;
  outer.x_hi = 0.4;
  CHECK(relative_l2_error(sol, fs, outer) < a);
}

TEST_CASE("AER_THREADS caps the thread count") {
  const int base = kernels::thread_count();
  setenv("AER_THREADS", "1", 1);
  CHECK(kernels::thread_count() == 1);
  setenv("AER_THREADS", "100000", 1);
  CHECK(kernels::thread_count() == base);
  unsetenv("AER_THREADS");
}
