#include <cmath>

#include "aer/error.hpp"
#include "aer/observations.hpp"
#include "doctest.h"

using namespace aer;

namespace {

ExactSamples ramp(std::size_t n) {
  ExactSamples ex;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(n - 1);
    ex.indices.push_back(i);
    ex.xs.push_back(x);
    ex.u.push_back(2.0 + x);
    ex.w.push_back(1.0);
  }
  return ex;
}

}  // namespace

TEST_CASE("relative noise is uniform on [-delta, delta]") {
  const auto ex = ramp(20001);
  const double delta = 0.01;
  const auto obs = add_noise(ex, delta, 42);
  double mean = 0.0;
  double var = 0.0;
  for (std::size_t i = 0; i < ex.u.size(); ++i) {
    const double r = (obs.u[i] / ex.u[i] - 1.0) / delta;
    CHECK(std::abs(r) <= 1.0 + 1e-12);
    mean += r;
    var += r * r;
  }
  mean /= static_cast<double>(ex.u.size());
  var /= static_cast<double>(ex.u.size());
  CHECK(std::abs(mean) < 0.02);
  CHECK(var == doctest::Approx(1.0 / 3.0).epsilon(0.03));
}

TEST_CASE("noise is reproducible and u draws ignore the gradient flag") {
  const auto ex = ramp(50);
  const auto a = add_noise(ex, 0.05, 7, true);
  const auto b = add_noise(ex, 0.05, 7, false);
  const auto c = add_noise(ex, 0.05, 8, true);
  CHECK(a.u == b.u);
  CHECK(a.u != c.u);
  CHECK(a.w.has_value());
  CHECK_FALSE(b.w.has_value());
  CHECK(add_noise(ex, 0.05, 7).u == a.u);
  CHECK(add_noise(ex, 0.0, 7).u == ex.u);
}

TEST_CASE("gaps clear the mask inside closed intervals") {
  auto obs = add_noise(ramp(11), 0.0, 0);
  mask_intervals(obs, {{0.25, 0.5}});
  CHECK(obs.valid_count() == 8);
  CHECK(obs.valid(2));
  CHECK_FALSE(obs.valid(3));
  CHECK_FALSE(obs.valid(5));
  CHECK(obs.valid(6));
  CHECK_THROWS_AS(mask_intervals(obs, {{0.5, 0.25}}), Error);
}

TEST_CASE("validation rejects inconsistent observations") {
  auto obs = add_noise(ramp(5), 0.0, 0);
  obs.u.pop_back();
  CHECK_THROWS_AS(obs.validate(), Error);
  auto back = add_noise(ramp(5), 0.0, 0);
  std::swap(back.xs[1], back.xs[2]);
  CHECK_THROWS_AS(back.validate(), Error);
}
