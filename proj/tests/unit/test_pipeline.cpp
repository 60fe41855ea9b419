#include <cmath>

#include "aer/experiment.hpp"
#include "aer/pipeline.hpp"
#include "doctest.h"

using namespace aer;

namespace {

const ForwardRun& ex1_forward() {
  static const ForwardRun run = [] {
    auto cfg = preset("ex1");
    cfg.n_cells = 200;
    return run_forward(cfg);
  }();
  return run;
}

}  // namespace

TEST_CASE("linear interpolation is constant beyond the ends") {
  const std::vector<double> xs = {0.0, 1.0, 2.0};
  const std::vector<double> ys = {1.0, 3.0, 2.0};
  CHECK(interpolate_linear(xs, ys, -1.0) == 1.0);
  CHECK(interpolate_linear(xs, ys, 0.5) == doctest::Approx(2.0));
  CHECK(interpolate_linear(xs, ys, 1.5) == doctest::Approx(2.5));
  CHECK(interpolate_linear(xs, ys, 5.0) == 2.0);
}

TEST_CASE("an estimate equal to a linear source has zero error") {
  SourceEstimate est;
  est.xs = {0.0, 0.5, 1.0};
  est.values = {1.0, 2.0, 3.0};
  est.fitted = {1, 1, 1};
  CHECK(source_relative_error(est, [](double x) { return 1.0 + 2.0 * x; }) <= 1e-12);
}

TEST_CASE("the sup-norm calibration dominates the L2 link error") {
  const auto& fwd = ex1_forward();
  auto cfg = preset("ex1");
  cfg.n_cells = 200;
  const auto ex = exact_samples(cfg, fwd.fvm);
  const auto obs = add_noise(ex, 0.0, 0);
  const auto window = layer_window_oracle(fwd.solution, cfg.t0);
  const auto f = cfg.source_function();
  const double mu = cfg.setup.mu;
  const double c1 = calibrate_c1(cfg.setup, obs, window, [&](double x) { return f(x); });
  const double l2 = link_error_l2(cfg.setup, obs, window, [&](double x) { return f(x); });
  CHECK(c1 > 0.0);
  CHECK(l2 <= c1 * mu * std::abs(std::log(mu)) + 1e-15);
}

TEST_CASE("noise-free data with a calibrated radius contains the true source") {
  const auto& fwd = ex1_forward();
  auto cfg = preset("ex1");
  cfg.n_cells = 200;
  cfg.delta = 0.0;
  const auto inv = run_inverse(cfg, fwd);
  const auto& rep = inv.aer.report;
  REQUIRE(rep.feasible);
  const auto f = cfg.source_function();
  for (std::size_t i = 0; i < rep.xs.size(); ++i) {
    CHECK(rep.f_low[i] <= f(rep.xs[i]) + 1e-9);
    CHECK(rep.f_up[i] >= f(rep.xs[i]) - 1e-9);
  }
  CHECK(inv.rel_error < 0.05);
}

TEST_CASE("runs are deterministic for a fixed seed") {
  const auto& fwd = ex1_forward();
  auto cfg = preset("ex1");
  cfg.n_cells = 200;
  cfg.seed = 3;
  const auto a = run_inverse(cfg, fwd);
  const auto b = run_inverse(cfg, fwd);
  CHECK(a.obs.u == b.obs.u);
  CHECK(a.aer.report.f_delta == b.aer.report.f_delta);
  CHECK(a.aer.report.delta1 == b.aer.report.delta1);
}
