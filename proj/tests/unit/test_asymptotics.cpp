#include <cmath>

#include "aer/asymptotics.hpp"
#include "aer/error.hpp"
#include "doctest.h"

using namespace aer;

namespace {

double f1(double x) { return x - x * x + x * x * x; }
double big_f1(double x) { return x * x / 2 - x * x * x / 3 + x * x * x * x / 4; }

PhysicalSetup ex1_setup() { return {}; }

}  // namespace

TEST_CASE("cumulative source matches the closed-form integral") {
  const auto src = SourceFunction::from_callable(f1);
  for (double x = 0.0; x <= 1.0; x += 0.0371) CHECK(src.cumulative(x) == doctest::Approx(big_f1(x)).epsilon(1e-12));
  CHECK(src.total() == doctest::Approx(big_f1(1.0)).epsilon(1e-13));
}

TEST_CASE("tabulated source integrates its interpolant") {
  const auto src = SourceFunction::from_samples({0.0, 0.5, 1.0}, {0.0, 1.0, 0.0});
  CHECK(src(0.25) == doctest::Approx(0.5));
  CHECK(src.total() == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("regular functions solve the degenerate equation") {
  const auto setup = ex1_setup();
  const auto src = SourceFunction::from_callable(f1);
  const auto reg = regular_functions(setup, src);
  const double k = setup.k;
  for (double x = 0.02; x < 0.99; x += 0.0517) {
    CHECK(reg.left(x) == doctest::Approx(-std::sqrt(100.0 + 2.0 * big_f1(x) / k)).epsilon(1e-11));
    CHECK(reg.right(x) == doctest::Approx(std::sqrt(25.0 - 2.0 * (big_f1(1.0) - big_f1(x)) / k)).epsilon(1e-11));
    const double h = 1e-5;
    for (auto phi : {&RegularPair::left, &RegularPair::right}) {
      const double v = (reg.*phi)(x);
      const double dv = ((reg.*phi)(x + h) - (reg.*phi)(x - h)) / (2 * h);
      CHECK(std::abs(-k * v * dv + f1(x)) <= 1e-6);
    }
  }
}

TEST_CASE("U0 is continuous at the front") {
  const auto setup = ex1_setup();
  const auto sol = AsymptoticSolution::build(setup, SourceFunction::from_callable(f1));
  for (double t : {0.0, 0.1, 0.2, 0.3}) {
    const double x0 = sol.front().position(t);
    const double left = evaluate_u0(sol, x0, t);
    const double right = evaluate_u0(sol, std::nextafter(x0, 1.0), t);
    CHECK(std::abs(left - right) <= 1e-12);
    const double mid = 0.5 * (sol.regular().left(x0) + sol.regular().right(x0));
    CHECK(left == doctest::Approx(mid).epsilon(1e-14));
  }
}

TEST_CASE("layer profile decays at the exponential rate") {
  const auto setup = ex1_setup();
  const auto sol = AsymptoticSolution::build(setup, SourceFunction::from_callable(f1));
  const auto& front = sol.front();
  for (double t : {0.05, 0.2}) {
    const double x0 = front.position(t);
    const double amp = 0.5 * std::abs(sol.regular().left(x0) - sol.regular().right(x0));
    for (double xi = -40.0; xi <= 40.0; xi += 0.25) {
      const double q = layer_profile_q0(front, sol.regular(), setup, t, xi);
      const double bound = 2.0 * amp * std::exp(-setup.k * amp * std::abs(xi));
      CHECK(std::abs(q) <= bound * (1 + 1e-12) + 1e-300);
    }
  }
}

TEST_CASE("stored amplitude is half the jump of the regular functions") {
  const auto sol = AsymptoticSolution::build(ex1_setup(), SourceFunction::from_callable(f1));
  const auto& fr = sol.front();
  for (std::size_t j = 0; j < fr.size(); j += 97) {
    const double jump = sol.regular().left(fr.x0[j]) - sol.regular().right(fr.x0[j]);
    CHECK(fr.p_left[j] == doctest::Approx(0.5 * jump).epsilon(1e-12));
    CHECK(fr.p_right[j] == doctest::Approx(-fr.p_left[j]));
  }
}

TEST_CASE("front path is converged in the time step") {
  const auto setup = ex1_setup();
  const auto src = SourceFunction::from_callable(f1);
  const auto reg = regular_functions(setup, src);
  FrontOptions coarse;
  coarse.dt = setup.t_final / 2000;
  FrontOptions fine;
  fine.dt = coarse.dt / 2;
  const auto a = integrate_front(setup, reg, coarse);
  const auto b = integrate_front(setup, reg, fine);
  for (double t = 0.0; t <= setup.t_final; t += 0.01) CHECK(std::abs(a.position(t) - b.position(t)) <= 1e-8);
}

TEST_CASE("front moves monotonically when |phi_l| - |phi_r| keeps its sign") {
  const auto sol = AsymptoticSolution::build(ex1_setup(), SourceFunction::from_callable(f1));
  const auto& fr = sol.front();
  for (std::size_t j = 1; j < fr.size(); ++j) CHECK(fr.x0[j] > fr.x0[j - 1]);
  for (double v : fr.v0) CHECK(v > 0.0);
}

TEST_CASE("U0 derivative matches finite differences") {
  const auto setup = ex1_setup();
  const auto sol = AsymptoticSolution::build(setup, SourceFunction::from_callable(f1));
  const double t = 0.2;
  const double x0 = sol.front().position(t);
  for (double x : {0.1, 0.4, x0 - 0.03, x0 - 0.004, x0 + 0.002, x0 + 0.01, 0.9}) {
    const double h = 1e-6 * setup.mu;
    const double fd = (evaluate_u0(sol, x + h, t) - evaluate_u0(sol, x - h, t)) / (2 * h);
    const double an = evaluate_u0_dx(sol, x, t);
    CHECK(std::abs(an - fd) <= 1e-5 * std::max(std::abs(an), 1e-3));
  }
}

TEST_CASE("layer width follows the closed form") {
  PhysicalSetup s;
  s.mu = 0.01;
  const double p = 7.5;
  const auto g = layer_width(-p, 0.5, s);
  CHECK(g.width == doctest::Approx(2 * s.mu * std::log(2 * p / (s.mu * s.mu) - 1) / (s.k * p)).epsilon(1e-12));
  CHECK(g.x_left == doctest::Approx(0.5 - g.width / 2).epsilon(1e-12));
  CHECK_THROWS_AS(layer_width(-0.5 * s.mu * s.mu, 0.5, s), Error);
}

TEST_CASE("assumption checks name the failing assumption") {
  auto s = ex1_setup();
  s.u_left = 2.0;
  const auto rep = check_assumptions(s, SourceFunction::from_callable(f1));
  CHECK_FALSE(rep.ok());
  CHECK_FALSE(rep.a1);
  CHECK(rep.messages.front().find("Assumption 1") != std::string::npos);
  CHECK(check_assumptions(ex1_setup(), SourceFunction::from_callable(f1)).ok());
}

TEST_CASE("evaluation outside the domain throws") {
  const auto sol = AsymptoticSolution::build(ex1_setup(), SourceFunction::from_callable(f1));
  CHECK_THROWS_AS(evaluate_u0(sol, 1.5, 0.1), Error);
  CHECK_THROWS_AS(evaluate_u0(sol, 0.5, 0.31), Error);
}
