#include "aer/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "aer/error.hpp"

namespace aer {

void PhysicalSetup::validate() const {
  if (!(mu > 0.0 && mu < 1.0)) throw Error(ErrorCode::InvalidArgument, "mu must lie in (0,1)");
  if (!(k > 0.0)) throw Error(ErrorCode::InvalidArgument, "k must be positive");
  if (!(t_final > 0.0)) throw Error(ErrorCode::InvalidArgument, "t_final must be positive");
  if (!(x0_init > 0.0 && x0_init < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "x0_init must lie in (0,1)");
  }
  if (!std::isfinite(u_left) || !std::isfinite(u_right)) {
    throw Error(ErrorCode::InvalidArgument, "boundary values must be finite");
  }
}

bool PhysicalSetup::boundary_condition_ok() const noexcept {
  return u_left < 0.0 && u_right > 0.0 && (u_right - u_left) > 2.0 * mu * mu;
}

double RegularPair::left(double x) const {
  const double rad = 2.0 / setup_.k * src_.cumulative(x) + setup_.u_left * setup_.u_left;
  return -std::sqrt(std::max(rad, 0.0));
}

double RegularPair::right(double x) const {
  const double rad = setup_.u_right * setup_.u_right -
                     2.0 / setup_.k * (src_.total() - src_.cumulative(x));
  return std::sqrt(std::max(rad, 0.0));
}

double RegularPair::left_dx(double x) const { return src_(x) / (setup_.k * left(x)); }
double RegularPair::right_dx(double x) const { return src_(x) / (setup_.k * right(x)); }

RegularPair regular_functions(const PhysicalSetup& setup, const SourceFunction& src) {
  setup.validate();
  const auto F = src.cumulative_nodes();
  const double total = src.total();
  const double ul2 = setup.u_left * setup.u_left;
  const double ur2 = setup.u_right * setup.u_right;
  for (std::size_t j = 0; j < F.size(); ++j) {
    const double left_rad = 2.0 / setup.k * F[j] + ul2;
    const double right_rad = ur2 - 2.0 / setup.k * (total - F[j]);
    if (!(left_rad > 0.0) || !(right_rad > 0.0)) {
      std::ostringstream msg;
      msg << "radicand <= 0 at x = " << src.node(j) << " (left " << left_rad << ", right "
          << right_rad << ")";
      throw Error(ErrorCode::NonrealRegularFunction, msg.str());
    }
  }
  return RegularPair(setup, src);
}

namespace {

struct Bracket {
  std::size_t j;
  double s;
};

Bracket locate(const std::vector<double>& times, double t) {
  if (times.size() < 2) return {0, 0.0};
  t = std::clamp(t, times.front(), times.back());
  auto it = std::upper_bound(times.begin(), times.end(), t);
  std::size_t j = it == times.begin() ? 0 : static_cast<std::size_t>(it - times.begin()) - 1;
  j = std::min(j, times.size() - 2);
  return {j, (t - times[j]) / (times[j + 1] - times[j])};
}

}  // namespace

double FrontPath::position(double t) const {
  if (times.size() == 1) return x0.front();
  const auto [j, s] = locate(times, t);
  const double h = times[j + 1] - times[j];
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * x0[j] + (s3 - 2 * s2 + s) * h * v0[j] +
         (-2 * s3 + 3 * s2) * x0[j + 1] + (s3 - s2) * h * v0[j + 1];
}

double FrontPath::velocity(double t) const {
  if (times.size() == 1) return v0.front();
  const auto [j, s] = locate(times, t);
  const double h = times[j + 1] - times[j];
  const double s2 = s * s;
  return ((6 * s2 - 6 * s) * x0[j] + (3 * s2 - 4 * s + 1) * h * v0[j] +
          (-6 * s2 + 6 * s) * x0[j + 1] + (3 * s2 - 2 * s) * h * v0[j + 1]) /
         h;
}

FrontPath integrate_front(const PhysicalSetup& setup, const RegularPair& reg,
                          const FrontOptions& opts) {
  setup.validate();
  const double dt_req = opts.dt > 0.0 ? opts.dt : setup.t_final / 2000.0;
  const auto n_steps = static_cast<std::size_t>(std::ceil(setup.t_final / dt_req - 1e-9));
  const double dt = setup.t_final / static_cast<double>(n_steps);
  const double margin = opts.margin >= 0.0 ? opts.margin : std::min(10.0 * setup.mu, 0.1);
  const double k = setup.k;

  auto speed = [&](double x) { return -0.5 * k * (reg.left(x) + reg.right(x)); };
  auto rk4 = [&](double x, double h) {
    const double k1 = speed(x);
    const double k2 = speed(x + 0.5 * h * k1);
    const double k3 = speed(x + 0.5 * h * k2);
    const double k4 = speed(x + h * k3);
    return x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  };
  auto check_inside = [&](double x, double t) {
    constexpr double slack = 1e-12;
    if (!(x >= margin - slack && x <= 1.0 - margin + slack)) {
      std::ostringstream msg;
      msg << "x0(" << t << ") = " << x << " left [" << margin << ", " << 1.0 - margin << "]";
      throw Error(ErrorCode::FrontExitedDomain, msg.str());
    }
  };

  FrontPath path;
  path.times.reserve(n_steps + 1);
  path.x0.reserve(n_steps + 1);
  double x = setup.x0_init;
  check_inside(x, 0.0);
  for (std::size_t i = 0; i <= n_steps; ++i) {
    const double t = static_cast<double>(i) * dt;
    const double pl = reg.amplitude_left(x);
    path.times.push_back(t);
    path.x0.push_back(x);
    path.v0.push_back(speed(x));
    path.p_left.push_back(pl);
    path.p_right.push_back(-pl);
    if (i == n_steps) break;
    const double full = rk4(x, dt);
    const double half = rk4(rk4(x, 0.5 * dt), 0.5 * dt);
    const double estimate = std::abs(full - half) / 15.0;
    if (estimate > opts.step_tolerance) {
      std::ostringstream msg;
      msg << "step error estimate " << estimate << " at t = " << t;
      throw Error(ErrorCode::StepTooLarge, msg.str());
    }
    x = full;
    check_inside(x, t + dt);
  }
  return path;
}

double layer_profile_q0(const FrontPath& front, const RegularPair& reg,
                        const PhysicalSetup& setup, double t, double xi) {
  const double pl = reg.amplitude_left(front.position(t));
  const double p = xi <= 0.0 ? pl : -pl;
  return -2.0 * p / (std::exp(xi * setup.k * p) + 1.0);
}

double layer_profile_q0_dxi(const FrontPath& front, const RegularPair& reg,
                            const PhysicalSetup& setup, double t, double xi) {
  const double pl = reg.amplitude_left(front.position(t));
  const double p = xi <= 0.0 ? pl : -pl;
  const double c = std::cosh(0.5 * xi * setup.k * p);
  return setup.k * p * p / (2.0 * c * c);
}

LayerGeometry layer_width(double amplitude, double front_position, const PhysicalSetup& setup) {
  const double p = std::abs(amplitude);
  const double mu2 = setup.mu * setup.mu;
  if (!(p > mu2)) {
    std::ostringstream msg;
    msg << "layer amplitude " << p << " does not exceed mu^2 = " << mu2;
    throw Error(ErrorCode::DegenerateLayer, msg.str());
  }
  LayerGeometry g;
  g.xi_hat = std::log(2.0 * p / mu2 - 1.0) / (setup.k * p);
  g.x_left = front_position - setup.mu * g.xi_hat;
  g.x_right = front_position + setup.mu * g.xi_hat;
  g.width = g.x_right - g.x_left;
  return g;
}

LayerGeometry layer_width(const FrontPath& front, const RegularPair& reg,
                          const PhysicalSetup& setup, double t) {
  const double x0 = front.position(t);
  return layer_width(reg.amplitude_left(x0), x0, setup);
}

AsymptoticSolution AsymptoticSolution::build(const PhysicalSetup& setup,
                                             const SourceFunction& src,
                                             const FrontOptions& opts) {
  RegularPair reg = regular_functions(setup, src);
  FrontPath front = integrate_front(setup, reg, opts);
  return AsymptoticSolution(setup, std::move(reg), std::move(front));
}

namespace {

void check_domain(const PhysicalSetup& s, double x, double t) {
  constexpr double slack = 1e-12;
  if (!(x >= -slack && x <= 1.0 + slack && t >= -slack && t <= s.t_final + slack)) {
    std::ostringstream msg;
    msg << "(x, t) = (" << x << ", " << t << ") outside [0,1] x [0," << s.t_final << "]";
    throw Error(ErrorCode::OutOfDomain, msg.str());
  }
}

}  // namespace

double evaluate_u0(const AsymptoticSolution& sol, double x, double t) {
  const PhysicalSetup& s = sol.setup();
  check_domain(s, x, t);
  const double x0 = sol.front().position(t);
  const double xi = (x - x0) / s.mu;
  const double q = layer_profile_q0(sol.front(), sol.regular(), s, t, xi);
  return (x <= x0 ? sol.regular().left(x) : sol.regular().right(x)) + q;
}

double evaluate_u0_dx(const AsymptoticSolution& sol, double x, double t) {
  const PhysicalSetup& s = sol.setup();
  check_domain(s, x, t);
  const double x0 = sol.front().position(t);
  const double xi = (x - x0) / s.mu;
  const double dq = layer_profile_q0_dxi(sol.front(), sol.regular(), s, t, xi);
  const double dphi = x <= x0 ? sol.regular().left_dx(x) : sol.regular().right_dx(x);
  return dphi + dq / s.mu;
}

double evaluate_regular_part(const AsymptoticSolution& sol, double x, double t) {
  check_domain(sol.setup(), x, t);
  return x <= sol.front().position(t) ? sol.regular().left(x) : sol.regular().right(x);
}

AssumptionReport check_assumptions(const PhysicalSetup& setup, const SourceFunction& src,
                                   const FrontOptions& opts) {
  AssumptionReport rep;
  setup.validate();
  rep.a1 = setup.boundary_condition_ok();
  if (!rep.a1) {
    rep.messages.emplace_back(
        "Assumption 1 failed: need u_left < 0 < u_right and u_right - u_left > 2 mu^2");
  }
  const double k = setup.k;
  const bool right_ok = 0.5 * k * setup.u_right * setup.u_right > src.pos_mass();
  const bool left_ok = 0.5 * k * setup.u_left * setup.u_left > src.neg_mass();
  rep.a2 = right_ok && left_ok;
  if (!rep.a2) {
    std::ostringstream msg;
    msg << "Assumption 2 failed: (k/2) u_r^2 = " << 0.5 * k * setup.u_right * setup.u_right
        << " vs positive mass " << src.pos_mass() << ", (k/2) u_l^2 = "
        << 0.5 * k * setup.u_left * setup.u_left << " vs negative mass " << src.neg_mass();
    rep.messages.push_back(msg.str());
  }
  if (rep.a1 && rep.a2) {
    try {
      const RegularPair reg = regular_functions(setup, src);
      (void)integrate_front(setup, reg, opts);
      rep.a3 = true;
    } catch (const Error& e) {
      rep.messages.emplace_back(std::string("Assumption 3 failed: ") + e.what());
    }
  } else {
    rep.messages.emplace_back("Assumption 3 not checked: front equation is undefined");
  }
  rep.messages.emplace_back(
      "Assumption 4 (informational): initial profile is the tanh layer centred at x0_init");
  return rep;
}

}  // namespace aer
