#include "aer/fvm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "aer/error.hpp"
#include "aer/kernels.hpp"

namespace aer {

SpatialGrid SpatialGrid::uniform(std::size_t n_cells) {
  if (n_cells < 2) throw Error(ErrorCode::InvalidArgument, "grid needs at least 2 cells");
  SpatialGrid g;
  g.n_cells = n_cells;
  g.h = 1.0 / static_cast<double>(n_cells);
  g.centers.resize(n_cells + 1);
  for (std::size_t i = 0; i <= n_cells; ++i) {
    g.centers[i] = static_cast<double>(i) / static_cast<double>(n_cells);
  }
  return g;
}

std::size_t FieldSeries::time_index(double t) const {
  for (std::size_t j = 0; j < times.size(); ++j) {
    if (std::abs(times[j] - t) <= 1e-12) return j;
  }
  std::ostringstream msg;
  msg << "t = " << t << " is not a stored snapshot";
  throw Error(ErrorCode::TimeNotStored, msg.str());
}

std::vector<double> default_initial_condition(const PhysicalSetup& setup, const SpatialGrid& grid,
                                              double x0_init) {
  if (!(x0_init > 0.0 && x0_init < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "x0_init must lie in (0,1)");
  }
  const double half_jump = 0.5 * (setup.u_right - setup.u_left);
  const double mean = 0.5 * (setup.u_right + setup.u_left);
  std::vector<double> u(grid.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = half_jump * std::tanh((grid.centers[i] - x0_init) / setup.mu) + mean;
  }
  u.front() = setup.u_left;
  u.back() = setup.u_right;
  return u;
}

std::vector<double> uniform_times(double t_final, std::size_t count) {
  std::vector<double> t(count);
  for (std::size_t j = 0; j < count; ++j) {
    t[j] = t_final * static_cast<double>(j) / static_cast<double>(count - 1);
  }
  return t;
}

namespace {

double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

class Stepper {
 public:
  Stepper(const PhysicalSetup& setup, const SourceFunction& src, const SpatialGrid& grid,
          Reconstruction recon)
      : setup_(setup), grid_(grid), recon_(recon) {
    const std::size_t n = grid.size();
    source_.resize(n);
    for (std::size_t i = 0; i < n; ++i) source_[i] = src(grid.centers[i]);
    flux_.resize(n - 1);
    slope_.assign(n, 0.0);
    rhs_.resize(n);
    cp_.resize(n);
  }

  double stable_dt(std::span<const double> u, double safety) const {
    double umax = std::max(std::abs(setup_.u_left), std::abs(setup_.u_right));
    for (double v : u) umax = std::max(umax, std::abs(v));
    const double h = grid_.h;
    const double advective = umax > 0.0 ? h / (setup_.k * umax) : 1e300;
    const double diffusive = h * h / (2.0 * setup_.mu);
    // MUSCL with a forward-Euler advective step is TVD only for CFL <= 1/2.
    const double recon = recon_ == Reconstruction::muscl_minmod ? 0.5 : 1.0;
    return safety * std::min(recon * advective, diffusive);
  }

  /// Strang splitting: Crank-Nicolson half step of diffusion, SSP-RK2 step of
  /// advection and source, Crank-Nicolson half step. Second order in time.
  void step(std::vector<double>& u, double dt) {
    diffuse(u, 0.5 * dt);
    stage_ = u;
    explicit_euler(stage_, dt);
    explicit_euler(stage_, dt);
    for (std::size_t i = 1; i + 1 < u.size(); ++i) u[i] = 0.5 * (u[i] + stage_[i]);
    diffuse(u, 0.5 * dt);
  }

  /// u <- u + dt (-(F_{i+1/2} - F_{i-1/2}) / h - f_i) at the interior nodes.
  void explicit_euler(std::vector<double>& u, double dt) {
    const std::size_t n = u.size();
    const double k = setup_.k;
    const double h = grid_.h;
    if (recon_ == Reconstruction::muscl_minmod) {
      for (std::size_t i = 1; i + 1 < n; ++i) {
        slope_[i] = minmod(u[i] - u[i - 1], u[i + 1] - u[i]);
      }
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double ul = u[i] + 0.5 * slope_[i];
      const double ur = u[i + 1] - 0.5 * slope_[i + 1];
      const double fl = -0.5 * k * ul * ul;
      const double fr = -0.5 * k * ur * ur;
      const double a = k * std::max(std::abs(ul), std::abs(ur));
      flux_[i] = 0.5 * (fl + fr) - 0.5 * a * (ur - ul);
    }
    for (std::size_t i = 1; i + 1 < n; ++i) u[i] -= dt / h * (flux_[i] - flux_[i - 1]) + dt * source_[i];
  }

  /// Crank-Nicolson step of u_t = mu u_xx with Dirichlet ends; one Thomas solve.
  void diffuse(std::vector<double>& u, double dt) {
    const std::size_t n = u.size();
    const double h = grid_.h;
    const double lam = 0.5 * setup_.mu * dt / (h * h);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      rhs_[i] = (1.0 - 2.0 * lam) * u[i] + lam * (u[i - 1] + u[i + 1]);
    }
    // (1 + 2 lam) u_i - lam (u_{i-1} + u_{i+1}) = rhs_i.
    const double diag = 1.0 + 2.0 * lam;
    rhs_[1] += lam * setup_.u_left;
    rhs_[n - 2] += lam * setup_.u_right;
    cp_[1] = -lam / diag;
    rhs_[1] /= diag;
    for (std::size_t i = 2; i + 1 < n; ++i) {
      const double m = diag + lam * cp_[i - 1];
      cp_[i] = -lam / m;
      rhs_[i] = (rhs_[i] + lam * rhs_[i - 1]) / m;
    }
    u[n - 2] = rhs_[n - 2];
    for (std::size_t i = n - 2; i-- > 1;) u[i] = rhs_[i] - cp_[i] * u[i + 1];
    u.front() = setup_.u_left;
    u.back() = setup_.u_right;
  }

 private:
  const PhysicalSetup& setup_;
  const SpatialGrid& grid_;
  Reconstruction recon_;
  std::vector<double> source_;
  std::vector<double> flux_;
  std::vector<double> slope_;
  std::vector<double> rhs_;
  std::vector<double> cp_;
  std::vector<double> stage_;
};

}  // namespace

FieldSeries solve_forward(const PhysicalSetup& setup, const SourceFunction& src,
                          std::span<const double> u_init, const SpatialGrid& grid,
                          const FvmOptions& opts) {
  setup.validate();
  if (u_init.size() != grid.size()) {
    throw Error(ErrorCode::InvalidArgument, "initial profile does not match the grid");
  }
  std::vector<double> out_times =
      opts.output_times.empty() ? uniform_times(setup.t_final, 201) : opts.output_times;
  std::sort(out_times.begin(), out_times.end());
  out_times.erase(std::unique(out_times.begin(), out_times.end(),
                              [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
                  out_times.end());
  if (out_times.front() < 0.0 || out_times.back() > setup.t_final + 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "output times must lie in [0, T]");
  }

  FieldSeries series;
  series.grid = grid;
  series.setup = setup;
  series.times = out_times;
  series.values.reserve(out_times.size() * grid.size());

  Stepper stepper(setup, src, grid, opts.reconstruction);
  std::vector<double> u(u_init.begin(), u_init.end());
  double t = 0.0;
  for (double target : out_times) {
    while (target - t > 1e-14) {
      const double limit = stepper.stable_dt(u, 1.0);
      double dt = opts.cfl_safety * limit;
      if (opts.dt > 0.0) {
        if (opts.dt > limit * (1.0 + 1e-12)) {
          std::ostringstream msg;
          msg << "dt = " << opts.dt << " exceeds stable limit " << limit;
          throw Error(ErrorCode::CFLViolation, msg.str());
        }
        dt = opts.dt;
      }
      if (t + dt > target - 1e-14) dt = target - t;
      stepper.step(u, dt);
      t += dt;
      for (double v : u) {
        if (!std::isfinite(v)) {
          std::ostringstream msg;
          msg << "non-finite state at t = " << t;
          throw Error(ErrorCode::NonFiniteState, msg.str());
        }
      }
    }
    t = target;
    series.values.insert(series.values.end(), u.begin(), u.end());
  }
  return series;
}

ExactSamples sample_observations(const FieldSeries& series, double t0,
                                 std::span<const std::size_t> indices) {
  const std::size_t j = series.time_index(t0);
  const auto u = series.snapshot(j);
  const std::size_t n = u.size();
  const double h = series.grid.h;
  ExactSamples s;
  s.t0 = series.times[j];
  for (std::size_t i : indices) {
    if (i >= n) throw Error(ErrorCode::InvalidArgument, "sample index outside the grid");
    double w;
    if (i == 0) {
      w = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
    } else if (i == n - 1) {
      w = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h);
    } else {
      w = (u[i + 1] - u[i - 1]) / (2.0 * h);
    }
    s.indices.push_back(i);
    s.xs.push_back(series.grid.centers[i]);
    s.u.push_back(u[i]);
    s.w.push_back(w);
  }
  return s;
}

namespace {

std::vector<unsigned char> region_mask(const FieldSeries& b, const Region& r) {
  const std::size_t nx = b.grid.size();
  std::vector<unsigned char> keep(b.values.size(), 0);
  std::size_t count = 0;
  for (std::size_t j = 0; j < b.times.size(); ++j) {
    const double t = b.times[j];
    if (t < r.t_lo - 1e-12 || t > r.t_hi + 1e-12) continue;
    for (std::size_t i = 0; i < nx; ++i) {
      const double x = b.grid.centers[i];
      if (x < r.x_lo - 1e-12 || x > r.x_hi + 1e-12) continue;
      keep[j * nx + i] = 1;
      ++count;
    }
  }
  if (count == 0) throw Error(ErrorCode::EmptyRegion, "no lattice points inside the region");
  return keep;
}

double ratio(const kernels::L2Sums& s) {
  if (!(s.ref2 > 0.0)) throw Error(ErrorCode::EmptyRegion, "reference field has zero norm");
  return std::sqrt(s.diff2 / s.ref2);
}

double relative_for_part(const AsymptoticSolution& a, const FieldSeries& b, const Region& region,
                         kernels::Part part) {
  const auto keep = region_mask(b, region);
  const std::vector<double> times(b.times.begin(), b.times.end());
  std::vector<double> ts;
  for (double t : times) ts.push_back(std::min(t, a.setup().t_final));
  const auto values = kernels::u0_lattice(a, b.grid.centers, ts, part);
  return ratio(kernels::l2_sums(values, b.values, keep));
}

}  // namespace

double relative_l2_error(const std::function<double(double, double)>& a, const FieldSeries& b,
                         const Region& region) {
  const auto keep = region_mask(b, region);
  const std::size_t nx = b.grid.size();
  std::vector<double> values(b.values.size(), 0.0);
  for (std::size_t j = 0; j < b.times.size(); ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      if (keep[j * nx + i]) values[j * nx + i] = a(b.grid.centers[i], b.times[j]);
    }
  }
  return ratio(kernels::l2_sums_serial(values, b.values, keep));
}

double relative_l2_error(const AsymptoticSolution& a, const FieldSeries& b,
                         const Region& region) {
  return relative_for_part(a, b, region, kernels::Part::full);
}

double relative_l2_error_regular(const AsymptoticSolution& a, const FieldSeries& b,
                                 const Region& region) {
  return relative_for_part(a, b, region, kernels::Part::regular);
}

}  // namespace aer
