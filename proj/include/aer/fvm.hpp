#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "aer/asymptotics.hpp"
#include "aer/source.hpp"

namespace aer {

/// Vertex-centred grid: nodes x_i = i h, i = 0..n_cells. Interior node i owns
/// the control volume [x_i - h/2, x_i + h/2]; the two boundary nodes carry the
/// Dirichlet data.
struct SpatialGrid {
  std::size_t n_cells = 0;
  double h = 0.0;
  std::vector<double> centers;

  static SpatialGrid uniform(std::size_t n_cells);
  std::size_t size() const noexcept { return centers.size(); }
};

/// u(x_i, t_j), stored row-major by time.
struct FieldSeries {
  SpatialGrid grid;
  std::vector<double> times;
  std::vector<double> values;
  PhysicalSetup setup;

  double at(std::size_t j, std::size_t i) const { return values[j * grid.size() + i]; }
  std::span<const double> snapshot(std::size_t j) const {
    return {values.data() + j * grid.size(), grid.size()};
  }
  /// Throws TimeNotStored unless t matches a stored instant to 1e-12.
  std::size_t time_index(double t) const;
};

/// ((u_r - u_l)/2) tanh((x - x0)/mu) + (u_r + u_l)/2 at the interior nodes; the
/// boundary nodes are pinned to the Dirichlet values.
std::vector<double> default_initial_condition(const PhysicalSetup& setup, const SpatialGrid& grid,
                                              double x0_init);

enum class Reconstruction { piecewise_constant, muscl_minmod };

struct FvmOptions {
  double dt = 0.0;  ///< 0 picks the largest stable step per step
  std::vector<double> output_times;  ///< empty means 201 uniform instants on [0,T]
  /// Fraction of the stability limit. Well below 1 so the time error stays under
  /// the spatial one: halving the step moves the field by < 1e-3 in max norm.
  double cfl_safety = 0.08;
  Reconstruction reconstruction = Reconstruction::piecewise_constant;
};

std::vector<double> uniform_times(double t_final, std::size_t count);

/// Finite-volume scheme, Strang split: Crank-Nicolson half steps of centred
/// diffusion (one tridiagonal solve each) around an SSP-RK2 step of Rusanov
/// advection of the flux -k u^2/2 plus the source. Throws CFLViolation for a
/// user step above the stability limit and NonFiniteState if the state blows up.
FieldSeries solve_forward(const PhysicalSetup& setup, const SourceFunction& src,
                          std::span<const double> u_init, const SpatialGrid& grid,
                          const FvmOptions& opts = {});

/// Noise-free samples u_i and w_i = du/dx at chosen grid nodes.
struct ExactSamples {
  double t0 = 0.0;
  std::vector<std::size_t> indices;
  std::vector<double> xs;
  std::vector<double> u;
  std::vector<double> w;
};

/// w from second-order central differences, one-sided second order at the ends.
ExactSamples sample_observations(const FieldSeries& series, double t0,
                                 std::span<const std::size_t> indices);

struct Region {
  double x_lo = 0.0;
  double x_hi = 1.0;
  double t_lo = 0.0;
  double t_hi = std::numeric_limits<double>::infinity();
};

/// ||a - b|| / ||b|| as discrete l2 sums over the stored lattice points inside region.
double relative_l2_error(const std::function<double(double, double)>& a, const FieldSeries& b,
                         const Region& region = {});
/// Same for U0, evaluated with the parallel lattice kernel.
double relative_l2_error(const AsymptoticSolution& a, const FieldSeries& b,
                         const Region& region = {});
/// Outer part only (phi branches switched at x0(t)).
double relative_l2_error_regular(const AsymptoticSolution& a, const FieldSeries& b,
                                 const Region& region = {});

}  // namespace aer
