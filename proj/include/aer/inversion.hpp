#pragma once

#include <optional>
#include <span>
#include <vector>

#include "aer/asymptotics.hpp"
#include "aer/observations.hpp"
#include "aer/shape.hpp"

namespace aer {

enum class WindowSource { oracle, data };

/// Open interval (x_lo, x_hi) around the front whose samples are ignored.
struct LayerWindow {
  double x_lo = 0.0;
  double x_hi = 0.0;
  WindowSource source = WindowSource::oracle;

  bool contains(double x) const noexcept { return x > x_lo && x < x_hi; }
};

/// (x0(t0) - dx/2, x0(t0) + dx/2) with dx the zero-order layer width.
LayerWindow layer_window_oracle(const AsymptoticSolution& sol, double t0);

/// Centre at the largest |u_{i+1} - u_i| among consecutive valid samples; the
/// amplitude is half the spread between the outermost valid samples. Throws
/// NoLayerDetected when the largest jump is under 3x the median jump, and
/// InvalidArgument with fewer than 5 valid samples.
LayerWindow layer_window_data(const Observations& obs, const PhysicalSetup& setup);

/// Valid samples strictly outside the window, split by side.
struct SideIndices {
  std::vector<std::size_t> left;
  std::vector<std::size_t> right;
};
SideIndices split_sides(const Observations& obs, const LayerWindow& window);

enum class SmoothingStatus { ok, unreachable, saturated };

/// Natural cubic smoothing spline on one side of the layer.
///
/// Minimises (1/m) sum (s(x_i) - y_i)^2 + eps int s''^2. eps is picked by
/// bisection on log10 eps in [-16, 4] so that the mean-square misfit equals
/// target = (delta * rms(y))^2.
class SmoothedField {
 public:
  double operator()(double x) const;
  double derivative(double x) const;
  /// Backward difference (s(x) - s(x - h)) / h; the forward difference when x - h
  /// falls left of the first knot.
  double backward_difference(double x, double h) const;

  double epsilon() const noexcept { return epsilon_; }
  double residual() const noexcept { return residual_; }
  double target() const noexcept { return target_; }
  SmoothingStatus status() const noexcept { return status_; }
  /// (log10 eps, misfit) at every bisection probe, in probe order.
  const std::vector<std::pair<double, double>>& trace() const noexcept { return trace_; }
  std::span<const double> knots() const noexcept { return x_; }
  std::span<const double> values() const noexcept { return s_; }

 private:
  friend SmoothedField smooth_field(std::span<const double>, std::span<const double>, double);
  std::vector<double> x_;
  std::vector<double> s_;
  std::vector<double> gamma_;  ///< s'' at the knots, zero at both ends
  double epsilon_ = 0.0;
  double residual_ = 0.0;
  double target_ = 0.0;
  SmoothingStatus status_ = SmoothingStatus::ok;
  std::vector<std::pair<double, double>> trace_;
};

/// Throws DegenerateSide with fewer than 4 points, InvalidArgument for delta <= 0.
SmoothedField smooth_field(std::span<const double> xs, std::span<const double> ys, double delta);

/// Fixed-eps smoother, exposed for tests: returns knot values and the mean-square misfit.
std::vector<double> smoothing_spline_values(std::span<const double> xs,
                                            std::span<const double> ys, double epsilon);

/// g_i = k u_i w_i at every valid node; NaN elsewhere. Throws MissingGradient
/// when w is absent at a valid node.
std::vector<double> pointwise_target(const Observations& obs, double k);

/// Least-squares nondecreasing fit (pool adjacent violators).
std::vector<double> fit_monotone(std::span<const double> g);

/// Least-squares fit with nondecreasing (convex) or nonincreasing (concave)
/// slopes between consecutive nodes. On a uniform grid this is the sign of the
/// second differences. xs may skip nodes of a uniform mesh (gaps, the layer
/// window) but every spacing must be an integer multiple of the smallest one to
/// 1e-6 relative; throws NonUniformGrid otherwise.
std::vector<double> fit_convex(std::span<const double> xs, std::span<const double> g);
std::vector<double> fit_concave(std::span<const double> xs, std::span<const double> g);

/// Non-negative least squares min ||M lambda - b||, lambda >= 0 (Lawson-Hanson).
/// M is column-major with `rows` rows.
std::vector<double> nnls(std::span<const double> m_colmajor, std::size_t rows,
                         std::span<const double> b);

/// Source values on the full observation grid.
struct SourceEstimate {
  std::vector<double> xs;
  std::vector<double> values;
  std::vector<unsigned char> fitted;  ///< 1 where the value came from data, 0 where filled
  ConstraintClass constraint_class = ConstraintClass::none;
};

/// Fits the valid targets under the shape prior. Convex/concave fits use the
/// valid nodes only, which must be uniformly spaced.
SourceEstimate fit_source(std::span<const double> xs, std::span<const double> g,
                          ConstraintClass cls);

/// Linear fill across every node with fitted == 0 between the nearest fitted
/// neighbours. Throws OneSidedData when a fill region touches the boundary.
SourceEstimate interpolate_across_layer(SourceEstimate est);

}  // namespace aer
