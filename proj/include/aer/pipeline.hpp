#pragma once

#include <functional>
#include <optional>

#include "aer/error_estimation.hpp"
#include "aer/inversion.hpp"

namespace aer {

/// Noise part of the data radius.
///   additive:       C_u delta, for |u - u^d| <= delta and |w - w^d| <= delta.
///   multiplicative: k (2 delta + delta^2) / (1 - delta)^2 * max |u^d w^d|, the
///                   exact bound on |k u^d w^d - k u w| when both samples carry
///                   relative noise of at most delta.
///   automatic:      multiplicative for observed w, additive for w taken from the
///                   smoothed field (no relative bound holds there).
enum class NoiseBound { automatic, additive, multiplicative };

/// How the data radius r = noise + c1 mu |ln mu| bounds |f(x_i) - k u_i w_i|.
struct RadiusOptions {
  NoiseBound noise_bound = NoiseBound::automatic;
  double c1 = 0.0;
  /// Overrides the data estimate 2 (max|u| + max|w|) of the bound C_u.
  std::optional<double> c_up;
  /// Overrides the default lower bound min(anchor) - 3 r.
  std::optional<double> c_low;
};

struct AerOptions {
  ConstraintClass constraint_class = ConstraintClass::none;
  WindowSource window_source = WindowSource::oracle;
  bool exclude_layer = true;
  /// Smooth u and difference the spline even when w is observed.
  bool force_smoothing = false;
  /// Use s'(x_i) instead of the backward difference of the smoothed values.
  bool analytic_derivative = false;
  RadiusOptions radius;
  Delta1Mode delta1_mode = Delta1Mode::relaxed;
};

struct AerResult {
  LayerWindow window;
  SideIndices sides;
  std::optional<SmoothedField> left_fit;
  std::optional<SmoothedField> right_fit;
  std::vector<double> w_used;   ///< gradient fed to the targets, NaN where unused
  std::vector<double> targets;  ///< k u w, NaN where unused
  SourceEstimate estimate;      ///< filled across the window and gaps
  AdmissibleSet set;
  ErrorReport report;
};

/// Smooth (when needed), form targets, fit, fill, then estimate the error.
/// `solution` is required for the oracle window.
AerResult run_aer(const PhysicalSetup& setup, const Observations& obs, const AerOptions& opts,
                  const AsymptoticSolution* solution = nullptr);

/// max |f(x_i) - k u_i w_i| / (mu |ln mu|) over the used nodes of noise-free
/// samples: the calibration of c1 for one example family. The sup norm keeps the
/// radius a pointwise bound.
double calibrate_c1(const PhysicalSetup& setup, const Observations& exact,
                    const LayerWindow& window, const std::function<double(double)>& f);

/// ||f - k u w|| with the discrete L2 norm sqrt(h sum d_i^2) over the used nodes.
double link_error_l2(const PhysicalSetup& setup, const Observations& exact,
                     const LayerWindow& window, const std::function<double(double)>& f);

/// ||f_est - f|| / ||f|| in L2(0,1), f_est piecewise linear through its nodes,
/// trapezoid rule on `samples` uniform points.
double source_relative_error(const SourceEstimate& est, const std::function<double(double)>& f,
                             std::size_t samples = 20001);

/// Piecewise-linear interpolation through (xs, ys), constant beyond the ends.
double interpolate_linear(std::span<const double> xs, std::span<const double> ys, double x);

}  // namespace aer
