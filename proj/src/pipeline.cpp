#include "aer/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "aer/error.hpp"

namespace aer {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mesh_width(std::span<const double> xs) {
  double h = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < xs.size(); ++i) h = std::min(h, xs[i] - xs[i - 1]);
  return h;
}

SmoothedField smooth_side(const Observations& obs, const std::vector<std::size_t>& idx) {
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i : idx) {
    x.push_back(obs.xs[i]);
    y.push_back(obs.u[i]);
  }
  return smooth_field(x, y, obs.delta);
}

}  // namespace

AerResult run_aer(const PhysicalSetup& setup, const Observations& obs, const AerOptions& opts,
                  const AsymptoticSolution* solution) {
  obs.validate();
  AerResult res;
  if (!opts.exclude_layer) {
    res.window = {0.5, 0.5, opts.window_source};
  } else if (opts.window_source == WindowSource::oracle) {
    if (solution == nullptr) {
      throw Error(ErrorCode::InvalidArgument, "oracle window needs the asymptotic solution");
    }
    res.window = layer_window_oracle(*solution, obs.t0);
  } else {
    res.window = layer_window_data(obs, setup);
  }
  res.sides = split_sides(obs, res.window);
  if (res.sides.left.empty() || res.sides.right.empty()) {
    throw Error(ErrorCode::OneSidedData, "no valid samples on one side of the layer");
  }

  const std::size_t n = obs.size();
  res.w_used.assign(n, kNaN);
  const bool smooth = opts.force_smoothing || !obs.w.has_value();
  if (smooth) {
    if (!(obs.delta > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "smoothing requires delta > 0");
    }
    const double h = mesh_width(obs.xs);
    res.left_fit = smooth_side(obs, res.sides.left);
    res.right_fit = smooth_side(obs, res.sides.right);
    auto fill = [&](const SmoothedField& s, const std::vector<std::size_t>& idx) {
      for (std::size_t i : idx) {
        res.w_used[i] =
            opts.analytic_derivative ? s.derivative(obs.xs[i]) : s.backward_difference(obs.xs[i], h);
      }
    };
    fill(*res.left_fit, res.sides.left);
    fill(*res.right_fit, res.sides.right);
  } else {
    for (const auto* side : {&res.sides.left, &res.sides.right}) {
      for (std::size_t i : *side) res.w_used[i] = (*obs.w)[i];
    }
  }

  // Targets use the smoothed u when smoothing, the raw samples otherwise.
  res.targets.assign(n, kNaN);
  auto u_at = [&](std::size_t i, bool left) {
    if (!smooth) return obs.u[i];
    return left ? (*res.left_fit)(obs.xs[i]) : (*res.right_fit)(obs.xs[i]);
  };
  for (std::size_t i : res.sides.left) res.targets[i] = setup.k * u_at(i, true) * res.w_used[i];
  for (std::size_t i : res.sides.right) res.targets[i] = setup.k * u_at(i, false) * res.w_used[i];

  res.estimate =
      interpolate_across_layer(fit_source(obs.xs, res.targets, opts.constraint_class));

  // Admissible set.
  double umax = 0.0;
  double wmax = 0.0;
  double amin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isnan(res.targets[i])) continue;
    umax = std::max(umax, std::abs(obs.u[i]));
    wmax = std::max(wmax, std::abs(res.w_used[i]));
    amin = std::min(amin, res.targets[i]);
  }
  const double c_up = opts.radius.c_up.value_or(2.0 * (umax + wmax));
  NoiseBound bound = opts.radius.noise_bound;
  if (bound == NoiseBound::automatic) {
    bound = smooth ? NoiseBound::additive : NoiseBound::multiplicative;
  }
  double noise = c_up * obs.delta;
  if (bound == NoiseBound::multiplicative) {
    if (!(obs.delta < 1.0)) throw Error(ErrorCode::InvalidArgument, "delta must be < 1");
    double gmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isnan(res.targets[i])) gmax = std::max(gmax, std::abs(res.targets[i]));
    }
    const double d = obs.delta;
    noise = (2.0 * d + d * d) / ((1.0 - d) * (1.0 - d)) * gmax;
  }
  const double radius = noise + opts.radius.c1 * setup.mu * std::abs(std::log(setup.mu));
  res.set.constraint_class = opts.constraint_class;
  res.set.xs = obs.xs;
  res.set.anchors = res.targets;
  res.set.radius = radius;
  res.set.c_up = c_up;
  res.set.c_low = opts.radius.c_low.value_or(amin - 3.0 * radius);
  res.report = build_error_report(res.set, res.estimate.values, opts.delta1_mode);
  return res;
}

namespace {

std::vector<double> link_deviations(const PhysicalSetup& setup, const Observations& exact,
                                    const LayerWindow& window,
                                    const std::function<double(double)>& f) {
  if (!exact.w) throw Error(ErrorCode::MissingGradient, "calibration needs exact gradients");
  const SideIndices sides = split_sides(exact, window);
  std::vector<double> d;
  for (const auto* side : {&sides.left, &sides.right}) {
    for (std::size_t i : *side) {
      d.push_back(setup.k * exact.u[i] * (*exact.w)[i] - f(exact.xs[i]));
    }
  }
  return d;
}

}  // namespace

double calibrate_c1(const PhysicalSetup& setup, const Observations& exact,
                    const LayerWindow& window, const std::function<double(double)>& f) {
  double worst = 0.0;
  for (double d : link_deviations(setup, exact, window, f)) worst = std::max(worst, std::abs(d));
  return worst / (setup.mu * std::abs(std::log(setup.mu)));
}

double link_error_l2(const PhysicalSetup& setup, const Observations& exact,
                     const LayerWindow& window, const std::function<double(double)>& f) {
  double sum = 0.0;
  for (double d : link_deviations(setup, exact, window, f)) sum += d * d;
  return std::sqrt(mesh_width(exact.xs) * sum);
}

double interpolate_linear(std::span<const double> xs, std::span<const double> ys, double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - xs.begin());
  const double s = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
  return ys[j - 1] + s * (ys[j] - ys[j - 1]);
}

double source_relative_error(const SourceEstimate& est, const std::function<double(double)>& f,
                             std::size_t samples) {
  if (samples < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 samples");
  double num = 0.0;
  double den = 0.0;
  const double h = 1.0 / static_cast<double>(samples - 1);
  for (std::size_t j = 0; j < samples; ++j) {
    const double x = static_cast<double>(j) * h;
    const double wgt = (j == 0 || j + 1 == samples) ? 0.5 : 1.0;
    const double ft = f(x);
    const double d = interpolate_linear(est.xs, est.values, x) - ft;
    num += wgt * d * d;
    den += wgt * ft * ft;
  }
  return std::sqrt(num / den);
}

}  // namespace aer
