#include "aer/inversion.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "aer/error.hpp"

namespace aer {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

LayerWindow layer_window_oracle(const AsymptoticSolution& sol, double t0) {
  const double x0 = sol.front().position(t0);
  const LayerGeometry g = layer_width(sol.front(), sol.regular(), sol.setup(), t0);
  return {x0 - 0.5 * g.width, x0 + 0.5 * g.width, WindowSource::oracle};
}

LayerWindow layer_window_data(const Observations& obs, const PhysicalSetup& setup) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (obs.valid(i)) idx.push_back(i);
  }
  if (idx.size() < 5) {
    throw Error(ErrorCode::InvalidArgument, "layer detection needs at least 5 valid samples");
  }
  std::vector<double> jumps(idx.size() - 1);
  std::size_t best = 0;
  for (std::size_t j = 0; j + 1 < idx.size(); ++j) {
    jumps[j] = std::abs(obs.u[idx[j + 1]] - obs.u[idx[j]]);
    if (jumps[j] > jumps[best]) best = j;
  }
  std::vector<double> sorted = jumps;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double median = sorted[sorted.size() / 2];
  if (!(jumps[best] >= 3.0 * median) || jumps[best] == 0.0) {
    throw Error(ErrorCode::NoLayerDetected, "largest jump is below 3x the median jump");
  }
  const double centre = 0.5 * (obs.xs[idx[best]] + obs.xs[idx[best + 1]]);
  const double amplitude = -0.5 * std::abs(obs.u[idx.back()] - obs.u[idx.front()]);
  const LayerGeometry g = layer_width(amplitude, centre, setup);
  return {centre - 0.5 * g.width, centre + 0.5 * g.width, WindowSource::data};
}

SideIndices split_sides(const Observations& obs, const LayerWindow& window) {
  SideIndices s;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (!obs.valid(i) || window.contains(obs.xs[i])) continue;
    (obs.xs[i] <= window.x_lo ? s.left : s.right).push_back(i);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Smoothing spline (Reinsch). With lambda = m eps the problem is
//   min sum (y - s)^2 + lambda int s''^2,
// solved by (R + lambda Q^T Q) gamma = Q^T y, s = y - lambda Q gamma.

namespace {

struct SplineFit {
  std::vector<double> s;
  std::vector<double> gamma;  // full length, zero at the ends
  double misfit = 0.0;
};

SplineFit fit_spline(std::span<const double> x, std::span<const double> y, double epsilon) {
  const std::size_t m = x.size();
  const std::size_t n = m - 2;
  const double lambda = static_cast<double>(m) * epsilon;
  std::vector<double> h(m - 1);
  for (std::size_t i = 0; i + 1 < m; ++i) h[i] = x[i + 1] - x[i];

  // Column j of Q (j = 0..n-1) touches knots j, j+1, j+2.
  auto q = [&](std::size_t j) {
    return std::array<double, 3>{1.0 / h[j], -1.0 / h[j] - 1.0 / h[j + 1], 1.0 / h[j + 1]};
  };
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(5 * n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto qj = q(j);
    double diag = (h[j] + h[j + 1]) / 3.0 + lambda * (qj[0] * qj[0] + qj[1] * qj[1] + qj[2] * qj[2]);
    trip.emplace_back(j, j, diag);
    if (j + 1 < n) {
      const auto qk = q(j + 1);
      const double off = h[j + 1] / 6.0 + lambda * (qj[1] * qk[0] + qj[2] * qk[1]);
      trip.emplace_back(j, j + 1, off);
      trip.emplace_back(j + 1, j, off);
    }
    if (j + 2 < n) {
      const auto qk = q(j + 2);
      const double off = lambda * qj[2] * qk[0];
      trip.emplace_back(j, j + 2, off);
      trip.emplace_back(j + 2, j, off);
    }
  }
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(trip.begin(), trip.end());
  Eigen::VectorXd rhs(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto qj = q(j);
    rhs[j] = qj[0] * y[j] + qj[1] * y[j + 1] + qj[2] * y[j + 2];
  }
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(a);
  if (ldlt.info() != Eigen::Success) {
    throw Error(ErrorCode::DegenerateSide, "smoothing system is not positive definite");
  }
  const Eigen::VectorXd gamma = ldlt.solve(rhs);

  SplineFit fit;
  fit.gamma.assign(m, 0.0);
  for (std::size_t j = 0; j < n; ++j) fit.gamma[j + 1] = gamma[j];
  fit.s.assign(y.begin(), y.end());
  for (std::size_t j = 0; j < n; ++j) {
    const auto qj = q(j);
    fit.s[j] -= lambda * qj[0] * gamma[j];
    fit.s[j + 1] -= lambda * qj[1] * gamma[j];
    fit.s[j + 2] -= lambda * qj[2] * gamma[j];
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) sum += (fit.s[i] - y[i]) * (fit.s[i] - y[i]);
  fit.misfit = sum / static_cast<double>(m);
  return fit;
}

void check_side(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw Error(ErrorCode::InvalidArgument, "xs and ys differ in length");
  if (xs.size() < 4) throw Error(ErrorCode::DegenerateSide, "fewer than 4 points on a side");
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) throw Error(ErrorCode::InvalidArgument, "xs must increase strictly");
  }
}

}  // namespace

std::vector<double> smoothing_spline_values(std::span<const double> xs,
                                            std::span<const double> ys, double epsilon) {
  check_side(xs, ys);
  return fit_spline(xs, ys, epsilon).s;
}

SmoothedField smooth_field(std::span<const double> xs, std::span<const double> ys, double delta) {
  check_side(xs, ys);
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "delta must be > 0");
  double ms = 0.0;
  for (double v : ys) ms += v * v;
  ms /= static_cast<double>(ys.size());

  SmoothedField out;
  out.x_.assign(xs.begin(), xs.end());
  out.target_ = delta * delta * ms;

  auto probe = [&](double log_eps) {
    SplineFit f = fit_spline(xs, ys, std::pow(10.0, log_eps));
    out.trace_.emplace_back(log_eps, f.misfit);
    return f;
  };
  double lo = -16.0;
  double hi = 4.0;
  SplineFit best = probe(lo);
  double best_log = lo;
  if (best.misfit > out.target_) {
    out.status_ = SmoothingStatus::unreachable;
  } else {
    SplineFit top = probe(hi);
    if (top.misfit < out.target_) {
      out.status_ = SmoothingStatus::saturated;
      best = std::move(top);
      best_log = hi;
    } else {
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        SplineFit f = probe(mid);
        best = f;
        best_log = mid;
        if (std::abs(f.misfit / out.target_ - 1.0) <= 1e-6) break;
        (f.misfit < out.target_ ? lo : hi) = mid;
      }
    }
  }
  out.s_ = std::move(best.s);
  out.gamma_ = std::move(best.gamma);
  out.residual_ = best.misfit;
  out.epsilon_ = std::pow(10.0, best_log);
  return out;
}

double SmoothedField::operator()(double x) const {
  const std::size_t m = x_.size();
  if (x <= x_.front()) return s_.front() + derivative(x_.front()) * (x - x_.front());
  if (x >= x_.back()) return s_.back() + derivative(x_.back()) * (x - x_.back());
  const std::size_t i =
      static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin()) - 1;
  const std::size_t j = std::min(i, m - 2);
  const double h = x_[j + 1] - x_[j];
  const double a = (x_[j + 1] - x) / h;
  const double b = 1.0 - a;
  return a * s_[j] + b * s_[j + 1] +
         ((a * a * a - a) * gamma_[j] + (b * b * b - b) * gamma_[j + 1]) * h * h / 6.0;
}

double SmoothedField::derivative(double x) const {
  const std::size_t m = x_.size();
  const double xc = std::clamp(x, x_.front(), x_.back());
  std::size_t j =
      static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), xc) - x_.begin());
  j = std::clamp<std::size_t>(j, 1, m - 1) - 1;
  const double h = x_[j + 1] - x_[j];
  const double a = (x_[j + 1] - xc) / h;
  const double b = 1.0 - a;
  return (s_[j + 1] - s_[j]) / h - (3.0 * a * a - 1.0) / 6.0 * h * gamma_[j] +
         (3.0 * b * b - 1.0) / 6.0 * h * gamma_[j + 1];
}

double SmoothedField::backward_difference(double x, double h) const {
  if (x - h < x_.front() - 1e-12 * h) return ((*this)(x + h) - (*this)(x)) / h;
  return ((*this)(x) - (*this)(x - h)) / h;
}

std::vector<double> pointwise_target(const Observations& obs, double k) {
  std::vector<double> g(obs.size(), kNaN);
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (!obs.valid(i)) continue;
    if (!obs.w || std::isnan((*obs.w)[i])) {
      std::ostringstream msg;
      msg << "no gradient at x = " << obs.xs[i];
      throw Error(ErrorCode::MissingGradient, msg.str());
    }
    g[i] = k * obs.u[i] * (*obs.w)[i];
  }
  return g;
}

std::vector<double> fit_monotone(std::span<const double> g) {
  struct Block {
    double sum;
    std::size_t count;
  };
  std::vector<Block> blocks;
  blocks.reserve(g.size());
  for (double v : g) {
    blocks.push_back({v, 1});
    while (blocks.size() > 1) {
      const Block& b = blocks.back();
      const Block& a = blocks[blocks.size() - 2];
      if (a.sum * static_cast<double>(b.count) <= b.sum * static_cast<double>(a.count)) break;
      const Block merged{a.sum + b.sum, a.count + b.count};
      blocks.pop_back();
      blocks.back() = merged;
    }
  }
  std::vector<double> f;
  f.reserve(g.size());
  for (const Block& b : blocks) f.insert(f.end(), b.count, b.sum / static_cast<double>(b.count));
  return f;
}

std::vector<double> nnls(std::span<const double> m_colmajor, std::size_t rows,
                         std::span<const double> b) {
  const std::size_t cols = rows == 0 ? 0 : m_colmajor.size() / rows;
  if (cols * rows != m_colmajor.size() || b.size() != rows) {
    throw Error(ErrorCode::InvalidArgument, "nnls dimensions do not match");
  }
  const Eigen::Map<const Eigen::MatrixXd> m(m_colmajor.data(), rows, cols);
  const Eigen::Map<const Eigen::VectorXd> rhs(b.data(), rows);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(cols);
  std::vector<char> passive(cols, 0);
  const double tol = 10.0 * std::numeric_limits<double>::epsilon() *
                     m.cwiseAbs().colwise().sum().maxCoeff() *
                     static_cast<double>(std::max(rows, cols));

  auto solve_passive = [&](Eigen::VectorXd& z) {
    std::vector<Eigen::Index> p;
    for (std::size_t j = 0; j < cols; ++j) {
      if (passive[j]) p.push_back(static_cast<Eigen::Index>(j));
    }
    Eigen::MatrixXd mp(rows, p.size());
    for (std::size_t c = 0; c < p.size(); ++c) mp.col(c) = m.col(p[c]);
    const Eigen::VectorXd zp = mp.colPivHouseholderQr().solve(rhs);
    z.setZero(cols);
    for (std::size_t c = 0; c < p.size(); ++c) z[p[c]] = zp[c];
  };

  const std::size_t max_outer = 3 * cols + 10;
  for (std::size_t outer = 0; outer < max_outer; ++outer) {
    const Eigen::VectorXd w = m.transpose() * (rhs - m * x);
    std::size_t pick = cols;
    double wmax = tol;
    for (std::size_t j = 0; j < cols; ++j) {
      if (!passive[j] && w[j] > wmax) {
        wmax = w[j];
        pick = j;
      }
    }
    if (pick == cols) break;
    passive[pick] = 1;
    Eigen::VectorXd z;
    for (std::size_t inner = 0; inner < 3 * cols + 10; ++inner) {
      solve_passive(z);
      bool all_pos = true;
      for (std::size_t j = 0; j < cols; ++j) {
        if (passive[j] && z[j] <= 0.0) all_pos = false;
      }
      if (all_pos) break;
      double alpha = 1.0;
      for (std::size_t j = 0; j < cols; ++j) {
        if (passive[j] && z[j] <= 0.0) alpha = std::min(alpha, x[j] / (x[j] - z[j]));
      }
      x += alpha * (z - x);
      for (std::size_t j = 0; j < cols; ++j) {
        if (passive[j] && x[j] <= tol) {
          passive[j] = 0;
          x[j] = 0.0;
        }
      }
    }
    x = z;
    for (std::size_t j = 0; j < cols; ++j) {
      if (!passive[j]) x[j] = 0.0;
    }
  }
  return {x.data(), x.data() + cols};
}

namespace {

void check_mesh(std::span<const double> xs) {
  double hmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double h = xs[i] - xs[i - 1];
    if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "xs must increase strictly");
    hmin = std::min(hmin, h);
  }
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double r = (xs[i] - xs[i - 1]) / hmin;
    if (std::abs(r - std::round(r)) > 1e-6 * r) {
      throw Error(ErrorCode::NonUniformGrid, "spacings are not multiples of a common mesh width");
    }
  }
}

// Projection onto {sign * slope differences >= 0} through the NNLS dual:
// f = g - A^T lambda with lambda = argmin_{lambda >= 0} ||A^T lambda - g||.
std::vector<double> fit_curvature(std::span<const double> xs, std::span<const double> g,
                                  double sign) {
  if (xs.size() != g.size()) throw Error(ErrorCode::InvalidArgument, "xs and g differ in length");
  const std::size_t n = g.size();
  if (n < 3) throw Error(ErrorCode::InvalidArgument, "shape fit needs at least 3 nodes");
  check_mesh(xs);
  double hmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < n; ++i) hmin = std::min(hmin, xs[i] - xs[i - 1]);

  const std::size_t c = n - 2;
  std::vector<double> at(n * c, 0.0);  // A^T, column-major n x c
  for (std::size_t j = 0; j < c; ++j) {
    const double hl = (xs[j + 1] - xs[j]) / hmin;
    const double hr = (xs[j + 2] - xs[j + 1]) / hmin;
    // Row j of A f <= 0 is -sign * (slope_r - slope_l) in mesh units.
    at[j * n + j] = -sign / hl;
    at[j * n + j + 1] = sign * (1.0 / hl + 1.0 / hr);
    at[j * n + j + 2] = -sign / hr;
  }
  const std::vector<double> lambda = nnls(at, n, g);
  std::vector<double> f(g.begin(), g.end());
  for (std::size_t j = 0; j < c; ++j) {
    for (std::size_t r = j; r < j + 3; ++r) f[r] -= at[j * n + r] * lambda[j];
  }
  return f;
}

}  // namespace

std::vector<double> fit_convex(std::span<const double> xs, std::span<const double> g) {
  return fit_curvature(xs, g, 1.0);
}

std::vector<double> fit_concave(std::span<const double> xs, std::span<const double> g) {
  return fit_curvature(xs, g, -1.0);
}

SourceEstimate fit_source(std::span<const double> xs, std::span<const double> g,
                          ConstraintClass cls) {
  if (xs.size() != g.size()) throw Error(ErrorCode::InvalidArgument, "xs and g differ in length");
  SourceEstimate est;
  est.xs.assign(xs.begin(), xs.end());
  est.values.assign(xs.size(), kNaN);
  est.fitted.assign(xs.size(), 0);
  est.constraint_class = cls;
  std::vector<std::size_t> idx;
  std::vector<double> vx;
  std::vector<double> vg;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (std::isnan(g[i])) continue;
    idx.push_back(i);
    vx.push_back(xs[i]);
    vg.push_back(g[i]);
  }
  if (idx.size() < 2) throw Error(ErrorCode::InvalidArgument, "fewer than 2 valid targets");
  std::vector<double> f;
  switch (cls) {
    case ConstraintClass::none: f = vg; break;
    case ConstraintClass::monotone: f = fit_monotone(vg); break;
    case ConstraintClass::convex: f = fit_convex(vx, vg); break;
    case ConstraintClass::concave: f = fit_concave(vx, vg); break;
  }
  for (std::size_t j = 0; j < idx.size(); ++j) {
    est.values[idx[j]] = f[j];
    est.fitted[idx[j]] = 1;
  }
  return est;
}

SourceEstimate interpolate_across_layer(SourceEstimate est) {
  const std::size_t n = est.xs.size();
  std::size_t i = 0;
  while (i < n) {
    if (est.fitted[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && !est.fitted[j]) ++j;
    if (i == 0 || j == n) {
      throw Error(ErrorCode::OneSidedData, "no fitted value on one side of an unfilled region");
    }
    const double xa = est.xs[i - 1];
    const double xb = est.xs[j];
    const double fa = est.values[i - 1];
    const double fb = est.values[j];
    for (std::size_t q = i; q < j; ++q) {
      const double s = (est.xs[q] - xa) / (xb - xa);
      est.values[q] = fa + s * (fb - fa);
    }
    i = j;
  }
  return est;
}

}  // namespace aer
