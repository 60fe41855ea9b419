#include "aer/error_estimation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <exception>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "aer/error.hpp"
#include "aer/kernels.hpp"
#include "aer/lp.hpp"

namespace aer {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

double Polytope::max_violation(std::span<const double> f) const {
  double worst = 0.0;
  for (std::size_t r = 0; r < rows(); ++r) {
    double s = -h[r];
    for (std::size_t j = 0; j < dim; ++j) s += g[r * dim + j] * f[j];
    worst = std::max(worst, s);
  }
  return worst;
}

void AdmissibleSet::validate() const {
  if (anchors.size() != xs.size()) {
    throw Error(ErrorCode::InvalidArgument, "anchors and xs differ in length");
  }
  if (xs.empty()) throw Error(ErrorCode::InvalidArgument, "empty admissible set grid");
  if (!(c_low <= c_up)) throw Error(ErrorCode::InvalidArgument, "c_low exceeds c_up");
  if (!(radius >= 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be >= 0");
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) throw Error(ErrorCode::InvalidArgument, "xs must increase strictly");
  }
}

double AdmissibleSet::node_lower(std::size_t i) const {
  return std::isnan(anchors[i]) ? c_low : std::max(c_low, anchors[i] - radius);
}

double AdmissibleSet::node_upper(std::size_t i) const {
  return std::isnan(anchors[i]) ? c_up : std::min(c_up, anchors[i] + radius);
}

Polytope AdmissibleSet::polytope() const {
  validate();
  const std::size_t n = size();
  Polytope p;
  p.dim = n;
  auto add_row = [&](std::initializer_list<std::pair<std::size_t, double>> entries, double rhs) {
    const std::size_t r = p.h.size();
    p.g.resize((r + 1) * n, 0.0);
    for (const auto& [j, v] : entries) p.g[r * n + j] = v;
    p.h.push_back(rhs);
  };
  switch (constraint_class) {
    case ConstraintClass::none: break;
    case ConstraintClass::monotone:
      for (std::size_t i = 0; i + 1 < n; ++i) add_row({{i, 1.0}, {i + 1, -1.0}}, 0.0);
      break;
    case ConstraintClass::convex:
    case ConstraintClass::concave: {
      double hmin = std::numeric_limits<double>::infinity();
      for (std::size_t i = 1; i < n; ++i) hmin = std::min(hmin, xs[i] - xs[i - 1]);
      const double s = constraint_class == ConstraintClass::convex ? 1.0 : -1.0;
      for (std::size_t i = 1; i + 1 < n; ++i) {
        const double il = hmin / (xs[i] - xs[i - 1]);
        const double ir = hmin / (xs[i + 1] - xs[i]);
        add_row({{i - 1, -s * il}, {i, s * (il + ir)}, {i + 1, -s * ir}}, 0.0);
      }
      break;
    }
  }
  for (std::size_t i = 0; i < n; ++i) add_row({{i, 1.0}}, c_up);
  for (std::size_t i = 0; i < n; ++i) add_row({{i, -1.0}}, -c_low);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isnan(anchors[i])) continue;
    add_row({{i, 1.0}}, anchors[i] + radius);
    add_row({{i, -1.0}}, -(anchors[i] - radius));
  }
  return p;
}

bool AdmissibleSet::contains(std::span<const double> f, double tol) const {
  if (f.size() != size()) return false;
  return polytope().max_violation(f) <= tol;
}

// ---------------------------------------------------------------------------

namespace {

struct LpBounds {
  double low;
  double up;
  double gap_low;
  double gap_up;
};

class ExtremeSolver {
 public:
  explicit ExtremeSolver(const AdmissibleSet& set) : set_(set), poly_(set.polytope()) {
    // f = c_low + y with y >= 0; every member has f >= c_low.
    shifted_h_ = poly_.h;
    for (std::size_t r = 0; r < poly_.rows(); ++r) {
      double s = 0.0;
      for (std::size_t j = 0; j < poly_.dim; ++j) s += poly_.g[r * poly_.dim + j];
      shifted_h_[r] -= s * set.c_low;
    }
  }

  LpBounds solve(std::size_t i) const {
    std::vector<double> c(poly_.dim, 0.0);
    c[i] = 1.0;
    const LpResult hi = solve_lp(c, poly_.g, shifted_h_);
    c[i] = -1.0;
    const LpResult lo = solve_lp(c, poly_.g, shifted_h_);
    if (hi.status != LpStatus::optimal || lo.status != LpStatus::optimal) {
      throw Error(ErrorCode::InfeasibleSet,
                  "admissible set is empty; the radius or the bounds are too tight");
    }
    return {set_.c_low - lo.objective, set_.c_low + hi.objective,
            std::abs(lo.objective - lo.dual_objective), std::abs(hi.objective - hi.dual_objective)};
  }

 private:
  const AdmissibleSet& set_;
  Polytope poly_;
  std::vector<double> shifted_h_;
};

NodeExtremes separable_extremes(const AdmissibleSet& set) {
  set.validate();
  NodeExtremes e;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const double lo = set.node_lower(i);
    const double hi = set.node_upper(i);
    if (lo > hi) {
      std::ostringstream msg;
      msg << "node " << i << " has an empty interval [" << lo << ", " << hi << "]";
      throw Error(ErrorCode::InfeasibleSet, msg.str());
    }
    e.low.push_back(lo);
    e.up.push_back(hi);
  }
  return e;
}

NodeExtremes lp_extremes(const AdmissibleSet& set, bool parallel) {
  const ExtremeSolver solver(set);
  const std::size_t n = set.size();
  NodeExtremes e;
  e.low.assign(n, 0.0);
  e.up.assign(n, 0.0);
  e.duality_gaps.assign(2 * n, 0.0);
  std::exception_ptr failure;
  auto body = [&](std::size_t i) {
    const LpBounds b = solver.solve(i);
    e.low[i] = b.low;
    e.up[i] = b.up;
    e.duality_gaps[2 * i] = b.gap_low;
    e.duality_gaps[2 * i + 1] = b.gap_up;
  };
  if (parallel) {
    const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic) num_threads(kernels::thread_count())
    for (long long i = 0; i < count; ++i) {
      try {
        body(static_cast<std::size_t>(i));
      } catch (...) {
#pragma omp critical(aer_extremes_failure)
        if (!failure) failure = std::current_exception();
      }
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) body(i);
  }
  if (failure) std::rethrow_exception(failure);
  return e;
}

}  // namespace

NodeExtremes coordinate_extremes(const AdmissibleSet& set) {
  if (set.constraint_class == ConstraintClass::none) return separable_extremes(set);
  return lp_extremes(set, true);
}

NodeExtremes coordinate_extremes_serial(const AdmissibleSet& set) {
  if (set.constraint_class == ConstraintClass::none) return separable_extremes(set);
  return lp_extremes(set, false);
}

NodeExtremes coordinate_extremes_lp(const AdmissibleSet& set) { return lp_extremes(set, false); }

// ---------------------------------------------------------------------------

Envelope::Envelope(ConstraintClass cls, std::vector<double> xs, std::vector<double> low,
                   std::vector<double> up)
    : cls_(cls), xs_(std::move(xs)), low_(std::move(low)), up_(std::move(up)) {
  if (xs_.size() < 2 || low_.size() != xs_.size() || up_.size() != xs_.size()) {
    throw Error(ErrorCode::InvalidArgument, "envelope needs at least 2 nodes and matching sizes");
  }
  if (cls_ == ConstraintClass::convex || cls_ == ConstraintClass::concave) {
    for (std::size_t i = 1; i + 2 < xs_.size(); ++i) {
      if (std::isnan(breakpoint(i))) ++degenerate_;
    }
  }
}

double Envelope::line(double xa, double fa, double xb, double fb, double x) {
  return fa + (fb - fa) * (x - xa) / (xb - xa);
}

std::size_t Envelope::interval(double x) const {
  const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - xs_.begin());
  return std::clamp<std::size_t>(j, 1, xs_.size() - 1) - 1;
}

double Envelope::breakpoint(std::size_t i) const {
  if (i == 0 || i + 2 >= xs_.size()) return kNaN;
  // Concave orientation; for convex the roles of low and up swap under f -> -f.
  const bool flip = cls_ == ConstraintClass::convex;
  auto lo = [&](std::size_t k) { return flip ? -up_[k] : low_[k]; };
  auto hi = [&](std::size_t k) { return flip ? -low_[k] : up_[k]; };
  const double s1 = (hi(i) - lo(i - 1)) / (xs_[i] - xs_[i - 1]);
  const double s2 = (lo(i + 2) - hi(i + 1)) / (xs_[i + 2] - xs_[i + 1]);
  if (std::abs(s1 - s2) <= 1e-14 * (1.0 + std::abs(s1) + std::abs(s2))) return kNaN;
  // hi(i) + s1 (x - x_i) = hi(i+1) + s2 (x - x_{i+1})
  return (hi(i + 1) - hi(i) + s1 * xs_[i] - s2 * xs_[i + 1]) / (s1 - s2);
}

double Envelope::concave_upper(std::span<const double> low, std::span<const double> up,
                               double x) const {
  const std::size_t n = xs_.size();
  const std::size_t i = interval(x);
  if (i == 0 || i + 2 >= n) return line(xs_[i], up[i], xs_[i + 1], up[i + 1], x);
  const double left = line(xs_[i - 1], low[i - 1], xs_[i], up[i], x);
  const double right = line(xs_[i + 1], up[i + 1], xs_[i + 2], low[i + 2], x);
  return std::min(left, right);
}

double Envelope::lower(double x) const {
  const std::size_t n = xs_.size();
  switch (cls_) {
    case ConstraintClass::monotone: {
      // low_i on (x_i, x_{i+1}], low_0 on [x_0, x_1].
      const auto it = std::lower_bound(xs_.begin(), xs_.end(), x);
      const std::size_t j = static_cast<std::size_t>(it - xs_.begin());
      return low_[j == 0 ? 0 : std::min(j - 1, n - 1)];
    }
    case ConstraintClass::convex: {
      std::vector<double> nl(n), nu(n);
      for (std::size_t k = 0; k < n; ++k) {
        nl[k] = -up_[k];
        nu[k] = -low_[k];
      }
      return -concave_upper(nl, nu, x);
    }
    case ConstraintClass::concave:
    case ConstraintClass::none: {
      const std::size_t i = interval(x);
      return line(xs_[i], low_[i], xs_[i + 1], low_[i + 1], x);
    }
  }
  return kNaN;
}

double Envelope::upper(double x) const {
  const std::size_t n = xs_.size();
  switch (cls_) {
    case ConstraintClass::monotone: {
      // up_{i+1} on [x_i, x_{i+1}), up_n at x_n.
      const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
      const std::size_t j = static_cast<std::size_t>(it - xs_.begin());
      return up_[std::min(j, n - 1)];
    }
    case ConstraintClass::concave: return concave_upper(low_, up_, x);
    case ConstraintClass::convex:
    case ConstraintClass::none: {
      const std::size_t i = interval(x);
      return line(xs_[i], up_[i], xs_[i + 1], up_[i + 1], x);
    }
  }
  return kNaN;
}

Envelope make_envelope(ConstraintClass cls, std::span<const double> xs, const NodeExtremes& ext) {
  return Envelope(cls, {xs.begin(), xs.end()}, ext.low, ext.up);
}

// ---------------------------------------------------------------------------

namespace {

using Basis = std::vector<std::size_t>;

double row_dot(const Polytope& p, std::size_t r, const Eigen::VectorXd& v) {
  double s = 0.0;
  for (std::size_t j = 0; j < p.dim; ++j) s += p.g[r * p.dim + j] * v[static_cast<Eigen::Index>(j)];
  return s;
}

double tight_tol(const Polytope& p, std::size_t r) { return 1e-9 * (1.0 + std::abs(p.h[r])); }

Eigen::VectorXd feasible_point(const Polytope& p) {
  // x = x+ - x-, maximise nothing.
  const std::size_t n = p.dim;
  std::vector<double> a(p.rows() * 2 * n);
  for (std::size_t r = 0; r < p.rows(); ++r) {
    for (std::size_t j = 0; j < n; ++j) {
      a[r * 2 * n + j] = p.g[r * n + j];
      a[r * 2 * n + n + j] = -p.g[r * n + j];
    }
  }
  const std::vector<double> c(2 * n, 0.0);
  const LpResult res = solve_lp(c, a, p.h);
  if (res.status != LpStatus::optimal) {
    throw Error(ErrorCode::InfeasibleSet, "polytope is empty");
  }
  Eigen::VectorXd x(n);
  for (std::size_t j = 0; j < n; ++j) x[static_cast<Eigen::Index>(j)] = res.x[j] - res.x[n + j];
  return x;
}

std::vector<std::size_t> tight_rows(const Polytope& p, const Eigen::VectorXd& x) {
  std::vector<std::size_t> t;
  for (std::size_t r = 0; r < p.rows(); ++r) {
    if (std::abs(row_dot(p, r, x) - p.h[r]) <= tight_tol(p, r)) t.push_back(r);
  }
  return t;
}

Eigen::MatrixXd rows_of(const Polytope& p, const std::vector<std::size_t>& rows) {
  Eigen::MatrixXd m(rows.size(), p.dim);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    for (std::size_t j = 0; j < p.dim; ++j) m(k, j) = p.g[rows[k] * p.dim + j];
  }
  return m;
}

// Moves x along null-space directions of the tight rows until they span R^n.
Eigen::VectorXd purify(const Polytope& p, Eigen::VectorXd x) {
  for (std::size_t guard = 0; guard <= p.dim + 1; ++guard) {
    const auto t = tight_rows(p, x);
    Eigen::MatrixXd gt = t.empty() ? Eigen::MatrixXd::Zero(1, p.dim) : rows_of(p, t);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(gt);
    lu.setThreshold(1e-10);
    if (!t.empty() && static_cast<std::size_t>(lu.rank()) == p.dim) return x;
    const Eigen::MatrixXd ker = lu.kernel();
    const Eigen::VectorXd d = ker.col(0);
    bool moved = false;
    for (double sign : {1.0, -1.0}) {
      const Eigen::VectorXd dir = sign * d;
      double step = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < p.rows(); ++r) {
        const double gd = row_dot(p, r, dir);
        if (gd > 1e-12) step = std::min(step, std::max(0.0, (p.h[r] - row_dot(p, r, x)) / gd));
      }
      if (std::isfinite(step)) {
        x += step * dir;
        moved = true;
        break;
      }
    }
    if (!moved) throw Error(ErrorCode::InvalidArgument, "polytope is unbounded");
  }
  throw Error(ErrorCode::InvalidArgument, "could not reach a vertex");
}

Basis initial_basis(const Polytope& p, const Eigen::VectorXd& x) {
  Basis b;
  Eigen::MatrixXd acc(0, p.dim);
  for (std::size_t r : tight_rows(p, x)) {
    Eigen::MatrixXd trial(acc.rows() + 1, p.dim);
    trial << acc, rows_of(p, {r});
    Eigen::FullPivLU<Eigen::MatrixXd> lu(trial);
    lu.setThreshold(1e-10);
    if (lu.rank() == trial.rows()) {
      acc = trial;
      b.push_back(r);
      if (b.size() == p.dim) break;
    }
  }
  if (b.size() != p.dim) throw Error(ErrorCode::InvalidArgument, "degenerate start vertex");
  std::sort(b.begin(), b.end());
  return b;
}

}  // namespace

std::vector<std::vector<double>> enumerate_vertices(const Polytope& p, std::size_t max_bases) {
  if (p.dim == 0) return {};
  const Eigen::VectorXd start = purify(p, feasible_point(p));
  const Basis b0 = initial_basis(p, start);

  std::set<Basis> seen{b0};
  std::deque<Basis> queue{b0};
  std::map<std::vector<long long>, std::vector<double>> vertices;
  double scale = 1.0;
  for (double v : p.h) scale = std::max(scale, std::abs(v));
  const double quantum = 1e-9 * scale;

  while (!queue.empty()) {
    const Basis b = queue.front();
    queue.pop_front();
    const Eigen::MatrixXd gb = rows_of(p, b);
    Eigen::VectorXd hb(p.dim);
    for (std::size_t k = 0; k < p.dim; ++k) hb[static_cast<Eigen::Index>(k)] = p.h[b[k]];
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(gb);
    const Eigen::VectorXd x = lu.solve(hb);
    const Eigen::MatrixXd inv = lu.inverse();

    std::vector<long long> key(p.dim);
    for (std::size_t j = 0; j < p.dim; ++j) key[j] = std::llround(x[static_cast<Eigen::Index>(j)] / quantum);
    vertices.try_emplace(key, std::vector<double>(x.data(), x.data() + p.dim));

    for (std::size_t k = 0; k < p.dim; ++k) {
      const Eigen::VectorXd d = -inv.col(static_cast<Eigen::Index>(k));
      double step = std::numeric_limits<double>::infinity();
      std::vector<std::pair<std::size_t, double>> cand;
      for (std::size_t r = 0; r < p.rows(); ++r) {
        if (std::binary_search(b.begin(), b.end(), r)) continue;
        const double gd = row_dot(p, r, d);
        if (gd <= 1e-12) continue;
        const double t = std::max(0.0, (p.h[r] - row_dot(p, r, x)) / gd);
        cand.emplace_back(r, t);
        step = std::min(step, t);
      }
      if (!std::isfinite(step)) throw Error(ErrorCode::InvalidArgument, "polytope is unbounded");
      for (const auto& [r, t] : cand) {
        if (t > step + 1e-10 * (1.0 + step)) continue;
        Basis nb = b;
        nb[k] = r;
        std::sort(nb.begin(), nb.end());
        if (seen.insert(nb).second) {
          if (seen.size() > max_bases) {
            throw Error(ErrorCode::InvalidArgument, "vertex enumeration exceeded its basis budget");
          }
          queue.push_back(std::move(nb));
        }
      }
    }
  }
  std::vector<std::vector<double>> out;
  out.reserve(vertices.size());
  for (auto& [k, v] : vertices) out.push_back(std::move(v));
  return out;
}

// ---------------------------------------------------------------------------

Delta1 aposteriori_delta1(const AdmissibleSet& set, const NodeExtremes& ext,
                          std::span<const double> f_delta, Delta1Mode mode) {
  if (f_delta.size() != set.size()) {
    throw Error(ErrorCode::InvalidArgument, "f_delta does not match the set dimension");
  }
  const Polytope poly = set.polytope();
  const double viol = poly.max_violation(f_delta);
  if (viol > 1e-8) {
    std::ostringstream msg;
    msg << "f_delta violates the admissible set by " << viol;
    throw Error(ErrorCode::InfeasibleEstimate, msg.str());
  }
  Delta1 d;
  d.mode = mode;
  if (mode == Delta1Mode::relaxed) {
    for (std::size_t i = 0; i < set.size(); ++i) {
      const double a = ext.up[i] - f_delta[i];
      const double b = ext.low[i] - f_delta[i];
      d.bar += std::max(a * a, b * b);
    }
  } else {
    if (set.size() > 12) {
      throw Error(ErrorCode::InvalidArgument, "exact delta1 is limited to 12 nodes");
    }
    for (const auto& v : enumerate_vertices(poly)) {
      double s = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) s += (v[i] - f_delta[i]) * (v[i] - f_delta[i]);
      d.bar = std::max(d.bar, s);
    }
  }
  double norm2 = 0.0;
  for (double v : f_delta) norm2 += v * v;
  d.relative = norm2 > 0.0 ? std::sqrt(d.bar / norm2) : std::numeric_limits<double>::infinity();
  return d;
}

std::vector<double> pointwise_delta2(const Envelope& env, std::span<const double> xs) {
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = env.upper(xs[i]) - env.lower(xs[i]);
  return out;
}

ErrorReport build_error_report(const AdmissibleSet& set, std::span<const double> f_delta,
                               Delta1Mode mode) {
  const NodeExtremes ext = coordinate_extremes(set);
  const Envelope env = make_envelope(set.constraint_class, set.xs, ext);
  ErrorReport r;
  r.xs = set.xs;
  r.f_delta.assign(f_delta.begin(), f_delta.end());
  r.node_low = ext.low;
  r.node_up = ext.up;
  r.duality_gaps = ext.duality_gaps;
  for (double x : set.xs) {
    r.f_low.push_back(env.lower(x));
    r.f_up.push_back(env.upper(x));
  }
  r.delta2 = pointwise_delta2(env, set.xs);
  r.feasible = set.polytope().max_violation(f_delta) <= 1e-8;
  if (r.feasible) {
    const Delta1 d = aposteriori_delta1(set, ext, f_delta, mode);
    r.delta1 = d.relative;
    r.delta1_bar = d.bar;
  } else {
    r.delta1 = kNaN;
    r.delta1_bar = kNaN;
  }
  return r;
}

}  // namespace aer
