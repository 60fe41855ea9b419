#include "aer/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "aer/error.hpp"

namespace aer {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-10;

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), t_((rows + 1) * (cols + 1), 0.0) {}
  double& at(std::size_t r, std::size_t c) { return t_[r * (cols_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return t_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  // Row rows_ is the cost row: reduced profits c_j - z_j, and -z in the rhs slot.
  double& cost(std::size_t c) { return at(rows_, c); }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  void pivot(std::size_t pr, std::size_t pc) {
    const double inv = 1.0 / at(pr, pc);
    for (std::size_t c = 0; c <= cols_; ++c) at(pr, c) *= inv;
    at(pr, pc) = 1.0;
    for (std::size_t r = 0; r <= rows_; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c <= cols_; ++c) at(r, c) -= f * at(pr, c);
      at(r, pc) = 0.0;
    }
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> t_;
};

// Bland's rule: lowest-index improving column, ties in the ratio test to the
// lowest-index basic variable.
LpStatus run_simplex(Tableau& t, std::vector<std::size_t>& basis, std::size_t allowed_cols,
                     std::size_t& pivots) {
  const std::size_t max_pivots = 50000 + 100 * (t.rows() + t.cols());
  while (true) {
    std::size_t enter = allowed_cols;
    for (std::size_t c = 0; c < allowed_cols; ++c) {
      if (t.cost(c) > kCostTol) {
        enter = c;
        break;
      }
    }
    if (enter == allowed_cols) return LpStatus::optimal;
    std::size_t leave = t.rows();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < t.rows(); ++r) {
      const double a = t.at(r, enter);
      if (a <= kPivotTol) continue;
      const double ratio = t.rhs(r) / a;
      const double tie = 1e-12 * (1.0 + std::abs(best));
      if (leave == t.rows() || ratio < best - tie) {
        leave = r;
        best = ratio;
      } else if (ratio <= best + tie && basis[r] < basis[leave]) {
        leave = r;
        best = std::min(best, ratio);
      }
    }
    if (leave == t.rows()) return LpStatus::unbounded;
    t.pivot(leave, enter);
    basis[leave] = enter;
    if (++pivots > max_pivots) {
      throw Error(ErrorCode::InvalidArgument, "simplex exceeded its pivot budget");
    }
  }
}

}  // namespace

LpResult solve_lp(std::span<const double> c, std::span<const double> a, std::span<const double> b) {
  const std::size_t n = c.size();
  const std::size_t m = b.size();
  if (a.size() != m * n) throw Error(ErrorCode::InvalidArgument, "LP matrix has the wrong size");

  std::vector<char> flipped(m, 0);
  std::size_t n_art = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (b[i] < 0.0) {
      flipped[i] = 1;
      ++n_art;
    }
  }
  // Columns: x (n), slacks (m), artificials (n_art).
  const std::size_t slack0 = n;
  const std::size_t art0 = n + m;
  Tableau t(m, n + m + n_art);
  std::vector<std::size_t> basis(m);
  std::size_t art = art0;
  for (std::size_t i = 0; i < m; ++i) {
    const double s = flipped[i] ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) t.at(i, j) = s * a[i * n + j];
    t.at(i, slack0 + i) = s;
    t.rhs(i) = s * b[i];
    if (flipped[i]) {
      t.at(i, art) = 1.0;
      basis[i] = art++;
    } else {
      basis[i] = slack0 + i;
    }
  }

  LpResult res;
  if (n_art > 0) {
    // Phase 1: maximise -sum(artificials).
    for (std::size_t i = 0; i < m; ++i) {
      if (!flipped[i]) continue;
      for (std::size_t col = 0; col <= t.cols(); ++col) {
        if (col >= art0 && col < art0 + n_art) continue;
        t.at(m, col) += t.at(i, col);
      }
    }
    run_simplex(t, basis, t.cols(), res.pivots);
    double infeas = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      if (basis[r] >= art0) infeas += t.rhs(r);
    }
    double scale = 1.0;
    for (double v : b) scale = std::max(scale, std::abs(v));
    if (infeas > 1e-9 * scale) {
      res.status = LpStatus::infeasible;
      return res;
    }
    // Drive zero-level artificials out where a structural or slack column allows it.
    for (std::size_t r = 0; r < m; ++r) {
      if (basis[r] < art0) continue;
      for (std::size_t col = 0; col < art0; ++col) {
        if (std::abs(t.at(r, col)) > 1e-9) {
          t.pivot(r, col);
          basis[r] = col;
          ++res.pivots;
          break;
        }
      }
    }
  }

  // Phase 2 cost row.
  for (std::size_t col = 0; col <= t.cols(); ++col) t.cost(col) = 0.0;
  for (std::size_t j = 0; j < n; ++j) t.cost(j) = c[j];
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t bc = basis[r];
    const double cb = bc < n ? c[bc] : 0.0;
    if (cb == 0.0) continue;
    for (std::size_t col = 0; col <= t.cols(); ++col) t.cost(col) -= cb * t.at(r, col);
  }
  res.status = run_simplex(t, basis, art0, res.pivots);
  if (res.status != LpStatus::optimal) return res;

  res.x.assign(n, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    if (basis[r] < n) res.x[basis[r]] = t.rhs(r);
  }
  res.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) res.objective += c[j] * res.x[j];
  res.duals.assign(m, 0.0);
  res.dual_objective = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double y = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      const std::size_t bc = basis[r];
      if (bc < n) y += c[bc] * t.at(r, slack0 + i);
    }
    res.duals[i] = y;
    res.dual_objective += y * b[i];
  }
  return res;
}

}  // namespace aer
