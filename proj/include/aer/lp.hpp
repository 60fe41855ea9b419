#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace aer {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> x;
  double objective = 0.0;
  std::vector<double> duals;  ///< y >= 0 per inequality row, A^T y >= c at optimum
  double dual_objective = 0.0;
  std::size_t pivots = 0;
};

/// max c^T x  s.t.  A x <= b, x >= 0, with A dense row-major (rows x c.size()).
/// Two-phase tableau simplex with Bland's rule, so it terminates on degenerate
/// problems. Duals come from the slack columns of the final tableau.
LpResult solve_lp(std::span<const double> c, std::span<const double> a, std::span<const double> b);

}  // namespace aer
