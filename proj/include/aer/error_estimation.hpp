#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "aer/shape.hpp"

namespace aer {

/// {f : G f <= h}, G dense row-major with `dim` columns.
struct Polytope {
  std::size_t dim = 0;
  std::vector<double> g;
  std::vector<double> h;

  std::size_t rows() const noexcept { return h.size(); }
  /// max_j (G_j f - h_j), clipped below at 0.
  double max_violation(std::span<const double> f) const;
};

/// Source vectors consistent with the shape prior, the bounds [c_low, c_up] and
/// |f_i - a_i| <= radius at every anchored node (anchors are NaN elsewhere).
struct AdmissibleSet {
  ConstraintClass constraint_class = ConstraintClass::none;
  std::vector<double> xs;
  std::vector<double> anchors;
  double radius = 0.0;
  double c_low = 0.0;
  double c_up = 0.0;

  std::size_t size() const noexcept { return xs.size(); }
  /// Throws InvalidArgument on inconsistent sizes or c_low > c_up.
  void validate() const;
  /// Shape rows first, then the box, then the anchor rows. Convex/concave rows
  /// are slope differences in units of the smallest spacing.
  Polytope polytope() const;
  bool contains(std::span<const double> f, double tol = 1e-8) const;
  /// Per-node interval from the box and the anchor alone.
  double node_lower(std::size_t i) const;
  double node_upper(std::size_t i) const;
};

struct NodeExtremes {
  std::vector<double> low;
  std::vector<double> up;
  /// |primal - dual| objective per LP (2 per node); empty when no LP was solved.
  std::vector<double> duality_gaps;
};

/// min and max of each f_i over the set, one LP per bound. Class "none" is
/// separable and answered from the node intervals directly. Throws InfeasibleSet.
NodeExtremes coordinate_extremes(const AdmissibleSet& set);
NodeExtremes coordinate_extremes_serial(const AdmissibleSet& set);
/// LP route for every class, including "none"; reference for tests.
NodeExtremes coordinate_extremes_lp(const AdmissibleSet& set);

/// Lower/upper functions bracketing every member of the set.
///
/// monotone: left-continuous step of the lows, right-continuous step of the ups.
/// concave: chord of the lows below; above, the lower of the two secant
///   extensions through (x_{i-1}, low_{i-1}), (x_i, up_i) and
///   (x_{i+1}, up_{i+1}), (x_{i+2}, low_{i+2}), with chords of the ups on the two
///   end intervals.
/// convex: the concave construction applied to -f.
/// none: linear interpolation of the node extremes.
class Envelope {
 public:
  Envelope(ConstraintClass cls, std::vector<double> xs, std::vector<double> low,
           std::vector<double> up);
  double lower(double x) const;
  double upper(double x) const;
  ConstraintClass constraint_class() const noexcept { return cls_; }
  std::span<const double> xs() const noexcept { return xs_; }
  std::span<const double> node_low() const noexcept { return low_; }
  std::span<const double> node_up() const noexcept { return up_; }
  /// Interior intervals where the two secant extensions are parallel.
  std::size_t degenerate_breakpoints() const noexcept { return degenerate_; }
  /// Crossing point of the two secant extensions on [x_i, x_{i+1}] (concave
  /// orientation), or NaN when they are parallel or i is an end interval.
  double breakpoint(std::size_t i) const;

 private:
  std::size_t interval(double x) const;
  double concave_upper(std::span<const double> low, std::span<const double> up, double x) const;
  static double line(double xa, double fa, double xb, double fb, double x);

  ConstraintClass cls_;
  std::vector<double> xs_;
  std::vector<double> low_;
  std::vector<double> up_;
  std::size_t degenerate_ = 0;
};

Envelope make_envelope(ConstraintClass cls, std::span<const double> xs, const NodeExtremes& ext);

/// Vertices of a bounded polytope by breadth-first pivoting over feasible bases.
/// Throws InvalidArgument when more than max_bases bases are visited.
std::vector<std::vector<double>> enumerate_vertices(const Polytope& p,
                                                    std::size_t max_bases = 2000000);

enum class Delta1Mode { relaxed, exact };

struct Delta1 {
  double bar = 0.0;       ///< max ||f - f_delta||^2 (or its coordinate bound)
  double relative = 0.0;  ///< sqrt(bar) / ||f_delta||
  Delta1Mode mode = Delta1Mode::relaxed;
};

/// relaxed: sum_i max((up_i - fd_i)^2, (low_i - fd_i)^2), an upper bound on the
/// exact value. exact: maximum over the vertices (n <= 12). Throws
/// InfeasibleEstimate when f_delta is outside the set by more than 1e-8.
Delta1 aposteriori_delta1(const AdmissibleSet& set, const NodeExtremes& ext,
                          std::span<const double> f_delta, Delta1Mode mode = Delta1Mode::relaxed);

/// f_up(x) - f_low(x) at each x.
std::vector<double> pointwise_delta2(const Envelope& env, std::span<const double> xs);

struct ErrorReport {
  std::vector<double> xs;
  std::vector<double> f_delta;
  std::vector<double> f_low;  ///< envelope at the nodes
  std::vector<double> f_up;
  std::vector<double> delta2;
  std::vector<double> node_low;  ///< coordinate extremes
  std::vector<double> node_up;
  double delta1 = 0.0;
  double delta1_bar = 0.0;
  bool feasible = false;
  std::vector<double> duality_gaps;
};

/// Extremes, envelope, delta1 and delta2 at the nodes. f_delta must be feasible.
ErrorReport build_error_report(const AdmissibleSet& set, std::span<const double> f_delta,
                               Delta1Mode mode = Delta1Mode::relaxed);

}  // namespace aer
