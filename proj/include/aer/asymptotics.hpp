#pragma once

#include <string>
#include <vector>

#include "aer/source.hpp"

namespace aer {

/// Constants of the Burgers-type problem
///   mu u_xx - u_t = -k u u_x + f(x),  u(0,t) = u_left,  u(1,t) = u_right.
struct PhysicalSetup {
  double mu = 0.01;
  double k = 1.0;
  double u_left = -10.0;
  double u_right = 5.0;
  double t_final = 0.3;
  double x0_init = 0.1;

  /// Structural checks (mu in (0,1), k > 0, x0_init in (0,1), t_final > 0).
  /// The sign/gap condition on the boundary values is an assumption and is
  /// reported by check_assumptions rather than thrown here.
  void validate() const;
  bool boundary_condition_ok() const noexcept;
};

/// Zero-order outer solutions: the two branches of -k phi phi' + f = 0 pinned
/// at x = 0 (left) and x = 1 (right).
class RegularPair {
 public:
  RegularPair(PhysicalSetup setup, SourceFunction src) : setup_(setup), src_(std::move(src)) {}

  double left(double x) const;
  double right(double x) const;
  /// phi' = f / (k phi) on each branch.
  double left_dx(double x) const;
  double right_dx(double x) const;

  /// Half the jump phi_l - phi_r at x (negative under the assumptions).
  double amplitude_left(double x) const { return 0.5 * (left(x) - right(x)); }

  const PhysicalSetup& setup() const noexcept { return setup_; }
  const SourceFunction& source() const noexcept { return src_; }

 private:
  PhysicalSetup setup_;
  SourceFunction src_;
};

/// Throws NonrealRegularFunction if a radicand is <= 0 at any quadrature node.
RegularPair regular_functions(const PhysicalSetup& setup, const SourceFunction& src);

struct FrontOptions {
  double dt = 0.0;  ///< 0 selects t_final / 2000
  double margin = -1.0;  ///< < 0 selects min(10 mu, 0.1)
  double step_tolerance = 1e-9;  ///< bound on the step-doubling error estimate
};

/// Zero-order front x0(t) on a uniform time lattice.
struct FrontPath {
  std::vector<double> times;
  std::vector<double> x0;
  std::vector<double> v0;
  std::vector<double> p_left;   ///< P^l(x0(t)) = (phi_l - phi_r)/2 < 0
  std::vector<double> p_right;  ///< -P^l

  /// Cubic Hermite interpolation (values x0, slopes v0); t is clamped to the path.
  double position(double t) const;
  double velocity(double t) const;
  std::size_t size() const noexcept { return times.size(); }
};

/// Classical RK4 for dx0/dt = -(k/2)(phi_l(x0) + phi_r(x0)), x0(0) = x0_init.
/// Throws FrontExitedDomain when x0 leaves [margin, 1 - margin] and StepTooLarge
/// when the step-doubling error estimate exceeds the tolerance.
FrontPath integrate_front(const PhysicalSetup& setup, const RegularPair& reg,
                          const FrontOptions& opts = {});

/// Q0 at stretched coordinate xi, time t: left branch for xi <= 0, right for xi > 0.
double layer_profile_q0(const FrontPath& front, const RegularPair& reg,
                        const PhysicalSetup& setup, double t, double xi);

/// dQ0/dxi; positive on both branches.
double layer_profile_q0_dxi(const FrontPath& front, const RegularPair& reg,
                            const PhysicalSetup& setup, double t, double xi);

struct LayerGeometry {
  double width = 0.0;    ///< x_right - x_left
  double x_left = 0.0;   ///< |Q0^l| = mu^2 here
  double x_right = 0.0;  ///< |Q0^r| = mu^2 here
  double xi_hat = 0.0;   ///< stretched half width, same on both sides at zero order
};

/// Inverts |Q0| = mu^2 on each side of the front: xi_hat = ln(2|P|/mu^2 - 1)/(k|P|).
/// Throws DegenerateLayer when |P| <= mu^2 (no point where the layer drops to mu^2).
LayerGeometry layer_width(double amplitude, double front_position, const PhysicalSetup& setup);
LayerGeometry layer_width(const FrontPath& front, const RegularPair& reg,
                          const PhysicalSetup& setup, double t);

/// U0 = phi + Q0 on each side of x0(t).
class AsymptoticSolution {
 public:
  AsymptoticSolution(PhysicalSetup setup, RegularPair regular, FrontPath front)
      : setup_(setup), regular_(std::move(regular)), front_(std::move(front)) {}

  static AsymptoticSolution build(const PhysicalSetup& setup, const SourceFunction& src,
                                  const FrontOptions& opts = {});

  const PhysicalSetup& setup() const noexcept { return setup_; }
  const RegularPair& regular() const noexcept { return regular_; }
  const FrontPath& front() const noexcept { return front_; }

 private:
  PhysicalSetup setup_;
  RegularPair regular_;
  FrontPath front_;
};

/// Throws OutOfDomain outside [0,1] x [0,T]. At x = x0(t) the left branch is used.
double evaluate_u0(const AsymptoticSolution& sol, double x, double t);
double evaluate_u0_dx(const AsymptoticSolution& sol, double x, double t);
/// Outer part only: phi_l for x <= x0(t), phi_r otherwise.
double evaluate_regular_part(const AsymptoticSolution& sol, double x, double t);

struct AssumptionReport {
  bool a1 = false;
  bool a2 = false;
  bool a3 = false;
  bool a4_generated = true;  ///< informational: the default tanh profile is used
  std::vector<std::string> messages;

  bool ok() const noexcept { return a1 && a2 && a3; }
};

AssumptionReport check_assumptions(const PhysicalSetup& setup, const SourceFunction& src,
                                   const FrontOptions& opts = {});

}  // namespace aer
