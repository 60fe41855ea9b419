#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace aer {

/// Source term f(x) on [0,1] together with its running integral F(x) = int_0^x f.
///
/// F is tabulated once by per-panel Simpson quadrature on a uniform grid and
/// evaluated between nodes by cubic Hermite interpolation (F' = f is known
/// exactly at the nodes). Copies share the immutable tables.
class SourceFunction {
 public:
  using Callable = std::function<double(double)>;

  static constexpr std::size_t kDefaultPanels = 4096;

  /// Closed-form source. Throws NonFiniteSource if f is not finite on the grid.
  static SourceFunction from_callable(Callable f, std::size_t n_quad = kDefaultPanels);

  /// Tabulated source with piecewise-linear interpolation between samples.
  static SourceFunction from_samples(std::vector<double> xs, std::vector<double> fs,
                                     std::size_t n_quad = kDefaultPanels);

  double operator()(double x) const { return data_->f(x); }
  double cumulative(double x) const;
  double total() const noexcept { return data_->F.back(); }
  double pos_mass() const noexcept { return data_->pos_mass; }
  double neg_mass() const noexcept { return data_->neg_mass; }

  std::size_t panels() const noexcept { return data_->F.size() - 1; }
  std::span<const double> cumulative_nodes() const noexcept { return data_->F; }
  double node(std::size_t j) const noexcept { return static_cast<double>(j) * data_->h; }

 private:
  struct Data {
    Callable f;
    double h = 0.0;
    std::vector<double> F;
    std::vector<double> f_nodes;
    double pos_mass = 0.0;
    double neg_mass = 0.0;
  };
  explicit SourceFunction(std::shared_ptr<const Data> d) : data_(std::move(d)) {}

  std::shared_ptr<const Data> data_;
};

/// Tabulates F(x) with n_quad Simpson panels (n_quad >= 64).
SourceFunction build_cumulative(SourceFunction::Callable f,
                                std::size_t n_quad = SourceFunction::kDefaultPanels);

}  // namespace aer
