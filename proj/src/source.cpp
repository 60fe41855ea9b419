#include "aer/source.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aer/error.hpp"

namespace aer {

namespace {

double checked(const SourceFunction::Callable& f, double x) {
  const double v = f(x);
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::NonFiniteSource, "f(" + std::to_string(x) + ") is not finite");
  }
  return v;
}

}  // namespace

SourceFunction SourceFunction::from_callable(Callable f, std::size_t n_quad) {
  if (n_quad < 64) throw Error(ErrorCode::InvalidArgument, "n_quad must be >= 64");
  auto d = std::make_shared<Data>();
  d->f = std::move(f);
  d->h = 1.0 / static_cast<double>(n_quad);
  d->F.assign(n_quad + 1, 0.0);
  d->f_nodes.resize(n_quad + 1);
  for (std::size_t j = 0; j <= n_quad; ++j) {
    d->f_nodes[j] = checked(d->f, static_cast<double>(j) * d->h);
  }
  double pos = 0.0;
  double neg = 0.0;
  for (std::size_t j = 0; j < n_quad; ++j) {
    const double a = d->f_nodes[j];
    const double m = checked(d->f, (static_cast<double>(j) + 0.5) * d->h);
    const double b = d->f_nodes[j + 1];
    d->F[j + 1] = d->F[j] + d->h / 6.0 * (a + 4.0 * m + b);
    pos += d->h / 6.0 * (std::max(a, 0.0) + 4.0 * std::max(m, 0.0) + std::max(b, 0.0));
    neg -= d->h / 6.0 * (std::min(a, 0.0) + 4.0 * std::min(m, 0.0) + std::min(b, 0.0));
  }
  d->pos_mass = pos;
  d->neg_mass = neg;
  return SourceFunction(std::move(d));
}

SourceFunction SourceFunction::from_samples(std::vector<double> xs, std::vector<double> fs,
                                            std::size_t n_quad) {
  if (xs.size() != fs.size() || xs.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "source table needs >= 2 matching samples");
  }
  if (!std::is_sorted(xs.begin(), xs.end()) ||
      std::adjacent_find(xs.begin(), xs.end()) != xs.end()) {
    throw Error(ErrorCode::InvalidArgument, "source table abscissae must be strictly increasing");
  }
  auto table = [xs = std::move(xs), fs = std::move(fs)](double x) {
    if (x <= xs.front()) return fs.front();
    if (x >= xs.back()) return fs.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const auto i = static_cast<std::size_t>(it - xs.begin()) - 1;
    const double s = (x - xs[i]) / (xs[i + 1] - xs[i]);
    return (1.0 - s) * fs[i] + s * fs[i + 1];
  };
  return from_callable(std::move(table), n_quad);
}

double SourceFunction::cumulative(double x) const {
  const Data& d = *data_;
  const std::size_t n = d.F.size() - 1;
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return d.F.back();
  const auto j = std::min(static_cast<std::size_t>(x / d.h), n - 1);
  const double s = (x - static_cast<double>(j) * d.h) / d.h;
  // Cubic Hermite on [x_j, x_{j+1}] with slopes f.
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  return h00 * d.F[j] + h10 * d.h * d.f_nodes[j] + h01 * d.F[j + 1] + h11 * d.h * d.f_nodes[j + 1];
}

SourceFunction build_cumulative(SourceFunction::Callable f, std::size_t n_quad) {
  return SourceFunction::from_callable(std::move(f), n_quad);
}

}  // namespace aer
