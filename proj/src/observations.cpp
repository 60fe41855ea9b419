#include "aer/observations.hpp"

#include <random>

#include "aer/error.hpp"

namespace aer {

std::size_t Observations::valid_count() const {
  std::size_t c = 0;
  for (std::size_t i = 0; i < size(); ++i) c += valid(i) ? 1 : 0;
  return c;
}

void Observations::validate() const {
  if (u.size() != xs.size()) throw Error(ErrorCode::InvalidArgument, "u and xs differ in length");
  if (w && w->size() != xs.size()) {
    throw Error(ErrorCode::InvalidArgument, "w and xs differ in length");
  }
  if (!mask.empty() && mask.size() != xs.size()) {
    throw Error(ErrorCode::InvalidArgument, "mask and xs differ in length");
  }
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) throw Error(ErrorCode::InvalidArgument, "xs must increase strictly");
  }
  if (!(delta >= 0.0)) throw Error(ErrorCode::InvalidArgument, "delta must be >= 0");
}

Observations add_noise(const ExactSamples& exact, double delta, std::uint64_t seed, bool keep_w) {
  if (!(delta >= 0.0)) throw Error(ErrorCode::InvalidArgument, "delta must be >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Observations obs;
  obs.t0 = exact.t0;
  obs.xs = exact.xs;
  obs.delta = delta;
  obs.seed = seed;
  obs.mask.assign(exact.xs.size(), 1);
  obs.u.resize(exact.u.size());
  for (std::size_t i = 0; i < exact.u.size(); ++i) {
    obs.u[i] = (1.0 + delta * (2.0 * unit(rng) - 1.0)) * exact.u[i];
  }
  if (keep_w) {
    std::vector<double> w(exact.w.size());
    for (std::size_t i = 0; i < exact.w.size(); ++i) {
      w[i] = (1.0 + delta * (2.0 * unit(rng) - 1.0)) * exact.w[i];
    }
    obs.w = std::move(w);
  }
  return obs;
}

void mask_intervals(Observations& obs, const std::vector<std::pair<double, double>>& gaps) {
  if (obs.mask.empty()) obs.mask.assign(obs.size(), 1);
  for (const auto& [lo, hi] : gaps) {
    if (!(lo < hi)) throw Error(ErrorCode::InvalidArgument, "gap bounds must satisfy lo < hi");
    for (std::size_t i = 0; i < obs.size(); ++i) {
      if (obs.xs[i] >= lo && obs.xs[i] <= hi) obs.mask[i] = 0;
    }
  }
}

}  // namespace aer
