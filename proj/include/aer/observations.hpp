#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "aer/fvm.hpp"

namespace aer {

/// Noisy snapshot of u (and optionally u_x) at one instant.
struct Observations {
  double t0 = 0.0;
  std::vector<double> xs;
  std::vector<double> u;
  std::optional<std::vector<double>> w;
  std::vector<unsigned char> mask;  ///< 0 marks a missing sample
  double delta = 0.0;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return xs.size(); }
  bool valid(std::size_t i) const { return mask.empty() || mask[i] != 0; }
  std::size_t valid_count() const;
  /// Throws InvalidArgument on length mismatch or non-increasing xs.
  void validate() const;
};

/// u_i <- [1 + delta(2 rand - 1)] u_i, then the same for w when kept.
/// All u draws precede all w draws, so the u noise does not depend on keep_w.
Observations add_noise(const ExactSamples& exact, double delta, std::uint64_t seed,
                       bool keep_w = true);

/// Clears the mask inside each [lo, hi] interval.
void mask_intervals(Observations& obs, const std::vector<std::pair<double, double>>& gaps);

}  // namespace aer
