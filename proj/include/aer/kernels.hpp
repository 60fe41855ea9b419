#pragma once

// Data-parallel kernels. Each OpenMP kernel has a serial twin that is kept as
// the reference implementation for tests and benchmarks.

#include <span>
#include <vector>

#include "aer/asymptotics.hpp"

namespace aer::kernels {

enum class Part { full, regular };

/// values[j * xs.size() + i] = U0(xs[i], ts[j]).
std::vector<double> u0_lattice_serial(const AsymptoticSolution& sol, std::span<const double> xs,
                                      std::span<const double> ts, Part part = Part::full);
std::vector<double> u0_lattice(const AsymptoticSolution& sol, std::span<const double> xs,
                               std::span<const double> ts, Part part = Part::full);

struct L2Sums {
  double diff2 = 0.0;
  double ref2 = 0.0;
};

/// Sums of (a-b)^2 and b^2 over entries with keep[i] != 0 (all entries if keep is empty).
L2Sums l2_sums_serial(std::span<const double> a, std::span<const double> b,
                      std::span<const unsigned char> keep = {});
L2Sums l2_sums(std::span<const double> a, std::span<const double> b,
               std::span<const unsigned char> keep = {});

/// Threads for the parallel kernels: the OpenMP maximum, capped by AER_THREADS.
int thread_count();

}  // namespace aer::kernels
