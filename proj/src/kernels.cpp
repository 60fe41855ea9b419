#include "aer/kernels.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace aer::kernels {

int thread_count() {
#ifdef _OPENMP
  int n = omp_get_max_threads();
#else
  int n = 1;
#endif
  if (const char* env = std::getenv("AER_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return n;
}

namespace {

double point_value(const AsymptoticSolution& sol, double x, double t, Part part) {
  return part == Part::full ? evaluate_u0(sol, x, t) : evaluate_regular_part(sol, x, t);
}

}  // namespace

std::vector<double> u0_lattice_serial(const AsymptoticSolution& sol, std::span<const double> xs,
                                      std::span<const double> ts, Part part) {
  std::vector<double> out(xs.size() * ts.size());
  for (std::size_t j = 0; j < ts.size(); ++j) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      out[j * xs.size() + i] = point_value(sol, xs[i], ts[j], part);
    }
  }
  return out;
}

std::vector<double> u0_lattice(const AsymptoticSolution& sol, std::span<const double> xs,
                               std::span<const double> ts, Part part) {
  std::vector<double> out(xs.size() * ts.size());
  const auto nx = static_cast<long>(xs.size());
  const auto total = static_cast<long>(out.size());
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (long idx = 0; idx < total; ++idx) {
    const auto j = static_cast<std::size_t>(idx / nx);
    const auto i = static_cast<std::size_t>(idx % nx);
    out[static_cast<std::size_t>(idx)] = point_value(sol, xs[i], ts[j], part);
  }
  return out;
}

L2Sums l2_sums_serial(std::span<const double> a, std::span<const double> b,
                      std::span<const unsigned char> keep) {
  L2Sums s;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!keep.empty() && keep[i] == 0) continue;
    const double d = a[i] - b[i];
    s.diff2 += d * d;
    s.ref2 += b[i] * b[i];
  }
  return s;
}

L2Sums l2_sums(std::span<const double> a, std::span<const double> b,
               std::span<const unsigned char> keep) {
  double diff2 = 0.0;
  double ref2 = 0.0;
  const auto n = static_cast<long>(a.size());
  const bool masked = !keep.empty();
#pragma omp parallel for schedule(static) reduction(+ : diff2, ref2) num_threads(thread_count())
  for (long i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    if (masked && keep[u] == 0) continue;
    const double d = a[u] - b[u];
    diff2 += d * d;
    ref2 += b[u] * b[u];
  }
  return {diff2, ref2};
}

}  // namespace aer::kernels
