// Serial reference kernels against their OpenMP twins. Thread count follows
// OMP_NUM_THREADS and AER_THREADS.
#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "aer/error_estimation.hpp"
#include "aer/kernels.hpp"

using namespace aer;

namespace {

const AsymptoticSolution& ex1() {
  static const AsymptoticSolution sol = AsymptoticSolution::build(
      PhysicalSetup{}, SourceFunction::from_callable([](double x) { return x - x * x + x * x * x; }));
  return sol;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

template <bool Parallel>
void bm_u0_lattice(benchmark::State& state) {
  const auto xs = linspace(0.0, 1.0, static_cast<std::size_t>(state.range(0)) + 1);
  const auto ts = linspace(0.0, 0.3, 201);
  for (auto _ : state) {
    auto v = Parallel ? kernels::u0_lattice(ex1(), xs, ts) : kernels::u0_lattice_serial(ex1(), xs, ts);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(xs.size() * ts.size()));
}

template <bool Parallel>
void bm_l2_sums(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::vector<double> a(n);
  std::vector<double> b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = g(rng);
    b[i] = g(rng);
  }
  for (auto _ : state) {
    auto s = Parallel ? kernels::l2_sums(a, b) : kernels::l2_sums_serial(a, b);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}

template <bool Parallel>
void bm_coordinate_extremes(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  AdmissibleSet set;
  set.constraint_class = ConstraintClass::monotone;
  set.radius = 0.05;
  set.c_low = -1.0;
  set.c_up = 3.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(n - 1);
    set.xs.push_back(x);
    set.anchors.push_back(x - x * x + x * x * x + 0.02 * std::sin(37.0 * x));
  }
  for (auto _ : state) {
    auto e = Parallel ? coordinate_extremes(set) : coordinate_extremes_serial(set);
    benchmark::DoNotOptimize(e.low.data());
  }
}

}  // namespace

BENCHMARK(bm_u0_lattice<false>)->Name("u0_lattice/serial")->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_u0_lattice<true>)->Name("u0_lattice/openmp")->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_l2_sums<false>)->Name("l2_sums/serial")->Arg(1 << 20);
BENCHMARK(bm_l2_sums<true>)->Name("l2_sums/openmp")->Arg(1 << 20);
BENCHMARK(bm_coordinate_extremes<false>)->Name("coordinate_extremes/serial")->Arg(20)->Arg(60)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_coordinate_extremes<true>)->Name("coordinate_extremes/openmp")->Arg(20)->Arg(60)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
