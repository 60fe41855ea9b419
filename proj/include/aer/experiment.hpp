#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aer/fvm.hpp"
#include "aer/pipeline.hpp"

namespace aer {

inline constexpr int kConfigSchemaVersion = 1;

/// Named closed form ("ex1", "ex2", "ex3") or a table interpolated linearly.
struct SourceSpec {
  std::string name;
  std::vector<double> xs;
  std::vector<double> fs;

  std::function<double(double)> callable() const;
};

enum class SweepParameter { delta, mu };

struct SweepSpec {
  SweepParameter parameter = SweepParameter::delta;
  std::vector<double> values;
  std::size_t seeds = 1;
};

struct ExperimentConfig {
  std::string name;
  PhysicalSetup setup;
  SourceSpec source;
  std::size_t n_cells = 500;
  std::size_t n_obs = 20;  ///< observation nodes x_i = i / n_obs; must divide n_cells
  double t0 = 0.2;
  double delta = 0.01;
  std::uint64_t seed = 0;
  ConstraintClass constraint_class = ConstraintClass::none;
  WindowSource layer_mode = WindowSource::oracle;
  std::vector<std::pair<double, double>> gaps;
  bool observe_gradient = true;
  std::optional<double> c1;  ///< absent: calibrated on the noise-free samples of the run
  Reconstruction reconstruction = Reconstruction::piecewise_constant;
  double dt = 0.0;
  Delta1Mode delta1_mode = Delta1Mode::relaxed;
  std::filesystem::path out_dir = "out";
  bool plots = false;
  std::optional<SweepSpec> sweep;

  /// Throws ConfigError.
  void validate() const;
  SourceFunction source_function() const;
};

/// Parses one JSON document. Missing required keys, unknown keys, wrong types
/// and a schema version other than kConfigSchemaVersion throw ConfigError.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& cfg);

/// "ex1", "ex2", "ex3" and "ex3-gap" (t0 = 0.17, samples in [0.77, 0.87] removed).
ExperimentConfig preset(std::string_view name);

struct ForwardRun {
  AsymptoticSolution solution;
  FieldSeries fvm;
  double rel_error = 0.0;
  double rel_error_regular = 0.0;
  double seconds = 0.0;
};

/// Throws AssumptionViolated (naming the assumption) before any solve.
ForwardRun run_forward(const ExperimentConfig& cfg);

struct InverseRun {
  ExactSamples exact;
  Observations obs;
  double c1 = 0.0;
  AerResult aer;
  double rel_error = 0.0;
  double seconds = 0.0;
};

/// Samples the forward field at t0, adds noise, applies the gaps, runs the pipeline.
InverseRun run_inverse(const ExperimentConfig& cfg, const ForwardRun& fwd);
/// Same on given observations (t0 and delta taken from the config).
InverseRun run_inverse(const ExperimentConfig& cfg, const ForwardRun& fwd, Observations obs);

/// Noise-free samples at the observation nodes.
ExactSamples exact_samples(const ExperimentConfig& cfg, const FieldSeries& fvm);

/// u0.csv, fvm.csv, forward_report.csv, front.csv (+ SVG when cfg.plots).
void write_forward(const ExperimentConfig& cfg, const ForwardRun& fwd);
/// obs.csv, f_delta.csv, error_report.csv, error_report_scalars.csv,
/// invert_report.csv (+ SVG when cfg.plots).
void write_inverse(const ExperimentConfig& cfg, const InverseRun& inv);

struct SweepRow {
  double value = 0.0;
  std::uint64_t seed = 0;
  double rel_error = 0.0;
  double delta1 = 0.0;
  double link_ratio = 0.0;  ///< ||f - k u w||_L2 / (mu |ln mu|) on noise-free samples
  double seconds = 0.0;
  std::string status = "ok";
};

struct SweepResult {
  SweepParameter parameter = SweepParameter::delta;
  std::vector<SweepRow> rows;
  std::optional<double> slope;  ///< delta sweeps: log-log slope of the median error
};

/// One row per (value, seed). Rows run in parallel, capped by AER_THREADS.
/// Throws ConfigError for an empty value list; failed rows carry the error name.
SweepResult run_sweep(const ExperimentConfig& cfg, const SweepSpec& spec);
/// Rows, then a final "slope" row for delta sweeps.
std::string sweep_csv(const SweepResult& res);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> xs, std::span<const double> ys);

}  // namespace aer
