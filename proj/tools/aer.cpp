// aer: command-line driver for the forward, inverse and error-estimation runs.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "aer/error.hpp"
#include "aer/experiment.hpp"
#include "aer/io.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kAssumptions = 2;
constexpr int kSolver = 3;
constexpr int kInfeasible = 4;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> delta;
  std::string out;
  bool plots = false;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool config_required) {
  auto* c = cmd->add_option("--config", f.config, "JSON experiment config");
  if (config_required) c->required();
  cmd->add_option("--seed", f.seed, "noise seed");
  cmd->add_option("--delta", f.delta, "relative noise level");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_flag("--plots", f.plots, "also write SVG plots");
}

void apply(aer::ExperimentConfig& cfg, const CommonFlags& f) {
  if (f.seed) cfg.seed = *f.seed;
  if (f.delta) cfg.delta = *f.delta;
  if (!f.out.empty()) cfg.out_dir = f.out;
  if (f.plots) cfg.plots = true;
  cfg.validate();
}

int exit_code(aer::ErrorCode code) {
  using aer::ErrorCode;
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::IoError:
      return kUsage;
    case ErrorCode::AssumptionViolated:
    case ErrorCode::NonrealRegularFunction:
    case ErrorCode::FrontExitedDomain:
    case ErrorCode::DegenerateLayer:
      return kAssumptions;
    case ErrorCode::InfeasibleSet:
      return kInfeasible;
    default:
      return kSolver;
  }
}

void print_forward(const aer::ForwardRun& fwd) {
  std::printf("forward: rel_error=%.6g rel_error_regular=%.6g (%.2f s)\n", fwd.rel_error,
              fwd.rel_error_regular, fwd.seconds);
}

void print_inverse(const aer::InverseRun& inv) {
  const auto& rep = inv.aer.report;
  std::printf("inverse: rel_error=%.6g delta1=%.6g delta1_bar=%.6g feasible=%d radius=%.6g (%.2f s)\n",
              inv.rel_error, rep.delta1, rep.delta1_bar, rep.feasible ? 1 : 0, inv.aer.set.radius,
              inv.seconds);
  if (!rep.feasible) std::fprintf(stderr, "warning: f_delta lies outside the admissible set\n");
}

int cmd_check(const aer::ExperimentConfig& cfg) {
  const auto rep = aer::check_assumptions(cfg.setup, cfg.source_function());
  for (const auto& m : rep.messages) std::printf("%s\n", m.c_str());
  std::printf("assumptions: %s\n", rep.ok() ? "ok" : "FAILED");
  return rep.ok() ? kOk : kAssumptions;
}

int cmd_forward(const aer::ExperimentConfig& cfg) {
  const auto fwd = aer::run_forward(cfg);
  aer::write_forward(cfg, fwd);
  print_forward(fwd);
  return kOk;
}

int cmd_invert(const aer::ExperimentConfig& cfg) {
  const auto fwd = aer::run_forward(cfg);
  const auto inv = aer::run_inverse(cfg, fwd);
  aer::write_inverse(cfg, inv);
  print_inverse(inv);
  return kOk;
}

int cmd_errors(const aer::ExperimentConfig& cfg, const std::string& obs_path) {
  const std::filesystem::path path = obs_path.empty() ? cfg.out_dir / "obs.csv" : std::filesystem::path(obs_path);
  auto obs = aer::io::parse_observations(aer::io::read_csv(path));
  const auto fwd = aer::run_forward(cfg);
  const auto inv = aer::run_inverse(cfg, fwd, std::move(obs));
  aer::write_inverse(cfg, inv);
  print_inverse(inv);
  return kOk;
}

int cmd_sweep(aer::ExperimentConfig cfg, const std::string& param, const std::vector<double>& values,
              std::optional<std::size_t> seeds) {
  aer::SweepSpec spec = cfg.sweep.value_or(aer::SweepSpec{});
  if (!param.empty()) {
    if (param != "delta" && param != "mu") {
      throw aer::Error(aer::ErrorCode::ConfigError, "--param must be delta or mu");
    }
    spec.parameter = param == "delta" ? aer::SweepParameter::delta : aer::SweepParameter::mu;
  }
  if (!values.empty()) spec.values = values;
  if (seeds) spec.seeds = *seeds;
  if (spec.values.empty()) throw aer::Error(aer::ErrorCode::ConfigError, "empty sweep list");
  const auto res = aer::run_sweep(cfg, spec);
  aer::io::write_atomic(cfg.out_dir / "sweep.csv", aer::sweep_csv(res));
  std::size_t ok = 0;
  for (const auto& r : res.rows) ok += r.status == "ok";
  std::printf("sweep: %zu/%zu runs ok", ok, res.rows.size());
  if (res.slope) std::printf(", log-log slope %.4f", *res.slope);
  std::printf("\n");
  if (ok == 0) return kSolver;
  return kOk;
}

int cmd_reproduce(aer::ExperimentConfig cfg) {
  aer::io::write_atomic(cfg.out_dir / "config.json", aer::config_to_json(cfg));
  const auto fwd = aer::run_forward(cfg);
  aer::write_forward(cfg, fwd);
  print_forward(fwd);
  const auto inv = aer::run_inverse(cfg, fwd);
  aer::write_inverse(cfg, inv);
  print_inverse(inv);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asymptotic expansion regularization: forward solves, source inversion, error bounds"};
  app.require_subcommand(1);

  CommonFlags flags;
  auto* check = app.add_subcommand("check-assumptions", "check the solvability assumptions");
  add_common(check, flags, true);
  auto* forward = app.add_subcommand("forward", "asymptotic and finite-volume solutions");
  add_common(forward, flags, true);
  auto* invert = app.add_subcommand("invert", "reconstruct the source from noisy data");
  add_common(invert, flags, true);
  auto* errors = app.add_subcommand("errors", "error bounds for stored observations");
  add_common(errors, flags, true);
  std::string obs_path;
  errors->add_option("--obs", obs_path, "observations CSV (default OUT/obs.csv)");
  auto* sweep = app.add_subcommand("sweep", "repeat the inversion over delta or mu");
  add_common(sweep, flags, true);
  std::string sweep_param;
  std::vector<double> sweep_values;
  std::optional<std::size_t> sweep_seeds;
  sweep->add_option("--param", sweep_param, "delta or mu");
  sweep->add_option("--values", sweep_values, "sweep values")->delimiter(',');
  sweep->add_option("--seeds", sweep_seeds, "seeds per value");
  auto* reproduce = app.add_subcommand("reproduce-example", "run a built-in example end to end");
  add_common(reproduce, flags, false);
  int example = 0;
  bool gap = false;
  reproduce->add_option("example", example, "1, 2 or 3")->required()->check(CLI::IsMember({1, 2, 3}));
  reproduce->add_flag("--gap", gap, "example 3 at t0 = 0.17 with samples in [0.77, 0.87] removed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (reproduce->parsed()) {
      if (gap && example != 3) {
        throw aer::Error(aer::ErrorCode::ConfigError, "--gap applies to example 3 only");
      }
      aer::ExperimentConfig cfg =
          flags.config.empty() ? aer::preset(gap ? "ex3-gap" : "ex" + std::to_string(example))
                               : aer::load_config(flags.config);
      if (flags.out.empty()) cfg.out_dir = "out/example" + std::to_string(example) + (gap ? "-gap" : "");
      apply(cfg, flags);
      return cmd_reproduce(cfg);
    }
    aer::ExperimentConfig cfg = aer::load_config(flags.config);
    apply(cfg, flags);
    if (check->parsed()) return cmd_check(cfg);
    if (forward->parsed()) return cmd_forward(cfg);
    if (invert->parsed()) return cmd_invert(cfg);
    if (errors->parsed()) return cmd_errors(cfg, obs_path);
    if (sweep->parsed()) return cmd_sweep(cfg, sweep_param, sweep_values, sweep_seeds);
  } catch (const aer::Error& e) {
    std::fprintf(stderr, "aer: %s\n", e.what());
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "aer: %s\n", e.what());
    return kSolver;
  }
  return kUsage;
}
