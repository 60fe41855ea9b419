#include "aer/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "aer/error.hpp"
#include "aer/io.hpp"
#include "aer/kernels.hpp"
#include "aer/svg.hpp"

namespace aer {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kSnapshots = 201;

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

// ---- JSON access ----------------------------------------------------------

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed,
                    const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      config_error("unknown key '" + where + key + "'");
    }
  }
}

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) config_error("missing required key '" + where + key + "'");
  return obj.at(key);
}

const json& require_object(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_object()) config_error("'" + where + key + "' must be an object");
  return v;
}

double as_number(const json& v, const std::string& name) {
  if (!v.is_number()) config_error("'" + name + "' must be a number");
  return v.get<double>();
}

std::uint64_t as_count(const json& v, const std::string& name) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    config_error("'" + name + "' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

bool as_bool(const json& v, const std::string& name) {
  if (!v.is_boolean()) config_error("'" + name + "' must be true or false");
  return v.get<bool>();
}

std::string as_string(const json& v, const std::string& name) {
  if (!v.is_string()) config_error("'" + name + "' must be a string");
  return v.get<std::string>();
}

std::vector<double> as_numbers(const json& v, const std::string& name) {
  if (!v.is_array()) config_error("'" + name + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) out.push_back(as_number(e, name + "[]"));
  return out;
}

WindowSource parse_layer_mode(const std::string& s) {
  if (s == "oracle") return WindowSource::oracle;
  if (s == "data") return WindowSource::data;
  config_error("layer_mode must be 'oracle' or 'data', got '" + s + "'");
}

const char* layer_mode_name(WindowSource w) { return w == WindowSource::oracle ? "oracle" : "data"; }

Reconstruction parse_reconstruction(const std::string& s) {
  if (s == "rusanov") return Reconstruction::piecewise_constant;
  if (s == "muscl") return Reconstruction::muscl_minmod;
  config_error("solver.reconstruction must be 'rusanov' or 'muscl', got '" + s + "'");
}

Delta1Mode parse_delta1_mode(const std::string& s) {
  if (s == "relaxed") return Delta1Mode::relaxed;
  if (s == "exact") return Delta1Mode::exact;
  config_error("delta1_mode must be 'relaxed' or 'exact', got '" + s + "'");
}

SweepParameter parse_sweep_parameter(const std::string& s) {
  if (s == "delta") return SweepParameter::delta;
  if (s == "mu") return SweepParameter::mu;
  config_error("sweep.parameter must be 'delta' or 'mu', got '" + s + "'");
}

const char* sweep_parameter_name(SweepParameter p) {
  return p == SweepParameter::delta ? "delta" : "mu";
}

// ---- run helpers ----------------------------------------------------------

/// The 201 uniform snapshots, without the extra t0 instant.
FieldSeries uniform_part(const FieldSeries& fvm, double t_final) {
  const auto times = uniform_times(t_final, kSnapshots);
  FieldSeries out;
  out.grid = fvm.grid;
  out.setup = fvm.setup;
  out.times = times;
  out.values.reserve(times.size() * fvm.grid.size());
  for (double t : times) {
    const auto snap = fvm.snapshot(fvm.time_index(t));
    out.values.insert(out.values.end(), snap.begin(), snap.end());
  }
  return out;
}

std::string join_failed(const AssumptionReport& rep) {
  std::string msg;
  for (const auto& m : rep.messages) {
    if (m.find("failed") == std::string::npos && m.find("not checked") == std::string::npos) {
      continue;
    }
    if (!msg.empty()) msg += "; ";
    msg += m;
  }
  return msg;
}

std::string empty_if_nan(double v) { return std::isnan(v) ? std::string() : io::format_double(v); }

std::string row(std::initializer_list<std::string> fields) {
  std::string out;
  bool first = true;
  for (const auto& f : fields) {
    if (!first) out += ',';
    out += f;
    first = false;
  }
  return out + '\n';
}

}  // namespace

// ---- config ---------------------------------------------------------------

std::function<double(double)> SourceSpec::callable() const {
  if (name == "ex1") return [](double x) { return x - x * x + x * x * x; };
  if (name == "ex2") return [](double x) { return std::sqrt(std::max(0.0, x - x * x)); };
  if (name == "ex3") return [](double x) { return x * std::sin(3.0 * std::numbers::pi * x); };
  if (name == "table") {
    auto xs = this->xs;
    auto fs = this->fs;
    return [xs, fs](double x) { return interpolate_linear(xs, fs, x); };
  }
  config_error("unknown source '" + name + "'");
}

SourceFunction ExperimentConfig::source_function() const {
  if (source.name == "table") return SourceFunction::from_samples(source.xs, source.fs);
  return SourceFunction::from_callable(source.callable());
}

void ExperimentConfig::validate() const {
  try {
    setup.validate();
  } catch (const Error& e) {
    config_error(std::string("setup: ") + e.what());
  }
  if (source.name == "table") {
    if (source.xs.size() < 2 || source.xs.size() != source.fs.size()) {
      config_error("source table needs matching x and f arrays of length >= 2");
    }
    for (std::size_t i = 1; i < source.xs.size(); ++i) {
      if (!(source.xs[i] > source.xs[i - 1])) config_error("source table x must increase");
    }
  } else if (source.name != "ex1" && source.name != "ex2" && source.name != "ex3") {
    config_error("source must be 'ex1', 'ex2', 'ex3' or a table");
  }
  if (n_cells < 4) config_error("grid.n_cells must be >= 4");
  if (n_obs < 2 || n_cells % n_obs != 0) {
    config_error("grid.n_obs must be >= 2 and divide grid.n_cells");
  }
  if (!(t0 > 0.0 && t0 <= setup.t_final)) config_error("t0 must lie in (0, t_final]");
  if (!(delta >= 0.0 && delta < 1.0)) config_error("delta must lie in [0, 1)");
  if (!observe_gradient && !(delta > 0.0)) {
    config_error("delta must be > 0 when the gradient is not observed");
  }
  for (const auto& [lo, hi] : gaps) {
    if (!(lo < hi)) config_error("each gap needs lo < hi");
  }
  if (c1 && !(*c1 >= 0.0)) config_error("c1 must be >= 0");
  if (!(dt >= 0.0)) config_error("solver.dt must be >= 0");
  if (sweep) {
    if (sweep->values.empty()) config_error("sweep.values must not be empty");
    if (sweep->seeds == 0) config_error("sweep.seeds must be >= 1");
    for (double v : sweep->values) {
      const bool ok = sweep->parameter == SweepParameter::delta ? (v >= 0.0 && v < 1.0)
                                                                 : (v > 0.0 && v < 1.0);
      if (!ok) config_error("sweep value out of range");
    }
  }
}

ExperimentConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    config_error(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) config_error("config must be a JSON object");
  reject_unknown(doc,
                 {"schema_version", "name", "setup", "source", "grid", "t0", "delta", "seed",
                  "constraint_class", "layer_mode", "gaps", "observe_gradient", "c1", "solver",
                  "delta1_mode", "outputs", "sweep"},
                 "");

  const auto version = as_count(require(doc, "schema_version", ""), "schema_version");
  if (version != static_cast<std::uint64_t>(kConfigSchemaVersion)) {
    config_error("unsupported schema_version " + std::to_string(version));
  }

  ExperimentConfig cfg;
  if (doc.contains("name")) cfg.name = as_string(doc["name"], "name");

  const json& setup = require_object(doc, "setup", "");
  reject_unknown(setup, {"mu", "k", "u_left", "u_right", "t_final", "x0_init"}, "setup.");
  cfg.setup.mu = as_number(require(setup, "mu", "setup."), "setup.mu");
  cfg.setup.k = as_number(require(setup, "k", "setup."), "setup.k");
  cfg.setup.u_left = as_number(require(setup, "u_left", "setup."), "setup.u_left");
  cfg.setup.u_right = as_number(require(setup, "u_right", "setup."), "setup.u_right");
  cfg.setup.t_final = as_number(require(setup, "t_final", "setup."), "setup.t_final");
  cfg.setup.x0_init = as_number(require(setup, "x0_init", "setup."), "setup.x0_init");

  const json& src = require(doc, "source", "");
  if (src.is_string()) {
    cfg.source.name = src.get<std::string>();
    if (cfg.source.name == "table") config_error("a table source is given as {\"x\": [...], \"f\": [...]}");
  } else if (src.is_object()) {
    reject_unknown(src, {"x", "f"}, "source.");
    cfg.source.name = "table";
    cfg.source.xs = as_numbers(require(src, "x", "source."), "source.x");
    cfg.source.fs = as_numbers(require(src, "f", "source."), "source.f");
  } else {
    config_error("source must be a name or a table object");
  }

  const json& grid = require_object(doc, "grid", "");
  reject_unknown(grid, {"n_cells", "n_obs"}, "grid.");
  cfg.n_cells = as_count(require(grid, "n_cells", "grid."), "grid.n_cells");
  cfg.n_obs = as_count(require(grid, "n_obs", "grid."), "grid.n_obs");

  cfg.t0 = as_number(require(doc, "t0", ""), "t0");
  cfg.delta = as_number(require(doc, "delta", ""), "delta");
  cfg.seed = as_count(require(doc, "seed", ""), "seed");
  {
    const auto name = as_string(require(doc, "constraint_class", ""), "constraint_class");
    const auto cls = parse_constraint_class(name);
    if (!cls) config_error("constraint_class must be none, monotone, convex or concave, got '" + name + "'");
    cfg.constraint_class = *cls;
  }
  cfg.layer_mode = parse_layer_mode(as_string(require(doc, "layer_mode", ""), "layer_mode"));

  if (doc.contains("gaps")) {
    const json& gaps = doc["gaps"];
    if (!gaps.is_array()) config_error("'gaps' must be an array of [lo, hi] pairs");
    for (const auto& g : gaps) {
      const auto pair = as_numbers(g, "gaps[]");
      if (pair.size() != 2) config_error("each gap is a [lo, hi] pair");
      cfg.gaps.emplace_back(pair[0], pair[1]);
    }
  }
  if (doc.contains("observe_gradient")) {
    cfg.observe_gradient = as_bool(doc["observe_gradient"], "observe_gradient");
  }
  if (doc.contains("c1")) cfg.c1 = as_number(doc["c1"], "c1");
  if (doc.contains("solver")) {
    const json& s = doc["solver"];
    if (!s.is_object()) config_error("'solver' must be an object");
    reject_unknown(s, {"reconstruction", "dt"}, "solver.");
    if (s.contains("reconstruction")) {
      cfg.reconstruction = parse_reconstruction(as_string(s["reconstruction"], "solver.reconstruction"));
    }
    if (s.contains("dt")) cfg.dt = as_number(s["dt"], "solver.dt");
  }
  if (doc.contains("delta1_mode")) {
    cfg.delta1_mode = parse_delta1_mode(as_string(doc["delta1_mode"], "delta1_mode"));
  }
  if (doc.contains("outputs")) {
    const json& o = doc["outputs"];
    if (!o.is_object()) config_error("'outputs' must be an object");
    reject_unknown(o, {"directory", "plots"}, "outputs.");
    if (o.contains("directory")) cfg.out_dir = as_string(o["directory"], "outputs.directory");
    if (o.contains("plots")) cfg.plots = as_bool(o["plots"], "outputs.plots");
  }
  if (doc.contains("sweep")) {
    const json& s = doc["sweep"];
    if (!s.is_object()) config_error("'sweep' must be an object");
    reject_unknown(s, {"parameter", "values", "seeds"}, "sweep.");
    SweepSpec spec;
    spec.parameter = parse_sweep_parameter(as_string(require(s, "parameter", "sweep."), "sweep.parameter"));
    spec.values = as_numbers(require(s, "values", "sweep."), "sweep.values");
    if (s.contains("seeds")) spec.seeds = as_count(s["seeds"], "sweep.seeds");
    cfg.sweep = spec;
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  ordered_json doc;
  doc["schema_version"] = kConfigSchemaVersion;
  doc["name"] = cfg.name;
  doc["setup"] = {{"mu", cfg.setup.mu},           {"k", cfg.setup.k},
                  {"u_left", cfg.setup.u_left},   {"u_right", cfg.setup.u_right},
                  {"t_final", cfg.setup.t_final}, {"x0_init", cfg.setup.x0_init}};
  if (cfg.source.name == "table") {
    doc["source"] = {{"x", cfg.source.xs}, {"f", cfg.source.fs}};
  } else {
    doc["source"] = cfg.source.name;
  }
  doc["grid"] = {{"n_cells", cfg.n_cells}, {"n_obs", cfg.n_obs}};
  doc["t0"] = cfg.t0;
  doc["delta"] = cfg.delta;
  doc["seed"] = cfg.seed;
  doc["constraint_class"] = to_string(cfg.constraint_class);
  doc["layer_mode"] = layer_mode_name(cfg.layer_mode);
  doc["gaps"] = ordered_json::array();
  for (const auto& [lo, hi] : cfg.gaps) doc["gaps"].push_back({lo, hi});
  doc["observe_gradient"] = cfg.observe_gradient;
  if (cfg.c1) doc["c1"] = *cfg.c1;
  doc["solver"] = {
      {"reconstruction", cfg.reconstruction == Reconstruction::muscl_minmod ? "muscl" : "rusanov"},
      {"dt", cfg.dt}};
  doc["delta1_mode"] = cfg.delta1_mode == Delta1Mode::exact ? "exact" : "relaxed";
  doc["outputs"] = {{"directory", cfg.out_dir.string()}, {"plots", cfg.plots}};
  if (cfg.sweep) {
    doc["sweep"] = {{"parameter", sweep_parameter_name(cfg.sweep->parameter)},
                    {"values", cfg.sweep->values},
                    {"seeds", cfg.sweep->seeds}};
  }
  return doc.dump(2) + "\n";
}

ExperimentConfig preset(std::string_view name) {
  ExperimentConfig cfg;
  cfg.name = std::string(name);
  if (name == "ex1") {
    cfg.source.name = "ex1";
    cfg.constraint_class = ConstraintClass::monotone;
  } else if (name == "ex2") {
    cfg.source.name = "ex2";
    cfg.constraint_class = ConstraintClass::concave;
  } else if (name == "ex3" || name == "ex3-gap") {
    cfg.source.name = "ex3";
    cfg.setup.u_left = -8.0;
    cfg.setup.u_right = 4.0;
    cfg.setup.t_final = 0.2;
    // Odd cell count so the observation nodes i/499 are solver nodes.
    cfg.n_cells = 499;
    cfg.n_obs = 499;
    cfg.observe_gradient = false;
    cfg.constraint_class = ConstraintClass::none;
    if (name == "ex3-gap") {
      cfg.t0 = 0.17;
      cfg.gaps = {{0.77, 0.87}};
    }
  } else {
    config_error("unknown preset '" + std::string(name) + "'");
  }
  return cfg;
}

// ---- runs -----------------------------------------------------------------

ForwardRun run_forward(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const SourceFunction src = cfg.source_function();
  const AssumptionReport rep = check_assumptions(cfg.setup, src);
  if (!rep.ok()) throw Error(ErrorCode::AssumptionViolated, join_failed(rep));

  AsymptoticSolution sol = AsymptoticSolution::build(cfg.setup, src);
  const SpatialGrid grid = SpatialGrid::uniform(cfg.n_cells);
  FvmOptions opts;
  opts.dt = cfg.dt;
  opts.reconstruction = cfg.reconstruction;
  opts.output_times = uniform_times(cfg.setup.t_final, kSnapshots);
  opts.output_times.push_back(cfg.t0);
  FieldSeries fvm = solve_forward(cfg.setup, src, default_initial_condition(cfg.setup, grid, cfg.setup.x0_init),
                                  grid, opts);
  const FieldSeries lattice = uniform_part(fvm, cfg.setup.t_final);
  ForwardRun run{std::move(sol), std::move(fvm), 0.0, 0.0, 0.0};
  run.rel_error = relative_l2_error(run.solution, lattice);
  run.rel_error_regular = relative_l2_error_regular(run.solution, lattice);
  run.seconds = seconds_since(start);
  return run;
}

ExactSamples exact_samples(const ExperimentConfig& cfg, const FieldSeries& fvm) {
  const std::size_t stride = cfg.n_cells / cfg.n_obs;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i <= cfg.n_obs; ++i) idx.push_back(i * stride);
  return sample_observations(fvm, cfg.t0, idx);
}

InverseRun run_inverse(const ExperimentConfig& cfg, const ForwardRun& fwd) {
  const ExactSamples exact = exact_samples(cfg, fwd.fvm);
  Observations obs = add_noise(exact, cfg.delta, cfg.seed, cfg.observe_gradient);
  mask_intervals(obs, cfg.gaps);
  return run_inverse(cfg, fwd, std::move(obs));
}

InverseRun run_inverse(const ExperimentConfig& cfg, const ForwardRun& fwd, Observations obs) {
  const auto start = std::chrono::steady_clock::now();
  InverseRun run;
  run.exact = exact_samples(cfg, fwd.fvm);
  obs.t0 = cfg.t0;
  obs.delta = cfg.delta;
  obs.seed = cfg.seed;
  run.obs = std::move(obs);
  const auto f = cfg.source.callable();

  if (cfg.c1) {
    run.c1 = *cfg.c1;
  } else {
    const Observations clean = add_noise(run.exact, 0.0, 0, true);
    const LayerWindow window = cfg.layer_mode == WindowSource::oracle
                                   ? layer_window_oracle(fwd.solution, cfg.t0)
                                   : layer_window_data(clean, cfg.setup);
    run.c1 = calibrate_c1(cfg.setup, clean, window, f);
  }

  AerOptions opts;
  opts.constraint_class = cfg.constraint_class;
  opts.window_source = cfg.layer_mode;
  opts.radius.c1 = run.c1;
  opts.delta1_mode = cfg.delta1_mode;
  run.aer = run_aer(cfg.setup, run.obs, opts, &fwd.solution);
  run.rel_error = source_relative_error(run.aer.estimate, f);
  run.seconds = seconds_since(start);
  return run;
}

// ---- artifacts ------------------------------------------------------------

void write_forward(const ExperimentConfig& cfg, const ForwardRun& fwd) {
  const auto& dir = cfg.out_dir;
  const FieldSeries lattice = uniform_part(fwd.fvm, cfg.setup.t_final);
  FieldSeries u0 = lattice;
  u0.values = kernels::u0_lattice(fwd.solution, lattice.grid.centers, lattice.times);
  io::write_atomic(dir / "u0.csv", io::field_series_csv(u0));
  io::write_atomic(dir / "fvm.csv", io::field_series_csv(lattice));
  io::write_atomic(dir / "forward_report.csv",
                   "rel_error,rel_error_regular,n_cells,snapshots\n" +
                       row({io::format_double(fwd.rel_error), io::format_double(fwd.rel_error_regular),
                            std::to_string(cfg.n_cells), std::to_string(lattice.times.size())}));

  std::string front = "t,x0,layer_width\n";
  std::vector<double> x0s;
  std::vector<double> widths;
  for (double t : lattice.times) {
    double width = kNaN;
    try {
      width = layer_width(fwd.solution.front(), fwd.solution.regular(), cfg.setup, t).width;
    } catch (const Error&) {
    }
    x0s.push_back(fwd.solution.front().position(t));
    widths.push_back(width);
    front += row({io::format_double(t), io::format_double(x0s.back()), io::format_double(width)});
  }
  io::write_atomic(dir / "front.csv", front);

  if (!cfg.plots) return;
  io::write_atomic(dir / "fvm_heatmap.svg",
                   svg::heatmap("finite-volume u(x,t)", lattice.grid.centers, lattice.times, lattice.values));
  io::write_atomic(dir / "u0_heatmap.svg",
                   svg::heatmap("asymptotic U0(x,t)", u0.grid.centers, u0.times, u0.values));
  const std::size_t j = fwd.fvm.time_index(cfg.t0);
  const auto snap = fwd.fvm.snapshot(j);
  std::vector<double> u0_t0;
  for (double x : fwd.fvm.grid.centers) u0_t0.push_back(evaluate_u0(fwd.solution, x, cfg.t0));
  io::write_atomic(dir / "profile_t0.svg",
                   svg::line_plot("u at t0 = " + io::format_double(cfg.t0), "x", "u",
                                  {{"FVM", fwd.fvm.grid.centers, {snap.begin(), snap.end()}, "#1f77b4"},
                                   {"U0", fwd.fvm.grid.centers, u0_t0, "#d62728", true}}));
  io::write_atomic(dir / "front.svg",
                   svg::line_plot("front position", "t", "x0", {{"x0(t)", lattice.times, x0s, "#2ca02c"}}));
}

void write_inverse(const ExperimentConfig& cfg, const InverseRun& inv) {
  const auto& dir = cfg.out_dir;
  const auto& res = inv.aer;
  io::write_atomic(dir / "obs.csv", io::observations_csv(inv.obs));

  std::string fd = "x,f_delta,target\n";
  for (std::size_t i = 0; i < res.estimate.xs.size(); ++i) {
    fd += row({io::format_double(res.estimate.xs[i]), io::format_double(res.estimate.values[i]),
               empty_if_nan(res.targets[i])});
  }
  io::write_atomic(dir / "f_delta.csv", fd);
  io::write_atomic(dir / "error_report.csv", io::error_report_csv(res.report));
  io::write_atomic(dir / "error_report_scalars.csv", io::error_report_scalars_csv(res.report));

  auto ratio = [](const std::optional<SmoothedField>& s) {
    return s ? s->residual() / s->target() : kNaN;
  };
  auto eps = [](const std::optional<SmoothedField>& s) { return s ? s->epsilon() : kNaN; };
  io::write_atomic(
      dir / "invert_report.csv",
      "rel_error,c1,radius,c_low,c_up,window_lo,window_hi,n_left,n_right,eps_left,eps_right,"
      "residual_ratio_left,residual_ratio_right\n" +
          row({io::format_double(inv.rel_error), io::format_double(inv.c1),
               io::format_double(res.set.radius), io::format_double(res.set.c_low),
               io::format_double(res.set.c_up), io::format_double(res.window.x_lo),
               io::format_double(res.window.x_hi), std::to_string(res.sides.left.size()),
               std::to_string(res.sides.right.size()), empty_if_nan(eps(res.left_fit)),
               empty_if_nan(eps(res.right_fit)), empty_if_nan(ratio(res.left_fit)),
               empty_if_nan(ratio(res.right_fit))}));

  if (!cfg.plots) return;
  const auto f = cfg.source.callable();
  std::vector<double> fine;
  std::vector<double> f_fine;
  for (std::size_t j = 0; j <= 400; ++j) {
    fine.push_back(j / 400.0);
    f_fine.push_back(f(fine.back()));
  }
  io::write_atomic(dir / "source.svg",
                   svg::line_plot("source reconstruction", "x", "f",
                                  {{"f*", fine, f_fine, "#000000"},
                                   {"f_delta", res.estimate.xs, res.estimate.values, "#1f77b4"},
                                   {"f_low", res.report.xs, res.report.f_low, "#2ca02c", true},
                                   {"f_up", res.report.xs, res.report.f_up, "#d62728", true},
                                   {"k u w", inv.obs.xs, res.targets, "#7f7f7f", false, true}}));
  std::vector<double> u_masked = inv.obs.u;
  for (std::size_t i = 0; i < u_masked.size(); ++i) {
    if (!inv.obs.valid(i)) u_masked[i] = kNaN;
  }
  io::write_atomic(dir / "observations.svg",
                   svg::line_plot("observations at t0", "x", "u",
                                  {{"u exact", inv.exact.xs, inv.exact.u, "#000000"},
                                   {"u noisy", inv.obs.xs, u_masked, "#1f77b4", false, true}}));
}

// ---- sweeps ---------------------------------------------------------------

double loglog_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "slope needs at least two points");
  }
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += std::log(xs[i]);
    my += std::log(ys[i]);
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(xs.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = std::log(xs[i]) - mx;
    sxy += dx * (std::log(ys[i]) - my);
    sxx += dx * dx;
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::InvalidArgument, "slope needs distinct x values");
  return sxy / sxx;
}

SweepResult run_sweep(const ExperimentConfig& cfg, const SweepSpec& spec) {
  if (spec.values.empty()) config_error("empty sweep list");
  if (spec.seeds == 0) config_error("sweep needs at least one seed");
  SweepResult res;
  res.parameter = spec.parameter;

  // Forward solves: one for a delta sweep, one per value for a mu sweep.
  const std::size_t n_fwd = spec.parameter == SweepParameter::mu ? spec.values.size() : 1;
  std::vector<ExperimentConfig> configs(n_fwd, cfg);
  std::vector<std::optional<ForwardRun>> forwards(n_fwd);
  std::vector<std::string> fwd_status(n_fwd, "ok");
  std::vector<double> link_ratio(n_fwd, kNaN);
  const int threads = kernels::thread_count();

#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::size_t v = 0; v < n_fwd; ++v) {
    if (spec.parameter == SweepParameter::mu) configs[v].setup.mu = spec.values[v];
    try {
      forwards[v] = run_forward(configs[v]);
      if (spec.parameter == SweepParameter::mu) {
        const Observations clean = add_noise(exact_samples(configs[v], forwards[v]->fvm), 0.0, 0, true);
        const LayerWindow window = layer_window_oracle(forwards[v]->solution, configs[v].t0);
        const double mu = configs[v].setup.mu;
        link_ratio[v] = link_error_l2(configs[v].setup, clean, window, configs[v].source.callable()) /
                        (mu * std::abs(std::log(mu)));
      }
    } catch (const Error& e) {
      fwd_status[v] = to_string(e.code());
    }
  }

  const std::size_t n_rows = spec.values.size() * spec.seeds;
  res.rows.resize(n_rows);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::size_t r = 0; r < n_rows; ++r) {
    const std::size_t v = r / spec.seeds;
    const std::size_t f = spec.parameter == SweepParameter::mu ? v : 0;
    SweepRow& out = res.rows[r];
    out.value = spec.values[v];
    out.seed = cfg.seed + r % spec.seeds;
    out.link_ratio = link_ratio[f];
    if (!forwards[f]) {
      out.status = fwd_status[f];
      out.rel_error = out.delta1 = kNaN;
      continue;
    }
    ExperimentConfig c = configs[f];
    c.seed = out.seed;
    if (spec.parameter == SweepParameter::delta) c.delta = out.value;
    try {
      c.validate();
      const InverseRun inv = run_inverse(c, *forwards[f]);
      out.rel_error = inv.rel_error;
      out.delta1 = inv.aer.report.delta1;
      out.seconds = inv.seconds;
    } catch (const Error& e) {
      out.status = to_string(e.code());
      out.rel_error = out.delta1 = kNaN;
    }
  }

  if (spec.parameter == SweepParameter::delta) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t v = 0; v < spec.values.size(); ++v) {
      std::vector<double> errs;
      for (const auto& rw : res.rows) {
        if (rw.value == spec.values[v] && rw.status == "ok") errs.push_back(rw.rel_error);
      }
      if (errs.empty() || !(spec.values[v] > 0.0)) continue;
      std::sort(errs.begin(), errs.end());
      const std::size_t m = errs.size();
      const double median = m % 2 ? errs[m / 2] : 0.5 * (errs[m / 2 - 1] + errs[m / 2]);
      if (!(median > 0.0)) continue;
      xs.push_back(spec.values[v]);
      ys.push_back(median);
    }
    if (xs.size() >= 2) res.slope = loglog_slope(xs, ys);
  }
  return res;
}

std::string sweep_csv(const SweepResult& res) {
  std::string out = "parameter,value,seed,rel_error,delta1,link_ratio,seconds,status\n";
  const char* name = sweep_parameter_name(res.parameter);
  for (const auto& r : res.rows) {
    out += row({name, io::format_double(r.value), std::to_string(r.seed), empty_if_nan(r.rel_error),
                empty_if_nan(r.delta1), empty_if_nan(r.link_ratio), io::format_double(r.seconds),
                r.status});
  }
  if (res.slope) out += row({"slope", io::format_double(*res.slope), "", "", "", "", "", "ok"});
  return out;
}

}  // namespace aer
