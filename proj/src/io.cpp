#include "aer/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

#include "aer/error.hpp"

namespace aer::io {

namespace fs = std::filesystem;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_atomic(const fs::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + path.parent_path().string());
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "cannot rename onto " + path.string());
  }
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == name) return j;
  }
  throw Error(ErrorCode::IoError, "missing column " + std::string(name));
}

namespace {

std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      return out;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

void append_row(std::string& out, const std::vector<std::string>& fields) {
  for (std::size_t j = 0; j < fields.size(); ++j) {
    if (j) out += ',';
    out += fields[j];
  }
  out += '\n';
}

}  // namespace

CsvTable parse_csv(std::string_view text) {
  CsvTable t;
  bool first = true;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    start = end + 1;
    if (line.empty()) continue;
    auto fields = split_line(line);
    if (first) {
      t.header = std::move(fields);
      first = false;
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw Error(ErrorCode::IoError, "row width differs from the header");
    }
    t.rows.push_back(std::move(fields));
  }
  if (first) throw Error(ErrorCode::IoError, "missing header row");
  return t;
}

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

std::string to_csv(const CsvTable& table) {
  std::string out;
  append_row(out, table.header);
  for (const auto& r : table.rows) append_row(out, r);
  return out;
}

double parse_double(std::string_view field) {
  if (field.empty() || field == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw Error(ErrorCode::IoError, "not a number: " + std::string(field));
  }
  return v;
}

std::string field_series_csv(const FieldSeries& series) {
  std::string out = "x,t,u\n";
  const std::size_t nx = series.grid.size();
  for (std::size_t j = 0; j < series.times.size(); ++j) {
    const std::string t = format_double(series.times[j]);
    for (std::size_t i = 0; i < nx; ++i) {
      out += format_double(series.grid.centers[i]);
      out += ',';
      out += t;
      out += ',';
      out += format_double(series.at(j, i));
      out += '\n';
    }
  }
  return out;
}

FieldSeries parse_field_series(const CsvTable& table) {
  const std::size_t cx = table.column("x");
  const std::size_t ct = table.column("t");
  const std::size_t cu = table.column("u");
  FieldSeries s;
  for (const auto& r : table.rows) {
    const double x = parse_double(r[cx]);
    const double t = parse_double(r[ct]);
    if (s.times.empty() || s.times.back() != t) s.times.push_back(t);
    if (s.times.size() == 1) s.grid.centers.push_back(x);
    s.values.push_back(parse_double(r[cu]));
  }
  const std::size_t nx = s.grid.centers.size();
  if (nx < 2 || s.values.size() != nx * s.times.size()) {
    throw Error(ErrorCode::IoError, "field rows do not form a lattice");
  }
  s.grid.n_cells = nx - 1;
  s.grid.h = s.grid.centers[1] - s.grid.centers[0];
  return s;
}

std::string observations_csv(const Observations& obs) {
  std::string out = "x,u,w,mask\n";
  for (std::size_t i = 0; i < obs.size(); ++i) {
    out += format_double(obs.xs[i]);
    out += ',';
    out += format_double(obs.u[i]);
    out += ',';
    if (obs.w) out += format_double((*obs.w)[i]);
    out += ',';
    out += obs.valid(i) ? '1' : '0';
    out += '\n';
  }
  return out;
}

Observations parse_observations(const CsvTable& table) {
  const std::size_t cx = table.column("x");
  const std::size_t cu = table.column("u");
  const std::size_t cw = table.column("w");
  const std::size_t cm = table.column("mask");
  Observations obs;
  std::vector<double> w;
  bool any_w = false;
  bool all_w = true;
  for (const auto& r : table.rows) {
    obs.xs.push_back(parse_double(r[cx]));
    obs.u.push_back(parse_double(r[cu]));
    w.push_back(parse_double(r[cw]));
    if (r[cw].empty()) {
      all_w = false;
    } else {
      any_w = true;
    }
    if (r[cm] != "0" && r[cm] != "1") throw Error(ErrorCode::IoError, "mask must be 0 or 1");
    obs.mask.push_back(r[cm] == "1" ? 1 : 0);
  }
  if (any_w && !all_w) throw Error(ErrorCode::IoError, "w column is partially empty");
  if (any_w) obs.w = std::move(w);
  obs.validate();
  return obs;
}

std::string error_report_csv(const ErrorReport& report) {
  std::string out = "x,f_delta,f_low,f_up,delta2\n";
  for (std::size_t i = 0; i < report.xs.size(); ++i) {
    append_row(out, {format_double(report.xs[i]), format_double(report.f_delta[i]),
                     format_double(report.f_low[i]), format_double(report.f_up[i]),
                     format_double(report.delta2[i])});
  }
  return out;
}

std::string error_report_scalars_csv(const ErrorReport& report) {
  std::string out = "delta1,delta1_bar,feasible\n";
  append_row(out, {format_double(report.delta1), format_double(report.delta1_bar),
                   report.feasible ? "1" : "0"});
  return out;
}

ErrorReport parse_error_report(const CsvTable& table, const CsvTable& scalars) {
  ErrorReport rep;
  const std::size_t cx = table.column("x");
  const std::size_t cf = table.column("f_delta");
  const std::size_t cl = table.column("f_low");
  const std::size_t cu = table.column("f_up");
  const std::size_t cd = table.column("delta2");
  for (const auto& r : table.rows) {
    rep.xs.push_back(parse_double(r[cx]));
    rep.f_delta.push_back(parse_double(r[cf]));
    rep.f_low.push_back(parse_double(r[cl]));
    rep.f_up.push_back(parse_double(r[cu]));
    rep.delta2.push_back(parse_double(r[cd]));
  }
  if (scalars.rows.size() != 1) throw Error(ErrorCode::IoError, "scalar sidecar needs one row");
  const auto& s = scalars.rows.front();
  rep.delta1 = parse_double(s[scalars.column("delta1")]);
  rep.delta1_bar = parse_double(s[scalars.column("delta1_bar")]);
  rep.feasible = s[scalars.column("feasible")] == "1";
  return rep;
}

}  // namespace aer::io
