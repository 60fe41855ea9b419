#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "aer/error_estimation.hpp"
#include "aer/fvm.hpp"
#include "aer/observations.hpp"

namespace aer::io {

/// %.17g, so every finite double re-parses to the same bits. NaN prints as "nan".
std::string format_double(double v);

/// Writes to a sibling temp file, then renames over `path`. Creates parent
/// directories. Throws IoError.
void write_atomic(const std::filesystem::path& path, std::string_view content);

/// Header plus rows of raw fields. Empty fields stay empty strings.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws IoError when absent.
  std::size_t column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);
std::string to_csv(const CsvTable& table);

/// "nan" and the empty field map to NaN; anything else must parse completely.
double parse_double(std::string_view field);

/// x,t,u with one row per (time, node), time-major.
std::string field_series_csv(const FieldSeries& series);
/// Grid and times are rebuilt from the rows; setup is left at its defaults.
FieldSeries parse_field_series(const CsvTable& table);

/// x,u,w,mask; missing w is an empty field.
std::string observations_csv(const Observations& obs);
/// t0, delta and seed are not stored and stay at zero.
Observations parse_observations(const CsvTable& table);

/// x,f_delta,f_low,f_up,delta2.
std::string error_report_csv(const ErrorReport& report);
/// delta1,delta1_bar,feasible.
std::string error_report_scalars_csv(const ErrorReport& report);
/// Restores the columns of both files; node extremes and gaps stay empty.
ErrorReport parse_error_report(const CsvTable& table, const CsvTable& scalars);

}  // namespace aer::io
