#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "spherosim/dynamics.hpp"
#include "spherosim/minimizer.hpp"
#include "spherosim/verify.hpp"

namespace spherosim {

inline constexpr int kSchemaVersion = 1;

/// Header `spherosim-field v1 <V> <level>`, then `y1 y2 y3 m1 m2 m3` per vertex.
void write_field(const Field& m, std::ostream& out);
/// Rebuilds the icosphere of the stated level and checks the vertex positions.
/// Throws Io on malformed input.
Field read_field(std::istream& in);
void save_field(const Field& m, const std::string& path);
Field load_field(const std::string& path);

/// Columns E_exchange, E_anis, E_total, Q, S1..S3, L1..L3, J1..J3.
std::string diagnostics_csv_header();
std::string diagnostics_csv_row(const Diagnostics& d);

/// Schema comment line, then t plus the diagnostics columns.
void write_trace_csv(const std::vector<TracePoint>& trace, std::ostream& out);

std::string minimize_report_json(const MinimizeReport& rep, double kappa, int level);
std::string suite_report_json(const std::vector<CheckResult>& results, const SuiteOptions& opts);

/// Legacy ASCII VTK polydata with point vectors m and scalars m . nu.
void write_vtk(const Field& m, std::ostream& out);

}  // namespace spherosim
