#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "optomech/langevin.hpp"

namespace optomech {

/// Shortest-round-trip-safe decimal: printf("%.17g").
std::string format_double(double v);

/// Writes "# "-prefixed header lines: tool version, command, then the
/// resolved configuration text line by line.
void write_header(std::ostream& out, const std::string& command, const std::string& resolved_config);

/// Comma-joined row.
void write_row(std::ostream& out, const std::vector<std::string>& cells);

/// Long-format dump of a system: kind,i,j,re,im rows for M, gamma,
/// input_map, noise_pos, noise_neg, drive, plus label/meta/warning rows.
void write_system_csv(std::ostream& out, const LinearLangevinSystem& sys);

/// Inverse of write_system_csv; lines starting with '#' are skipped.
LinearLangevinSystem read_system_csv(std::istream& in);

}  // namespace optomech
