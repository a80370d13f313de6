#pragma once

// Small serialization helpers shared by the harness, the benchmark and the
// CLI. All floating-point output uses 17 significant digits so that files
// round-trip to the exact same doubles.

#include <ostream>
#include <span>
#include <string>

namespace monosort {

// Shortest-round-trip-safe rendering of one double (printf %.17g).
std::string format_double(double value);

// Row-major matrix as CSV, one row per line, no header.
void write_matrix_csv(std::ostream& out, std::span<const double> values,
                      int rows, int cols);

// Single CSV line.
void write_vector_csv(std::ostream& out, std::span<const double> values);

}  // namespace monosort
