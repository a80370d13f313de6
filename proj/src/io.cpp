#include "monosort/io.hpp"

#include <cstdio>

namespace monosort {

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_matrix_csv(std::ostream& out, std::span<const double> values,
                      int rows, int cols) {
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (c) out << ',';
      out << format_double(values[static_cast<size_t>(r) * cols + c]);
    }
    out << '\n';
  }
}

void write_vector_csv(std::ostream& out, std::span<const double> values) {
  for (size_t k = 0; k < values.size(); ++k) {
    if (k) out << ',';
    out << format_double(values[k]);
  }
  out << '\n';
}

}  // namespace monosort
