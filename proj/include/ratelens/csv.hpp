#pragma once

// Project-wide CSV matrix format: the first row holds the y labels (its first
// cell is ignored), the first column holds the x labels, cell (i, j) holds the
// value. UTF-8, '.' decimal separator, no thousands separators.

#include <filesystem>
#include <iosfwd>
#include <string>

#include "ratelens/matrix.hpp"
#include "ratelens/probcore.hpp"

namespace ratelens::csv {

struct LabeledMatrix {
  Alphabet rows;
  Alphabet cols;
  Matrix<double> values;
};

// Throws ParseError naming the offending cell. `source` is used in messages.
LabeledMatrix read_matrix(std::istream& in, const std::string& source = "<csv>");
LabeledMatrix read_matrix(const std::filesystem::path& path);

// Like read_matrix but every cell must be a nonnegative integer.
CountMatrix read_counts(std::istream& in, const std::string& source = "<csv>");
CountMatrix read_counts(const std::filesystem::path& path);

// Values are written in shortest round-trip form.
void write_matrix(std::ostream& out, const Alphabet& rows, const Alphabet& cols,
                  const Matrix<double>& values);
void write_counts(std::ostream& out, const CountMatrix& counts);

void write_matrix_file(const std::filesystem::path& path, const Alphabet& rows,
                       const Alphabet& cols, const Matrix<double>& values);
void write_counts_file(const std::filesystem::path& path,
                       const CountMatrix& counts);

// A pmf is stored as a one-row matrix in the same layout: header = symbol
// labels, then one data row whose label cell is ignored.
Pmf read_pmf(const std::filesystem::path& path);

std::string format_double(double v);

}  // namespace ratelens::csv
