#include "ratelens/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "ratelens/error.hpp"

namespace ratelens::csv {
namespace {

// Splits one CSV record. Supports double-quoted fields with "" escapes;
// records never span lines in this format.
std::vector<std::string> split_record(const std::string& line,
                                      const std::string& source,
                                      std::size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"' && field.empty() && !was_quoted) {
      quoted = true;
      was_quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
      was_quoted = false;
    } else {
      field.push_back(ch);
    }
  }
  if (quoted) {
    throw ParseError(source + ":" + std::to_string(line_no) +
                     ": unterminated quoted field");
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

struct RawTable {
  std::vector<std::string> col_labels;
  std::vector<std::string> row_labels;
  std::vector<std::vector<std::string>> cells;
  std::vector<std::size_t> line_numbers;
};

RawTable read_raw(std::istream& in, const std::string& source) {
  RawTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    auto fields = split_record(line, source, line_no);
    for (auto& f : fields) f = trim(std::move(f));
    if (!have_header) {
      table.col_labels.assign(fields.begin() + 1, fields.end());
      have_header = true;
      continue;
    }
    if (fields.size() != table.col_labels.size() + 1) {
      throw ParseError(source + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(table.col_labels.size() + 1) +
                       " fields, found " + std::to_string(fields.size()));
    }
    table.row_labels.push_back(fields.front());
    table.cells.emplace_back(fields.begin() + 1, fields.end());
    table.line_numbers.push_back(line_no);
  }
  if (table.col_labels.empty() || table.row_labels.empty()) {
    throw ParseError(source + ": empty matrix");
  }
  return table;
}

std::string cell_name(const RawTable& t, const std::string& source,
                      std::size_t r, std::size_t c) {
  return source + ":" + std::to_string(t.line_numbers[r]) + ": cell (" +
         t.row_labels[r] + ", " + t.col_labels[c] + ")";
}

Alphabet make_alphabet(std::vector<std::string> labels, const std::string& source,
                       const char* which) {
  try {
    return Alphabet(std::move(labels));
  } catch (const InvalidArgument& e) {
    throw ParseError(source + ": " + which + " labels: " + e.what());
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

LabeledMatrix read_matrix(std::istream& in, const std::string& source) {
  RawTable t = read_raw(in, source);
  Matrix<double> values(t.row_labels.size(), t.col_labels.size());
  for (std::size_t r = 0; r < t.cells.size(); ++r) {
    for (std::size_t c = 0; c < t.col_labels.size(); ++c) {
      const std::string& text = t.cells[r][c];
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() ||
          !std::isfinite(v)) {
        throw ParseError(cell_name(t, source, r, c) + ": '" + text +
                         "' is not a finite number");
      }
      values(r, c) = v;
    }
  }
  return {make_alphabet(std::move(t.row_labels), source, "row"),
          make_alphabet(std::move(t.col_labels), source, "column"),
          std::move(values)};
}

LabeledMatrix read_matrix(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_matrix(in, path.string());
}

CountMatrix read_counts(std::istream& in, const std::string& source) {
  RawTable t = read_raw(in, source);
  Matrix<std::uint64_t> counts(t.row_labels.size(), t.col_labels.size());
  for (std::size_t r = 0; r < t.cells.size(); ++r) {
    for (std::size_t c = 0; c < t.col_labels.size(); ++c) {
      const std::string& text = t.cells[r][c];
      std::uint64_t v = 0;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ParseError(cell_name(t, source, r, c) + ": '" + text +
                         "' is not a nonnegative integer count");
      }
      counts(r, c) = v;
    }
  }
  return CountMatrix(make_alphabet(std::move(t.row_labels), source, "row"),
                     make_alphabet(std::move(t.col_labels), source, "column"),
                     std::move(counts));
}

CountMatrix read_counts(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_counts(in, path.string());
}

void write_matrix(std::ostream& out, const Alphabet& rows, const Alphabet& cols,
                  const Matrix<double>& values) {
  if (values.rows() != rows.size() || values.cols() != cols.size()) {
    throw ShapeMismatch("write_matrix: labels do not match matrix shape");
  }
  for (const auto& l : cols.labels()) out << ',' << quote_if_needed(l);
  out << '\n';
  for (std::size_t r = 0; r < values.rows(); ++r) {
    out << quote_if_needed(rows.label(r));
    for (double v : values.row(r)) out << ',' << format_double(v);
    out << '\n';
  }
}

void write_counts(std::ostream& out, const CountMatrix& counts) {
  for (const auto& l : counts.y_alphabet().labels()) {
    out << ',' << quote_if_needed(l);
  }
  out << '\n';
  const auto& m = counts.counts();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out << quote_if_needed(counts.x_alphabet().label(r));
    for (auto v : m.row(r)) out << ',' << v;
    out << '\n';
  }
}

void write_matrix_file(const std::filesystem::path& path, const Alphabet& rows,
                       const Alphabet& cols, const Matrix<double>& values) {
  auto out = open_output(path);
  write_matrix(out, rows, cols, values);
}

void write_counts_file(const std::filesystem::path& path,
                       const CountMatrix& counts) {
  auto out = open_output(path);
  write_counts(out, counts);
}

Pmf read_pmf(const std::filesystem::path& path) {
  auto m = read_matrix(path);
  if (m.values.rows() != 1) {
    throw ParseError(path.string() + ": a pmf file must contain one data row");
  }
  std::vector<double> probs(m.values.row(0).begin(), m.values.row(0).end());
  try {
    return Pmf(std::move(m.cols), std::move(probs));
  } catch (const InvalidDistribution& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace ratelens::csv
