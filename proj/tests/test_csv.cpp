#include <sstream>

#include "doctest.h"
#include "ratelens/csv.hpp"
#include "ratelens/error.hpp"

using namespace ratelens;

TEST_CASE("matrix round trip") {
  std::istringstream in("\xEF\xBB\xBF,a,\"b,c\"\r\nx, 0.25 ,1e-3\r\ny,2,0\r\n");
  const auto m = csv::read_matrix(in);
  CHECK(m.cols.label(1) == "b,c");
  CHECK(m.rows.label(1) == "y");
  CHECK(m.values(0, 0) == 0.25);
  CHECK(m.values(0, 1) == 1e-3);

  std::ostringstream out;
  csv::write_matrix(out, m.rows, m.cols, m.values);
  std::istringstream again(out.str());
  const auto m2 = csv::read_matrix(again);
  CHECK(m2.values == m.values);
  CHECK(m2.cols == m.cols);
}

TEST_CASE("shortest round-trip formatting") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.125, 0.0}) {
    CHECK(std::stod(csv::format_double(v)) == v);
  }
}

TEST_CASE("count parsing errors") {
  auto read = [](const std::string& text) {
    std::istringstream in(text);
    return csv::read_counts(in, "t.csv");
  };
  CHECK(read(",0,1\n0,3,4\n")(0, 1) == 4);
  CHECK_THROWS_WITH_AS(read(",0,1\n0,3,-4\n"), doctest::Contains("(0, 1)"), ParseError);
  CHECK_THROWS_AS(read(",0,1\n0,3,1.5\n"), ParseError);
  CHECK_THROWS_WITH_AS(read(""), doctest::Contains("empty matrix"), ParseError);
  CHECK_THROWS_AS(read(",0,1\n0,3\n"), ParseError);
  CHECK_THROWS_AS(read(",0,0\n0,3,3\n"), ParseError);
}

TEST_CASE("matrix parsing errors") {
  std::istringstream bad(",a\nx,abc\n");
  CHECK_THROWS_WITH_AS(csv::read_matrix(bad, "m.csv"), doctest::Contains("m.csv:2"), ParseError);
  std::istringstream header_only(",a,b\n");
  CHECK_THROWS_AS(csv::read_matrix(header_only), ParseError);
  CHECK_THROWS_AS(csv::read_matrix(std::filesystem::path("/nonexistent/x.csv")), ParseError);
}
