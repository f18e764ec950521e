#include <doctest.h>

#include <cstdlib>
#include <stdexcept>
#include <string>

#include "drclab/csv.hpp"
#include "test_util.hpp"

using namespace drclab;
using drclab::testing::TempDir;
using drclab::testing::read_file;

TEST_CASE("format_double emits shortest round-trip decimals") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-2.5) == "-2.5");
  CHECK(format_double(0.0) == "0");

  // Every formatted value must parse back to the identical double.
  const double cases[] = {1.0 / 3.0, 1e-300, -9.87654321e12, 2.2250738585072014e-308,
                          3.141592653589793, 1234567.875};
  for (double v : cases) {
    std::string s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
}

TEST_CASE("format_double handles non-finite values by name") {
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("writer produces header plus rows with newline endings") {
  CsvWriter csv({"a", "b"});
  csv.add_row({1.0, 2.5});
  csv.add_row({-3.0, 0.125});
  CHECK(csv.to_string() == "a,b\n1,2.5\n-3,0.125\n");
  CHECK(csv.row_count() == 2);
}

TEST_CASE("row width must match the header") {
  CsvWriter csv({"a", "b", "c"});
  CHECK_THROWS_AS(csv.add_row({1.0}), std::invalid_argument);
  CHECK_THROWS_AS(CsvWriter({}), std::invalid_argument);
}

TEST_CASE("identical content writes byte-identical files") {
  TempDir dir("csv_bytes");
  auto build = [] {
    CsvWriter csv({"t", "value"});
    for (int i = 0; i < 100; ++i)
      csv.add_row({i * 0.001, std::sin(i * 0.1) * 1e-3});
    return csv;
  };
  const std::string p1 = dir.path("one.csv");
  const std::string p2 = dir.path("two.csv");
  build().write(p1);
  build().write(p2);
  const std::string c1 = read_file(p1);
  const std::string c2 = read_file(p2);
  CHECK(!c1.empty());
  CHECK(c1 == c2);
}

TEST_CASE("write failure names the path") {
  CsvWriter csv({"x"});
  csv.add_row({1.0});
  CHECK_THROWS_AS(csv.write("/nonexistent/dir/f.csv"), std::runtime_error);
}
