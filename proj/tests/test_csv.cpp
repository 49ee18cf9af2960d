#include <doctest.h>

#include <clocale>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "dce/csv.hpp"
#include "dce/errors.hpp"

using namespace dce;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("csv") {

TEST_CASE("header comments, column row and cells") {
  const fs::path path = fs::temp_directory_path() / "dce_csv_writer_test.csv";
  {
    CsvWriter w(path, {"chi0 = 0.05", "b0 = 1"}, {"n", "k_n", "label"});
    w.cell(1).cell(0.5).cell(std::string("self(1)")).end_row();
    w.cell(2).empty().cell(std::string("x")).end_row();
  }
  CHECK(slurp(path) == "# chi0 = 0.05\n# b0 = 1\nn,k_n,label\n1,0.5,self(1)\n2,,x\n");
  fs::remove(path);

  CHECK_THROWS_AS(CsvWriter(fs::path("/nonexistent-dir/x.csv"), {}, {"a"}), ConfigError);
}

TEST_CASE("numbers are written in shortest round-trip form") {
  CHECK(format_number(0.05) == "0.05");
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(-2.5e-12) == "-2.5e-12");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> ex(-300, 300);
  for (int i = 0; i < 2000; ++i) {
    const double v = std::ldexp(mant(rng), ex(rng));
    CHECK(std::stod(format_number(v)) == v);
  }
}

TEST_CASE("formatting ignores the global locale") {
  const char* previous = std::setlocale(LC_NUMERIC, nullptr);
  const std::string saved = previous ? previous : "C";
  // Try a locale with a decimal comma; skip silently if none is installed.
  for (const char* name : {"de_DE.UTF-8", "fr_FR.UTF-8", "de_DE"}) {
    if (std::setlocale(LC_NUMERIC, name)) break;
  }
  CHECK(format_number(3.25) == "3.25");
  std::setlocale(LC_NUMERIC, saved.c_str());
}

}  // TEST_SUITE
