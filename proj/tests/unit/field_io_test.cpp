#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

#include "nch/error.hpp"
#include "nch/field_io.hpp"
#include "test_support.hpp"

namespace {

using nch::GridFunction;

TEST(FieldIo, RoundTripIsBitExact) {
  const nch::PeriodicGrid g(1.25, 3.0, 8, 6);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-300, 300);
  std::vector<double> v(g.size());
  for (auto& x : v) x = std::ldexp(mant(rng), expo(rng) / 4);
  v[0] = std::numeric_limits<double>::denorm_min();
  v[1] = -0.0;
  v[2] = std::numeric_limits<double>::max();
  v[3] = 0.1;
  const GridFunction f(g, v);

  std::stringstream ss;
  nch::write_field(ss, f, 0.30000000000000004);
  const auto snap = nch::read_field(ss);
  EXPECT_EQ(snap.field.grid(), g);
  EXPECT_EQ(snap.time, 0.30000000000000004);
  for (std::size_t n = 0; n < v.size(); ++n) {
    EXPECT_EQ(std::signbit(snap.field[n]), std::signbit(v[n]));
    EXPECT_EQ(snap.field[n], v[n]) << n;
  }
}

TEST(FieldIo, HeaderLayout) {
  const nch::PeriodicGrid g(1.0, 2.0, 4, 4);
  std::stringstream ss;
  nch::write_field(ss, GridFunction(g, 0.5), 1.0);
  std::string line;
  std::getline(ss, line);
  EXPECT_EQ(line, "# nch-field v1");
  std::getline(ss, line);
  EXPECT_EQ(line.rfind("# nx=4 ny=4 X=1 Y=2 t=1", 0), 0u) << line;
  int rows = 0;
  while (std::getline(ss, line))
    if (!line.empty()) ++rows;
  EXPECT_EQ(rows, 4);
}

TEST(FieldIo, FileRoundTrip) {
  const auto g = nch::testing::square_grid(8);
  std::mt19937_64 rng(5);
  const auto f = nch::testing::random_field(g, rng);
  const auto path = std::filesystem::temp_directory_path() / "nch_field_io_test.dat";
  nch::save_field(path, f, 2.5);
  const auto snap = nch::load_field(path);
  EXPECT_EQ(nch::testing::max_abs_diff(snap.field, f), 0.0);
  EXPECT_EQ(snap.time, 2.5);
  std::filesystem::remove(path);
}

TEST(FieldIo, MalformedInputsRejected) {
  const auto read = [](const std::string& text) {
    std::istringstream in(text);
    return nch::read_field(in);
  };
  EXPECT_THROW(read("# nch-kernel v1\n# nx=4 ny=4 X=1 Y=1 t=0\n"), nch::FormatError);
  EXPECT_THROW(read("# nch-field v1\n# nx=4 X=1 Y=1\n"), nch::FormatError);
  std::string body;
  for (int j = 0; j < 4; ++j) body += "1 2 3 4\n";
  EXPECT_NO_THROW(read("# nch-field v1\n# nx=4 ny=4 X=1 Y=1 t=0\n" + body));
  EXPECT_THROW(read("# nch-field v1\n# nx=4 ny=4 X=1 Y=1 t=0\n" + body + "5\n"),
               nch::FormatError);
  EXPECT_THROW(read("# nch-field v1\n# nx=4 ny=4 X=1 Y=1 t=0\n1 2 3\n"),
               nch::FormatError);
  EXPECT_THROW(read("# nch-field v1\n# nx=4 ny=4 X=1 Y=1 t=0\n" + body.substr(0, 8) +
                    "1 x 3 4\n" + body.substr(16)),
               nch::FormatError);
}

}  // namespace
