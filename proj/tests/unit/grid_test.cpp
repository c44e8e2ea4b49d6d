#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nch/error.hpp"
#include "nch/grid.hpp"
#include "test_support.hpp"

namespace {

using nch::GridFunction;
using nch::PeriodicGrid;
using nch::testing::kPi;
using nch::testing::square_grid;

TEST(PeriodicGrid, RejectsOddOrSmallCounts) {
  EXPECT_THROW(PeriodicGrid(kPi, kPi, 7, 8), nch::ParameterError);
  EXPECT_THROW(PeriodicGrid(kPi, kPi, 8, 2), nch::ParameterError);
  EXPECT_THROW(PeriodicGrid(0.0, kPi, 8, 8), nch::ParameterError);
  EXPECT_THROW(PeriodicGrid(kPi, -1.0, 8, 8), nch::ParameterError);
  EXPECT_NO_THROW(PeriodicGrid(kPi, 2.0, 4, 6));
}

TEST(PeriodicGrid, SpacingAndNodes) {
  const PeriodicGrid g(2.0, 3.0, 8, 12);
  EXPECT_EQ(g.hx() * g.nx(), 2.0 * g.half_width_x());
  EXPECT_EQ(g.hy() * g.ny(), 2.0 * g.half_width_y());
  EXPECT_DOUBLE_EQ(g.x(0), -2.0 + 0.5);
  EXPECT_DOUBLE_EQ(g.x(7), 2.0);
  EXPECT_DOUBLE_EQ(g.y(11), 3.0);
  EXPECT_EQ(g.index(3, 2), 2u * 8u + 3u);
  EXPECT_EQ(g.wavenumber_x(4), 4);
  EXPECT_EQ(g.wavenumber_x(5), -3);
  EXPECT_DOUBLE_EQ(g.area(), 24.0);
}

TEST(GridFunction, LengthAndFiniteness) {
  const auto g = square_grid(4);
  EXPECT_THROW(GridFunction(g, std::vector<double>(15, 0.0)), nch::DimensionError);
  std::vector<double> v(16, 0.0);
  v[3] = std::nan("");
  EXPECT_THROW(GridFunction(g, v), nch::NonFiniteError);
  v[3] = INFINITY;
  EXPECT_THROW(GridFunction(g, v), nch::NonFiniteError);
  EXPECT_THROW(GridFunction(g, INFINITY), nch::NonFiniteError);
}

TEST(GridFunction, MismatchedGridsRejected) {
  const GridFunction a(square_grid(8), 1.0);
  const GridFunction b(square_grid(16), 1.0);
  EXPECT_THROW((void)nch::inner_product(a, b), nch::DimensionError);
  EXPECT_THROW((void)(a + b), nch::DimensionError);
}

TEST(InnerProduct, ConstantsMeasureTheDomain) {
  for (int n : {4, 8, 10}) {
    const auto g = nch::PeriodicGrid(kPi, kPi, n, n + 2);
    const GridFunction one(g, 1.0);
    EXPECT_NEAR(nch::inner_product(one, one), 4.0 * kPi * kPi, 1e-12);
    EXPECT_EQ(nch::inner_product(GridFunction(g), one), 0.0);
  }
}

TEST(InnerProduct, SineSquaredIsTwoPiSquared) {
  const auto g = square_grid(16);
  const auto s = GridFunction::sample(g, [](double x, double) { return std::sin(x); });
  const double expected = 2.0 * kPi * kPi;
  EXPECT_NEAR(nch::inner_product(s, s), expected, 1e-12 * expected);
  EXPECT_NEAR(nch::testing::brute_inner(s, s), expected, 1e-12 * expected);
}

TEST(Norms, Examples) {
  const auto unit = nch::PeriodicGrid(1.0, 1.0, 8, 8);
  EXPECT_NEAR(nch::norm_l2(GridFunction(unit, 2.0)), 4.0, 1e-14);
  EXPECT_EQ(nch::norm_l2(GridFunction(unit)), 0.0);

  const auto g32 = square_grid(32);
  const auto s32 = GridFunction::sample(g32, [](double x, double) { return std::sin(x); });
  EXPECT_NEAR(nch::norm_l2(s32), std::sqrt(2.0) * kPi, 1e-13);

  EXPECT_EQ(nch::norm_linf(GridFunction(unit, -3.0)), 3.0);
  const auto g16 = square_grid(16);
  const auto s16 = GridFunction::sample(g16, [](double x, double) { return std::sin(x); });
  // x = -pi + p * pi/8 hits +-pi/2 at p = 4, 12.
  EXPECT_DOUBLE_EQ(nch::norm_linf(s16), 1.0);
}

TEST(Mean, Examples) {
  const auto g = square_grid(8);
  EXPECT_NEAR(nch::mean(GridFunction(g, 1.75)), 1.75, 1e-15);
  const auto s = GridFunction::sample(g, [](double x, double) { return std::sin(x); });
  EXPECT_LT(std::abs(nch::mean(s)), 1e-15);
  // 2x2 tile {1,2;3,4} repeated over the mesh.
  std::vector<double> v(g.size());
  for (int q = 0; q < 8; ++q)
    for (int p = 0; p < 8; ++p) v[g.index(p, q)] = 1.0 + (p % 2) + 2.0 * (q % 2);
  EXPECT_NEAR(nch::mean(GridFunction(g, v)), 2.5, 1e-15);
}

TEST(InnerProduct, BilinearSymmetricCauchySchwarz) {
  std::mt19937_64 rng(11);
  const auto g = square_grid(16);
  std::uniform_real_distribution<double> scalar(-5.0, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto f = nch::testing::random_field(g, rng);
    const auto h = nch::testing::random_field(g, rng);
    const auto k = nch::testing::random_field(g, rng);
    const double a = scalar(rng);
    const double lhs = nch::inner_product(a * f + h, k);
    const double rhs = a * nch::inner_product(f, k) + nch::inner_product(h, k);
    EXPECT_NEAR(lhs, rhs, 1e-12 * (std::abs(a) * nch::norm_l2(f) + nch::norm_l2(h)) *
                              nch::norm_l2(k));
    EXPECT_EQ(nch::inner_product(f, h), nch::inner_product(h, f));
    EXPECT_LE(std::abs(nch::inner_product(f, h)),
              nch::norm_l2(f) * nch::norm_l2(h) + 1e-12);
    const double n = nch::norm_l2(f);
    // sqrt then square: equal up to the rounding of one sqrt.
    EXPECT_NEAR(n * n, nch::inner_product(f, f), 4e-16 * n * n);
    EXPECT_LE(std::abs(nch::mean(nch::testing::zero_mean(f))), 1e-13);
  }
}

TEST(GridFunction, ShiftIsCyclic) {
  const auto g = nch::PeriodicGrid(1.0, 1.0, 4, 6);
  std::vector<double> v(g.size());
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = static_cast<double>(n);
  const GridFunction f(g, v);
  const auto s = f.shifted(1, -1);
  for (int q = 0; q < 6; ++q)
    for (int p = 0; p < 4; ++p) EXPECT_EQ(s(p, q), f((p + 3) % 4, (q + 1) % 6));
}

TEST(CompensatedSum, RecoversCancelledTerms) {
  nch::CompensatedSum s;
  s.add(1.0);
  s.add(1e100);
  s.add(1.0);
  s.add(-1e100);
  EXPECT_EQ(s.value(), 2.0);
}

}  // namespace
