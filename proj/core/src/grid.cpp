#include "nch/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "nch/error.hpp"

namespace nch {

namespace {

void require_finite(std::span<const double> values) {
  for (std::size_t n = 0; n < values.size(); ++n) {
    if (!std::isfinite(values[n])) {
      std::ostringstream msg;
      msg << "grid function entry " << n << " is not finite (" << values[n]
          << ")";
      throw NonFiniteError(msg.str());
    }
  }
}

}  // namespace

PeriodicGrid::PeriodicGrid(double half_width_x, double half_width_y, int nx,
                           int ny)
    : half_width_x_(half_width_x),
      half_width_y_(half_width_y),
      nx_(nx),
      ny_(ny),
      hx_(2.0 * half_width_x / nx),
      hy_(2.0 * half_width_y / ny) {
  if (nx < 4 || ny < 4 || nx % 2 != 0 || ny % 2 != 0) {
    throw ParameterError("grid node counts must be even and >= 4, got nx=" +
                         std::to_string(nx) + " ny=" + std::to_string(ny));
  }
  if (!(half_width_x > 0.0) || !(half_width_y > 0.0) ||
      !std::isfinite(half_width_x) || !std::isfinite(half_width_y)) {
    throw ParameterError("grid half widths must be positive and finite");
  }
}

void require_same_grid(const PeriodicGrid& a, const PeriodicGrid& b,
                       const char* operation) {
  if (!(a == b)) {
    std::ostringstream msg;
    msg << operation << ": grid mismatch (" << a.nx() << "x" << a.ny()
        << " vs " << b.nx() << "x" << b.ny() << ")";
    throw DimensionError(msg.str());
  }
}

GridFunction::GridFunction(const PeriodicGrid& grid, double value)
    : grid_(grid), values_(grid.size(), value) {
  if (!std::isfinite(value)) {
    throw NonFiniteError("grid function fill value is not finite");
  }
}

GridFunction::GridFunction(const PeriodicGrid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw DimensionError("grid function has " + std::to_string(values_.size()) +
                         " values, grid needs " + std::to_string(grid_.size()));
  }
  require_finite(values_);
}

GridFunction GridFunction::sample(
    const PeriodicGrid& grid, const std::function<double(double, double)>& f) {
  std::vector<double> v(grid.size());
  for (int q = 0; q < grid.ny(); ++q) {
    const double y = grid.y(q);
    for (int p = 0; p < grid.nx(); ++p) {
      v[grid.index(p, q)] = f(grid.x(p), y);
    }
  }
  return GridFunction(grid, std::move(v));
}

GridFunction GridFunction::shifted(int dp, int dq) const {
  const int nx = grid_.nx();
  const int ny = grid_.ny();
  std::vector<double> v(values_.size());
  for (int q = 0; q < ny; ++q) {
    const int sq = ((q - dq) % ny + ny) % ny;
    for (int p = 0; p < nx; ++p) {
      const int sp = ((p - dp) % nx + nx) % nx;
      v[grid_.index(p, q)] = values_[grid_.index(sp, sq)];
    }
  }
  return GridFunction(grid_, std::move(v));
}

namespace {

template <typename Op>
GridFunction combine(const GridFunction& a, const GridFunction& b,
                     const char* name, Op op) {
  require_same_grid(a.grid(), b.grid(), name);
  std::vector<double> v(a.size());
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = op(a[n], b[n]);
  return GridFunction(a.grid(), std::move(v));
}

template <typename Op>
GridFunction map(const GridFunction& a, Op op) {
  std::vector<double> v(a.size());
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = op(a[n]);
  return GridFunction(a.grid(), std::move(v));
}

}  // namespace

GridFunction operator+(const GridFunction& a, const GridFunction& b) {
  return combine(a, b, "operator+", [](double x, double y) { return x + y; });
}

GridFunction operator-(const GridFunction& a, const GridFunction& b) {
  return combine(a, b, "operator-", [](double x, double y) { return x - y; });
}

GridFunction operator-(const GridFunction& a) {
  return map(a, [](double x) { return -x; });
}

GridFunction operator*(double s, const GridFunction& a) {
  return map(a, [s](double x) { return s * x; });
}

GridFunction operator+(const GridFunction& a, double c) {
  return map(a, [c](double x) { return x + c; });
}

double inner_product(const GridFunction& f, const GridFunction& g) {
  require_same_grid(f.grid(), g.grid(), "inner_product");
  CompensatedSum sum;
  for (std::size_t n = 0; n < f.size(); ++n) sum.add(f[n] * g[n]);
  return f.grid().cell_area() * sum.value();
}

double norm_l2(const GridFunction& f) {
  return std::sqrt(std::max(0.0, inner_product(f, f)));
}

double norm_linf(const GridFunction& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double mean(const GridFunction& f) {
  CompensatedSum sum;
  for (double v : f.values()) sum.add(v);
  return f.grid().cell_area() * sum.value() / f.grid().area();
}

}  // namespace nch
