#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace nch {

/// Uniform periodic mesh of (-X, X) x (-Y, Y) with nx * ny nodes.
///
/// Nodes are x_i = -X + i hx, y_j = -Y + j hy for 1 <= i <= nx,
/// 1 <= j <= ny. Storage offsets are zero based: offset p holds node
/// i = p + 1, and the value of node (i, j) lives at (j - 1) * nx + (i - 1).
class PeriodicGrid {
 public:
  /// Throws ParameterError unless nx, ny are even and >= 4 and both
  /// half widths are positive and finite.
  PeriodicGrid(double half_width_x, double half_width_y, int nx, int ny);

  double half_width_x() const noexcept { return half_width_x_; }
  double half_width_y() const noexcept { return half_width_y_; }
  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  double hx() const noexcept { return hx_; }
  double hy() const noexcept { return hy_; }
  double h() const noexcept { return hx_ > hy_ ? hx_ : hy_; }
  /// hx * hy, the quadrature weight of one node.
  double cell_area() const noexcept { return hx_ * hy_; }
  /// |Omega| = 4 X Y.
  double area() const noexcept { return 4.0 * half_width_x_ * half_width_y_; }
  std::size_t size() const noexcept {
    return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_);
  }

  /// Coordinate of zero-based offset p, i.e. -X + (p + 1) hx.
  double x(int p) const noexcept { return -half_width_x_ + (p + 1) * hx_; }
  double y(int q) const noexcept { return -half_width_y_ + (q + 1) * hy_; }

  std::size_t index(int p, int q) const noexcept {
    return static_cast<std::size_t>(q) * static_cast<std::size_t>(nx_) +
           static_cast<std::size_t>(p);
  }

  /// Signed wavenumber of FFT-ordered offset p: k in (-nx/2, nx/2].
  int wavenumber_x(int p) const noexcept { return p <= nx_ / 2 ? p : p - nx_; }
  int wavenumber_y(int q) const noexcept { return q <= ny_ / 2 ? q : q - ny_; }

  friend bool operator==(const PeriodicGrid&, const PeriodicGrid&) = default;

 private:
  double half_width_x_;
  double half_width_y_;
  int nx_;
  int ny_;
  double hx_;
  double hy_;
};

/// Throws DimensionError if a and b differ.
void require_same_grid(const PeriodicGrid& a, const PeriodicGrid& b,
                       const char* operation);

/// Real periodic grid function, row-major over the grid's nodes.
///
/// Values are fixed at construction and always finite; constructors throw
/// NonFiniteError otherwise.
class GridFunction {
 public:
  explicit GridFunction(const PeriodicGrid& grid, double value = 0.0);
  GridFunction(const PeriodicGrid& grid, std::vector<double> values);

  /// Samples f(x, y) at every node.
  static GridFunction sample(const PeriodicGrid& grid,
                             const std::function<double(double, double)>& f);

  const PeriodicGrid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }

  double operator()(int p, int q) const noexcept {
    return values_[grid_.index(p, q)];
  }
  double operator[](std::size_t n) const noexcept { return values_[n]; }

  /// Returns the values, leaving this field empty-shaped but valid to destroy.
  std::vector<double> release() && { return std::move(values_); }

  /// Cyclic shift: result(p, q) = this((p - dp) mod nx, (q - dq) mod ny).
  GridFunction shifted(int dp, int dq) const;

 private:
  PeriodicGrid grid_;
  std::vector<double> values_;
};

GridFunction operator+(const GridFunction& a, const GridFunction& b);
GridFunction operator-(const GridFunction& a, const GridFunction& b);
GridFunction operator-(const GridFunction& a);
GridFunction operator*(double s, const GridFunction& a);
GridFunction operator+(const GridFunction& a, double c);

/// Discrete L2 inner product hx hy sum f g, compensated summation.
double inner_product(const GridFunction& f, const GridFunction& g);
double norm_l2(const GridFunction& f);
double norm_linf(const GridFunction& f);
/// <f, 1> / |Omega|.
double mean(const GridFunction& f);

/// Compensated (Neumaier) running sum.
class CompensatedSum {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      carry_ += (sum_ - t) + v;
    } else {
      carry_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace nch
