#include "nch/reference.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "nch/error.hpp"

namespace nch::reference {

namespace {

// Second-derivative matrix of one periodic direction, from the inverse-sum
// definition: (1/n) sum_k -(k pi / L)^2 exp(i k pi (x_a - x_b) / L). Only the
// real part survives: the +-k terms pair into cosines and the Nyquist term is
// real at the nodes.
Eigen::MatrixXd second_derivative_1d(int n, double half_width) {
  Eigen::MatrixXd d2(n, n);
  const double h = 2.0 * half_width / n;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const double dx = (a - b) * h;
      double s = 0.0;
      for (int k = -n / 2 + 1; k <= n / 2; ++k) {
        const double w = k * std::numbers::pi / half_width;
        s += -w * w * std::cos(w * dx);
      }
      d2(a, b) = s / n;
    }
  }
  return d2;
}

Eigen::MatrixXd laplacian_dense(const PeriodicGrid& g) {
  const int nx = g.nx();
  const int ny = g.ny();
  const auto dxx = second_derivative_1d(nx, g.half_width_x());
  const auto dyy = second_derivative_1d(ny, g.half_width_y());
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (int q = 0; q < ny; ++q) {
    for (int p = 0; p < nx; ++p) {
      const auto row = static_cast<Eigen::Index>(g.index(p, q));
      for (int pp = 0; pp < nx; ++pp) {
        lap(row, static_cast<Eigen::Index>(g.index(pp, q))) += dxx(p, pp);
      }
      for (int qq = 0; qq < ny; ++qq) {
        lap(row, static_cast<Eigen::Index>(g.index(p, qq))) += dyy(q, qq);
      }
    }
  }
  return lap;
}

Eigen::MatrixXd nonlocal_dense(const Kernel& kernel) {
  const auto& g = kernel.grid();
  const int nx = g.nx();
  const int ny = g.ny();
  const auto n = static_cast<Eigen::Index>(g.size());
  const auto J = kernel.values();
  Eigen::MatrixXd L = kernel.j_star_one() * Eigen::MatrixXd::Identity(n, n);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      for (int m = 0; m < ny; ++m) {
        for (int l = 0; l < nx; ++l) {
          const int dp = ((i - l) % nx + nx) % nx;
          const int dq = ((j - m) % ny + ny) % ny;
          L(static_cast<Eigen::Index>(g.index(i, j)),
            static_cast<Eigen::Index>(g.index(l, m))) -=
              g.cell_area() * J[g.index(dp, dq)];
        }
      }
    }
  }
  return L;
}

std::vector<double> to_vector(const Eigen::MatrixXd& m) {
  std::vector<double> out(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      out[static_cast<std::size_t>(r * m.cols() + c)] = m(r, c);
    }
  }
  return out;
}

}  // namespace

std::vector<double> laplacian_matrix(const PeriodicGrid& grid) {
  return to_vector(laplacian_dense(grid));
}

std::vector<double> nonlocal_matrix(const Kernel& kernel) {
  return to_vector(nonlocal_dense(kernel));
}

GridFunction dense_step(const GridFunction& u_n, const Kernel& kernel,
                        double epsilon, double dt, double a) {
  require_same_grid(u_n.grid(), kernel.grid(), "dense_step");
  const auto& g = u_n.grid();
  if (g.size() > 4096) throw ParameterError("dense_step is limited to 64x64 nodes");
  const auto n = static_cast<Eigen::Index>(g.size());
  const Eigen::MatrixXd lap = laplacian_dense(g);
  const Eigen::MatrixXd L = nonlocal_dense(kernel);

  Eigen::VectorXd u(n);
  Eigen::VectorXd cubic(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = u_n[static_cast<std::size_t>(i)];
    u(i) = v;
    cubic(i) = v * v * v - v - a * v;
  }
  const Eigen::MatrixXd system =
      Eigen::MatrixXd::Identity(n, n) -
      dt * lap * (a * Eigen::MatrixXd::Identity(n, n) + epsilon * epsilon * L);
  const Eigen::VectorXd rhs = u + dt * lap * cubic;
  const Eigen::VectorXd next = system.partialPivLu().solve(rhs);
  return GridFunction(g, std::vector<double>(next.data(), next.data() + n));
}

}  // namespace nch::reference
