#include "nch/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nch/error.hpp"
#include "nch/fft.hpp"
#include "nch/field_io.hpp"
#include "nch/spectral.hpp"

namespace nch {

namespace {

using cplx = std::complex<double>;

constexpr double kEvennessTolerance = 1e-12;
constexpr double kMomentTolerance = 1e-10;

int signed_offset(int d, int n) { return d <= n / 2 ? d : d - n; }

void validate_kernel(const PeriodicGrid& g, std::span<const double> v) {
  double max_abs = 0.0;
  for (std::size_t n = 0; n < v.size(); ++n) {
    if (!std::isfinite(v[n])) throw KernelError("kernel value is not finite");
    if (v[n] < 0.0) {
      std::ostringstream msg;
      msg << "kernel must be nonnegative, found " << v[n] << " at offset " << n;
      throw KernelError(msg.str());
    }
    max_abs = std::max(max_abs, v[n]);
  }
  for (int dq = 0; dq < g.ny(); ++dq) {
    const int mq = (g.ny() - dq) % g.ny();
    for (int dp = 0; dp < g.nx(); ++dp) {
      const int mp = (g.nx() - dp) % g.nx();
      const double a = v[g.index(dp, dq)];
      const double b = v[g.index(mp, mq)];
      if (std::abs(a - b) > kEvennessTolerance * max_abs) {
        std::ostringstream msg;
        msg << "kernel is not even: J(" << dp << "," << dq << ")=" << a
            << " but J(" << mp << "," << mq << ")=" << b;
        throw KernelError(msg.str());
      }
    }
  }
}

}  // namespace

double half_second_moment(const PeriodicGrid& g, std::span<const double> v) {
  if (v.size() != g.size()) {
    throw DimensionError("kernel length does not match grid");
  }
  CompensatedSum sum;
  for (int dq = 0; dq < g.ny(); ++dq) {
    const double y = signed_offset(dq, g.ny()) * g.hy();
    for (int dp = 0; dp < g.nx(); ++dp) {
      const double x = signed_offset(dp, g.nx()) * g.hx();
      sum.add(v[g.index(dp, dq)] * (x * x + y * y));
    }
  }
  return 0.5 * g.cell_area() * sum.value();
}

Kernel::Kernel(const PeriodicGrid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw DimensionError("kernel has " + std::to_string(values_.size()) +
                         " values, grid needs " + std::to_string(grid_.size()));
  }
  validate_kernel(grid_, values_);

  CompensatedSum mass;
  for (double v : values_) mass.add(v);
  j_star_one_ = grid_.cell_area() * mass.value();
  if (!(j_star_one_ > 0.0)) throw KernelError("kernel has zero mass (J*1 = 0)");
  second_moment_ = half_second_moment(grid_, values_);

  hat_.resize(values_.size());
  std::transform(values_.begin(), values_.end(), hat_.begin(),
                 [](double v) { return cplx(v, 0.0); });
  fft::transform(grid_.nx(), grid_.ny(), hat_, fft::Direction::forward);

  nonlocal_symbol_.resize(hat_.size());
  for (std::size_t n = 0; n < hat_.size(); ++n) {
    nonlocal_symbol_[n] = j_star_one_ - grid_.cell_area() * hat_[n].real();
  }
}

GridFunction Kernel::as_grid_function() const {
  return GridFunction(grid_, values_);
}

ModelParams make_model_params(double epsilon, const Kernel& kernel) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ParameterError("epsilon must be positive and finite");
  }
  const double gamma0 = epsilon * epsilon * kernel.j_star_one() - 1.0;
  if (!(gamma0 > 0.0)) {
    std::ostringstream msg;
    msg << "kernel too wide for epsilon: gamma0=" << gamma0;
    throw DiffusivityError(msg.str());
  }
  return {epsilon, gamma0};
}

Kernel make_gaussian_kernel(const PeriodicGrid& g, double sigma) {
  const double limit =
      std::min(g.half_width_x(), g.half_width_y()) / 4.0;
  if (!(sigma > 0.0) || sigma > limit) {
    std::ostringstream msg;
    msg << "gaussian width sigma=" << sigma << " must lie in (0, " << limit
        << "]";
    throw ParameterError(msg.str());
  }
  const double period_x = 2.0 * g.half_width_x();
  const double period_y = 2.0 * g.half_width_y();
  const double inv_s2 = 1.0 / (sigma * sigma);
  std::vector<double> v(g.size());
  for (int dq = 0; dq < g.ny(); ++dq) {
    const double y = signed_offset(dq, g.ny()) * g.hy();
    for (int dp = 0; dp < g.nx(); ++dp) {
      const double x = signed_offset(dp, g.nx()) * g.hx();
      // The Gaussian factorizes, so the 3 x 3 image sum is a product of two
      // 1-D sums. Each pairs the +-period images first, which keeps the
      // samples bitwise even.
      const auto images = [inv_s2](double c, double period) {
        const auto e = [inv_s2](double t) { return std::exp(-t * t * inv_s2); };
        return e(c) + (e(c - period) + e(c + period));
      };
      const double s = images(x, period_x) * images(y, period_y);
      v[g.index(dp, dq)] = s;
    }
  }
  const double alpha = 1.0 / half_second_moment(g, v);
  for (double& x : v) x *= alpha;
  return Kernel(g, std::move(v));
}

Kernel make_tabulated_kernel(const PeriodicGrid& g, std::vector<double> values,
                             bool renormalize) {
  if (values.size() != g.size()) {
    throw DimensionError("kernel table has " + std::to_string(values.size()) +
                         " values, grid needs " + std::to_string(g.size()));
  }
  validate_kernel(g, values);
  const double moment = half_second_moment(g, values);
  if (!(moment > 0.0)) {
    throw KernelError("kernel has no second moment (all mass at the origin)");
  }
  if (renormalize) {
    for (double& x : values) x /= moment;
  } else if (std::abs(moment - 1.0) > kMomentTolerance) {
    std::ostringstream msg;
    msg << "kernel second moment is " << moment << ", expected 1";
    throw KernelError(msg.str());
  }
  return Kernel(g, std::move(values));
}

Kernel load_kernel(const std::filesystem::path& path, bool renormalize) {
  const auto snap = load_field(path, kKernelTag);
  const auto& g = snap.field.grid();
  // File columns are nodes i = 1..nx; offset i mod nx.
  std::vector<double> v(g.size());
  for (int q = 0; q < g.ny(); ++q) {
    for (int p = 0; p < g.nx(); ++p) {
      v[g.index((p + 1) % g.nx(), (q + 1) % g.ny())] = snap.field(p, q);
    }
  }
  return make_tabulated_kernel(g, std::move(v), renormalize);
}

void save_kernel(const std::filesystem::path& path, const Kernel& kernel) {
  const auto& g = kernel.grid();
  std::vector<double> v(g.size());
  for (int q = 0; q < g.ny(); ++q) {
    for (int p = 0; p < g.nx(); ++p) {
      v[g.index(p, q)] = kernel.values()[g.index((p + 1) % g.nx(), (q + 1) % g.ny())];
    }
  }
  save_field(path, GridFunction(g, std::move(v)), 0.0, kKernelTag);
}

GridFunction convolve(const Kernel& kernel, const GridFunction& f,
                      ConvolutionBackend backend) {
  const auto& g = f.grid();
  require_same_grid(kernel.grid(), g, "convolve");
  if (backend == ConvolutionBackend::fft) {
    std::vector<cplx> m(kernel.hat().begin(), kernel.hat().end());
    for (auto& c : m) c *= g.cell_area();
    return apply_multiplier(f, std::span<const cplx>(m));
  }
  const int nx = g.nx();
  const int ny = g.ny();
  const auto J = kernel.values();
  std::vector<double> out(g.size());
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      CompensatedSum sum;
      for (int n = 0; n < ny; ++n) {
        const int dq = ((j - n) % ny + ny) % ny;
        for (int m = 0; m < nx; ++m) {
          const int dp = ((i - m) % nx + nx) % nx;
          sum.add(J[g.index(dp, dq)] * f(m, n));
        }
      }
      out[g.index(i, j)] = g.cell_area() * sum.value();
    }
  }
  return GridFunction(g, std::move(out));
}

GridFunction nonlocal_op(const Kernel& kernel, const GridFunction& f,
                         ConvolutionBackend backend) {
  return kernel.j_star_one() * f - convolve(kernel, f, backend);
}

ConvolutionBound lemma22_check(const Kernel& kernel, const GridFunction& f,
                               const GridFunction& g, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ParameterError("lemma22_check: alpha must be positive");
  }
  require_same_grid(kernel.grid(), f.grid(), "lemma22_check");
  require_same_grid(f.grid(), g.grid(), "lemma22_check");
  ConvolutionBound b;
  b.gradient_bound = norm_linf(gradient(kernel.as_grid_function()));
  const double area = kernel.grid().area();
  b.constant = 0.25 * b.gradient_bound * b.gradient_bound * area * area;
  b.lhs = std::abs(inner_product(convolve(kernel, f), laplacian(g)));
  const auto grad_g = gradient(g);
  b.rhs = alpha * inner_product(f, f) +
          b.constant / alpha * inner_product(grad_g, grad_g);
  return b;
}

}  // namespace nch
