#pragma once

#include <complex>
#include <filesystem>
#include <span>
#include <vector>

#include "nch/grid.hpp"

namespace nch {

/// Discrete interaction kernel on the shifted mesh (i hx, j hy).
///
/// Values are stored by periodic offset: entry (dp, dq) is the kernel at
/// displacement (dp hx, dq hy), so offset 0 is the origin and offset
/// nx - dp is the image of -dp. A kernel is nonnegative, even, and has a
/// positive mass J*1; the constructor enforces all three.
class Kernel {
 public:
  Kernel(const PeriodicGrid& grid, std::vector<double> values);

  const PeriodicGrid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  /// Plain DFT of the offset-ordered values, FFT order. Real up to round-off.
  std::span<const std::complex<double>> hat() const noexcept { return hat_; }
  /// J*1 = hx hy sum J.
  double j_star_one() const noexcept { return j_star_one_; }
  /// (1/2) hx hy sum J |x|^2 with |x| the minimum-image distance.
  double second_moment() const noexcept { return second_moment_; }
  /// Per-mode symbol of the nonlocal operator, J*1 - hx hy hat. FFT order.
  std::span<const double> nonlocal_symbol() const noexcept {
    return nonlocal_symbol_;
  }

  /// The kernel as a grid function on the same storage (offset layout).
  GridFunction as_grid_function() const;

 private:
  PeriodicGrid grid_;
  std::vector<double> values_;
  std::vector<std::complex<double>> hat_;
  std::vector<double> nonlocal_symbol_;
  double j_star_one_ = 0.0;
  double second_moment_ = 0.0;
};

/// Interfacial parameter and the diffusivity margin it implies.
struct ModelParams {
  double epsilon = 0.0;
  double gamma0 = 0.0;  ///< eps^2 (J*1) - 1
};

/// Throws ParameterError for epsilon <= 0 and DiffusivityError
/// ("kernel too wide for epsilon: gamma0=<value>") when gamma0 <= 0.
ModelParams make_model_params(double epsilon, const Kernel& kernel);

/// Unnormalized half second moment (1/2) hx hy sum v |x|^2 of offset-ordered
/// values, minimum-image distance.
double half_second_moment(const PeriodicGrid& grid, std::span<const double> v);

/// Periodized Gaussian alpha exp(-|x|^2 / sigma^2), images over the 3 x 3
/// neighbouring periods, with alpha chosen so the discrete second moment is
/// exactly 1. Requires 0 < sigma <= min(X, Y) / 4.
Kernel make_gaussian_kernel(const PeriodicGrid& grid, double sigma);

/// Tabulated kernel. With renormalize, values are scaled to unit second
/// moment; otherwise the second moment must already be 1 (1e-10 relative).
/// Throws KernelError on any violation.
Kernel make_tabulated_kernel(const PeriodicGrid& grid,
                             std::vector<double> values, bool renormalize);

/// Reads a `# nch-kernel v1` file. Rows list nodes i = 1..nx (so the last
/// column is the origin), rows j = 1..ny.
Kernel load_kernel(const std::filesystem::path& path, bool renormalize = true);
void save_kernel(const std::filesystem::path& path, const Kernel& kernel);

enum class ConvolutionBackend { fft, direct };

/// (J (*) f)_ij = hx hy sum_{m,n} J_{i-m, j-n} f_mn.
GridFunction convolve(const Kernel& kernel, const GridFunction& f,
                      ConvolutionBackend backend = ConvolutionBackend::fft);

/// L_N f = (J*1) f - J (*) f.
GridFunction nonlocal_op(const Kernel& kernel, const GridFunction& f,
                         ConvolutionBackend backend = ConvolutionBackend::fft);

/// Both sides of |<J (*) f, Lap g>| <= alpha ||f||^2 + C/alpha ||grad g||^2
/// with C = (1/4) ||grad J||_inf^2 |Omega|^2.
struct ConvolutionBound {
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 0.0;        ///< C
  double gradient_bound = 0.0;  ///< ||grad_N J||_inf
};

/// Throws ParameterError when alpha <= 0.
ConvolutionBound lemma22_check(const Kernel& kernel, const GridFunction& f,
                               const GridFunction& g, double alpha);

}  // namespace nch
