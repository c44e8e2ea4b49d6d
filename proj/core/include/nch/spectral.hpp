#pragma once

#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "nch/grid.hpp"

namespace nch {

enum class TransformBackend {
  fft,     ///< FFTW, O(N log N)
  direct,  ///< literal double sum, O(N^4); reference for small grids
};

/// Fourier coefficients of a grid function, indexed by (k, l) with
/// -nx/2 < k <= nx/2 and -ny/2 < l <= ny/2.
///
/// The convention is the unnormalized sum over the physical nodes,
///   F(k, l) = sum_{i,j} f_ij exp(-i k pi x_i / X) exp(-i l pi y_j / Y),
/// with the 1 / (nx ny) factor carried by the inverse. Storage is FFT order:
/// offset p holds wavenumber k = p for p <= nx/2 and k = p - nx above.
class SpectralField {
 public:
  SpectralField(const PeriodicGrid& grid,
                std::vector<std::complex<double>> coeffs);

  const PeriodicGrid& grid() const noexcept { return grid_; }
  std::span<const std::complex<double>> coeffs() const noexcept {
    return coeffs_;
  }

  /// Coefficient at signed wavenumbers. Out-of-range indices throw.
  std::complex<double> at(int k, int l) const;

 private:
  PeriodicGrid grid_;
  std::vector<std::complex<double>> coeffs_;
};

/// Per-mode multipliers of the spectral derivatives, FFT-ordered.
struct SymbolTable {
  explicit SymbolTable(const PeriodicGrid& grid);

  PeriodicGrid grid;
  std::vector<std::complex<double>> dx_symbol;  ///< i k pi / X
  std::vector<std::complex<double>> dy_symbol;  ///< i l pi / Y
  std::vector<double> laplace_symbol;           ///< -(k pi/X)^2 - (l pi/Y)^2
};

SpectralField forward(const GridFunction& f,
                      TransformBackend backend = TransformBackend::fft);

/// Throws SymmetryError if the reconstruction has an imaginary part larger
/// than 1e-12 relative to its sup norm.
GridFunction inverse(const SpectralField& coeffs,
                     TransformBackend backend = TransformBackend::fft);

/// (D_x f, D_y f). The Nyquist line k = nx/2 keeps its symbol
/// i (nx/2) pi / X; its contribution is purely imaginary on the mesh and is
/// dropped when projecting back to real grid functions.
std::pair<GridFunction, GridFunction> gradient(const GridFunction& f);
GridFunction divergence(const GridFunction& fx, const GridFunction& fy);
GridFunction laplacian(const GridFunction& f);

/// Unique zero-mean g with -Laplacian(g) = f. Requires
/// |mean(f)| <= 1e-10 * norm_linf(f); throws DomainError otherwise.
GridFunction inverse_laplacian(const GridFunction& f);

/// sqrt(<f, (-Laplacian)^{-1} f>) on zero-mean f.
double norm_hm1(const GridFunction& f);

/// Inner product of vector fields, hx hy sum (a1 b1 + a2 b2).
double inner_product(const std::pair<GridFunction, GridFunction>& a,
                     const std::pair<GridFunction, GridFunction>& b);
/// Pointwise max of sqrt(a1^2 + a2^2).
double norm_linf(const std::pair<GridFunction, GridFunction>& a);

/// Multiplies the unnormalized FFT of f by `multiplier` (FFT order) and
/// transforms back, keeping the real part. Phase factors of the node
/// convention cancel for any diagonal operator, so none are applied.
GridFunction apply_multiplier(const GridFunction& f,
                              std::span<const std::complex<double>> multiplier);
GridFunction apply_multiplier(const GridFunction& f,
                              std::span<const double> multiplier);

/// Tolerance below which |mean(f)| / ||f||_inf counts as zero mean.
inline constexpr double kZeroMeanTolerance = 1e-10;

}  // namespace nch
