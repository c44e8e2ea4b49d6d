#include "nch/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nch/error.hpp"
#include "nch/fft.hpp"

namespace nch {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr double kImagTolerance = 1e-12;

// exp(i k pi) exp(-2 pi i k / n): converts an offset-indexed DFT into the
// sum over physical nodes x_p = -X + (p + 1) h.
cplx node_phase(int k, int n) {
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  return sign * std::polar(1.0, -2.0 * kPi * k / n);
}

std::vector<cplx> to_complex(const GridFunction& f) {
  std::vector<cplx> out(f.size());
  std::transform(f.values().begin(), f.values().end(), out.begin(),
                 [](double v) { return cplx(v, 0.0); });
  return out;
}

std::vector<cplx> direct_forward(const GridFunction& f) {
  const auto& g = f.grid();
  const int nx = g.nx();
  const int ny = g.ny();
  std::vector<cplx> out(g.size());
  for (int lq = 0; lq < ny; ++lq) {
    const double ly = g.wavenumber_y(lq) * kPi / g.half_width_y();
    for (int kp = 0; kp < nx; ++kp) {
      const double kx = g.wavenumber_x(kp) * kPi / g.half_width_x();
      cplx sum = 0.0;
      for (int q = 0; q < ny; ++q) {
        for (int p = 0; p < nx; ++p) {
          sum += f(p, q) * std::polar(1.0, -(kx * g.x(p) + ly * g.y(q)));
        }
      }
      out[g.index(kp, lq)] = sum;
    }
  }
  return out;
}

std::vector<cplx> direct_inverse(const SpectralField& F) {
  const auto& g = F.grid();
  const int nx = g.nx();
  const int ny = g.ny();
  const auto c = F.coeffs();
  std::vector<cplx> out(g.size());
  const double norm = 1.0 / static_cast<double>(g.size());
  for (int q = 0; q < ny; ++q) {
    for (int p = 0; p < nx; ++p) {
      cplx sum = 0.0;
      for (int lq = 0; lq < ny; ++lq) {
        const double ly = g.wavenumber_y(lq) * kPi / g.half_width_y();
        for (int kp = 0; kp < nx; ++kp) {
          const double kx = g.wavenumber_x(kp) * kPi / g.half_width_x();
          sum += c[g.index(kp, lq)] * std::polar(1.0, kx * g.x(p) + ly * g.y(q));
        }
      }
      out[g.index(p, q)] = sum * norm;
    }
  }
  return out;
}

GridFunction real_part(const PeriodicGrid& grid, const std::vector<cplx>& z,
                       bool strict) {
  std::vector<double> re(z.size());
  double max_abs = 0.0;
  double max_imag = 0.0;
  for (std::size_t n = 0; n < z.size(); ++n) {
    re[n] = z[n].real();
    max_abs = std::max(max_abs, std::abs(z[n]));
    max_imag = std::max(max_imag, std::abs(z[n].imag()));
  }
  if (strict && max_imag > kImagTolerance * max_abs) {
    std::ostringstream msg;
    msg << "inverse transform is not real: imaginary residue " << max_imag
        << " against sup norm " << max_abs;
    throw SymmetryError(msg.str());
  }
  return GridFunction(grid, std::move(re));
}

template <typename Multiplier>
GridFunction apply_diagonal(const GridFunction& f, std::span<const Multiplier> m) {
  const auto& g = f.grid();
  if (m.size() != g.size()) {
    throw DimensionError("multiplier length does not match grid");
  }
  auto data = to_complex(f);
  fft::transform(g.nx(), g.ny(), data, fft::Direction::forward);
  const double norm = 1.0 / static_cast<double>(g.size());
  for (std::size_t n = 0; n < data.size(); ++n) data[n] *= m[n] * norm;
  fft::transform(g.nx(), g.ny(), data, fft::Direction::backward);
  return real_part(g, data, false);
}

void require_zero_mean(const GridFunction& f, const char* operation) {
  const double m = mean(f);
  if (std::abs(m) > kZeroMeanTolerance * norm_linf(f)) {
    std::ostringstream msg;
    msg << operation << " needs a zero-mean field, measured mean " << m;
    throw DomainError(msg.str(), m);
  }
}

}  // namespace

SpectralField::SpectralField(const PeriodicGrid& grid, std::vector<cplx> coeffs)
    : grid_(grid), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid_.size()) {
    throw DimensionError("spectral field length does not match grid");
  }
}

cplx SpectralField::at(int k, int l) const {
  const int nx = grid_.nx();
  const int ny = grid_.ny();
  if (k <= -nx / 2 || k > nx / 2 || l <= -ny / 2 || l > ny / 2) {
    throw ParameterError("wavenumber (" + std::to_string(k) + ", " +
                         std::to_string(l) + ") outside the index set");
  }
  const int p = k < 0 ? k + nx : k;
  const int q = l < 0 ? l + ny : l;
  return coeffs_[grid_.index(p, q)];
}

SymbolTable::SymbolTable(const PeriodicGrid& g)
    : grid(g),
      dx_symbol(g.size()),
      dy_symbol(g.size()),
      laplace_symbol(g.size()) {
  for (int q = 0; q < g.ny(); ++q) {
    const double ly = g.wavenumber_y(q) * kPi / g.half_width_y();
    for (int p = 0; p < g.nx(); ++p) {
      const double kx = g.wavenumber_x(p) * kPi / g.half_width_x();
      const auto n = g.index(p, q);
      dx_symbol[n] = cplx(0.0, kx);
      dy_symbol[n] = cplx(0.0, ly);
      laplace_symbol[n] = -(kx * kx) - ly * ly;
    }
  }
}

SpectralField forward(const GridFunction& f, TransformBackend backend) {
  const auto& g = f.grid();
  if (backend == TransformBackend::direct) {
    return SpectralField(g, direct_forward(f));
  }
  auto data = to_complex(f);
  fft::transform(g.nx(), g.ny(), data, fft::Direction::forward);
  for (int q = 0; q < g.ny(); ++q) {
    const cplx py = node_phase(g.wavenumber_y(q), g.ny());
    for (int p = 0; p < g.nx(); ++p) {
      data[g.index(p, q)] *= node_phase(g.wavenumber_x(p), g.nx()) * py;
    }
  }
  return SpectralField(g, std::move(data));
}

GridFunction inverse(const SpectralField& coeffs, TransformBackend backend) {
  const auto& g = coeffs.grid();
  if (backend == TransformBackend::direct) {
    return real_part(g, direct_inverse(coeffs), true);
  }
  std::vector<cplx> data(coeffs.coeffs().begin(), coeffs.coeffs().end());
  const double norm = 1.0 / static_cast<double>(g.size());
  for (int q = 0; q < g.ny(); ++q) {
    const cplx py = std::conj(node_phase(g.wavenumber_y(q), g.ny()));
    for (int p = 0; p < g.nx(); ++p) {
      data[g.index(p, q)] *=
          std::conj(node_phase(g.wavenumber_x(p), g.nx())) * py * norm;
    }
  }
  fft::transform(g.nx(), g.ny(), data, fft::Direction::backward);
  return real_part(g, data, true);
}

GridFunction apply_multiplier(const GridFunction& f,
                              std::span<const cplx> multiplier) {
  return apply_diagonal(f, multiplier);
}

GridFunction apply_multiplier(const GridFunction& f,
                              std::span<const double> multiplier) {
  return apply_diagonal(f, multiplier);
}

std::pair<GridFunction, GridFunction> gradient(const GridFunction& f) {
  const SymbolTable symbols(f.grid());
  return {apply_multiplier(f, std::span<const cplx>(symbols.dx_symbol)),
          apply_multiplier(f, std::span<const cplx>(symbols.dy_symbol))};
}

GridFunction divergence(const GridFunction& fx, const GridFunction& fy) {
  require_same_grid(fx.grid(), fy.grid(), "divergence");
  const SymbolTable symbols(fx.grid());
  return apply_multiplier(fx, std::span<const cplx>(symbols.dx_symbol)) +
         apply_multiplier(fy, std::span<const cplx>(symbols.dy_symbol));
}

GridFunction laplacian(const GridFunction& f) {
  const SymbolTable symbols(f.grid());
  return apply_multiplier(f, std::span<const double>(symbols.laplace_symbol));
}

GridFunction inverse_laplacian(const GridFunction& f) {
  require_zero_mean(f, "inverse_laplacian");
  const SymbolTable symbols(f.grid());
  std::vector<double> m(symbols.laplace_symbol.size());
  for (std::size_t n = 1; n < m.size(); ++n) {
    m[n] = -1.0 / symbols.laplace_symbol[n];
  }
  m[0] = 0.0;  // zero-mean representative
  return apply_multiplier(f, std::span<const double>(m));
}

double norm_hm1(const GridFunction& f) {
  return std::sqrt(std::max(0.0, inner_product(f, inverse_laplacian(f))));
}

double inner_product(const std::pair<GridFunction, GridFunction>& a,
                     const std::pair<GridFunction, GridFunction>& b) {
  require_same_grid(a.first.grid(), b.first.grid(), "inner_product");
  require_same_grid(a.second.grid(), b.second.grid(), "inner_product");
  CompensatedSum sum;
  for (std::size_t n = 0; n < a.first.size(); ++n) {
    sum.add(a.first[n] * b.first[n]);
    sum.add(a.second[n] * b.second[n]);
  }
  return a.first.grid().cell_area() * sum.value();
}

double norm_linf(const std::pair<GridFunction, GridFunction>& a) {
  double m = 0.0;
  for (std::size_t n = 0; n < a.first.size(); ++n) {
    m = std::max(m, std::hypot(a.first[n], a.second[n]));
  }
  return m;
}

}  // namespace nch
