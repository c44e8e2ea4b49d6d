#pragma once

#include <cstdint>
#include <string>

#include "nch/grid.hpp"

namespace nch {

/// Initial data generators.
///
/// cosine_product: a cos(kx pi x / X) cos(ky pi y / Y)
/// single_mode:    a cos(kx pi x / X + ky pi y / Y)
/// random_uniform: iid uniform in [-a, a], fully determined by the seed
/// from_file:      a field snapshot on the target grid
struct InitialCondition {
  enum class Kind { cosine_product, random_uniform, single_mode, from_file };

  Kind kind = Kind::cosine_product;
  double amplitude = 0.0;
  int kx = 1;
  int ky = 1;
  std::uint64_t seed = 0;
  std::string path;

  static InitialCondition cosine_product(double amplitude, int kx, int ky) {
    return {Kind::cosine_product, amplitude, kx, ky, 0, {}};
  }
  static InitialCondition single_mode(double amplitude, int kx, int ky) {
    return {Kind::single_mode, amplitude, kx, ky, 0, {}};
  }
  static InitialCondition random_uniform(double amplitude, std::uint64_t seed) {
    return {Kind::random_uniform, amplitude, 0, 0, seed, {}};
  }
  static InitialCondition from_file(std::string path) {
    return {Kind::from_file, 0.0, 0, 0, 0, std::move(path)};
  }

  /// True for the trigonometric kinds whose modes sit strictly inside the
  /// grid's Nyquist band, so the field is the same function on any finer
  /// grid.
  bool band_limited_on(const PeriodicGrid& grid) const noexcept;
};

const char* to_string(InitialCondition::Kind kind) noexcept;

/// Throws ParameterError for a non-finite amplitude or modes outside the
/// grid's index set, FormatError/DimensionError for unusable files.
GridFunction make_initial_field(const InitialCondition& ic,
                                const PeriodicGrid& grid);

}  // namespace nch
