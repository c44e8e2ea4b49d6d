#include "nch/initial.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <sstream>

#include "nch/error.hpp"
#include "nch/field_io.hpp"

namespace nch {

namespace {

bool in_index_set(int k, int n) { return k > -n / 2 && k <= n / 2; }

}  // namespace

const char* to_string(InitialCondition::Kind kind) noexcept {
  switch (kind) {
    case InitialCondition::Kind::cosine_product:
      return "cosine_product";
    case InitialCondition::Kind::random_uniform:
      return "random_uniform";
    case InitialCondition::Kind::single_mode:
      return "single_mode";
    case InitialCondition::Kind::from_file:
      return "from_file";
  }
  return "unknown";
}

bool InitialCondition::band_limited_on(const PeriodicGrid& grid) const noexcept {
  if (kind != Kind::cosine_product && kind != Kind::single_mode) return false;
  return std::abs(kx) < grid.nx() / 2 && std::abs(ky) < grid.ny() / 2;
}

GridFunction make_initial_field(const InitialCondition& ic,
                                const PeriodicGrid& grid) {
  using Kind = InitialCondition::Kind;
  if (ic.kind != Kind::from_file && !std::isfinite(ic.amplitude)) {
    throw ParameterError("initial amplitude must be finite");
  }
  if (ic.kind == Kind::cosine_product || ic.kind == Kind::single_mode) {
    // cos is even, so +-k name the same mode; accept either sign.
    if (!in_index_set(std::abs(ic.kx), grid.nx()) ||
        !in_index_set(std::abs(ic.ky), grid.ny())) {
      std::ostringstream msg;
      msg << "initial mode (" << ic.kx << ", " << ic.ky
          << ") is outside the index set of a " << grid.nx() << "x"
          << grid.ny() << " grid";
      throw ParameterError(msg.str());
    }
  }
  const double wx = ic.kx * std::numbers::pi / grid.half_width_x();
  const double wy = ic.ky * std::numbers::pi / grid.half_width_y();
  switch (ic.kind) {
    case Kind::cosine_product:
      return GridFunction::sample(grid, [&](double x, double y) {
        return ic.amplitude * std::cos(wx * x) * std::cos(wy * y);
      });
    case Kind::single_mode:
      return GridFunction::sample(grid, [&](double x, double y) {
        return ic.amplitude * std::cos(wx * x + wy * y);
      });
    case Kind::random_uniform: {
      if (!(ic.amplitude >= 0.0)) {
        throw ParameterError("random_uniform amplitude must be >= 0");
      }
      std::mt19937_64 rng(ic.seed);
      std::uniform_real_distribution<double> dist(-ic.amplitude, ic.amplitude);
      std::vector<double> v(grid.size());
      for (double& x : v) x = dist(rng);
      return GridFunction(grid, std::move(v));
    }
    case Kind::from_file: {
      auto snap = load_field(ic.path);
      require_same_grid(snap.field.grid(), grid, "initial field file");
      return std::move(snap.field);
    }
  }
  throw ParameterError("unknown initial condition kind");
}

}  // namespace nch
