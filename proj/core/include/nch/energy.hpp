#pragma once

#include "nch/grid.hpp"
#include "nch/kernel.hpp"

namespace nch {

struct EnergyBreakdown {
  double bulk = 0.0;      ///< <F(v), 1>
  double nonlocal = 0.0;  ///< eps^2 / 2 <L_N v, v>
  double total = 0.0;     ///< bulk + nonlocal
};

/// F(v) = (v^2 - 1)^2 / 4, pointwise.
GridFunction double_well(const GridFunction& v);

/// v^3 - v, pointwise.
GridFunction cubic_term(const GridFunction& v);

EnergyBreakdown energy(const GridFunction& v, const Kernel& kernel,
                       const ModelParams& params);

}  // namespace nch
