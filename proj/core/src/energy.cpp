#include "nch/energy.hpp"

#include <vector>

namespace nch {

GridFunction double_well(const GridFunction& v) {
  std::vector<double> out(v.size());
  for (std::size_t n = 0; n < out.size(); ++n) {
    const double w = v[n] * v[n] - 1.0;
    out[n] = 0.25 * w * w;
  }
  return GridFunction(v.grid(), std::move(out));
}

GridFunction cubic_term(const GridFunction& v) {
  std::vector<double> out(v.size());
  for (std::size_t n = 0; n < out.size(); ++n) {
    out[n] = v[n] * v[n] * v[n] - v[n];
  }
  return GridFunction(v.grid(), std::move(out));
}

EnergyBreakdown energy(const GridFunction& v, const Kernel& kernel,
                       const ModelParams& params) {
  require_same_grid(v.grid(), kernel.grid(), "energy");
  EnergyBreakdown e;
  const auto F = double_well(v);
  CompensatedSum bulk;
  for (double x : F.values()) bulk.add(x);
  e.bulk = v.grid().cell_area() * bulk.value();
  e.nonlocal = 0.5 * params.epsilon * params.epsilon *
               inner_product(nonlocal_op(kernel, v), v);
  e.total = e.bulk + e.nonlocal;
  return e;
}

}  // namespace nch
