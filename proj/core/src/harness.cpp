#include "nch/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "nch/error.hpp"
#include "nch/spectral.hpp"

namespace nch {

namespace {

constexpr double kMeanAgreement = 1e-10;

// Runs fn(0..count-1) on up to `jobs` threads. Results are written by index,
// so the outcome does not depend on scheduling; the lowest-index exception
// is rethrown.
template <typename Fn>
void parallel_for(std::size_t count, int jobs, Fn fn) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto threads = static_cast<std::size_t>(std::max(1, jobs));
  if (threads == 1 || count <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < std::min(threads, count); ++t) {
      pool.emplace_back(worker);
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::int64_t exact_steps(double t_end, double dt, const char* what) {
  const double ratio = t_end / dt;
  const double nearest = std::round(ratio);
  if (!(nearest >= 1.0) ||
      std::abs(ratio - nearest) > 1e-9 * std::max(1.0, nearest)) {
    std::ostringstream msg;
    msg << what << ": t_end / dt = " << ratio << " is not a positive integer";
    throw ParameterError(msg.str());
  }
  return static_cast<std::int64_t>(nearest);
}

SolverConfig frozen_config(double dt, double t_end, double a,
                           const ModelParams& params) {
  SolverConfig cfg;
  cfg.dt = dt;
  cfg.t_end = t_end;
  cfg.stabilizer = StabilizerPolicy::fixed(a);
  cfg.params = params;
  return cfg;
}

// Advances a simulation by `count` steps, turning blow-ups into StudyError.
void advance_by(Simulation& sim, std::int64_t count, const std::string& who) {
  try {
    for (std::int64_t i = 0; i < count; ++i) sim.advance();
  } catch (const BlowUpError& e) {
    throw StudyError(who + " blew up: " + e.what());
  }
}

void fill_orders(RefinementStudy& study) {
  study.orders.clear();
  for (std::size_t i = 0; i + 1 < study.levels.size(); ++i) {
    const auto& a = study.levels[i];
    const auto& b = study.levels[i + 1];
    study.orders.push_back({observed_order(a.err_hm1, b.err_hm1),
                            observed_order(a.err_l2l2, b.err_l2l2)});
  }
}

}  // namespace

const char* to_string(StudyAxis axis) noexcept {
  return axis == StudyAxis::time ? "time" : "space";
}

double error_hm1(const GridFunction& u, const GridFunction& ref) {
  require_same_grid(u.grid(), ref.grid(), "error_hm1");
  const double mu = mean(u);
  const double mr = mean(ref);
  if (std::abs(mu - mr) > kMeanAgreement * (1.0 + std::abs(mr))) {
    std::ostringstream msg;
    msg << "error_hm1: means differ (" << mu << " vs " << mr
        << "); the two solutions do not carry the same mass";
    throw ConservationError(msg.str());
  }
  // Remove the round-off mean so the difference is exactly in the domain.
  const GridFunction e = u - ref;
  return norm_hm1(e + (-mean(e)));
}

double error_l2l2(std::span<const GridFunction> u,
                  std::span<const GridFunction> ref, double gamma0, double dt) {
  if (u.size() != ref.size()) {
    throw DimensionError("error_l2l2: trajectories differ in length");
  }
  CompensatedSum sum;
  for (std::size_t k = 1; k < u.size(); ++k) {
    const GridFunction e = u[k] - ref[k];
    sum.add(inner_product(e, e));
  }
  return std::sqrt(gamma0 * dt * sum.value());
}

std::optional<double> observed_order(double coarse_error, double fine_error) {
  if (!(coarse_error > 0.0) || !(fine_error > 0.0) ||
      !std::isfinite(coarse_error) || !std::isfinite(fine_error)) {
    return std::nullopt;
  }
  return std::log2(coarse_error / fine_error);
}

GridFunction restrict_to(const GridFunction& fine, const PeriodicGrid& coarse) {
  const auto& f = fine.grid();
  if (f.half_width_x() != coarse.half_width_x() ||
      f.half_width_y() != coarse.half_width_y() || f.nx() % coarse.nx() != 0 ||
      f.ny() % coarse.ny() != 0) {
    throw DimensionError("restrict_to: grids are not nested");
  }
  const int rx = f.nx() / coarse.nx();
  const int ry = f.ny() / coarse.ny();
  std::vector<double> v(coarse.size());
  for (int q = 0; q < coarse.ny(); ++q) {
    for (int p = 0; p < coarse.nx(); ++p) {
      v[coarse.index(p, q)] = fine(rx * (p + 1) - 1, ry * (q + 1) - 1);
    }
  }
  return GridFunction(coarse, std::move(v));
}

RefinementStudy temporal_study(const InitialCondition& u0_spec,
                               const Kernel& kernel, const ModelParams& params,
                               const TemporalStudyOptions& options) {
  const auto& dts = options.dts;
  if (dts.size() < 2) throw ParameterError("temporal study needs >= 2 levels");
  for (std::size_t i = 0; i < dts.size(); ++i) {
    if (!(dts[i] > 0.0)) throw ParameterError("time steps must be positive");
    if (i > 0 && std::abs(dts[i] - 0.5 * dts[i - 1]) > 1e-12 * dts[i - 1]) {
      std::ostringstream msg;
      msg << "time steps must halve between levels, got " << dts[i - 1]
          << " then " << dts[i];
      throw ParameterError(msg.str());
    }
    exact_steps(options.t_end, dts[i], "temporal study level");
  }
  if (options.reference_ratio < 32 || !is_power_of_two(options.reference_ratio)) {
    throw ParameterError("reference ratio must be a power of two >= 32");
  }

  const auto& grid = kernel.grid();
  const GridFunction u0 = make_initial_field(u0_spec, grid);
  const double a = resolve_stabilizer(options.stabilizer, norm_linf(u0), params);

  RefinementStudy study;
  study.axis = StudyAxis::time;
  study.t_end = options.t_end;
  study.a_frozen = a;
  study.reference.kind = ReferenceSpec::Kind::fine_dt;
  study.reference.ratio = options.reference_ratio;
  study.reference.dt = dts.back() / options.reference_ratio;
  study.reference.nx = grid.nx();
  study.reference.ny = grid.ny();

  // Reference sampled at every multiple of the finest level dt.
  const std::int64_t samples = exact_steps(options.t_end, dts.back(), "reference");
  std::vector<GridFunction> ref;
  ref.reserve(static_cast<std::size_t>(samples) + 1);
  {
    Simulation sim(u0, kernel,
                   frozen_config(study.reference.dt, options.t_end, a, params));
    ref.push_back(sim.current());
    for (std::int64_t s = 1; s <= samples; ++s) {
      advance_by(sim, options.reference_ratio, "reference solution");
      ref.push_back(sim.current());
    }
  }

  study.levels.resize(dts.size());
  parallel_for(dts.size(), options.jobs, [&](std::size_t i) {
    const double dt = dts[i];
    const std::int64_t steps = exact_steps(options.t_end, dt, "level");
    const std::int64_t stride = samples / steps;
    Simulation sim(u0, kernel, frozen_config(dt, options.t_end, a, params));
    CompensatedSum sum;
    const std::string who = "level " + std::to_string(i) + " (dt=" +
                            std::to_string(dt) + ")";
    for (std::int64_t k = 1; k <= steps; ++k) {
      advance_by(sim, 1, who);
      const GridFunction e = sim.current() - ref[static_cast<std::size_t>(k * stride)];
      sum.add(inner_product(e, e));
    }
    auto& level = study.levels[i];
    level.dt = dt;
    level.nx = grid.nx();
    level.ny = grid.ny();
    level.gamma0 = params.gamma0;
    level.err_hm1 = error_hm1(sim.current(), ref.back());
    level.err_l2l2 = std::sqrt(params.gamma0 * dt * sum.value());
  });
  fill_orders(study);
  return study;
}

RefinementStudy spatial_study(const InitialCondition& u0_spec,
                              const KernelFactory& make_kernel, double epsilon,
                              const SpatialStudyOptions& options) {
  const auto& grids = options.grids;
  if (grids.size() < 2) throw ParameterError("spatial study needs >= 2 levels");
  for (std::size_t i = 1; i < grids.size(); ++i) {
    const auto& a = grids[i - 1];
    const auto& b = grids[i];
    if (b.nx() != 2 * a.nx() || b.ny() != 2 * a.ny() ||
        b.half_width_x() != a.half_width_x() ||
        b.half_width_y() != a.half_width_y()) {
      std::ostringstream msg;
      msg << "grids must double between levels on one domain, got " << a.nx()
          << "x" << a.ny() << " then " << b.nx() << "x" << b.ny();
      throw ParameterError(msg.str());
    }
  }
  if (options.reference_factor < 4 || !is_power_of_two(options.reference_factor)) {
    throw ParameterError("reference factor must be a power of two >= 4");
  }
  if (!u0_spec.band_limited_on(grids.front())) {
    throw ParameterError(
        "initial condition is not representable on the coarsest grid "
        "(aliasing); use a cosine_product or single_mode below its Nyquist "
        "mode");
  }
  const std::int64_t steps = exact_steps(options.t_end, options.dt, "spatial study");

  const auto& finest = grids.back();
  const PeriodicGrid ref_grid(finest.half_width_x(), finest.half_width_y(),
                              finest.nx() * options.reference_factor,
                              finest.ny() * options.reference_factor);
  const Kernel ref_kernel = make_kernel(ref_grid);
  const ModelParams ref_params = make_model_params(epsilon, ref_kernel);
  const GridFunction ref_u0 = make_initial_field(u0_spec, ref_grid);
  const double a = resolve_stabilizer(options.stabilizer, norm_linf(ref_u0), ref_params);

  RefinementStudy study;
  study.axis = StudyAxis::space;
  study.t_end = options.t_end;
  study.a_frozen = a;
  study.reference.kind = ReferenceSpec::Kind::fine_grid;
  study.reference.ratio = options.reference_factor;
  study.reference.dt = options.dt;
  study.reference.nx = ref_grid.nx();
  study.reference.ny = ref_grid.ny();

  // Reference restricted to every level grid at every step.
  std::vector<std::vector<GridFunction>> ref(grids.size());
  for (auto& r : ref) r.reserve(static_cast<std::size_t>(steps) + 1);
  {
    Simulation sim(ref_u0, ref_kernel,
                   frozen_config(options.dt, options.t_end, a, ref_params));
    for (std::size_t i = 0; i < grids.size(); ++i) {
      ref[i].push_back(restrict_to(sim.current(), grids[i]));
    }
    for (std::int64_t k = 1; k <= steps; ++k) {
      advance_by(sim, 1, "reference solution");
      for (std::size_t i = 0; i < grids.size(); ++i) {
        ref[i].push_back(restrict_to(sim.current(), grids[i]));
      }
    }
    const double eps = std::numeric_limits<double>::epsilon();
    study.floor_hm1 = 10.0 * eps * std::sqrt(static_cast<double>(steps)) *
                      std::max(norm_l2(sim.current()), eps);
  }

  study.levels.resize(grids.size());
  parallel_for(grids.size(), options.jobs, [&](std::size_t i) {
    const auto& grid = grids[i];
    const Kernel kernel = make_kernel(grid);
    const ModelParams params = make_model_params(epsilon, kernel);
    Simulation sim(make_initial_field(u0_spec, grid), kernel,
                   frozen_config(options.dt, options.t_end, a, params));
    const std::string who = "level " + std::to_string(i) + " (" +
                            std::to_string(grid.nx()) + "x" +
                            std::to_string(grid.ny()) + ")";
    CompensatedSum sum;
    for (std::int64_t k = 1; k <= steps; ++k) {
      advance_by(sim, 1, who);
      const GridFunction e = sim.current() - ref[i][static_cast<std::size_t>(k)];
      sum.add(inner_product(e, e));
    }
    auto& level = study.levels[i];
    level.dt = options.dt;
    level.nx = grid.nx();
    level.ny = grid.ny();
    level.gamma0 = params.gamma0;
    level.err_hm1 = error_hm1(sim.current(), ref[i].back());
    level.err_l2l2 = std::sqrt(params.gamma0 * options.dt * sum.value());
  });
  fill_orders(study);
  return study;
}

void write_study_json(std::ostream& out, const RefinementStudy& study,
                      const std::string& config_hash) {
  using nlohmann::json;
  auto opt = [](const std::optional<double>& v) -> json {
    return v ? json(*v) : json(nullptr);
  };
  json doc;
  doc["axis"] = to_string(study.axis);
  doc["levels"] = json::array();
  for (const auto& l : study.levels) {
    doc["levels"].push_back({{"dt", l.dt},
                             {"nx", l.nx},
                             {"ny", l.ny},
                             {"gamma0", l.gamma0},
                             {"err_hm1", l.err_hm1},
                             {"err_l2l2", l.err_l2l2}});
  }
  doc["orders"] = json::array();
  for (const auto& o : study.orders) {
    doc["orders"].push_back({{"hm1", opt(o.hm1)}, {"l2l2", opt(o.l2l2)}});
  }
  doc["reference"] = {
      {"kind", study.reference.kind == ReferenceSpec::Kind::fine_dt ? "fine_dt"
                                                                    : "fine_grid"},
      {"ratio", study.reference.ratio},
      {"dt", study.reference.dt},
      {"nx", study.reference.nx},
      {"ny", study.reference.ny}};
  doc["t_end"] = study.t_end;
  doc["a_frozen"] = study.a_frozen;
  if (study.axis == StudyAxis::space) doc["floor_hm1"] = study.floor_hm1;
  doc["config_hash"] = config_hash;
  out << doc.dump(2) << '\n';
}

void write_study_csv(std::ostream& out, const RefinementStudy& study) {
  out << "level,dt,nx,ny,err_hm1,err_l2l2,order_hm1,order_l2l2\n";
  auto cell = [](const std::optional<double>& v) {
    if (!v) return std::string();
    std::ostringstream s;
    s.precision(17);
    s << *v;
    return s.str();
  };
  for (std::size_t i = 0; i < study.levels.size(); ++i) {
    const auto& l = study.levels[i];
    std::ostringstream row;
    row.precision(17);
    row << i << ',' << l.dt << ',' << l.nx << ',' << l.ny << ',' << l.err_hm1
        << ',' << l.err_l2l2 << ',';
    if (i < study.orders.size()) {
      row << cell(study.orders[i].hm1) << ',' << cell(study.orders[i].l2l2);
    } else {
      row << ',';
    }
    out << row.str() << '\n';
  }
}

}  // namespace nch
