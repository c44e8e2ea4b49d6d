#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nch/grid.hpp"
#include "nch/initial.hpp"
#include "nch/kernel.hpp"
#include "nch/stepper.hpp"

namespace nch {

enum class StudyAxis { time, space };
const char* to_string(StudyAxis axis) noexcept;

/// Stand-in for the unavailable exact solution.
///
/// fine_dt: same grid, dt = finest level dt / ratio.
/// fine_grid: same dt, mesh `ratio` times finer per direction than the
/// finest level, restricted to coarse nodes.
struct ReferenceSpec {
  enum class Kind { fine_dt, fine_grid };
  Kind kind = Kind::fine_dt;
  int ratio = 32;
  double dt = 0.0;
  int nx = 0;
  int ny = 0;
};

struct StudyLevel {
  double dt = 0.0;
  int nx = 0;
  int ny = 0;
  double gamma0 = 0.0;
  double err_hm1 = 0.0;   ///< ||u - ref||_{-1,N} at the final time
  double err_l2l2 = 0.0;  ///< (gamma0 dt sum_k ||u^k - ref^k||_2^2)^{1/2}
};

/// log2 of adjacent error ratios; empty when either error is zero.
struct ObservedOrder {
  std::optional<double> hm1;
  std::optional<double> l2l2;
};

struct RefinementStudy {
  StudyAxis axis = StudyAxis::time;
  std::vector<StudyLevel> levels;
  std::vector<ObservedOrder> orders;
  ReferenceSpec reference;
  double t_end = 0.0;
  double a_frozen = 0.0;
  /// Round-off floor of err_hm1 (space axis only; the levels share the
  /// reference's dt, so the time discretization error is common to both).
  double floor_hm1 = 0.0;
};

struct TemporalStudyOptions {
  std::vector<double> dts;  ///< strictly halving
  double t_end = 0.1;
  StabilizerPolicy stabilizer = StabilizerPolicy::corollary();
  int reference_ratio = 32;  ///< >= 32
  int jobs = 1;
};

struct SpatialStudyOptions {
  std::vector<PeriodicGrid> grids;  ///< each doubling the previous
  double dt = 1e-5;
  double t_end = 0.01;
  StabilizerPolicy stabilizer = StabilizerPolicy::corollary();
  int reference_factor = 4;  ///< >= 4, power of two
  int jobs = 1;
};

using KernelFactory = std::function<Kernel(const PeriodicGrid&)>;

/// Same grid and kernel at every level; A is resolved once from the initial
/// field and frozen. Throws ParameterError on bad preconditions and
/// StudyError naming the level on blow-up.
RefinementStudy temporal_study(const InitialCondition& u0_spec,
                               const Kernel& kernel, const ModelParams& params,
                               const TemporalStudyOptions& options);

/// Kernel and gamma0 are rebuilt on every grid; A is resolved once on the
/// reference grid and frozen.
RefinementStudy spatial_study(const InitialCondition& u0_spec,
                              const KernelFactory& make_kernel, double epsilon,
                              const SpatialStudyOptions& options);

/// norm_hm1(u - ref). Throws ConservationError if the means differ by more
/// than 1e-10 (1 + |mean(ref)|).
double error_hm1(const GridFunction& u, const GridFunction& ref);

/// (gamma0 dt sum_k ||u^k - ref^k||_2^2)^{1/2} from stored trajectories.
double error_l2l2(std::span<const GridFunction> u,
                  std::span<const GridFunction> ref, double gamma0, double dt);

std::optional<double> observed_order(double coarse_error, double fine_error);

/// Samples a fine field at the nodes of a coarse grid whose node count
/// divides the fine one in each direction.
GridFunction restrict_to(const GridFunction& fine, const PeriodicGrid& coarse);

/// JSON report: {axis, levels, orders, reference, config_hash, ...}.
void write_study_json(std::ostream& out, const RefinementStudy& study,
                      const std::string& config_hash);
/// One CSV row per level with the order towards the next level.
void write_study_csv(std::ostream& out, const RefinementStudy& study);

}  // namespace nch
