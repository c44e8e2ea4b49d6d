#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "nch/energy.hpp"
#include "nch/grid.hpp"
#include "nch/kernel.hpp"

namespace nch {

/// How the stabilizing constant A is chosen.
///
/// `theorem` resolves A = 18 M0^4 / gamma0 and `corollary` resolves
/// A = max(18 M0^4 / gamma0, 3/2 M0^2 - 1/2), both with
/// M0 = margin + (running max of ||u^k||_inf).
struct StabilizerPolicy {
  enum class Mode { fixed, theorem, corollary };

  Mode mode = Mode::corollary;
  double value = 1.0;  ///< A for `fixed`, M0 margin otherwise

  static StabilizerPolicy fixed(double a) { return {Mode::fixed, a}; }
  static StabilizerPolicy theorem(double margin = 1.0) {
    return {Mode::theorem, margin};
  }
  static StabilizerPolicy corollary(double margin = 1.0) {
    return {Mode::corollary, margin};
  }
  bool adaptive() const noexcept { return mode != Mode::fixed; }
};

const char* to_string(StabilizerPolicy::Mode mode) noexcept;

/// Resolved A for the given running max of ||u||_inf. Nondecreasing in
/// linf_history_max. Throws ParameterError for gamma0 <= 0 or a negative
/// fixed A.
double resolve_stabilizer(const StabilizerPolicy& policy,
                          double linf_history_max, const ModelParams& params);

/// Post-hoc energy-stability certificate
/// A >= ||u^{n+1}||_inf^2 / 2 + ||u^n||_inf^2 - 1/2.
bool stability_certificate(double a, double linf_n, double linf_next) noexcept;

struct SolverConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  StabilizerPolicy stabilizer;
  ModelParams params;
  std::int64_t snapshot_every = 1;
  std::int64_t diagnostics_every = 1;

  /// Throws ParameterError unless dt > 0, t_end >= dt, cadences >= 1.
  void validate() const;
  /// ceil(t_end / dt), treating ratios within 1e-9 of an integer as exact.
  std::int64_t step_count() const;
};

struct StepDiagnostics {
  std::int64_t step = 0;
  double time = 0.0;
  EnergyBreakdown energy;
  double mass = 0.0;
  double linf = 0.0;
  double energy_delta = 0.0;  ///< E(u^step) - E(u^{step-1}); 0 for step 0
  double a_used = 0.0;        ///< A used to produce u^step
  bool cond_a0_satisfied = true;
};

/// Receives run output. Every hook has a no-op default.
class DiagnosticsSink {
 public:
  virtual ~DiagnosticsSink() = default;
  virtual void on_diagnostics(const StepDiagnostics&) {}
  virtual void on_snapshot(std::int64_t /*step*/, double /*time*/,
                           const GridFunction&) {}
  virtual void on_stabilizer_change(std::int64_t /*step*/, double /*previous*/,
                                    double /*resolved*/) {}
  virtual void finish() {}
  /// When false, run() skips energy evaluation entirely.
  virtual bool wants_diagnostics() const { return true; }
};

/// Writes `step,time,energy_total,...,cond_a0` rows as they arrive.
class CsvDiagnosticsWriter : public DiagnosticsSink {
 public:
  explicit CsvDiagnosticsWriter(std::ostream& out);
  void on_diagnostics(const StepDiagnostics& d) override;
  void finish() override;

 private:
  std::ostream& out_;
};

/// Keeps every record in memory.
class DiagnosticsRecorder : public DiagnosticsSink {
 public:
  void on_diagnostics(const StepDiagnostics& d) override { rows.push_back(d); }
  void on_stabilizer_change(std::int64_t step, double previous,
                            double resolved) override {
    changes.push_back({step, previous, resolved});
  }

  struct Change {
    std::int64_t step;
    double previous;
    double resolved;
  };
  std::vector<StepDiagnostics> rows;
  std::vector<Change> changes;
};

/// One step of the stabilized semi-implicit scheme with a given A.
///
/// Solved mode by mode:
///   U^{n+1} = (U^n + dt lam (N^n - A U^n)) / (1 - dt lam (A + eps^2 Lhat)),
/// with lam the Laplacian symbol, Lhat the nonlocal symbol and N^n the
/// transform of (u^n)^3 - u^n. Mode (0, 0) is copied. Throws KernelError if
/// any denominator falls below 1 - 1e-9.
GridFunction step(const GridFunction& u_n, const Kernel& kernel,
                  const ModelParams& params, double dt, double a);

/// As above with A resolved from cfg.stabilizer and ||u_n||_inf.
GridFunction step(const GridFunction& u_n, const Kernel& kernel,
                  const SolverConfig& cfg);

/// Stateful time integrator. Holds its own copy of the kernel and the
/// current iterate; advance() moves one step forward.
class Simulation {
 public:
  Simulation(GridFunction u0, Kernel kernel, SolverConfig cfg);

  const GridFunction& current() const noexcept { return u_; }
  std::int64_t step_index() const noexcept { return n_; }
  /// t_n = n dt, computed by multiplication.
  double time() const noexcept { return static_cast<double>(n_) * cfg_.dt; }
  double stabilizer() const noexcept { return a_; }
  double linf_history_max() const noexcept { return linf_max_; }
  const Kernel& kernel() const noexcept { return kernel_; }
  const SolverConfig& config() const noexcept { return cfg_; }

  struct Advance {
    double a_used;
    double previous_a;  ///< differs from a_used when the policy re-resolved
    double linf_before;
    double linf_after;
  };
  /// Throws BlowUpError naming the step if the new iterate is not finite.
  Advance advance();

 private:
  void rebuild_denominator();

  SolverConfig cfg_;
  Kernel kernel_;
  GridFunction u_;
  std::int64_t n_ = 0;
  double a_ = 0.0;
  double linf_max_ = 0.0;
  std::vector<double> laplace_;
  std::vector<double> denominator_;
};

struct RunResult {
  GridFunction final_field;
  std::int64_t steps = 0;
  double a_initial = 0.0;
  double a_final = 0.0;
  std::int64_t stabilizer_changes = 0;
};

/// Applies step_count() steps. Emits diagnostics for step 0, every
/// diagnostics_every steps and the last step; snapshots likewise on their
/// own cadence. Throws BlowUpError on NaN/Inf.
RunResult run(const GridFunction& u0, const Kernel& kernel,
              const SolverConfig& cfg, DiagnosticsSink& sink);

}  // namespace nch
