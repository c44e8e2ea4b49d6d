#include "nch/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include "nch/error.hpp"
#include "nch/fft.hpp"
#include "nch/spectral.hpp"

namespace nch {

namespace {

using cplx = std::complex<double>;

constexpr double kDenominatorFloor = 1.0 - 1e-9;

std::vector<double> implicit_denominator(const Kernel& kernel,
                                         std::span<const double> laplace,
                                         double epsilon, double dt, double a) {
  const auto lhat = kernel.nonlocal_symbol();
  const double eps2 = epsilon * epsilon;
  std::vector<double> den(laplace.size());
  for (std::size_t n = 0; n < den.size(); ++n) {
    den[n] = 1.0 - dt * laplace[n] * (a + eps2 * lhat[n]);
    if (den[n] < kDenominatorFloor) {
      std::ostringstream msg;
      msg << "implicit operator lost positivity at mode " << n
          << ": denominator " << den[n]
          << " (kernel transform is not admissible)";
      throw KernelError(msg.str());
    }
  }
  return den;
}

// Solves one step mode by mode; mode 0 is copied so the mean is conserved.
std::vector<double> semi_implicit_update(const GridFunction& u,
                                         std::span<const double> laplace,
                                         std::span<const double> den,
                                         double dt, double a) {
  const auto& g = u.grid();
  std::vector<cplx> uh(u.size());
  std::vector<cplx> nh(u.size());
  for (std::size_t n = 0; n < u.size(); ++n) {
    const double v = u[n];
    uh[n] = v;
    nh[n] = v * v * v - v;
  }
  fft::transform(g.nx(), g.ny(), uh, fft::Direction::forward);
  fft::transform(g.nx(), g.ny(), nh, fft::Direction::forward);
  const double norm = 1.0 / static_cast<double>(g.size());
  uh[0] *= norm;
  for (std::size_t n = 1; n < uh.size(); ++n) {
    uh[n] = (uh[n] + dt * laplace[n] * (nh[n] - a * uh[n])) / den[n] * norm;
  }
  fft::transform(g.nx(), g.ny(), uh, fft::Direction::backward);
  std::vector<double> out(uh.size());
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = uh[n].real();
  return out;
}

std::string format17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

const char* to_string(StabilizerPolicy::Mode mode) noexcept {
  switch (mode) {
    case StabilizerPolicy::Mode::fixed:
      return "fixed";
    case StabilizerPolicy::Mode::theorem:
      return "theorem";
    case StabilizerPolicy::Mode::corollary:
      return "corollary";
  }
  return "unknown";
}

double resolve_stabilizer(const StabilizerPolicy& policy,
                          double linf_history_max, const ModelParams& params) {
  if (policy.mode == StabilizerPolicy::Mode::fixed) {
    if (!(policy.value >= 0.0) || !std::isfinite(policy.value)) {
      throw ParameterError("fixed stabilizer A must be finite and >= 0");
    }
    return policy.value;
  }
  if (!(params.gamma0 > 0.0)) {
    throw ParameterError("stabilizer policy needs gamma0 > 0");
  }
  const double m0 = policy.value + linf_history_max;
  const double m2 = m0 * m0;
  const double convergence = 18.0 * m2 * m2 / params.gamma0;
  if (policy.mode == StabilizerPolicy::Mode::theorem) return convergence;
  return std::max(convergence, 1.5 * m2 - 0.5);
}

bool stability_certificate(double a, double linf_n, double linf_next) noexcept {
  return a >= 0.5 * linf_next * linf_next + linf_n * linf_n - 0.5;
}

void SolverConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ParameterError("dt must be positive and finite");
  }
  if (!(t_end >= dt) || !std::isfinite(t_end)) {
    throw ParameterError("t_end must be finite and >= dt");
  }
  if (snapshot_every < 1 || diagnostics_every < 1) {
    throw ParameterError("output cadences must be >= 1");
  }
  if (stabilizer.mode != StabilizerPolicy::Mode::fixed &&
      (!(stabilizer.value >= 0.0) || !std::isfinite(stabilizer.value))) {
    throw ParameterError("stabilizer margin must be finite and >= 0");
  }
}

std::int64_t SolverConfig::step_count() const {
  const double ratio = t_end / dt;
  if (!(ratio < 9.0e15)) throw ParameterError("t_end / dt overflows the step index");
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, nearest)) {
    return static_cast<std::int64_t>(nearest);
  }
  return static_cast<std::int64_t>(std::ceil(ratio));
}

CsvDiagnosticsWriter::CsvDiagnosticsWriter(std::ostream& out) : out_(out) {
  out_ << "step,time,energy_total,energy_bulk,energy_nonlocal,mass,linf,"
          "energy_delta,a_used,cond_a0\n";
}

void CsvDiagnosticsWriter::on_diagnostics(const StepDiagnostics& d) {
  out_ << d.step << ',' << format17(d.time) << ',' << format17(d.energy.total)
       << ',' << format17(d.energy.bulk) << ',' << format17(d.energy.nonlocal)
       << ',' << format17(d.mass) << ',' << format17(d.linf) << ','
       << format17(d.energy_delta) << ',' << format17(d.a_used) << ','
       << (d.cond_a0_satisfied ? 1 : 0) << '\n';
}

void CsvDiagnosticsWriter::finish() { out_.flush(); }

GridFunction step(const GridFunction& u_n, const Kernel& kernel,
                  const ModelParams& params, double dt, double a) {
  require_same_grid(u_n.grid(), kernel.grid(), "step");
  if (!(a >= 0.0)) throw ParameterError("stabilizer A must be >= 0");
  if (!(dt > 0.0)) throw ParameterError("dt must be positive");
  const SymbolTable symbols(u_n.grid());
  const auto den =
      implicit_denominator(kernel, symbols.laplace_symbol, params.epsilon, dt, a);
  return GridFunction(u_n.grid(), semi_implicit_update(u_n, symbols.laplace_symbol,
                                                       den, dt, a));
}

GridFunction step(const GridFunction& u_n, const Kernel& kernel,
                  const SolverConfig& cfg) {
  const double a = resolve_stabilizer(cfg.stabilizer, norm_linf(u_n), cfg.params);
  return step(u_n, kernel, cfg.params, cfg.dt, a);
}

Simulation::Simulation(GridFunction u0, Kernel kernel, SolverConfig cfg)
    : cfg_(cfg), kernel_(std::move(kernel)), u_(std::move(u0)) {
  cfg_.validate();
  require_same_grid(u_.grid(), kernel_.grid(), "Simulation");
  linf_max_ = norm_linf(u_);
  a_ = resolve_stabilizer(cfg_.stabilizer, linf_max_, cfg_.params);
  laplace_ = SymbolTable(u_.grid()).laplace_symbol;
  rebuild_denominator();
}

void Simulation::rebuild_denominator() {
  denominator_ = implicit_denominator(kernel_, laplace_, cfg_.params.epsilon,
                                      cfg_.dt, a_);
}

Simulation::Advance Simulation::advance() {
  Advance info{};
  info.previous_a = a_;
  if (cfg_.stabilizer.adaptive()) {
    const double resolved =
        resolve_stabilizer(cfg_.stabilizer, linf_max_, cfg_.params);
    if (resolved != a_) {
      a_ = resolved;
      rebuild_denominator();
    }
  }
  info.a_used = a_;
  info.linf_before = norm_linf(u_);
  try {
    // The cubic term can overflow before the update itself does.
    auto next = semi_implicit_update(u_, laplace_, denominator_, cfg_.dt, a_);
    u_ = GridFunction(u_.grid(), std::move(next));
  } catch (const NonFiniteError&) {
    throw BlowUpError("solution is not finite at step " + std::to_string(n_ + 1),
                      n_ + 1);
  }
  ++n_;
  info.linf_after = norm_linf(u_);
  linf_max_ = std::max(linf_max_, info.linf_after);
  return info;
}

RunResult run(const GridFunction& u0, const Kernel& kernel,
              const SolverConfig& cfg, DiagnosticsSink& sink) {
  Simulation sim(u0, kernel, cfg);
  const std::int64_t steps = cfg.step_count();
  const bool wants = sink.wants_diagnostics();

  RunResult result{u0, steps, sim.stabilizer(), sim.stabilizer(), 0};
  std::optional<EnergyBreakdown> e_current;
  if (wants) {
    e_current = energy(sim.current(), sim.kernel(), cfg.params);
    StepDiagnostics d;
    d.step = 0;
    d.time = 0.0;
    d.energy = *e_current;
    d.mass = mean(sim.current());
    d.linf = norm_linf(sim.current());
    d.a_used = sim.stabilizer();
    sink.on_diagnostics(d);
  }
  sink.on_snapshot(0, 0.0, sim.current());

  for (std::int64_t k = 1; k <= steps; ++k) {
    const bool emit = wants && (k % cfg.diagnostics_every == 0 || k == steps);
    if (emit && !e_current) {
      e_current = energy(sim.current(), sim.kernel(), cfg.params);
    }
    const auto adv = sim.advance();
    if (adv.a_used != adv.previous_a) {
      ++result.stabilizer_changes;
      sink.on_stabilizer_change(k, adv.previous_a, adv.a_used);
    }
    if (emit) {
      EnergyBreakdown e_next;
      try {
        e_next = energy(sim.current(), sim.kernel(), cfg.params);
      } catch (const NonFiniteError&) {
        throw BlowUpError("energy overflowed at step " + std::to_string(k), k);
      }
      StepDiagnostics d;
      d.step = k;
      d.time = sim.time();
      d.energy = e_next;
      d.mass = mean(sim.current());
      d.linf = adv.linf_after;
      d.energy_delta = e_next.total - e_current->total;
      d.a_used = adv.a_used;
      d.cond_a0_satisfied =
          stability_certificate(adv.a_used, adv.linf_before, adv.linf_after);
      sink.on_diagnostics(d);
      e_current = e_next;
    } else {
      e_current.reset();
    }
    if (k % cfg.snapshot_every == 0 || k == steps) {
      sink.on_snapshot(k, sim.time(), sim.current());
    }
  }
  sink.finish();
  result.final_field = sim.current();
  result.a_final = sim.stabilizer();
  return result;
}

}  // namespace nch
