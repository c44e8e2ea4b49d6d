#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "nch/error.hpp"
#include "nch/initial.hpp"
#include "nch/reference.hpp"
#include "nch/spectral.hpp"
#include "nch/stepper.hpp"
#include "dense_oracle.hpp"
#include "test_support.hpp"

namespace {

using nch::GridFunction;
using nch::StabilizerPolicy;
using nch::testing::kPi;
using nch::testing::square_grid;

TEST(Stabilizer, ResolvedValues) {
  const nch::ModelParams unit{0.5, 1.0};
  EXPECT_DOUBLE_EQ(nch::resolve_stabilizer(StabilizerPolicy::theorem(), 0.0, unit), 18.0);
  EXPECT_DOUBLE_EQ(nch::resolve_stabilizer(StabilizerPolicy::corollary(), 0.0, unit), 18.0);
  EXPECT_DOUBLE_EQ(
      nch::resolve_stabilizer(StabilizerPolicy::corollary(), 1.0, nch::ModelParams{0.5, 100.0}),
      5.5);
  EXPECT_DOUBLE_EQ(nch::resolve_stabilizer(StabilizerPolicy::fixed(3.25), 9.0, unit), 3.25);
  EXPECT_THROW((void)nch::resolve_stabilizer(StabilizerPolicy::fixed(-1.0), 0.0, unit),
               nch::ParameterError);
  EXPECT_THROW((void)nch::resolve_stabilizer(StabilizerPolicy::theorem(), 0.0,
                                             nch::ModelParams{0.5, 0.0}),
               nch::ParameterError);
  double prev = 0.0;
  for (double m = 0.0; m < 5.0; m += 0.25) {
    const double a = nch::resolve_stabilizer(StabilizerPolicy::corollary(), m, {0.5, 7.0});
    EXPECT_GE(a, prev);
    EXPECT_GE(a, 0.0);
    prev = a;
  }
}

TEST(Stabilizer, Certificate) {
  EXPECT_TRUE(nch::stability_certificate(1.0, 1.0, 1.0));   // 1 >= 1/2 + 1 - 1/2
  EXPECT_FALSE(nch::stability_certificate(0.99, 1.0, 1.0));
  EXPECT_TRUE(nch::stability_certificate(0.0, 0.5, 0.5));
}

TEST(SolverConfig, ValidationAndStepCount) {
  nch::SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 0.1;
  EXPECT_EQ(cfg.step_count(), 100);
  cfg.t_end = 0.1005;
  EXPECT_EQ(cfg.step_count(), 101);
  cfg.dt = 0.0;
  EXPECT_THROW(cfg.validate(), nch::ParameterError);
  cfg.dt = 1.0;
  cfg.t_end = 0.5;
  EXPECT_THROW(cfg.validate(), nch::ParameterError);
  cfg.t_end = 2.0;
  cfg.snapshot_every = 0;
  EXPECT_THROW(cfg.validate(), nch::ParameterError);
}

TEST(Step, FixedPoints) {
  const auto g = square_grid(16);
  const auto k = nch::make_gaussian_kernel(g, 0.3);
  const auto p = nch::make_model_params(0.5, k);
  for (double c : {-1.0, 0.0, 1.0})
    for (double a : {0.0, 2.0, 50.0}) {
      const auto u = nch::step(GridFunction(g, c), k, p, 0.01, a);
      EXPECT_LE(nch::testing::max_abs_diff(u, GridFunction(g, c)), 1e-14);
    }
}

TEST(Step, MatchesDenseSolve) {
  std::mt19937_64 rng(31);
  const nch::PeriodicGrid g(kPi, 2.0, 8, 6);
  const auto k = nch::make_gaussian_kernel(g, 0.45);
  const auto p = nch::make_model_params(1.0, k);
  for (double a : {0.0, 1.0, 2.0, 18.0}) {
    for (int trial = 0; trial < 3; ++trial) {
      const auto u = nch::testing::random_field(g, rng);
      const auto spectral = nch::step(u, k, p, 0.01, a);
      const auto dense = nch::testing::dense_step(u, k, p.epsilon, 0.01, a);
      const auto lib_dense = nch::reference::dense_step(u, k, p.epsilon, 0.01, a);
      const double s = nch::norm_linf(dense);
      EXPECT_LE(nch::testing::max_abs_diff(spectral, dense), 1e-10 * s);
      EXPECT_LE(nch::testing::max_abs_diff(lib_dense, dense), 1e-10 * s);
    }
  }
}

// The new iterate satisfies the scheme's linear equation; the residual of a
// sum of two solutions against the sum of right-hand sides vanishes too.
TEST(Step, ResidualAndSuperposition) {
  std::mt19937_64 rng(37);
  const auto g = square_grid(16);
  const auto k = nch::make_gaussian_kernel(g, 0.4);
  const auto p = nch::make_model_params(0.8, k);
  const double dt = 5e-3, a = 3.0;
  const auto apply_m = [&](const GridFunction& w) {
    return w - dt * nch::laplacian(a * w + p.epsilon * p.epsilon * nch::nonlocal_op(k, w));
  };
  const auto rhs = [&](const GridFunction& u) {
    return u + dt * nch::laplacian(nch::cubic_term(u) - a * u);
  };
  for (int trial = 0; trial < 10; ++trial) {
    const auto u1 = nch::testing::random_field(g, rng);
    const auto u2 = nch::testing::random_field(g, rng);
    const auto w1 = nch::step(u1, k, p, dt, a);
    const auto w2 = nch::step(u2, k, p, dt, a);
    const auto r1 = rhs(u1);
    const auto r2 = rhs(u2);
    const double s = nch::norm_linf(r1) + nch::norm_linf(r2);
    EXPECT_LE(nch::testing::max_abs_diff(apply_m(w1), r1), 1e-11 * s);
    EXPECT_LE(nch::testing::max_abs_diff(apply_m(w1 + 2.5 * w2), r1 + 2.5 * r2), 1e-11 * s * 2.5);
  }
}

TEST(Step, ConservesMass) {
  std::mt19937_64 rng(41);
  const auto g = square_grid(16);
  const auto k = nch::make_gaussian_kernel(g, 0.3);
  const auto p = nch::make_model_params(0.5, k);
  for (int trial = 0; trial < 10; ++trial) {
    const auto u = nch::testing::random_field(g, rng) + 0.3;
    EXPECT_LE(std::abs(nch::mean(nch::step(u, k, p, 1e-2, 4.0)) - nch::mean(u)), 1e-13);
  }
}

TEST(Step, RejectsNegativeStabilizer) {
  const auto g = square_grid(8);
  const auto k = nch::make_gaussian_kernel(g, 0.4);
  const auto p = nch::make_model_params(1.0, k);
  EXPECT_THROW((void)nch::step(GridFunction(g), k, p, 1e-2, -1.0), nch::ParameterError);
}

TEST(Run, ConstantOneStaysAtZeroEnergy) {
  const auto g = square_grid(16);
  const auto k = nch::make_gaussian_kernel(g, 0.3);
  nch::SolverConfig cfg;
  cfg.dt = 1e-2;
  cfg.t_end = 0.5;
  cfg.params = nch::make_model_params(0.5, k);
  nch::DiagnosticsRecorder rec;
  const auto res = nch::run(GridFunction(g, 1.0), k, cfg, rec);
  EXPECT_EQ(res.steps, 50);
  ASSERT_EQ(rec.rows.size(), 51u);
  for (const auto& r : rec.rows) {
    EXPECT_NEAR(r.energy.total, 0.0, 1e-13);
    EXPECT_TRUE(r.cond_a0_satisfied);
  }
  EXPECT_LE(nch::testing::max_abs_diff(res.final_field, GridFunction(g, 1.0)), 1e-14);
}

TEST(Run, DissipatesEnergyAndConservesMass) {
  const auto g = square_grid(64);
  const auto k = nch::make_gaussian_kernel(g, 0.2);
  nch::SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 0.5;
  cfg.params = nch::make_model_params(0.5, k);
  const auto u0 = GridFunction::sample(
      g, [](double x, double y) { return 0.05 * std::cos(x) * std::cos(y); });
  nch::DiagnosticsRecorder rec;
  (void)nch::run(u0, k, cfg, rec);
  ASSERT_EQ(rec.rows.size(), 501u);
  for (std::size_t n = 1; n < rec.rows.size(); ++n) {
    const auto& r = rec.rows[n];
    EXPECT_EQ(r.step, static_cast<std::int64_t>(n));
    EXPECT_EQ(r.time, static_cast<double>(n) * 1e-3);
    EXPECT_LE(r.energy_delta, 1e-12 * (1.0 + std::abs(rec.rows[n - 1].energy.total)));
    EXPECT_TRUE(r.cond_a0_satisfied);
  }

  std::mt19937_64 rng(43);
  const auto r0 = nch::testing::random_field(g, rng, 0.1);
  nch::DiagnosticsRecorder rec2;
  (void)nch::run(r0, k, cfg, rec2);
  for (const auto& r : rec2.rows) EXPECT_LE(std::abs(r.mass - rec2.rows[0].mass), 1e-12);
}

TEST(Run, CadenceAndCsv) {
  const auto g = square_grid(8);
  const auto k = nch::make_gaussian_kernel(g, 0.5);
  nch::SolverConfig cfg;
  cfg.dt = 0.1;
  cfg.t_end = 1.0;
  cfg.diagnostics_every = 3;
  cfg.params = nch::make_model_params(1.0, k);
  std::ostringstream csv;
  nch::CsvDiagnosticsWriter writer(csv);
  (void)nch::run(GridFunction(g, 0.2), k, cfg, writer);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "step,time,energy_total,energy_bulk,energy_nonlocal,mass,linf,energy_delta,a_used,cond_a0");
  std::vector<int> steps;
  while (std::getline(in, line)) steps.push_back(std::stoi(line.substr(0, line.find(','))));
  EXPECT_EQ(steps, (std::vector<int>{0, 3, 6, 9, 10}));
}

TEST(Simulation, ReResolvesWhenTheSolutionGrows) {
  // Random data in [-1.5, 1.5] relax toward the wells; A tracks the running max.
  std::mt19937_64 rng(47);
  const auto g = square_grid(16);
  const auto k = nch::make_gaussian_kernel(g, 0.3);
  nch::SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 0.05;
  cfg.params = nch::make_model_params(0.5, k);
  nch::Simulation sim(nch::testing::random_field(g, rng, 0.2), k, cfg);
  const double a0 = sim.stabilizer();
  EXPECT_DOUBLE_EQ(a0, nch::resolve_stabilizer(cfg.stabilizer, sim.linf_history_max(), cfg.params));
  double last = a0;
  for (int n = 0; n < 50; ++n) {
    const auto adv = sim.advance();
    EXPECT_GE(adv.a_used, last);
    last = adv.a_used;
    EXPECT_EQ(sim.step_index(), n + 1);
  }
}

TEST(Simulation, BlowUpNamesTheStep) {
  const auto g = square_grid(16);
  const auto k = nch::make_gaussian_kernel(g, 0.4);
  nch::SolverConfig cfg;
  cfg.dt = 0.5;
  cfg.t_end = 50.0;
  cfg.stabilizer = StabilizerPolicy::fixed(0.0);
  cfg.params = nch::make_model_params(0.5, k);
  nch::DiagnosticsRecorder rec;
  const auto u0 = nch::make_initial_field(nch::InitialCondition::random_uniform(20.0, 2), g);
  try {
    (void)nch::run(u0, k, cfg, rec);
    FAIL() << "expected blow-up";
  } catch (const nch::BlowUpError& e) {
    EXPECT_GT(e.step(), 0);
    EXPECT_LE(e.step(), 10);
  }
}

}  // namespace
