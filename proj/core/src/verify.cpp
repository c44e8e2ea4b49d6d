#include "nch/verify.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "nch/config.hpp"
#include "nch/energy.hpp"
#include "nch/error.hpp"
#include "nch/field_io.hpp"
#include "nch/harness.hpp"
#include "nch/kernel.hpp"
#include "nch/reference.hpp"
#include "nch/spectral.hpp"
#include "nch/stepper.hpp"

namespace nch {

namespace {

constexpr int kTrials = 10;

class Checker {
 public:
  explicit Checker(std::vector<CheckResult>& out) : out_(out) {}

  // fn returns the worst measured/allowed ratio; <= 1 passes.
  void check(const char* module, const char* property,
             const std::function<double()>& fn) {
    CheckResult r{module, property, false, {}};
    try {
      const double worst = fn();
      r.passed = worst <= 1.0;
      std::ostringstream d;
      d.precision(3);
      d << "worst/tolerance=" << worst;
      r.detail = d.str();
    } catch (const std::exception& e) {
      r.detail = std::string("threw: ") + e.what();
    }
    out_.push_back(std::move(r));
  }

  void expect_throw(const char* module, const char* property,
                    const std::function<void()>& fn) {
    CheckResult r{module, property, false, "no error raised"};
    try {
      fn();
    } catch (const Error& e) {
      r.passed = true;
      r.detail = e.what();
    } catch (const std::exception& e) {
      r.detail = std::string("unexpected error: ") + e.what();
    }
    out_.push_back(std::move(r));
  }

 private:
  std::vector<CheckResult>& out_;
};

GridFunction random_field(const PeriodicGrid& g, std::mt19937_64& rng,
                          double amplitude = 1.0) {
  std::uniform_real_distribution<double> d(-amplitude, amplitude);
  std::vector<double> v(g.size());
  for (auto& x : v) x = d(rng);
  return GridFunction(g, std::move(v));
}

// Drops the Nyquist lines, where the real first derivative is not defined.
GridFunction band_limit(const GridFunction& f) {
  const auto& g = f.grid();
  std::vector<double> mask(g.size(), 1.0);
  for (int q = 0; q < g.ny(); ++q) {
    for (int p = 0; p < g.nx(); ++p) {
      if (p == g.nx() / 2 || q == g.ny() / 2) mask[g.index(p, q)] = 0.0;
    }
  }
  return apply_multiplier(f, std::span<const double>(mask));
}

GridFunction zero_mean(const GridFunction& f) { return f + (-mean(f)); }

double max_diff(const GridFunction& a, const GridFunction& b) {
  return norm_linf(a - b);
}

double ratio(double measured, double allowed) {
  if (measured <= allowed) return allowed > 0.0 ? measured / allowed : 0.0;
  return allowed > 0.0 ? measured / allowed : INFINITY;
}

void grid_checks(Checker& c, const PeriodicGrid& g, std::uint64_t seed) {
  c.check("grid", "spacing times count equals the period", [&] {
    const bool ok = g.hx() * g.nx() == 2.0 * g.half_width_x() &&
                    g.hy() * g.ny() == 2.0 * g.half_width_y() &&
                    g.x(g.nx() - 1) == g.half_width_x();
    return ok ? 0.0 : 2.0;
  });
  c.expect_throw("grid", "odd node count rejected",
                 [] { PeriodicGrid(1.0, 1.0, 7, 8); });
  c.expect_throw("grid", "non-finite values rejected", [&] {
    std::vector<double> v(g.size(), 0.0);
    v.back() = std::nan("");
    GridFunction(g, std::move(v));
  });
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> scalar(-3.0, 3.0);
  double bilinear = 0.0, schwarz = 0.0, norm_sq = 0.0, zero = 0.0;
  for (int t = 0; t < kTrials; ++t) {
    const auto f = random_field(g, rng);
    const auto h = random_field(g, rng);
    const auto k = random_field(g, rng);
    const double a = scalar(rng);
    const double scale =
        (std::abs(a) * norm_l2(f) + norm_l2(h)) * norm_l2(k);
    bilinear = std::max(
        bilinear, ratio(std::abs(inner_product(a * f + h, k) -
                                 a * inner_product(f, k) - inner_product(h, k)),
                        1e-12 * scale));
    schwarz = std::max(schwarz,
                       ratio(std::max(0.0, std::abs(inner_product(f, h)) -
                                               norm_l2(f) * norm_l2(h)),
                             1e-12));
    const double n = norm_l2(f);
    norm_sq = std::max(norm_sq, ratio(std::abs(n * n - inner_product(f, f)),
                                      4e-16 * n * n));
    zero = std::max(zero, ratio(std::abs(mean(zero_mean(f))), 1e-13));
  }
  c.check("grid", "inner product is bilinear", [&] { return bilinear; });
  c.check("grid", "Cauchy-Schwarz", [&] { return schwarz; });
  c.check("grid", "norm squared equals inner product", [&] { return norm_sq; });
  c.check("grid", "projected field has zero mean", [&] { return zero; });
}

void spectral_checks(Checker& c, const PeriodicGrid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed + 1);
  c.check("spectral", "fft transform equals direct sum", [&] {
    const auto f = random_field(g, rng);
    const auto a = forward(f);
    const auto b = forward(f, TransformBackend::direct);
    double diff = 0.0, scale = 0.0;
    for (std::size_t n = 0; n < a.coeffs().size(); ++n) {
      diff = std::max(diff, std::abs(a.coeffs()[n] - b.coeffs()[n]));
      scale = std::max(scale, std::abs(b.coeffs()[n]));
    }
    return ratio(diff, 1e-12 * scale);
  });
  c.check("spectral", "conjugate symmetry of real transforms", [&] {
    const auto F = forward(random_field(g, rng));
    double worst = 0.0, scale = 0.0;
    for (auto v : F.coeffs()) scale = std::max(scale, std::abs(v));
    for (int l = -g.ny() / 2 + 1; l < g.ny() / 2; ++l) {
      for (int k = -g.nx() / 2 + 1; k < g.nx() / 2; ++k) {
        worst = std::max(worst, std::abs(F.at(-k, -l) - std::conj(F.at(k, l))));
      }
    }
    return ratio(worst, 1e-12 * scale);
  });
  c.check("spectral", "inverse of forward is the identity", [&] {
    const auto f = random_field(g, rng);
    return ratio(max_diff(inverse(forward(f)), f), 1e-12 * norm_linf(f));
  });
  c.check("spectral", "symbol signs and zero modes", [&] {
    const SymbolTable t(g);
    bool ok = t.laplace_symbol[0] == 0.0;
    for (int q = 0; q < g.ny(); ++q) {
      for (int p = 0; p < g.nx(); ++p) {
        const auto n = g.index(p, q);
        if (n != 0 && !(t.laplace_symbol[n] < 0.0)) ok = false;
        if (p == 0 && t.dx_symbol[n] != 0.0) ok = false;
        if (q == 0 && t.dy_symbol[n] != 0.0) ok = false;
      }
    }
    return ok ? 0.0 : 2.0;
  });
  c.check("spectral", "trigonometric polynomials differentiate exactly", [&] {
    const int kx = g.nx() / 2 - 1;
    const int ky = g.ny() / 2 - 1;
    const double a = kx * std::numbers::pi / g.half_width_x();
    const double b = ky * std::numbers::pi / g.half_width_y();
    const auto f = GridFunction::sample(g, [&](double x, double y) {
      return std::sin(a * x + 0.3) * std::cos(b * y);
    });
    const auto lap = (-(a * a + b * b)) * f;
    const auto fx = GridFunction::sample(g, [&](double x, double y) {
      return a * std::cos(a * x + 0.3) * std::cos(b * y);
    });
    const double s = a * a + b * b;
    return std::max(ratio(max_diff(laplacian(f), lap), 1e-12 * s),
                    ratio(max_diff(gradient(f).first, fx), 1e-12 * s));
  });
  double sbp = 0.0, sym = 0.0, inv_sym = 0.0, inv_pd = 0.0, inv = 0.0;
  for (int t = 0; t < kTrials; ++t) {
    const auto f = band_limit(random_field(g, rng));
    const auto h = band_limit(random_field(g, rng));
    const auto gf = gradient(f);
    const auto gh = gradient(h);
    const double scale = norm_l2(f) * std::sqrt(inner_product(gh, gh));
    const double a = inner_product(f, laplacian(h));
    sbp = std::max(sbp, ratio(std::abs(a + inner_product(gf, gh)), 1e-11 * scale));
    sym = std::max(sym, ratio(std::abs(a - inner_product(laplacian(f), h)),
                              1e-11 * scale));
    const auto f0 = zero_mean(f);
    const auto h0 = zero_mean(h);
    const auto if0 = inverse_laplacian(f0);
    inv_sym = std::max(
        inv_sym,
        ratio(std::abs(inner_product(f0, inverse_laplacian(h0)) -
                       inner_product(if0, h0)),
              1e-11 * norm_l2(f0) * norm_l2(h0)));
    inv_pd = std::max(inv_pd, inner_product(f0, if0) > 0.0 ? 0.0 : 2.0);
    inv = std::max(inv, ratio(max_diff(-laplacian(if0), f0), 1e-11 * norm_linf(f0)));
  }
  c.check("spectral", "summation by parts", [&] { return sbp; });
  c.check("spectral", "Laplacian is symmetric", [&] { return sym; });
  c.check("spectral", "inverse Laplacian is self-adjoint", [&] { return inv_sym; });
  c.check("spectral", "inverse Laplacian is positive definite", [&] { return inv_pd; });
  c.check("spectral", "Laplacian inverts inverse_laplacian", [&] { return inv; });
  c.expect_throw("spectral", "nonzero mean rejected by inverse_laplacian",
                 [&] { (void)inverse_laplacian(GridFunction(g, 1.0)); });
}

void kernel_checks(Checker& c, const Kernel& k, std::uint64_t seed) {
  const auto& g = k.grid();
  c.check("kernel", "nonnegative, even, positive mass", [&] {
    double worst = 0.0, vmax = 0.0;
    for (double v : k.values()) {
      if (v < 0.0) return 2.0;
      vmax = std::max(vmax, v);
    }
    for (int q = 0; q < g.ny(); ++q) {
      for (int p = 0; p < g.nx(); ++p) {
        const auto a = k.values()[g.index(p, q)];
        const auto b = k.values()[g.index((g.nx() - p) % g.nx(), (g.ny() - q) % g.ny())];
        worst = std::max(worst, std::abs(a - b));
      }
    }
    return k.j_star_one() > 0.0 ? ratio(worst, 1e-12 * vmax) : 2.0;
  });
  c.check("kernel", "unit second moment", [&] {
    return ratio(std::abs(k.second_moment() - 1.0), 1e-12);
  });
  c.check("kernel", "transform is real", [&] {
    double imag = 0.0, scale = 0.0;
    for (auto v : k.hat()) {
      imag = std::max(imag, std::abs(v.imag()));
      scale = std::max(scale, std::abs(v));
    }
    return ratio(imag, 1e-11 * scale);
  });
  std::mt19937_64 rng(seed + 2);
  double conv = 0.0, adj = 0.0, psd = 0.0, comm = 0.0;
  double max_lambda = 0.0;
  const SymbolTable symbols(g);
  for (double s : symbols.laplace_symbol) max_lambda = std::max(max_lambda, -s);
  for (int t = 0; t < kTrials; ++t) {
    const auto f = random_field(g, rng);
    const auto h = random_field(g, rng);
    const auto direct = convolve(k, f, ConvolutionBackend::direct);
    conv = std::max(conv, ratio(max_diff(convolve(k, f), direct),
                                1e-11 * norm_linf(direct)));
    const auto lf = nonlocal_op(k, f);
    adj = std::max(adj, ratio(std::abs(inner_product(lf, h) -
                                       inner_product(f, nonlocal_op(k, h))),
                              1e-11 * k.j_star_one() * norm_l2(f) * norm_l2(h)));
    psd = std::max(psd, ratio(std::max(0.0, -inner_product(lf, f)),
                              1e-11 * inner_product(f, f)));
    comm = std::max(comm, ratio(max_diff(nonlocal_op(k, laplacian(f)), laplacian(lf)),
                                1e-9 * norm_linf(f) * max_lambda));
  }
  c.check("kernel", "fft convolution equals direct sum", [&] { return conv; });
  c.check("kernel", "nonlocal operator is self-adjoint", [&] { return adj; });
  c.check("kernel", "nonlocal operator is positive semi-definite", [&] { return psd; });
  c.check("kernel", "nonlocal operator commutes with the Laplacian", [&] { return comm; });
  c.expect_throw("kernel", "uneven kernel rejected", [&] {
    std::vector<double> v(g.size(), 1.0);
    v[1] = 2.0;
    Kernel(g, std::move(v));
  });
  c.expect_throw("kernel", "gamma0 <= 0 rejected",
                 [&] { (void)make_model_params(1e-3, k); });
}

void energy_checks(Checker& c, const Kernel& k, const ModelParams& p,
                   std::uint64_t seed) {
  std::mt19937_64 rng(seed + 3);
  std::uniform_int_distribution<int> shift(0, 64);
  double split = 0.0, nonneg = 0.0, trans = 0.0, even = 0.0;
  for (int t = 0; t < kTrials; ++t) {
    const auto v = random_field(k.grid(), rng, 1.5);
    const auto e = energy(v, k, p);
    split = std::max(split, e.total == e.bulk + e.nonlocal ? 0.0 : 2.0);
    nonneg = std::max(nonneg, e.bulk >= 0.0 && e.nonlocal >= -1e-11 * e.total ? 0.0 : 2.0);
    const auto s = energy(v.shifted(shift(rng), shift(rng)), k, p);
    trans = std::max(trans, ratio(std::abs(s.total - e.total), 1e-11 * std::abs(e.total)));
    even = std::max(even, ratio(std::abs(energy(-v, k, p).total - e.total),
                                1e-12 * std::abs(e.total)));
  }
  c.check("energy", "total is bulk plus nonlocal", [&] { return split; });
  c.check("energy", "energy is nonnegative", [&] { return nonneg; });
  c.check("energy", "energy is translation invariant", [&] { return trans; });
  c.check("energy", "energy is even", [&] { return even; });
}

void stepper_checks(Checker& c, const Kernel& k, const ModelParams& p,
                    const Kernel& small, const ModelParams& small_p,
                    std::uint64_t seed) {
  const auto& g = k.grid();
  std::mt19937_64 rng(seed + 4);
  c.check("stepper", "stabilizer is nonnegative and nondecreasing", [&] {
    double prev = 0.0;
    for (auto policy : {StabilizerPolicy::theorem(), StabilizerPolicy::corollary()}) {
      prev = 0.0;
      for (double m = 0.0; m <= 4.0; m += 0.5) {
        const double a = resolve_stabilizer(policy, m, p);
        if (!(a >= prev)) return 2.0;
        prev = a;
      }
    }
    return 0.0;
  });
  double mass = 0.0, fixed = 0.0;
  for (int t = 0; t < kTrials; ++t) {
    const auto u = random_field(g, rng) + 0.2;
    mass = std::max(mass, ratio(std::abs(mean(step(u, k, p, 1e-2, 2.0)) - mean(u)), 1e-13));
  }
  for (double cst : {-1.0, 0.0, 1.0}) {
    const GridFunction u(g, cst);
    fixed = std::max(fixed, ratio(max_diff(step(u, k, p, 1e-2, 3.0), u), 1e-13));
  }
  c.check("stepper", "step conserves mass", [&] { return mass; });
  c.check("stepper", "constants -1, 0, 1 are fixed points", [&] { return fixed; });
  c.check("stepper", "spectral step equals dense solve", [&] {
    double worst = 0.0;
    for (double a : {0.0, 1.0, 18.0}) {
      const auto u = random_field(small.grid(), rng);
      const auto dense = reference::dense_step(u, small, small_p.epsilon, 1e-2, a);
      worst = std::max(worst, ratio(max_diff(step(u, small, small_p, 1e-2, a), dense),
                                    1e-10 * norm_linf(dense)));
    }
    return worst;
  });
  c.check("stepper", "implicit solve is linear", [&] {
    const double dt = 5e-3, a = 2.0, e2 = p.epsilon * p.epsilon;
    const auto apply_m = [&](const GridFunction& w) {
      return w - dt * laplacian(a * w + e2 * nonlocal_op(k, w));
    };
    const auto rhs = [&](const GridFunction& u) {
      return u + dt * laplacian(cubic_term(u) - a * u);
    };
    double worst = 0.0;
    for (int t = 0; t < kTrials; ++t) {
      const auto u1 = random_field(g, rng);
      const auto u2 = random_field(g, rng);
      const auto w = step(u1, k, p, dt, a) + (-1.5) * step(u2, k, p, dt, a);
      const auto r = rhs(u1) + (-1.5) * rhs(u2);
      worst = std::max(worst, ratio(max_diff(apply_m(w), r), 1e-11 * norm_linf(r)));
    }
    return worst;
  });
  c.check("stepper", "energy dissipates when the certificate holds", [&] {
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 0.05;
    cfg.params = p;
    DiagnosticsRecorder rec;
    (void)run(random_field(g, rng, 0.5), k, cfg, rec);
    double worst = 0.0;
    for (std::size_t n = 1; n < rec.rows.size(); ++n) {
      const auto& r = rec.rows[n];
      if (!r.cond_a0_satisfied) return 2.0;
      const double tol = 1e-12 * (1.0 + std::abs(rec.rows[n - 1].energy.total));
      worst = std::max(worst, ratio(std::max(0.0, r.energy_delta), tol));
      worst = std::max(worst, ratio(std::abs(r.mass - rec.rows[0].mass),
                                    1e-12 * (1.0 + std::abs(rec.rows[0].mass))));
    }
    return worst;
  });
}

void harness_checks(Checker& c, const PeriodicGrid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed + 5);
  c.check("harness", "reference has zero error against itself", [&] {
    const auto u = random_field(g, rng);
    const std::vector<GridFunction> traj{u, u, u};
    return error_hm1(u, u) == 0.0 && error_l2l2(traj, traj, 1.0, 0.1) == 0.0 ? 0.0 : 2.0;
  });
  c.check("harness", "l2l2 accumulator equals direct recomputation", [&] {
    std::vector<GridFunction> u, r;
    for (int n = 0; n < 4; ++n) {
      u.push_back(random_field(g, rng));
      r.push_back(random_field(g, rng));
    }
    double s = 0.0;
    for (int n = 1; n < 4; ++n) {
      const auto e = u[n] - r[n];
      double local = 0.0;
      for (double v : e.values()) local += v * v;
      s += local * g.cell_area();
    }
    const double expected = std::sqrt(2.0 * 0.05 * s);
    return ratio(std::abs(error_l2l2(u, r, 2.0, 0.05) - expected), 1e-12 * expected);
  });
  c.check("harness", "observed order is log2 of the error ratio", [&] {
    const auto o = observed_order(0.8, 0.2);
    return o && std::abs(*o - 2.0) < 1e-15 && !observed_order(0.0, 0.0) ? 0.0 : 2.0;
  });
  c.expect_throw("harness", "non-halving time steps rejected", [&] {
    const auto k = make_gaussian_kernel(g, std::min(g.half_width_x(), g.half_width_y()) / 4);
    TemporalStudyOptions o;
    o.dts = {0.01, 0.01};
    o.t_end = 0.02;
    (void)temporal_study(InitialCondition::cosine_product(0.1, 1, 1), k,
                         make_model_params(2.0, k), o);
  });
}

void io_checks(Checker& c, const PeriodicGrid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed + 6);
  c.check("cli", "field snapshot round trip is bit exact", [&] {
    const auto f = random_field(g, rng, 1e3);
    std::stringstream s;
    write_field(s, f, 0.1);
    const auto back = read_field(s);
    for (std::size_t n = 0; n < f.size(); ++n) {
      if (back.field[n] != f[n]) return 2.0;
    }
    return back.time == 0.1 ? 0.0 : 2.0;
  });
  c.expect_throw("cli", "unknown configuration keys rejected", [] {
    (void)parse_config(R"({"grid": {"nx": 8, "ny": 8, "typo": 1}})");
  });
}

}  // namespace

std::vector<CheckResult> run_checks(int nx, int ny, std::uint64_t seed) {
  if (nx > 16 || ny > 16) {
    throw ParameterError("run_checks: grids above 16x16 are not supported");
  }
  const PeriodicGrid grid(std::numbers::pi, std::numbers::pi, nx, ny);
  const PeriodicGrid small(std::numbers::pi, std::numbers::pi, std::min(nx, 8),
                           std::min(ny, 8));
  // Wide enough to be resolved on the coarsest admissible grid.
  const double sigma = std::numbers::pi / 4;
  const Kernel kernel = make_gaussian_kernel(grid, sigma);
  const Kernel small_kernel = make_gaussian_kernel(small, sigma);
  const ModelParams params = make_model_params(2.0, kernel);
  const ModelParams small_params = make_model_params(2.0, small_kernel);

  std::vector<CheckResult> out;
  Checker c(out);
  grid_checks(c, grid, seed);
  spectral_checks(c, grid, seed);
  kernel_checks(c, kernel, seed);
  energy_checks(c, kernel, params, seed);
  stepper_checks(c, kernel, params, small_kernel, small_params, seed);
  harness_checks(c, grid, seed);
  io_checks(c, grid, seed);
  return out;
}

}  // namespace nch
