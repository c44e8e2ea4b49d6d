// nch: batch front end for the nonlocal Cahn-Hilliard solver.
//
//   nch run      --config <path> --out <dir>
//   nch converge --config <path> --axis time|space --out <dir> [--jobs N]
//   nch check    [--nx N --ny N]
//
// Exit status: 0 success, 1 invalid input (nothing was stepped),
// 2 runtime failure (blow-up, failed study or failed check).

#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "nch/config.hpp"
#include "nch/error.hpp"
#include "nch/field_io.hpp"
#include "nch/harness.hpp"
#include "nch/initial.hpp"
#include "nch/stepper.hpp"
#include "nch/verify.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kRuntime = 2;

// Thrown for problems with the inputs; mapped to exit status 1.
struct InvalidInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::optional<std::uint64_t> seed_from_env() {
  const char* s = std::getenv("NCH_SEED");
  if (s == nullptr || *s == '\0') return std::nullopt;
  std::uint64_t v = 0;
  const std::string text(s);
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw InvalidInput("NCH_SEED must be a nonnegative integer, got \"" + text + "\"");
  }
  return v;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nch::Config load_config(const fs::path& path, bool no_renormalize) {
  std::string text = read_text(path);
  if (no_renormalize) {
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::exception&) {
      // Let parse_config report the position.
      return nch::parse_config(text, seed_from_env());
    }
    if (doc.contains("kernel") && doc["kernel"].is_object()) {
      doc["kernel"]["renormalize"] = false;
    }
    text = doc.dump();
  }
  return nch::parse_config(text, seed_from_env());
}

void prepare_out_dir(const fs::path& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) {
    throw InvalidInput("cannot create output directory " + out.string());
  }
}

std::string snapshot_name(std::int64_t step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "field_%08lld.dat", static_cast<long long>(step));
  return buf;
}

// Streams snapshots to disk and remembers the step -> time index.
class SnapshotWriter : public nch::DiagnosticsSink {
 public:
  SnapshotWriter(fs::path dir, std::ostream& csv, bool verbose)
      : dir_(std::move(dir)), csv_(csv), verbose_(verbose) {}

  void on_diagnostics(const nch::StepDiagnostics& d) override { csv_.on_diagnostics(d); }
  void on_snapshot(std::int64_t step, double time, const nch::GridFunction& u) override {
    const auto name = snapshot_name(step);
    nch::save_field(dir_ / name, u, time);
    index_.push_back({{"step", step}, {"time", time}, {"file", name}});
  }
  void on_stabilizer_change(std::int64_t step, double previous, double resolved) override {
    if (!verbose_) return;
    std::cerr << "nch: step " << step << ": stabilizer re-resolved " << previous << " -> "
              << resolved << '\n';
  }
  void finish() override { csv_.finish(); }

  const json& index() const { return index_; }

 private:
  fs::path dir_;
  nch::CsvDiagnosticsWriter csv_;
  json index_ = json::array();
  bool verbose_;
};

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  out << doc.dump(2) << '\n';
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

int cmd_run(const fs::path& config_path, const fs::path& out_dir, bool no_renormalize,
            bool verbose) {
  std::optional<nch::Config> cfg;
  std::optional<nch::GridFunction> u0;
  try {
    cfg = load_config(config_path, no_renormalize);
    u0 = nch::make_initial_field(cfg->initial, cfg->grid);
    prepare_out_dir(out_dir);
  } catch (const nch::Error& e) {
    std::cerr << "nch run: invalid input: " << e.what() << '\n';
    return kInvalid;
  } catch (const InvalidInput& e) {
    std::cerr << "nch run: invalid input: " << e.what() << '\n';
    return kInvalid;
  }

  try {
    {
      std::ofstream canon(out_dir / "config.json");
      canon << cfg->canonical << '\n';
    }
    std::ofstream csv(out_dir / "diagnostics.csv");
    SnapshotWriter sink(out_dir, csv, verbose);
    const auto t0 = std::chrono::steady_clock::now();
    nch::RunResult result{*u0};
    std::string failure;
    try {
      result = nch::run(*u0, cfg->kernel, cfg->solver, sink);
    } catch (const nch::BlowUpError& e) {
      failure = e.what();
      csv.flush();
    }
    json index = {{"config_hash", cfg->hash},
                  {"initial_kind", nch::to_string(cfg->initial.kind)},
                  {"initial_mean", nch::mean(*u0)},
                  {"dt", cfg->solver.dt},
                  {"snapshots", sink.index()}};
    if (cfg->initial.kind == nch::InitialCondition::Kind::random_uniform) {
      index["seed"] = cfg->initial.seed;
    }
    write_json(out_dir / "snapshots.json", index);
    if (!failure.empty()) {
      std::cerr << "nch run: " << failure << '\n';
      return kRuntime;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "steps=" << result.steps << " A_initial=" << result.a_initial
              << " A_final=" << result.a_final
              << " stabilizer_changes=" << result.stabilizer_changes << " seconds=" << secs
              << " out=" << out_dir.string() << '\n';
    return kOk;
  } catch (const std::exception& e) {
    std::cerr << "nch run: " << e.what() << '\n';
    return kRuntime;
  }
}

std::string order_text(const std::optional<double>& o) {
  if (!o) return "undefined";
  std::ostringstream s;
  s.precision(4);
  s << *o;
  return s.str();
}

int cmd_converge(const fs::path& config_path, const std::string& axis, const fs::path& out_dir,
                 int jobs, bool no_renormalize) {
  std::optional<nch::Config> cfg;
  try {
    if (jobs < 1) throw InvalidInput("--jobs must be >= 1");
    cfg = load_config(config_path, no_renormalize);
    if (axis == "time" && !cfg->time_study) {
      throw InvalidInput("config has no study.time section");
    }
    if (axis == "space" && !cfg->space_study) {
      throw InvalidInput("config has no study.space section");
    }
    prepare_out_dir(out_dir);
  } catch (const nch::Error& e) {
    std::cerr << "nch converge: invalid input: " << e.what() << '\n';
    return kInvalid;
  } catch (const InvalidInput& e) {
    std::cerr << "nch converge: invalid input: " << e.what() << '\n';
    return kInvalid;
  }

  nch::RefinementStudy study;
  try {
    if (axis == "time") {
      nch::TemporalStudyOptions o;
      o.dts = cfg->time_study->dts;
      o.t_end = cfg->time_study->t_end;
      o.reference_ratio = cfg->time_study->reference_ratio;
      o.stabilizer = cfg->solver.stabilizer;
      o.jobs = jobs;
      study = nch::temporal_study(cfg->initial, cfg->kernel, cfg->solver.params, o);
    } else {
      nch::SpatialStudyOptions o;
      for (int n : cfg->space_study->sizes) {
        o.grids.emplace_back(cfg->grid.half_width_x(), cfg->grid.half_width_y(), n, n);
      }
      o.dt = cfg->space_study->dt;
      o.t_end = cfg->space_study->t_end;
      o.reference_factor = cfg->space_study->reference_factor;
      o.stabilizer = cfg->solver.stabilizer;
      o.jobs = jobs;
      const auto spec = cfg->kernel_spec;
      study = nch::spatial_study(
          cfg->initial, [&spec](const nch::PeriodicGrid& g) { return nch::build_kernel(spec, g); },
          cfg->solver.params.epsilon, o);
    }
  } catch (const nch::ParameterError& e) {
    std::cerr << "nch converge: invalid study: " << e.what() << '\n';
    return kInvalid;
  } catch (const nch::Error& e) {
    std::cerr << "nch converge: " << e.what() << '\n';
    return kRuntime;
  }

  try {
    {
      std::ofstream js(out_dir / "report.json");
      nch::write_study_json(js, study, cfg->hash);
    }
    {
      std::ofstream csv(out_dir / "report.csv");
      nch::write_study_csv(csv, study);
    }
  } catch (const std::exception& e) {
    std::cerr << "nch converge: " << e.what() << '\n';
    return kRuntime;
  }
  for (std::size_t i = 0; i < study.levels.size(); ++i) {
    const auto& l = study.levels[i];
    std::cout << "level " << i << ": dt=" << l.dt << " grid=" << l.nx << "x" << l.ny
              << " err_hm1=" << l.err_hm1 << " err_l2l2=" << l.err_l2l2;
    if (i < study.orders.size()) {
      std::cout << " order_hm1=" << order_text(study.orders[i].hm1)
                << " order_l2l2=" << order_text(study.orders[i].l2l2);
    }
    std::cout << '\n';
  }
  return kOk;
}

int cmd_check(int nx, int ny) {
  std::vector<nch::CheckResult> results;
  try {
    results = nch::run_checks(nx, ny);
  } catch (const nch::Error& e) {
    std::cerr << "nch check: invalid input: " << e.what() << '\n';
    return kInvalid;
  }
  int failed = 0;
  for (const auto& r : results) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.module << ": " << r.property << " ["
              << r.detail << "]\n";
    if (!r.passed) ++failed;
  }
  std::cout << results.size() - failed << "/" << results.size() << " properties passed on "
            << nx << "x" << ny << '\n';
  return failed == 0 ? kOk : kRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudo-spectral solver for the nonlocal Cahn-Hilliard equation"};
  app.require_subcommand(1);

  std::string config, out, axis = "time";
  int jobs = 1, nx = 8, ny = 8;
  bool no_renormalize = false, verbose = false;

  auto* run = app.add_subcommand("run", "Integrate one configuration");
  run->add_option("--config", config, "JSON configuration")->required();
  run->add_option("--out", out, "Output directory")->required();
  run->add_flag("--no-renormalize", no_renormalize,
                "Use a tabulated kernel file as-is (it must already have unit second moment)");
  run->add_flag("-v,--verbose", verbose, "Log every stabilizer re-resolution to stderr");

  auto* converge = app.add_subcommand("converge", "Refinement study with observed orders");
  converge->add_option("--config", config, "JSON configuration")->required();
  converge->add_option("--axis", axis, "time or space")
      ->check(CLI::IsMember({"time", "space"}));
  converge->add_option("--out", out, "Output directory")->required();
  converge->add_option("--jobs", jobs, "Levels run concurrently");
  converge->add_flag("--no-renormalize", no_renormalize,
                     "Use a tabulated kernel file as-is");

  auto* check = app.add_subcommand("check", "Verify operator and scheme invariants");
  check->add_option("--nx", nx, "Nodes in x (even, 4..16)");
  check->add_option("--ny", ny, "Nodes in y (even, 4..16)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*run) return cmd_run(config, out, no_renormalize, verbose);
    if (*converge) return cmd_converge(config, axis, out, jobs, no_renormalize);
    return cmd_check(nx, ny);
  } catch (const std::exception& e) {
    std::cerr << "nch: " << e.what() << '\n';
    return kRuntime;
  }
}
