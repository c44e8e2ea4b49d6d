#include "nch/config.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"
#include "nch/error.hpp"

namespace nch {

namespace {

using nlohmann::json;

// Typed access to one JSON object that remembers which keys were read, so
// leftovers can be reported as unknown.
class Section {
 public:
  Section(json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail("", "must be an object");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError(path_ + (key.empty() ? "" : "/" + key) + ": " + what);
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  json& raw(const std::string& key) {
    seen_.insert(key);
    if (!node_.contains(key)) fail(key, "missing required key");
    return node_[key];
  }

  Section section(const std::string& key) { return Section(raw(key), path_ + "/" + key); }

  /// Like section(), but an absent key becomes an empty object whose
  /// defaults are filled in by the caller.
  Section optional_section(const std::string& key) {
    if (!has(key)) node_[key] = json::object();
    return section(key);
  }

  double number(const std::string& key) {
    auto& v = raw(key);
    if (!v.is_number()) fail(key, "must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(key, "must be finite");
    return d;
  }
  double number(const std::string& key, double fallback) {
    if (!has(key)) {
      node_[key] = fallback;
      seen_.insert(key);
      return fallback;
    }
    return number(key);
  }

  std::int64_t integer(const std::string& key) {
    auto& v = raw(key);
    if (!v.is_number_integer()) fail(key, "must be an integer");
    return v.get<std::int64_t>();
  }
  std::int64_t integer(const std::string& key, std::int64_t fallback) {
    if (!has(key)) {
      node_[key] = fallback;
      seen_.insert(key);
      return fallback;
    }
    return integer(key);
  }

  std::string string(const std::string& key) {
    auto& v = raw(key);
    if (!v.is_string()) fail(key, "must be a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) {
      node_[key] = fallback;
      seen_.insert(key);
      return fallback;
    }
    return string(key);
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) {
      node_[key] = fallback;
      seen_.insert(key);
      return fallback;
    }
    auto& v = raw(key);
    if (!v.is_boolean()) fail(key, "must be true or false");
    return v.get<bool>();
  }

  /// Rejects keys never read.
  void finish() const {
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.count(key)) fail(key, "unknown key");
    }
  }

  const std::string& path() const { return path_; }

 private:
  json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

PeriodicGrid parse_grid(Section s) {
  const auto nx = s.integer("nx");
  const auto ny = s.integer("ny");
  const double X = s.number("X", std::numbers::pi);
  const double Y = s.number("Y", std::numbers::pi);
  s.finish();
  if (nx < 4 || ny < 4 || nx % 2 || ny % 2 || nx > 1 << 15 || ny > 1 << 15) {
    s.fail("", "nx and ny must be even integers in [4, 32768]");
  }
  if (!(X > 0.0) || !(Y > 0.0)) s.fail("", "X and Y must be positive");
  return PeriodicGrid(X, Y, static_cast<int>(nx), static_cast<int>(ny));
}

KernelSpec parse_kernel(Section s) {
  KernelSpec k;
  const auto type = s.string("type", "gaussian");
  if (type == "gaussian") {
    k.kind = KernelSpec::Kind::gaussian;
    k.sigma = s.number("sigma");
  } else if (type == "file") {
    k.kind = KernelSpec::Kind::file;
    k.path = s.string("path");
    k.renormalize = s.boolean("renormalize", true);
  } else {
    s.fail("type", "must be \"gaussian\" or \"file\", got \"" + type + "\"");
  }
  s.finish();
  return k;
}

StabilizerPolicy parse_stabilizer(Section s) {
  const auto mode = s.string("mode", "corollary");
  StabilizerPolicy p;
  if (mode == "fixed") {
    p = StabilizerPolicy::fixed(s.number("A"));
    if (p.value < 0.0) s.fail("A", "must be >= 0");
  } else if (mode == "theorem" || mode == "corollary") {
    const double margin = s.number("margin", 1.0);
    if (margin < 0.0) s.fail("margin", "must be >= 0");
    p = mode == "theorem" ? StabilizerPolicy::theorem(margin)
                          : StabilizerPolicy::corollary(margin);
  } else {
    s.fail("mode", "must be fixed, theorem or corollary, got \"" + mode + "\"");
  }
  s.finish();
  return p;
}

InitialCondition parse_initial(Section s, const PeriodicGrid& grid) {
  const auto kind = s.string("kind");
  InitialCondition ic;
  auto mode = [&](InitialCondition::Kind k) {
    ic.kind = k;
    ic.amplitude = s.number("amplitude");
    ic.kx = static_cast<int>(s.integer("kx", 1));
    ic.ky = static_cast<int>(s.integer("ky", 1));
    if (std::abs(ic.kx) > grid.nx() / 2 || std::abs(ic.ky) > grid.ny() / 2) {
      s.fail("kx", "mode lies outside the grid's index set");
    }
  };
  if (kind == "cosine_product") {
    mode(InitialCondition::Kind::cosine_product);
  } else if (kind == "single_mode") {
    mode(InitialCondition::Kind::single_mode);
  } else if (kind == "random_uniform") {
    ic.kind = InitialCondition::Kind::random_uniform;
    ic.amplitude = s.number("amplitude");
    const auto seed = s.integer("seed", 0);
    if (seed < 0) s.fail("seed", "must be >= 0");
    ic.seed = static_cast<std::uint64_t>(seed);
    if (ic.amplitude < 0.0) s.fail("amplitude", "must be >= 0");
  } else if (kind == "from_file") {
    ic.kind = InitialCondition::Kind::from_file;
    ic.path = s.string("path");
  } else {
    s.fail("kind", "unknown initial condition kind \"" + kind + "\"");
  }
  s.finish();
  return ic;
}

TimeStudySpec parse_time_study(Section s) {
  TimeStudySpec t;
  auto& dts = s.raw("dts");
  if (!dts.is_array() || dts.size() < 2) s.fail("dts", "must list >= 2 time steps");
  for (auto& v : dts) {
    if (!v.is_number() || !(v.get<double>() > 0.0)) {
      s.fail("dts", "entries must be positive numbers");
    }
    t.dts.push_back(v.get<double>());
  }
  t.t_end = s.number("t_end");
  t.reference_ratio = static_cast<int>(s.integer("reference_ratio", 32));
  s.finish();
  return t;
}

SpaceStudySpec parse_space_study(Section s) {
  SpaceStudySpec t;
  auto& sizes = s.raw("sizes");
  if (!sizes.is_array() || sizes.size() < 2) s.fail("sizes", "must list >= 2 grid sizes");
  for (auto& v : sizes) {
    if (!v.is_number_integer() || v.get<int>() < 4 || v.get<int>() % 2) {
      s.fail("sizes", "entries must be even integers >= 4");
    }
    t.sizes.push_back(v.get<int>());
  }
  t.dt = s.number("dt");
  t.t_end = s.number("t_end");
  t.reference_factor = static_cast<int>(s.integer("reference_factor", 4));
  s.finish();
  return t;
}

}  // namespace

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Kernel build_kernel(const KernelSpec& spec, const PeriodicGrid& grid) {
  if (spec.kind == KernelSpec::Kind::gaussian) {
    return make_gaussian_kernel(grid, spec.sigma);
  }
  Kernel k = load_kernel(spec.path, spec.renormalize);
  require_same_grid(k.grid(), grid, "kernel file");
  return k;
}

Config parse_config(std::string_view text,
                    std::optional<std::uint64_t> seed_override) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed JSON at " + line_column(text, e.byte) + ": " +
                      e.what());
  }
  Section root(doc, "");
  if (seed_override && doc.contains("initial") && doc["initial"].is_object()) {
    doc["initial"]["seed"] = *seed_override;
  }

  const PeriodicGrid grid = parse_grid(root.section("grid"));
  KernelSpec kernel_spec = parse_kernel(root.section("kernel"));

  Section model = root.section("model");
  const double epsilon = model.number("epsilon");
  model.finish();
  if (!(epsilon > 0.0)) model.fail("epsilon", "must be positive");

  Section solver = root.section("solver");
  SolverConfig cfg;
  cfg.dt = solver.number("dt");
  cfg.t_end = solver.number("t_end");
  if (!(cfg.dt > 0.0)) solver.fail("dt", "must be positive");
  if (!(cfg.t_end >= cfg.dt)) solver.fail("t_end", "must be >= dt");
  cfg.stabilizer = parse_stabilizer(solver.optional_section("stabilizer"));
  cfg.diagnostics_every = solver.integer("diagnostics_every", 1);
  cfg.snapshot_every = solver.integer("snapshot_every", cfg.step_count());
  if (cfg.diagnostics_every < 1) solver.fail("diagnostics_every", "must be >= 1");
  if (cfg.snapshot_every < 1) solver.fail("snapshot_every", "must be >= 1");
  solver.finish();

  InitialCondition initial = parse_initial(root.section("initial"), grid);

  std::optional<TimeStudySpec> time_study;
  std::optional<SpaceStudySpec> space_study;
  if (root.has("study")) {
    Section study = root.section("study");
    if (study.has("time")) time_study = parse_time_study(study.section("time"));
    if (study.has("space")) space_study = parse_space_study(study.section("space"));
    study.finish();
  }
  root.finish();

  Kernel kernel = [&] {
    try {
      return build_kernel(kernel_spec, grid);
    } catch (const DiffusivityError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(std::string("/kernel: ") + e.what());
    }
  }();
  cfg.params = make_model_params(epsilon, kernel);
  cfg.validate();

  std::string canonical = doc.dump();
  std::string hash = fnv1a_hex(canonical);
  return Config{grid,
                std::move(kernel_spec),
                std::move(kernel),
                cfg,
                std::move(initial),
                std::move(time_study),
                std::move(space_study),
                std::move(canonical),
                std::move(hash)};
}

}  // namespace nch
