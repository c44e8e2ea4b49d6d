#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nch/grid.hpp"
#include "nch/initial.hpp"
#include "nch/kernel.hpp"
#include "nch/stepper.hpp"

namespace nch {

struct KernelSpec {
  enum class Kind { gaussian, file };
  Kind kind = Kind::gaussian;
  double sigma = 0.2;
  std::string path;
  bool renormalize = true;
};

Kernel build_kernel(const KernelSpec& spec, const PeriodicGrid& grid);

struct TimeStudySpec {
  std::vector<double> dts;
  double t_end = 0.1;
  int reference_ratio = 32;
};

struct SpaceStudySpec {
  std::vector<int> sizes;  ///< nx = ny per level
  double dt = 1e-5;
  double t_end = 0.01;
  int reference_factor = 4;
};

/// A fully validated configuration document.
struct Config {
  PeriodicGrid grid;
  KernelSpec kernel_spec;
  Kernel kernel;
  SolverConfig solver;
  InitialCondition initial;
  std::optional<TimeStudySpec> time_study;
  std::optional<SpaceStudySpec> space_study;
  /// Document with defaults filled in, serialized with sorted keys.
  std::string canonical;
  /// FNV-1a 64 of `canonical`, 16 hex digits.
  std::string hash;
};

/// Parses and validates a JSON configuration. Unknown keys, missing keys and
/// constraint violations throw ConfigError (or DiffusivityError for
/// gamma0 <= 0) with the offending JSON path or line/column. A seed override
/// replaces initial.seed.
Config parse_config(std::string_view text,
                    std::optional<std::uint64_t> seed_override = std::nullopt);

std::string fnv1a_hex(std::string_view bytes);

}  // namespace nch
