#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nch {

struct CheckResult {
  std::string module;
  std::string property;
  bool passed = false;
  std::string detail;
};

/// Runs the operator and invariant checks of every module on an nx x ny grid
/// (at most 16 x 16; dense-solve checks use min(nx, 8) x min(ny, 8)).
std::vector<CheckResult> run_checks(int nx, int ny, std::uint64_t seed = 7);

}  // namespace nch
