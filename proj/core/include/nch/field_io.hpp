#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "nch/grid.hpp"

namespace nch {

inline constexpr std::string_view kFieldTag = "nch-field v1";
inline constexpr std::string_view kKernelTag = "nch-kernel v1";

struct FieldSnapshot {
  GridFunction field;
  double time = 0.0;
};

/// Writes the two-line ASCII header and ny rows of nx values, 17 significant
/// digits, row j ascending. Reading the output back reproduces every value
/// bit for bit.
void write_field(std::ostream& out, const GridFunction& f, double time,
                 std::string_view tag = kFieldTag);
void save_field(const std::filesystem::path& path, const GridFunction& f,
                double time, std::string_view tag = kFieldTag);

/// Throws FormatError on a wrong tag, malformed header, or short/long body.
FieldSnapshot read_field(std::istream& in, std::string_view tag = kFieldTag);
FieldSnapshot load_field(const std::filesystem::path& path,
                         std::string_view tag = kFieldTag);

}  // namespace nch
