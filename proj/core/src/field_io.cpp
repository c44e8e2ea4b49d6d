#include "nch/field_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "nch/error.hpp"

namespace nch {

namespace {

std::string format17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(std::string_view token, std::string_view what) {
  double v = 0.0;
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw FormatError("cannot parse " + std::string(what) + " from '" +
                      std::string(token) + "'");
  }
  return v;
}

// Value of `key=` inside the header line.
std::string_view header_value(std::string_view line, std::string_view key) {
  const std::string needle = " " + std::string(key) + "=";
  const auto pos = line.find(needle);
  if (pos == std::string_view::npos) {
    throw FormatError("field header is missing '" + std::string(key) + "'");
  }
  const auto start = pos + needle.size();
  const auto end = line.find(' ', start);
  return line.substr(start, end == std::string_view::npos ? end : end - start);
}

}  // namespace

void write_field(std::ostream& out, const GridFunction& f, double time,
                 std::string_view tag) {
  const auto& g = f.grid();
  out << "# " << tag << '\n';
  out << "# nx=" << g.nx() << " ny=" << g.ny()
      << " X=" << format17(g.half_width_x()) << " Y=" << format17(g.half_width_y())
      << " t=" << format17(time) << '\n';
  for (int q = 0; q < g.ny(); ++q) {
    for (int p = 0; p < g.nx(); ++p) {
      if (p > 0) out << ' ';
      out << format17(f(p, q));
    }
    out << '\n';
  }
}

void save_field(const std::filesystem::path& path, const GridFunction& f,
                double time, std::string_view tag) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  write_field(out, f, time, tag);
  if (!out) throw FormatError("failed writing " + path.string());
}

FieldSnapshot read_field(std::istream& in, std::string_view tag) {
  std::string line;
  if (!std::getline(in, line) || line != "# " + std::string(tag)) {
    throw FormatError("expected header '# " + std::string(tag) + "', got '" +
                      line + "'");
  }
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) {
    throw FormatError("missing dimension header line");
  }
  const std::string_view header(line);
  const int nx = static_cast<int>(parse_double(header_value(header, "nx"), "nx"));
  const int ny = static_cast<int>(parse_double(header_value(header, "ny"), "ny"));
  const double half_x = parse_double(header_value(header, "X"), "X");
  const double half_y = parse_double(header_value(header, "Y"), "Y");
  double time = 0.0;
  if (header.find(" t=") != std::string_view::npos) {
    time = parse_double(header_value(header, "t"), "t");
  }
  PeriodicGrid grid(half_x, half_y, nx, ny);

  std::vector<double> values(grid.size());
  for (int q = 0; q < ny; ++q) {
    if (!std::getline(in, line)) {
      throw FormatError("field body ends after " + std::to_string(q) +
                        " of " + std::to_string(ny) + " rows");
    }
    std::istringstream row(line);
    std::string token;
    int p = 0;
    while (row >> token) {
      if (p >= nx) {
        throw FormatError("row " + std::to_string(q) + " has more than " +
                          std::to_string(nx) + " values");
      }
      values[grid.index(p, q)] = parse_double(token, "field value");
      ++p;
    }
    if (p != nx) {
      throw FormatError("row " + std::to_string(q) + " has " +
                        std::to_string(p) + " values, expected " +
                        std::to_string(nx));
    }
  }
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) {
      throw FormatError("unexpected data after " + std::to_string(ny) + " rows");
    }
  }
  return {GridFunction(grid, std::move(values)), time};
}

FieldSnapshot load_field(const std::filesystem::path& path,
                         std::string_view tag) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_field(in, tag);
}

}  // namespace nch
