#include "moutard/grid.hpp"

#include <charconv>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace moutard {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = text.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_real(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("grid: cannot parse " + what + " from '" +
                                text + "'");
  }
}

int parse_count(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    long v = std::stol(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    if (v < 2 || v > 100000) throw std::invalid_argument("out of range");
    return static_cast<int>(v);
  } catch (const std::exception&) {
    throw std::invalid_argument("grid: " + what +
                                " must be an integer in [2, 100000], got '" +
                                text + "'");
  }
}

// Shortest decimal form that parses back to the same double.
std::string shortest(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

GridSpec GridSpec::parse(const std::string& text) {
  auto axes = split(text, ',');
  if (axes.size() != 2)
    throw std::invalid_argument(
        "grid: expected 'rmin:rmax:nr,zmin:zmax:nz', got '" + text + "'");
  auto rp = split(axes[0], ':');
  auto zp = split(axes[1], ':');
  if (rp.size() != 3 || zp.size() != 3)
    throw std::invalid_argument(
        "grid: each axis needs min:max:count, got '" + text + "'");
  GridSpec g;
  g.r_min = parse_real(rp[0], "r_min");
  g.r_max = parse_real(rp[1], "r_max");
  g.n_r = parse_count(rp[2], "n_r");
  g.z_min = parse_real(zp[0], "z_min");
  g.z_max = parse_real(zp[1], "z_max");
  g.n_z = parse_count(zp[2], "n_z");
  g.validate();
  return g;
}

std::string GridSpec::to_text() const {
  return shortest(r_min) + ":" + shortest(r_max) + ":" + std::to_string(n_r) +
         "," + shortest(z_min) + ":" + shortest(z_max) + ":" +
         std::to_string(n_z);
}

}  // namespace moutard
