#ifndef QCDIFF_IO_HPP
#define QCDIFF_IO_HPP

#include <Eigen/Dense>
#include <cstdio>
#include <string>

#include "qcdiff/common.hpp"

namespace qcdiff {

/// Shortest-width %.17g rendering; every floating-point number written to an
/// output file goes through here so outputs are byte-stable.
inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string fmt17_list(const Eigen::VectorXd& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += fmt17(v[i]);
  }
  s += ']';
  return s;
}

/// Writes content to path via a temp file + rename in the same directory.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

inline std::string hash_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace qcdiff

#endif  // QCDIFF_IO_HPP
