#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace robustam {

/// Deterministic decimal rendering for CSV/SVG output ("%.12g"; NaN prints
/// as "nan" on every platform we target).
inline std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace robustam
