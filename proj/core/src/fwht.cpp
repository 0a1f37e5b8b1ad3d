#include "robustam/fwht.hpp"

#include <cmath>
#include <string>

namespace robustam {

void fwht_inplace(VectorXd& v, bool normalize) {
  const Index n = v.size();
  if (!is_power_of_two(n)) {
    throw DimensionError("fwht: length " + std::to_string(n) +
                         " is not a power of two");
  }
  for (Index h = 1; h < n; h <<= 1) {
    for (Index i = 0; i < n; i += h << 1) {
      for (Index j = i; j < i + h; ++j) {
        const double a = v[j];
        const double b = v[j + h];
        v[j] = a + b;
        v[j + h] = a - b;
      }
    }
  }
  if (normalize && n > 1) {
    v *= 1.0 / std::sqrt(static_cast<double>(n));
  }
}

VectorXd fwht(const VectorXd& v, bool normalize) {
  VectorXd out = v;
  fwht_inplace(out, normalize);
  return out;
}

}  // namespace robustam
