#pragma once

#include "robustam/common.hpp"

namespace robustam {

/// In-place fast Walsh-Hadamard transform (Sylvester ordering), O(n log n).
/// With normalize the transform is orthonormal: ||H v|| = ||v|| and the
/// transform is its own inverse. Length must be a power of two.
void fwht_inplace(VectorXd& v, bool normalize = true);

VectorXd fwht(const VectorXd& v, bool normalize = true);

}  // namespace robustam
