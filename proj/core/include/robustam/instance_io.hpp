#pragma once

#include "robustam/measurement.hpp"

#include <filesystem>

namespace robustam {

// Versioned binary container for a synthesized problem instance
// (little-endian throughout):
//
//   magic "RAMI", u32 version, u8 kind (0 dense / 1 hadamard),
//   u64 m, d, n, k, f64 eta, u64 master/operator/instance seeds,
//   u8 operator_from_seed, u64 support count,
//   f64 b[m], f64 x_star[d], u64 support indices.
//
// The measurement operator itself is reconstructed from its recorded seed,
// so only instances built through gaussian_ensemble / hadamard_ensemble can
// be saved.

void save_instance(const ProblemInstance& inst,
                   const std::filesystem::path& path);

ProblemInstance load_instance(const std::filesystem::path& path);

}  // namespace robustam
