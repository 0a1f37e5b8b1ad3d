#pragma once

#include "robustam/common.hpp"

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace robustam {

// Splittable seeding: every (role, indices) pair derives an independent
// stream from one master seed, so parallel trials reproduce bit-identically
// regardless of how work is scheduled across threads.

/// One splitmix64 step; also used as the seed mixer.
std::uint64_t splitmix64(std::uint64_t& state);

/// Derives a child seed from a master seed, a role tag and up to three
/// indices. Distinct (role, i0, i1, i2) tuples give decorrelated seeds.
std::uint64_t derive_seed(std::uint64_t master, std::string_view role,
                          std::uint64_t i0 = 0, std::uint64_t i1 = 0,
                          std::uint64_t i2 = 0);

/// A deterministic random stream. Distribution transforms are implemented
/// locally (Box-Muller etc.) so that sequences depend only on the seed, not
/// on the standard library's distribution internals.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in (0, 1), 53-bit resolution, never exactly 0.
  double uniform01();

  /// Uniform double in (lo, hi).
  double uniform(double lo, double hi);

  /// Standard normal via Box-Muller (pairs cached).
  double normal();

  /// Cauchy with median 0 and the given scale.
  double cauchy(double scale = 1.0);

  /// Uniform index in [0, n).
  std::uint64_t uniform_index(std::uint64_t n);

  VectorXd normal_vector(Index n);

  /// Uniformly random point on the unit sphere in R^n.
  VectorXd unit_vector(Index n);

  /// Uniformly random subset of {0,...,n-1} of the given size, sorted.
  std::vector<Index> subset(Index n, Index size);

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

inline RngStream derive_stream(std::uint64_t master, std::string_view role,
                               std::uint64_t i0 = 0, std::uint64_t i1 = 0,
                               std::uint64_t i2 = 0) {
  return RngStream(derive_seed(master, role, i0, i1, i2));
}

}  // namespace robustam
