#include "robustam/rng.hpp"

#include <cmath>
#include <numbers>

namespace robustam {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view role,
                          std::uint64_t i0, std::uint64_t i1,
                          std::uint64_t i2) {
  // FNV-1a over the role tag, then splitmix rounds folding in the indices.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : role) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t state = master;
  std::uint64_t out = splitmix64(state);
  state ^= h;
  out ^= splitmix64(state);
  state ^= i0;
  out ^= splitmix64(state);
  state ^= i1;
  out ^= splitmix64(state);
  state ^= i2;
  out ^= splitmix64(state);
  return out;
}

double RngStream::uniform01() {
  for (;;) {
    double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    if (u > 0.0) return u;
  }
}

double RngStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

double RngStream::cauchy(double scale) {
  return scale * std::tan(std::numbers::pi * (uniform01() - 0.5));
}

std::uint64_t RngStream::uniform_index(std::uint64_t n) {
  // Rejection sampling keeps the index exactly uniform.
  const std::uint64_t limit = n * (UINT64_MAX / n);
  for (;;) {
    std::uint64_t v = gen_();
    if (v < limit) return v % n;
  }
}

VectorXd RngStream::normal_vector(Index n) {
  VectorXd v(n);
  for (Index i = 0; i < n; ++i) v[i] = normal();
  return v;
}

VectorXd RngStream::unit_vector(Index n) {
  for (;;) {
    VectorXd v = normal_vector(n);
    const double norm = v.norm();
    if (norm > 1e-12) return v / norm;
  }
}

std::vector<Index> RngStream::subset(Index n, Index size) {
  // Partial Fisher-Yates: the first `size` slots are a uniform sample.
  std::vector<Index> pool(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
  for (Index i = 0; i < size; ++i) {
    const auto j = i + static_cast<Index>(uniform_index(
                           static_cast<std::uint64_t>(n - i)));
    std::swap(pool[static_cast<std::size_t>(i)],
              pool[static_cast<std::size_t>(j)]);
  }
  std::vector<Index> out(pool.begin(), pool.begin() + size);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace robustam
