#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "thermoprep/operator_core.hpp"

namespace thermoprep {

/// Seeded random stream. Uniform and normal variates are derived from the raw
/// 64-bit engine output, so a seed reproduces the same numbers on any
/// standard library.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed = 0);

  /// Independent stream keyed by `keys` (e.g. trial id, level, position).
  RandomStream fork(std::initializer_list<std::uint64_t> keys) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal (Box-Muller).
  double normal();
  /// true with probability p.
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Hermitian matrix with i.i.d. complex Gaussian entries (GUE-like), scaled by `scale`.
Matrix random_hermitian(Index dim, RandomStream& rng, double scale = 1.0);
/// Full-rank random density matrix rho = G G^dagger / Tr(G G^dagger).
DensityMatrix random_density_matrix(Index dim, RandomStream& rng);

}  // namespace thermoprep
