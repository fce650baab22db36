#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "tlasso/types.hpp"

namespace tlasso {

/// SplitMix64 finalizer. Used to derive independent stream seeds from a base
/// seed and a list of stream coordinates (cell, trial, draw, ...).
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Hash a base seed together with stream coordinates. Order matters.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> coords) noexcept;

/// Thin wrapper over a 64-bit Mersenne twister. Each logical stream (one
/// trial, one Monte Carlo draw) owns its own Rng seeded through derive_seed,
/// so results never depend on scheduling order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  /// Uniform integer in [0, bound).
  std::size_t index(std::size_t bound);
  /// +1 or -1 with equal probability.
  double sign() { return uniform() < 0.5 ? -1.0 : 1.0; }

  Vector normal_vector(Eigen::Index size);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace tlasso
