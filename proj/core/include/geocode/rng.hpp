#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace geocode {

/// splitmix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Folds a list of integers into one seed. Order matters.
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) noexcept;

/// Thin wrapper over mt19937_64 whose real-valued draws do not depend on the
/// standard library's distribution implementations, so streams are identical
/// across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform index in [0, n). n must be positive.
  std::uint64_t index(std::uint64_t n);

  /// Standard normal draw (Box-Muller, one value per call).
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace geocode
