#pragma once

#include <cstdint>

namespace courtphase {

// Counter-based generator: the n-th draw of stream s under seed k is
// splitmix64(k ^ mix(s) + n * golden). Only 64-bit integer arithmetic is used
// to produce the raw bits, so sequences are identical on every platform.
// Floating-point conversions use the top 53 bits; normals use Box-Muller with
// std::log/std::sqrt/std::cos, which are correctly rounded on IEEE-754 libms we
// target but are the one place cross-libm drift could appear.
class CounterRng {
public:
  CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  std::uint64_t next_u64() noexcept;
  // Uniform on [0, 1).
  double uniform() noexcept;
  // Uniform integer on [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound) noexcept;
  double normal() noexcept;
  double normal(double mean, double sd) noexcept { return mean + sd * normal(); }
  // Log-normal parameterised by the mean and sd of the resulting variable.
  double lognormal_by_moments(double mean, double sd) noexcept;

  std::uint64_t counter() const noexcept { return counter_; }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Derives a child seed from a parent seed and a tag, e.g. a restart index.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept;

}  // namespace courtphase
