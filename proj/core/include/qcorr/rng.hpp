#pragma once

#include <cstdint>

namespace qcorr {

/// Counter-based pseudo-random stream: output i is a fixed 64-bit mix of
/// (seed, i), so values are reproducible bitwise across platforms and
/// independent of call interleaving. Sub-streams are derived, not split,
/// which keeps campaign trials and optimizer restarts order-independent.
class CounterRng {
public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  /// Independent stream for (this seed, stream index).
  CounterRng derive(std::uint64_t stream) const;

  std::uint64_t next_u64();
  /// Uniform in [0, 1).
  double next_double();
  /// Uniform in (0, 1].
  double next_double_open_low();
  /// Standard normal via Box-Muller on the counter stream.
  double next_gaussian();
  /// Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n);

  std::uint64_t seed() const { return seed_; }

private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace qcorr
