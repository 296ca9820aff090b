#include "qcorr/rng.hpp"

#include <cmath>
#include <numbers>

namespace qcorr {

namespace {

// splitmix64 finalizer: a bijective 64-bit mix with good avalanche.
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

CounterRng CounterRng::derive(std::uint64_t stream) const {
  return CounterRng(mix64(seed_ ^ mix64(stream + 0x5851f42d4c957f2dULL)));
}

std::uint64_t CounterRng::next_u64() { return mix64(seed_ ^ mix64(counter_++)); }

double CounterRng::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::next_double_open_low() {
  return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

double CounterRng::next_gaussian() {
  const double u1 = next_double_open_low();
  const double u2 = next_double();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t CounterRng::next_below(std::uint64_t n) {
  // Rejection-free modulo is fine here: n is tiny relative to 2^64.
  return n == 0 ? 0 : next_u64() % n;
}

}  // namespace qcorr
