#pragma once

#include <cstdint>

namespace cointegra {

/// Counter-based random stream.
///
/// Every draw is a pure function of (seed, stream, counter, draw index), so
/// any increment of any path can be regenerated in isolation. The derivation
/// is fixed bit-exactly:
///
///   mix(x)  = SplitMix64 finalizer of x + 0x9E3779B97F4A7C15
///   key     = mix(mix(mix(seed) ^ stream) ^ uint64(counter))
///   u64_j   = mix(key + j * 0x9E3779B97F4A7C15),  j = 0, 1, 2, ...
///   uniform = ((u64 >> 11) + 0.5) * 2^-53          (open interval (0,1))
///   normal  = Box-Muller on two consecutive uniforms (u1, u2):
///             sqrt(-2 ln u1) * cos(2 pi u2), then sqrt(-2 ln u1) * sin(2 pi u2)
///
/// `stream` is the path id in ensembles and `counter` the grid index k of the
/// increment over ((k-1) dt, k dt].
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t stream, std::int64_t counter);

  std::uint64_t next_u64();
  double uniform();
  double normal();
  /// Poisson variate by sequential inversion; intended for small means.
  int poisson(double mean);

  static std::uint64_t mix(std::uint64_t x);

 private:
  std::uint64_t key_;
  std::uint64_t index_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace cointegra
