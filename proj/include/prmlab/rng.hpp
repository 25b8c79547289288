#pragma once

#include <cstdint>

namespace prmlab {

// Counter-based deterministic RNG substreams.
//
// Every random draw in the library comes from a stream addressed by an
// explicit path of integer ids (seed -> tag -> question -> candidate), so
// evaluation order and parallelism cannot change any sampled value.
//
// The scheme, exactly:
//   mix64(z)         : splitmix64 finalizer
//   root(seed)       : key  = mix64(seed ^ kRootSalt)
//   fork(key, id)    : key' = mix64(key ^ mix64(id ^ kForkSalt))
//   i-th draw        : out  = mix64(key + i * kGamma), i starting at 1
//   next_below(n)    : 128-bit multiply-shift of the next draw: (u * n) >> 64
//   next_double()    : (u >> 11) * 2^-53, in [0, 1)

inline constexpr uint64_t kRngGamma = 0x9E3779B97F4A7C15ULL;
inline constexpr uint64_t kRngRootSalt = 0xD6E8FEB86659FD93ULL;
inline constexpr uint64_t kRngForkSalt = 0xA0761D6478BD642FULL;

constexpr uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class RngStream {
 public:
  explicit RngStream(uint64_t key) : key_(key) {}

  static RngStream root(uint64_t seed) { return RngStream(mix64(seed ^ kRngRootSalt)); }

  // Derived substream; independent of any draws already taken from this one.
  RngStream fork(uint64_t id) const { return RngStream(mix64(key_ ^ mix64(id ^ kRngForkSalt))); }
  RngStream fork(uint64_t a, uint64_t b) const { return fork(a).fork(b); }
  RngStream fork(uint64_t a, uint64_t b, uint64_t c) const { return fork(a).fork(b).fork(c); }

  uint64_t key() const { return key_; }

  uint64_t next_u64() { return mix64(key_ + (++counter_) * kRngGamma); }

  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  uint64_t next_below(uint64_t n) {
    return static_cast<uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // UniformRandomBitGenerator interface for <random> distributions.
  using result_type = uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~0ULL; }
  result_type operator()() { return next_u64(); }

 private:
  uint64_t key_;
  uint64_t counter_ = 0;
};

}  // namespace prmlab
