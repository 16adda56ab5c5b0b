#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>

#include "bfpp/errors.hpp"

namespace bfpp {

// Counter-based generator: output i is a pure function of (seed, stream, i),
// so streams can be forked for parallel work and state serializes to a few
// words. Checkpoint resume reproduces the stream exactly.
class Rng {
 public:
  explicit Rng(uint64_t seed, uint64_t stream = 0)
      : seed_(seed), stream_(stream), key_(derive_key(seed, stream)) {}

  uint64_t next_u64() { return mix64(key_ + counter_++ * 0x9E3779B97F4A7C15ull); }

  // Uniform on the open interval (0,1); safe under log().
  double uniform() { return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double a = 6.283185307179586476925286766559 * uniform();
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  // Independent child stream; deterministic in (parent identity, id).
  Rng fork(uint64_t id) const { return Rng(seed_, mix64(stream_ ^ (id + 0x9E3779B97F4A7C15ull))); }

  uint64_t seed() const { return seed_; }
  uint64_t stream() const { return stream_; }

  std::array<uint64_t, 5> state() const {
    uint64_t bits;
    static_assert(sizeof(double) == sizeof(uint64_t));
    __builtin_memcpy(&bits, &spare_, sizeof(bits));
    return {seed_, stream_, counter_, bits, has_spare_ ? 1ull : 0ull};
  }

  static Rng from_state(const std::array<uint64_t, 5>& s) {
    Rng r(s[0], s[1]);
    r.counter_ = s[2];
    __builtin_memcpy(&r.spare_, &s[3], sizeof(double));
    r.has_spare_ = s[4] != 0;
    return r;
  }

 private:
  static uint64_t mix64(uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
  }
  static uint64_t derive_key(uint64_t seed, uint64_t stream) {
    return mix64(seed ^ mix64(stream + 0xD1B54A32D192ED03ull));
  }

  uint64_t seed_;
  uint64_t stream_;
  uint64_t key_;
  uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Index draw proportional to the (unnormalized, nonnegative) weights.
inline int sample_categorical(Rng& rng, std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw EmptyData("sample_categorical: weights sum to zero");
  double u = rng.uniform() * total;
  for (size_t i = 0; i < weights.size(); ++i) {
    u -= weights[i];
    if (u <= 0.0) return static_cast<int>(i);
  }
  return static_cast<int>(weights.size()) - 1;
}

}  // namespace bfpp
