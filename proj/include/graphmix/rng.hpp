#pragma once

#include <cstdint>
#include <initializer_list>

// Self-contained pseudo-random generator so that seeded runs produce
// identical output on every platform.  Core generator is xoshiro256**
// seeded through the splitmix64 finalizer; distribution draws use exact
// (rejection-based) algorithms, never inversion of platform libm tails.

namespace graphmix {

// splitmix64 finalizer; bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Deterministic sub-stream seed: folds each path component into the
// base seed.  Used to give every chain / replicate / condition its own
// independent stream regardless of execution order.
inline std::uint64_t derive_seed(std::uint64_t base,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = mix64(base);
  for (std::uint64_t p : path) s = mix64(s ^ mix64(p));
  return s;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on (0, 1); safe as a log() argument.
  double uniform_pos();
  // Uniform integer in [0, bound); bound >= 1.  Unbiased.
  std::uint64_t uniform_int(std::uint64_t bound);

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via the Marsaglia polar method.
  double normal();

  // Gamma(shape, 1) via Marsaglia-Tsang squeeze rejection; exact for
  // all shape > 0.
  double gamma(double shape);

  // Beta(a, b) as a ratio of gamma draws.
  double beta(double a, double b);

  // Dirichlet(a[0..k-1]) into out[0..k-1]; components sum to 1.
  void dirichlet(const double* alpha, int k, double* out);

 private:
  std::uint64_t s_[4];
  double cached_normal_ = 0.0;
  bool have_cached_normal_ = false;
};

}  // namespace graphmix
