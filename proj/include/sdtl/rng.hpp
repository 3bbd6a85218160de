#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace sdtl {

// Deterministic counter-based generator built on the SplitMix64 finalizer:
// the state advances by a fixed odd constant and each output is the mix of
// the new state. One seed always produces one sequence, and named streams
// derived from the same seed are independent of each other, so adding a
// random decision to one part of a run never shifts the draws seen by
// another part.
//
// Gaussian draws use Box-Muller on the uniform output; the second value of
// each pair is cached, so a Gaussian stream advances the counter by two
// every other call.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  // Stream keyed by (seed, name, index). `name` labels the decision
  // ("head_init", "shuffle", ...), `index` distinguishes repetitions of the
  // same decision (e.g. the epoch number for per-epoch shuffles).
  static Rng stream(std::uint64_t seed, std::string_view name,
                    std::uint64_t index = 0);

  std::uint64_t next_u64();
  double next_uniform();    // [0, 1)
  double next_gaussian();   // standard normal
  std::size_t next_index(std::size_t n);  // uniform over [0, n)

 private:
  std::uint64_t state_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace sdtl
