#pragma once

#include <cstdint>
#include <random>

namespace colmet {

// SplitMix64 finalizer; spreads low-entropy seeds across the full 64-bit
// space so nearby user seeds give unrelated streams.
std::uint64_t mix_seed(std::uint64_t seed);

// Seed for logical stream `stream` derived from a base seed. Streams are
// used to give each ensemble replicate its own generator so results do not
// depend on how replicates are scheduled across threads.
std::uint64_t stream_seed(std::uint64_t base_seed, std::uint64_t stream);

// Standard normal sampler over mt19937_64 using Box-Muller. Deterministic
// for a fixed seed across platforms (no reliance on std::normal_distribution,
// whose output is implementation-defined).
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : gen_(seed) {}

  double operator()();

 private:
  double uniform01();  // in (0, 1)

  std::mt19937_64 gen_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace colmet
