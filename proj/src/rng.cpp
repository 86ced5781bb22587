#include "colmet/rng.hpp"

#include <cmath>
#include <numbers>

namespace colmet {

std::uint64_t mix_seed(std::uint64_t seed) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t stream_seed(std::uint64_t base_seed, std::uint64_t stream) {
  return mix_seed(mix_seed(base_seed) + stream);
}

double NormalSampler::uniform01() {
  // 53-bit mantissa, offset by half a step so 0 and 1 are unreachable.
  return (double(gen_() >> 11) + 0.5) * 0x1.0p-53;
}

double NormalSampler::operator()() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double u1 = uniform01();
  const double u2 = uniform01();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_ = radius * std::sin(angle);
  has_cached_ = true;
  return radius * std::cos(angle);
}

}  // namespace colmet
