#include "vtrack/noise.hpp"

#include <cmath>

namespace vtrack {
namespace noise {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double uniform(std::uint64_t seed, std::uint32_t channel, std::uint64_t step,
               std::uint32_t lane) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ (std::uint64_t(channel) << 32 | lane));
  h = mix64(h ^ step);
  // 53 high bits -> (0,1]: add 1 before scaling so log() below never sees 0.
  return double((h >> 11) + 1) * 0x1.0p-53;
}

double gaussian(std::uint64_t seed, std::uint32_t channel, std::uint64_t step) {
  const double u1 = uniform(seed, channel, step, 0);
  const double u2 = uniform(seed, channel, step, 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace noise

double add_noise(double truth, double sigma, std::uint64_t seed,
                 NoiseChannel channel, std::uint64_t step) {
  if (sigma == 0.0) return truth;
  return truth +
         sigma * noise::gaussian(seed, static_cast<std::uint32_t>(channel), step);
}

}  // namespace vtrack
