#pragma once

#include <cstdint>

namespace vtrack {

/// Counter-based noise: every draw is a pure function of (seed, channel,
/// step), so runs replay byte-identically regardless of call order, thread
/// count, or which channels a given controller happens to consume.
namespace noise {

/// SplitMix64 finalizer; full-period bijection on 64-bit state.
std::uint64_t mix64(std::uint64_t x);

/// Uniform double in (0, 1], never exactly 0.
double uniform(std::uint64_t seed, std::uint32_t channel, std::uint64_t step,
               std::uint32_t lane);

/// Standard normal via Box–Muller on two counter-derived uniforms.
double gaussian(std::uint64_t seed, std::uint32_t channel, std::uint64_t step);

}  // namespace noise

/// Measurement channels, used as counter indices. Order is part of the
/// reproducibility contract: renumbering changes every seeded run.
enum class NoiseChannel : std::uint32_t {
  Speed = 0,
  LateralVelocity = 1,
  YawRate = 2,
  LateralDeviation = 3,
  WheelAccel = 4,
};

/// Per-channel standard deviations [SI]. Zero sigma returns the truth value
/// exactly (no generator call is observable).
struct NoiseConfig {
  double speed_sigma = 0.05;        // m/s
  double vy_sigma = 0.01;           // m/s
  double yaw_rate_sigma = 0.005;    // rad/s
  double lateral_sigma = 0.01;      // m
  double wheel_accel_sigma = 0.0;   // rad/s^2

  bool any() const {
    return speed_sigma != 0.0 || vy_sigma != 0.0 || yaw_rate_sigma != 0.0 ||
           lateral_sigma != 0.0 || wheel_accel_sigma != 0.0;
  }
};

/// truth + sigma * N(0,1), with the normal drawn at (seed, channel, step).
double add_noise(double truth, double sigma, std::uint64_t seed,
                 NoiseChannel channel, std::uint64_t step);

}  // namespace vtrack
