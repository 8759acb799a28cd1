#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>

namespace loraflood {

/// Simulated time. Integer microseconds keep every run exactly reproducible.
using SimTime = std::chrono::microseconds;

constexpr double to_seconds(SimTime t) noexcept {
  return static_cast<double>(t.count()) / 1e6;
}

inline SimTime from_seconds(double seconds) {
  return SimTime{static_cast<std::int64_t>(std::llround(seconds * 1e6))};
}

inline SimTime from_millis(double millis) {
  return SimTime{static_cast<std::int64_t>(std::llround(millis * 1e3))};
}

}  // namespace loraflood
