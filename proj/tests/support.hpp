#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "bandana/error.hpp"
#include "bandana/gait.hpp"
#include "bandana/signal.hpp"

namespace testing {

// True iff f throws bandana::Error with the given code.
template <class F>
bool throws_code(F&& f, bandana::ErrorCode code) {
  try {
    f();
  } catch (const bandana::Error& e) {
    return e.code() == code;
  }
  return false;
}

inline bandana::signal::VerticalSignal make_signal(std::vector<double> z, double fs = 50.0) {
  bandana::signal::VerticalSignal s;
  s.sample_rate = fs;
  s.z = std::move(z);
  return s;
}

inline std::vector<double> sine(std::size_t n, double period, double amp = 1.0, double phase = 0.0) {
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = amp * std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / period + phase);
  }
  return z;
}

// Static record of constant sensor-frame acceleration.
inline bandana::signal::ImuRecord static_record(bandana::signal::Vec3 acc, double seconds, double fs = 50.0) {
  bandana::signal::ImuRecord rec;
  rec.sample_rate = fs;
  const auto n = static_cast<std::size_t>(seconds * fs);
  for (std::size_t i = 0; i < n; ++i) {
    rec.samples.push_back({static_cast<double>(i) / fs, acc, {}});
  }
  return rec;
}

// Gait-like sequence of q cycles with random per-cycle content.
inline bandana::gait::GaitSequence random_sequence(std::size_t q, std::size_t rho, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  bandana::gait::GaitSequence seq;
  seq.rho = rho;
  for (std::size_t i = 0; i < q; ++i) {
    std::vector<double> c(rho);
    for (auto& v : c) v = nd(rng);
    seq.cycles.push_back(std::move(c));
  }
  return seq;
}

}  // namespace testing
