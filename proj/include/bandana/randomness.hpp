#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bandana/bits.hpp"

namespace bandana::eval {

inline constexpr double kRandomnessAlpha = 0.001;

// NIST SP 800-22 style statistics. Each returns a p-value in [0, 1];
// inputs shorter than a test's minimum throw InsufficientBits.
double monobit_test(std::span<const std::uint8_t> bits);
double block_frequency_test(std::span<const std::uint8_t> bits, std::size_t block = 128);
/// Returns 0 when the frequency prerequisite fails, as the reference does.
double runs_test(std::span<const std::uint8_t> bits);
/// Block size and class table follow the length of the input (8, 128 or 10^4).
double longest_run_test(std::span<const std::uint8_t> bits);
std::pair<double, double> serial_test(std::span<const std::uint8_t> bits, std::size_t m);
double approximate_entropy_test(std::span<const std::uint8_t> bits, std::size_t m);

struct TestResult {
  std::string name;
  std::vector<double> p_values;
  bool passed = false;  // every p-value >= alpha
};

struct RandomnessReport {
  std::size_t keys = 0;
  std::size_t bits = 0;
  double ones_fraction = 0.0;
  std::vector<TestResult> tests;
  bool passed = false;
};

struct SuiteOptions {
  double alpha = kRandomnessAlpha;
  std::size_t block = 128;
  // Defaults scale with the stream length.
  std::optional<std::size_t> serial_m;
  std::optional<std::size_t> apen_m;
};

/// All six tests on one bitstream.
RandomnessReport randomness_tests(std::span<const std::uint8_t> stream, const SuiteOptions& options = {});

/// Pools the keys into one stream; throws TooFewKeys below 100 keys.
RandomnessReport randomness_suite(std::span<const BitVector> keys, const SuiteOptions& options = {});

}  // namespace bandana::eval
