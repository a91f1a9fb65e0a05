#include "bandana/randomness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "bandana/error.hpp"

namespace bandana::eval {
namespace {

double igamc(double a, double x) {
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(a, x);
}

void require(std::span<const std::uint8_t> bits, std::size_t n, const char* test) {
  if (bits.size() < n) {
    throw Error(ErrorCode::InsufficientBits,
                std::string(test) + " needs at least " + std::to_string(n) + " bits");
  }
}

// Overlapping m-bit pattern counts with wrap-around.
std::vector<std::size_t> pattern_counts(std::span<const std::uint8_t> bits, std::size_t m) {
  std::vector<std::size_t> counts(std::size_t{1} << m, 0);
  if (m == 0) return counts;
  const std::size_t n = bits.size();
  const std::size_t mask = (std::size_t{1} << m) - 1;
  std::size_t word = 0;
  for (std::size_t i = 0; i < m - 1; ++i) word = (word << 1) | (bits[i] & 1u);
  for (std::size_t i = 0; i < n; ++i) {
    word = ((word << 1) | (bits[(i + m - 1) % n] & 1u)) & mask;
    ++counts[word];
  }
  return counts;
}

double psi_squared(std::span<const std::uint8_t> bits, std::size_t m) {
  if (m == 0) return 0.0;
  const auto counts = pattern_counts(bits, m);
  const double n = static_cast<double>(bits.size());
  double sum = 0.0;
  for (const auto c : counts) sum += static_cast<double>(c) * static_cast<double>(c);
  return std::ldexp(sum, static_cast<int>(m)) / n - n;
}

double phi(std::span<const std::uint8_t> bits, std::size_t m) {
  if (m == 0) return 0.0;
  const auto counts = pattern_counts(bits, m);
  const double n = static_cast<double>(bits.size());
  double sum = 0.0;
  for (const auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    sum += p * std::log(p);
  }
  return sum;
}

}  // namespace

double monobit_test(std::span<const std::uint8_t> bits) {
  require(bits, 1, "monobit");
  double s = 0.0;
  for (const auto b : bits) s += b ? 1.0 : -1.0;
  const double obs = std::abs(s) / std::sqrt(static_cast<double>(bits.size()));
  return std::erfc(obs / std::numbers::sqrt2);
}

double block_frequency_test(std::span<const std::uint8_t> bits, std::size_t block) {
  if (block == 0) throw Error(ErrorCode::InvalidArgument, "block size must be positive");
  require(bits, block, "block frequency");
  const std::size_t blocks = bits.size() / block;
  double chi = 0.0;
  for (std::size_t i = 0; i < blocks; ++i) {
    std::size_t ones = 0;
    for (std::size_t j = 0; j < block; ++j) ones += bits[i * block + j] & 1u;
    const double pi = static_cast<double>(ones) / static_cast<double>(block) - 0.5;
    chi += pi * pi;
  }
  chi *= 4.0 * static_cast<double>(block);
  return igamc(static_cast<double>(blocks) / 2.0, chi / 2.0);
}

double runs_test(std::span<const std::uint8_t> bits) {
  require(bits, 2, "runs");
  const double n = static_cast<double>(bits.size());
  double ones = 0.0;
  for (const auto b : bits) ones += b & 1u;
  const double pi = ones / n;
  if (std::abs(pi - 0.5) >= 2.0 / std::sqrt(n)) return 0.0;
  double v = 1.0;
  for (std::size_t i = 0; i + 1 < bits.size(); ++i) v += (bits[i] & 1u) != (bits[i + 1] & 1u);
  const double q = pi * (1.0 - pi);
  return std::erfc(std::abs(v - 2.0 * n * q) / (2.0 * std::sqrt(2.0 * n) * q));
}

double longest_run_test(std::span<const std::uint8_t> bits) {
  require(bits, 128, "longest run");
  const std::size_t n = bits.size();
  std::size_t block = 0, lowest = 0;
  std::vector<double> probs;
  if (n < 6272) {
    block = 8;
    lowest = 1;
    probs = {0.2148, 0.3672, 0.2305, 0.1875};
  } else if (n < 750000) {
    block = 128;
    lowest = 4;
    probs = {0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124};
  } else {
    block = 10000;
    lowest = 10;
    probs = {0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727};
  }
  const std::size_t blocks = n / block;
  std::vector<double> counts(probs.size(), 0.0);
  for (std::size_t i = 0; i < blocks; ++i) {
    std::size_t run = 0, longest = 0;
    for (std::size_t j = 0; j < block; ++j) {
      run = (bits[i * block + j] & 1u) ? run + 1 : 0;
      longest = std::max(longest, run);
    }
    const std::size_t cls = std::clamp(longest, lowest, lowest + probs.size() - 1) - lowest;
    counts[cls] += 1.0;
  }
  double chi = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double expected = static_cast<double>(blocks) * probs[i];
    chi += (counts[i] - expected) * (counts[i] - expected) / expected;
  }
  return igamc(static_cast<double>(probs.size() - 1) / 2.0, chi / 2.0);
}

std::pair<double, double> serial_test(std::span<const std::uint8_t> bits, std::size_t m) {
  if (m < 2 || m > 24) throw Error(ErrorCode::InvalidArgument, "serial test block length out of range");
  require(bits, m, "serial");
  const double p0 = psi_squared(bits, m);
  const double p1 = psi_squared(bits, m - 1);
  const double p2 = psi_squared(bits, m - 2);
  const double d1 = p0 - p1;
  const double d2 = p0 - 2.0 * p1 + p2;
  return {igamc(std::ldexp(1.0, static_cast<int>(m) - 2), d1 / 2.0),
          igamc(std::ldexp(1.0, static_cast<int>(m) - 3), d2 / 2.0)};
}

double approximate_entropy_test(std::span<const std::uint8_t> bits, std::size_t m) {
  if (m < 1 || m > 24) throw Error(ErrorCode::InvalidArgument, "approximate entropy block length out of range");
  require(bits, m + 1, "approximate entropy");
  const double n = static_cast<double>(bits.size());
  const double apen = phi(bits, m) - phi(bits, m + 1);
  const double chi = 2.0 * n * (std::numbers::ln2 - apen);
  return igamc(std::ldexp(1.0, static_cast<int>(m) - 1), chi / 2.0);
}

RandomnessReport randomness_tests(std::span<const std::uint8_t> stream, const SuiteOptions& options) {
  require(stream, 128, "randomness suite");
  RandomnessReport report;
  report.bits = stream.size();
  std::size_t ones = 0;
  for (const auto b : stream) ones += b & 1u;
  report.ones_fraction = static_cast<double>(ones) / static_cast<double>(stream.size());

  const auto log2n = static_cast<std::size_t>(std::floor(std::log2(static_cast<double>(stream.size()))));
  // Block lengths below the reference limits (m < log2 n - 2 and m < log2 n - 5).
  const std::size_t serial_m = options.serial_m.value_or(std::clamp<std::size_t>(log2n - 4, 2, 16));
  const std::size_t apen_m = options.apen_m.value_or(std::clamp<std::size_t>(log2n - 7, 2, 10));

  auto add = [&](std::string name, std::vector<double> p) {
    TestResult t{std::move(name), std::move(p), true};
    for (const double v : t.p_values) t.passed = t.passed && v >= options.alpha;
    report.tests.push_back(std::move(t));
  };
  add("monobit", {monobit_test(stream)});
  add("block_frequency", {block_frequency_test(stream, options.block)});
  add("runs", {runs_test(stream)});
  add("longest_run", {longest_run_test(stream)});
  const auto [s1, s2] = serial_test(stream, serial_m);
  add("serial", {s1, s2});
  add("approximate_entropy", {approximate_entropy_test(stream, apen_m)});

  report.passed = std::all_of(report.tests.begin(), report.tests.end(), [](const TestResult& t) { return t.passed; });
  return report;
}

RandomnessReport randomness_suite(std::span<const BitVector> keys, const SuiteOptions& options) {
  if (keys.size() < 100) {
    throw Error(ErrorCode::TooFewKeys, "randomness suite needs at least 100 keys, got " + std::to_string(keys.size()));
  }
  BitVector pooled;
  for (const auto& k : keys) pooled.insert(pooled.end(), k.begin(), k.end());
  auto report = randomness_tests(pooled, options);
  report.keys = keys.size();
  return report;
}

}  // namespace bandana::eval
