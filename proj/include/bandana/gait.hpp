#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "bandana/signal.hpp"

namespace bandana::gait {

/// Normalized autocorrelation of the mean-removed signal:
/// a_k = sum_t z_{t+k} z_t / ((n - k) sigma^2), for k = 0 .. n-1.
std::vector<double> autocorrelate(const signal::VerticalSignal& sig);

struct CycleDetection {
  std::vector<double> acorr;
  std::vector<std::size_t> maxima;  // lags of the selected autocorrelation peaks
  std::size_t delta_mean = 0;       // half-cycle length in samples
  std::vector<std::size_t> minima;  // half-cycle boundaries in the signal
  // Start of each minimum's search window before slack: minima[i] lies in
  // [anchors[i] - search_slack, anchors[i] + delta_mean + search_slack].
  std::vector<std::size_t> anchors;
  std::size_t search_slack = 0;
};

struct DetectOptions {
  // Defaults to ceil(0.1 * delta_mean).
  std::optional<std::size_t> tau_search;
  double min_prominence = 0.1;  // maxima need both this prominence and this height
};

CycleDetection detect_cycles(const signal::VerticalSignal& sig, const DetectOptions& options = {});

struct GaitSequence {
  std::vector<std::vector<double>> cycles;  // q cycles of rho samples
  std::size_t rho = 0;
  std::pair<std::size_t, std::size_t> source_span{0, 0};  // [begin, end) into source
  // Half-cycle boundaries the cycles were cut from; consecutive cycles share
  // a boundary and cycle i spans boundaries[2i] .. boundaries[2i+2].
  std::vector<std::size_t> boundaries;
  signal::VerticalSignal source;

  std::size_t q() const noexcept { return cycles.size(); }
};

/// Band-limited (FFT) resampling to `num` samples.
std::vector<double> fourier_resample(std::span<const double> x, std::size_t num);

/// Full cycle = two consecutive half cycles; an odd trailing half cycle is dropped.
GaitSequence split_and_normalize(const signal::VerticalSignal& sig,
                                 std::span<const std::size_t> boundaries, std::size_t rho);
GaitSequence split_and_normalize(const signal::VerticalSignal& sig, const CycleDetection& det,
                                 std::size_t rho);

/// Re-segments with the cycle origin moved forward by `half_cycles` boundaries.
GaitSequence shift_retry(const GaitSequence& seq, std::size_t half_cycles);

}  // namespace bandana::gait
