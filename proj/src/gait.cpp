#include "bandana/gait.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "bandana/error.hpp"
#include "bandana/fft.hpp"

namespace bandana::gait {

std::vector<double> autocorrelate(const signal::VerticalSignal& sig) {
  const std::size_t n = sig.z.size();
  if (n < 4) throw Error(ErrorCode::InsufficientData, "autocorrelation needs at least 4 samples");
  const double mean = std::accumulate(sig.z.begin(), sig.z.end(), 0.0) / static_cast<double>(n);
  std::vector<double> centered(n);
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(sig.z[i])) throw Error(ErrorCode::NonFiniteSample, "signal is not finite");
    centered[i] = sig.z[i] - mean;
    var += centered[i] * centered[i];
  }
  var /= static_cast<double>(n);
  // Absolute floor in (m/s^2)^2: a filtered constant trace lands far below it.
  if (!(var > 1e-18)) throw Error(ErrorCode::ZeroVariance, "signal has zero variance");

  std::size_t len = 1;
  while (len < 2 * n) len <<= 1;
  centered.resize(len, 0.0);
  auto spec = dsp::rfft(centered);
  for (auto& c : spec) c = std::norm(c);
  const auto raw = dsp::irfft(spec, len);

  std::vector<double> a(n);
  for (std::size_t k = 0; k < n; ++k) a[k] = raw[k] / (static_cast<double>(n - k) * var);
  return a;
}

namespace {

struct Peak {
  std::size_t index;
  double prominence;
};

// Strict-left local maxima (plateaus report their first sample) over [1, last].
std::vector<Peak> find_peaks(std::span<const double> a, std::size_t last) {
  std::vector<Peak> out;
  last = std::min(last, a.size() - 2);
  for (std::size_t i = 1; i <= last; ++i) {
    if (!(a[i] > a[i - 1])) continue;
    std::size_t j = i;
    while (j + 1 < a.size() && a[j + 1] == a[i]) ++j;
    if (j + 1 >= a.size() || !(a[j + 1] < a[i])) continue;

    double left_min = a[i];
    for (std::size_t l = i; l-- > 0;) {
      if (a[l] > a[i]) break;
      left_min = std::min(left_min, a[l]);
    }
    double right_min = a[i];
    for (std::size_t r = j + 1; r < a.size(); ++r) {
      if (a[r] > a[i]) break;
      right_min = std::min(right_min, a[r]);
    }
    out.push_back({i, a[i] - std::max(left_min, right_min)});
    i = j;
  }
  return out;
}

}  // namespace

CycleDetection detect_cycles(const signal::VerticalSignal& sig, const DetectOptions& options) {
  if (!(options.min_prominence > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "min_prominence must be positive");
  }
  CycleDetection det;
  det.acorr = autocorrelate(sig);
  const auto& a = det.acorr;
  const std::size_t n = a.size();

  auto peaks = find_peaks(a, n - 2);
  std::erase_if(peaks, [&](const Peak& p) {
    return p.prominence < options.min_prominence || a[p.index] < options.min_prominence;
  });

  // First significant lag: a rough half-cycle period used for spacing.
  const auto rough = std::find_if(peaks.begin(), peaks.end(),
                                  [&](const Peak& p) { return a[p.index] >= options.min_prominence; });
  if (rough == peaks.end()) {
    throw Error(ErrorCode::NoPeriodicity, "no autocorrelation peak reaches the prominence threshold");
  }
  const std::size_t delta_rough = rough->index;

  // Lags with fewer than two periods of overlap are too noisy to trust.
  const std::size_t max_lag = n > 2 * delta_rough ? n - 2 * delta_rough : 0;
  std::erase_if(peaks, [&](const Peak& p) { return p.index > max_lag; });

  // Greedy minimum-distance suppression, tallest first.
  const double min_distance = static_cast<double>(delta_rough) / 2.0;
  std::vector<std::size_t> by_height(peaks.size());
  std::iota(by_height.begin(), by_height.end(), 0);
  std::stable_sort(by_height.begin(), by_height.end(),
                   [&](std::size_t l, std::size_t r) { return a[peaks[l].index] > a[peaks[r].index]; });
  std::vector<bool> keep(peaks.size(), true);
  for (std::size_t pos : by_height) {
    if (!keep[pos]) continue;
    for (std::size_t other = 0; other < peaks.size(); ++other) {
      if (other == pos || !keep[other]) continue;
      const double d = std::abs(static_cast<double>(peaks[other].index) -
                                static_cast<double>(peaks[pos].index));
      if (d <= min_distance) keep[other] = false;
    }
  }
  for (std::size_t i = 0; i < peaks.size(); ++i) {
    if (keep[i]) det.maxima.push_back(peaks[i].index);
  }
  const std::size_t m = det.maxima.size();
  if (m < 3) throw Error(ErrorCode::TooFewMaxima, "found " + std::to_string(m) + " maxima, need 3");

  const std::size_t span = det.maxima.back() - det.maxima.front();
  det.delta_mean = std::max<std::size_t>(1, (span + (m - 1) - 1) / (m - 1));
  det.search_slack = options.tau_search.value_or(
      static_cast<std::size_t>(std::ceil(0.1 * static_cast<double>(det.delta_mean))));

  // Lags carry the spacing of the steps but not their phase in z, so each
  // window is anchored on the previous minimum: it spans half a step either
  // side of where the next minimum is expected. The first minimum is the
  // deepest point of the first two half cycles.
  const auto& z = sig.z;
  const std::size_t half = det.delta_mean / 2;
  const auto first_end = z.begin() + static_cast<std::ptrdiff_t>(std::min(n, 2 * det.delta_mean));
  std::size_t expected = static_cast<std::size_t>(std::min_element(z.begin(), first_end) - z.begin());
  for (std::size_t i = 0; i < m; ++i) {
    if (i > 0) expected = det.minima.back() + (det.maxima[i] - det.maxima[i - 1]);
    const std::size_t anchor = expected > half ? expected - half : 0;
    const std::size_t lo = anchor > det.search_slack ? anchor - det.search_slack : 0;
    if (lo >= n) break;
    const std::size_t hi = std::min(n - 1, anchor + det.delta_mean + det.search_slack);
    const auto it = std::min_element(z.begin() + static_cast<std::ptrdiff_t>(lo),
                                     z.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
    const auto mu = static_cast<std::size_t>(it - z.begin());
    if (!det.minima.empty() && mu <= det.minima.back()) continue;
    det.minima.push_back(mu);
    det.anchors.push_back(anchor);
  }
  return det;
}

std::vector<double> fourier_resample(std::span<const double> x, std::size_t num) {
  const std::size_t nx = x.size();
  if (nx == 0 || num == 0) throw Error(ErrorCode::InvalidArgument, "resample needs non-empty sizes");
  if (num == nx) return {x.begin(), x.end()};

  const auto spec = dsp::rfft(x);
  std::vector<std::complex<double>> out(num / 2 + 1, 0.0);
  const std::size_t n = std::min(num, nx);
  const std::size_t keep = n / 2 + 1;
  for (std::size_t i = 0; i < keep; ++i) out[i] = spec[i];
  if (n % 2 == 0) {
    // The shared Nyquist bin has to absorb (or give back) its mirrored half.
    if (num < nx) {
      out[n / 2] *= 2.0;
    } else {
      out[n / 2] *= 0.5;
    }
  }
  auto y = dsp::irfft(out, num);
  const double scale = static_cast<double>(num) / static_cast<double>(nx);
  for (double& v : y) v *= scale;
  return y;
}

GaitSequence split_and_normalize(const signal::VerticalSignal& sig,
                                 std::span<const std::size_t> boundaries, std::size_t rho) {
  if (rho < 2) throw Error(ErrorCode::InvalidArgument, "rho must be at least 2");
  if (boundaries.size() < 3) {
    throw Error(ErrorCode::InsufficientData, "need at least three half-cycle boundaries");
  }
  for (std::size_t i = 0; i < boundaries.size(); ++i) {
    if (boundaries[i] >= sig.z.size() || (i > 0 && boundaries[i] <= boundaries[i - 1])) {
      throw Error(ErrorCode::InvalidArgument, "boundaries must be increasing indices into the signal");
    }
  }
  GaitSequence seq;
  seq.rho = rho;
  seq.source = sig;
  const std::size_t q = (boundaries.size() - 1) / 2;
  seq.boundaries.assign(boundaries.begin(), boundaries.begin() + static_cast<std::ptrdiff_t>(2 * q + 1));
  for (std::size_t i = 0; i < q; ++i) {
    const std::size_t begin = boundaries[2 * i];
    const std::size_t end = boundaries[2 * i + 2];
    if (end - begin < 4) throw Error(ErrorCode::CycleTooShort, "raw gait cycle shorter than 4 samples");
    const std::span<const double> raw(sig.z.data() + begin, end - begin);
    seq.cycles.push_back(fourier_resample(raw, rho));
  }
  seq.source_span = {boundaries.front(), boundaries[2 * q]};
  return seq;
}

GaitSequence split_and_normalize(const signal::VerticalSignal& sig, const CycleDetection& det,
                                 std::size_t rho) {
  return split_and_normalize(sig, std::span<const std::size_t>(det.minima), rho);
}

GaitSequence shift_retry(const GaitSequence& seq, std::size_t half_cycles) {
  if (half_cycles == 0) return seq;
  if (seq.boundaries.size() < half_cycles + 3) {
    throw Error(ErrorCode::InsufficientData, "not enough half cycles left to shift");
  }
  const std::span<const std::size_t> rest(seq.boundaries.data() + half_cycles,
                                          seq.boundaries.size() - half_cycles);
  return split_and_normalize(seq.source, rest, seq.rho);
}

}  // namespace bandana::gait
