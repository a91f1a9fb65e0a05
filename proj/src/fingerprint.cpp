#include "bandana/fingerprint.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bandana/error.hpp"

namespace bandana::fingerprint {

AverageCycle average_cycle(const gait::GaitSequence& seq) {
  const std::size_t q = seq.cycles.size();
  if (q < 2) throw Error(ErrorCode::TooFewCycles, "average cycle needs at least two cycles");
  AverageCycle avg{std::vector<double>(seq.rho, 0.0)};
  for (const auto& cycle : seq.cycles) {
    if (cycle.size() != seq.rho) throw Error(ErrorCode::LengthMismatch, "cycle length differs from rho");
    for (std::size_t j = 0; j < seq.rho; ++j) avg.values[j] += cycle[j];
  }
  for (double& v : avg.values) v /= static_cast<double>(q);
  return avg;
}

Fingerprint quantize(const gait::GaitSequence& seq, const AverageCycle& avg, std::size_t bits_per_cycle) {
  if (bits_per_cycle == 0 || seq.rho % bits_per_cycle != 0) {
    throw Error(ErrorCode::IndivisibleSegments, "bits per cycle must divide rho");
  }
  if (avg.values.size() != seq.rho) throw Error(ErrorCode::LengthMismatch, "average cycle length differs from rho");
  const std::size_t seg = seq.rho / bits_per_cycle;
  Fingerprint fp;
  fp.bits_per_cycle = bits_per_cycle;
  fp.cycles = seq.cycles.size();
  fp.bits.reserve(fp.cycles * bits_per_cycle);
  fp.deltas.reserve(fp.cycles * bits_per_cycle);
  for (const auto& cycle : seq.cycles) {
    if (cycle.size() != seq.rho) throw Error(ErrorCode::LengthMismatch, "cycle length differs from rho");
    for (std::size_t j = 0; j < bits_per_cycle; ++j) {
      double delta = 0.0;
      for (std::size_t k = j * seg; k < (j + 1) * seg; ++k) delta += avg.values[k] - cycle[k];
      fp.deltas.push_back(delta);
      fp.bits.push_back(delta > 0.0 ? 1 : 0);
    }
  }
  return fp;
}

ReliabilityOrder reliability_order(const Fingerprint& fp) {
  ReliabilityOrder r;
  r.order.resize(fp.deltas.size());
  std::iota(r.order.begin(), r.order.end(), std::size_t{0});
  std::stable_sort(r.order.begin(), r.order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(fp.deltas[a]) > std::abs(fp.deltas[b]);
  });
  return r;
}

bool is_permutation_of(std::span<const std::size_t> order, std::size_t size) {
  if (order.size() != size) return false;
  std::vector<bool> seen(size, false);
  for (std::size_t idx : order) {
    if (idx >= size || seen[idx]) return false;
    seen[idx] = true;
  }
  return true;
}

ReducedFingerprint reduce(const Fingerprint& fp, const ReliabilityOrder& order, std::size_t cutoff) {
  if (cutoff > fp.size()) throw Error(ErrorCode::CutoffTooLarge, "cutoff exceeds fingerprint length");
  if (!is_permutation_of(order.order, fp.size())) {
    throw Error(ErrorCode::InvalidArgument, "reliability order is not a permutation of the fingerprint");
  }
  ReducedFingerprint out;
  out.source_order = order;
  out.bits.reserve(cutoff);
  for (std::size_t i = 0; i < cutoff; ++i) out.bits.push_back(fp.bits[order.order[i]]);
  return out;
}

double similarity(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::LengthMismatch, "fingerprints differ in length");
  if (a.empty()) throw Error(ErrorCode::InvalidArgument, "empty fingerprints");
  return 1.0 - static_cast<double>(hamming_distance(a, b)) / static_cast<double>(a.size());
}

double similarity(const ReducedFingerprint& a, const ReducedFingerprint& b) {
  return similarity(a.bits, b.bits);
}

Extraction extract(const gait::GaitSequence& seq, std::size_t bits_per_cycle) {
  Extraction e;
  e.fingerprint = quantize(seq, average_cycle(seq), bits_per_cycle);
  e.order = reliability_order(e.fingerprint);
  return e;
}

}  // namespace bandana::fingerprint
