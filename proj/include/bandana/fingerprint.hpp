#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bandana/bits.hpp"
#include "bandana/gait.hpp"

namespace bandana::fingerprint {

struct AverageCycle {
  std::vector<double> values;
};

AverageCycle average_cycle(const gait::GaitSequence& seq);

/// Bits in cycle-major, segment-minor order; bit = 1 iff delta > 0.
struct Fingerprint {
  BitVector bits;
  std::vector<double> deltas;
  std::size_t bits_per_cycle = 0;
  std::size_t cycles = 0;

  std::size_t size() const noexcept { return bits.size(); }
};

/// delta for cycle i, segment j = sum over the segment of (A - Z_i).
Fingerprint quantize(const gait::GaitSequence& seq, const AverageCycle& avg, std::size_t bits_per_cycle);

/// Zero-based permutation, most reliable (largest |delta|) first.
struct ReliabilityOrder {
  std::vector<std::size_t> order;
};

/// Stable: equal magnitudes keep ascending index order.
ReliabilityOrder reliability_order(const Fingerprint& fp);

bool is_permutation_of(std::span<const std::size_t> order, std::size_t size);

struct ReducedFingerprint {
  BitVector bits;
  ReliabilityOrder source_order;
};

/// First `cutoff` bits of `fp` taken in `order`. The order may be a peer's.
ReducedFingerprint reduce(const Fingerprint& fp, const ReliabilityOrder& order, std::size_t cutoff);

/// 1 - Hamming distance / N.
double similarity(const ReducedFingerprint& a, const ReducedFingerprint& b);
double similarity(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

/// Convenience: average, quantize and order a sequence in one step.
struct Extraction {
  Fingerprint fingerprint;
  ReliabilityOrder order;
};
Extraction extract(const gait::GaitSequence& seq, std::size_t bits_per_cycle);

}  // namespace bandana::fingerprint
