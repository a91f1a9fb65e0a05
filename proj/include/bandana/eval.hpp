#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bandana/dataset.hpp"
#include "bandana/fingerprint.hpp"
#include "bandana/gait.hpp"
#include "bandana/randomness.hpp"
#include "bandana/signal.hpp"

namespace bandana::eval {

struct PipelineConfig {
  std::size_t rho = 40;
  std::size_t bits_per_cycle = 4;
  std::size_t fingerprint_bits = 192;  // M
  std::size_t cutoff = 128;            // N
  double threshold = 0.8;
  double overlap = 0.5;
  signal::PreprocessOptions preprocess;
  gait::DetectOptions detect;
  std::size_t jobs = 1;

  /// Throws InvalidArgument unless b | rho, N <= M, b | M and 0 < threshold < 1.
  void validate() const;
};

/// One record after preprocessing and cycle detection over its full length.
struct ProcessedRecord {
  std::size_t record = 0;  // index into the corpus
  std::string subject_id;
  std::string session_id;
  signal::Position position = signal::Position::other;
  signal::VerticalSignal vertical;
  std::vector<std::size_t> boundaries;
  std::string error;  // non-empty if the record could not be processed
};

std::vector<ProcessedRecord> process_corpus(const dataset::Corpus& corpus, const PipelineConfig& config);

struct WindowFingerprint {
  std::size_t window = 0;
  fingerprint::Extraction extraction;
};

/// Fingerprint of the first `fingerprint_bits / b` cycles of each window of
/// `window_cycles` cycles.
std::vector<WindowFingerprint> window_fingerprints(const ProcessedRecord& rec, std::size_t window_cycles,
                                                   std::size_t fingerprint_bits, const PipelineConfig& config);

struct DistributionSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double whisker_low = 0.0;   // most extreme values within 1.5 IQR
  double whisker_high = 0.0;
  std::size_t outliers = 0;
};

DistributionSummary summarize(std::vector<double> values);

enum class PairKind { Intra, Inter };

struct PairSimilarity {
  PairKind kind = PairKind::Intra;
  std::string subject_a, subject_b;
  signal::Position position_a = signal::Position::other;
  signal::Position position_b = signal::Position::other;
  std::size_t window_a = 0, window_b = 0;
  double similarity = 0.0;
};

struct Collision {
  std::size_t pair = 0;  // index into SimilarityReport::pairs
  double entropy_a = 0.0;
  double entropy_b = 0.0;
};

struct SimilarityReport {
  std::size_t fingerprint_bits = 0;
  std::size_t cutoff = 0;
  DistributionSummary intra;
  std::map<signal::Position, DistributionSummary> inter;
  DistributionSummary inter_all;
  double collision_threshold = 0.8;
  double collision_rate = 0.0;  // inter-body similarities above the threshold
  std::vector<PairSimilarity> pairs;
  std::vector<Collision> collisions;
};

/// Intra: all position pairs of a subject's simultaneous recordings, same
/// window index. Inter: one position across different subjects, all window
/// combinations. Throws InsufficientPairs when either side is empty.
SimilarityReport discriminability(const dataset::Corpus& corpus, const PipelineConfig& config);
SimilarityReport discriminability(std::span<const ProcessedRecord> records, const PipelineConfig& config);

/// Normalized Shannon entropy of 4-bit blocks (1 = uniform).
double block_entropy(std::span<const std::uint8_t> bits);

struct SweepPoint {
  std::size_t extra = 0;
  std::size_t fingerprint_bits = 0;  // N + extra
  DistributionSummary intra;
  std::vector<PairSimilarity> pairs;
};

inline constexpr std::array<std::size_t, 6> kSweepExtras = {0, 16, 32, 48, 64, 128};

/// Intra-body similarity for M = N + extra. All configurations share windows
/// sized for the largest M.
std::vector<SweepPoint> reliability_sweep(std::span<const ProcessedRecord> records, const PipelineConfig& config,
                                          std::span<const std::size_t> extras = kSweepExtras);
std::vector<SweepPoint> reliability_sweep(const dataset::Corpus& corpus, const PipelineConfig& config,
                                          std::span<const std::size_t> extras = kSweepExtras);

struct PositionTable {
  std::array<signal::Position, 7> positions = signal::kBodyPositions;
  std::array<std::array<double, 7>, 7> mean{};
  std::array<std::array<std::size_t, 7>, 7> count{};
};

/// Throws MissingPosition unless all seven body positions are present.
PositionTable position_table(std::span<const ProcessedRecord> records, const PipelineConfig& config);
PositionTable position_table(const dataset::Corpus& corpus, const PipelineConfig& config);

struct CoherenceOptions {
  std::size_t segments = 8;
  double low_band_hz = 0.5;
  double band_hi_hz = 12.0;
};

struct CoherenceSpectrum {
  std::vector<double> frequency;
  std::vector<double> coherence;
};

/// Welch magnitude-squared coherence: Hann window, 50% overlap, segment
/// length chosen so `segments` segments tile the shorter signal.
CoherenceSpectrum coherence(std::span<const double> x, std::span<const double> y, double sample_rate,
                            std::size_t segments = 8);

struct CoherenceReport {
  std::vector<double> frequency;
  std::vector<double> intra;  // same subject, simultaneous
  std::vector<double> inter;  // different subjects
  std::size_t intra_pairs = 0;
  std::size_t inter_pairs = 0;
  double intra_low_band = 0.0;   // mean below low_band_hz
  double inter_low_band = 0.0;
  double intra_in_band = 0.0;    // mean over [low_band_hz, band_hi_hz]
  double inter_in_band = 0.0;
  bool low_band_correlated = false;  // inter-body coherence below low_band_hz exceeds its in-band level
};

/// Uses the gravity-aligned vertical axis before bandpass filtering.
CoherenceReport coherence_analysis(const dataset::Corpus& corpus, const PipelineConfig& config,
                                   const CoherenceOptions& options = {});

struct SecurityArithmetic {
  long long tries_per_day = 0;
  long long t = 0;
};

SecurityArithmetic security_arithmetic(double session_seconds, double threshold, int cutoff);

/// Reduced fingerprints (N bits) of every window of every processed record.
std::vector<BitVector> corpus_keys(std::span<const ProcessedRecord> records, const PipelineConfig& config);

enum class ReportFormat { Csv, Json };

// Report writers. CSV emits the raw long-format table, JSON the summary.
void write_report(const SimilarityReport& r, const std::filesystem::path& dir, ReportFormat f);
void write_report(const std::vector<SweepPoint>& r, const std::filesystem::path& dir, ReportFormat f);
void write_report(const PositionTable& r, const std::filesystem::path& dir, ReportFormat f);
void write_report(const CoherenceReport& r, const std::filesystem::path& dir, ReportFormat f);
void write_report(const RandomnessReport& r, const std::filesystem::path& dir, ReportFormat f);
void write_report(const SecurityArithmetic& r, const std::filesystem::path& dir, ReportFormat f);

}  // namespace bandana::eval
