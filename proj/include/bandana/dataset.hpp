#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bandana/signal.hpp"

namespace bandana::dataset {

inline constexpr int kSchemaVersion = 1;

/// Column order of the recording CSV files.
inline constexpr const char* kCsvColumns[] = {"timestamp_ms", "ax", "ay", "az", "gx", "gy", "gz"};

struct Corpus {
  std::vector<signal::ImuRecord> records;
  int schema_version = kSchemaVersion;
  std::string dataset;  // "mannheim", "osaka", "synthetic" or free-form
  std::vector<std::string> warnings;

  /// Throws SchemaMismatch on a duplicate (subject, position, recording).
  void check_unique() const;
};

/// Manifest entry describing one CSV file.
struct RecordMeta {
  std::string file;
  std::string subject_id;
  signal::Position position = signal::Position::other;
  std::string recording_id;
  std::string session_id;
  double sample_rate_hz = 50.0;
};

/// One file, one record. A file with a header and no rows yields an empty
/// corpus. Throws MissingColumns, SchemaMismatch, NonMonotoneTimestamps, IoError.
Corpus load_csv(const std::filesystem::path& path, const RecordMeta& meta);

/// Reads manifest.json and every file it lists (paths relative to the manifest).
Corpus load_corpus(const std::filesystem::path& manifest);

/// Writes manifest.json plus one CSV per record into `dir`.
void write_corpus(const Corpus& corpus, const std::filesystem::path& dir);

void write_csv(const signal::ImuRecord& rec, const std::filesystem::path& path);

struct LayoutSummary {
  std::size_t subjects = 0;
  std::map<signal::Position, std::size_t> records_per_position;
  double min_minutes = 0.0;
  double max_minutes = 0.0;
  std::vector<std::string> warnings;
};

/// Structural checks against the two public layouts. Mismatches become
/// warnings, not errors, so partial downloads still load.
LayoutSummary summarize_layout(const Corpus& corpus);

/// Known limitations of the Osaka recordings, attached to its corpora.
std::vector<std::string> osaka_warnings();

struct PositionTransform {
  // s, std of a per-record time offset. Segmentation works on whole samples,
  // so even a tenth of a sample of skew between devices costs agreement.
  double phase_jitter = 0.0;
  double amplitude_scale = 1.0;
  double noise_snr_db = 40.0;    // infinity disables noise
  double tilt_deg = 20.0;        // static mounting tilt bound
  double swing_deg = 10.0;       // limb swing amplitude
  double heading_deg = 360.0;    // mounting heading drawn from [0, heading_deg)
};

struct SyntheticGaitSpec {
  double base_period = 1.0;  // s per full cycle
  std::size_t n_cycles = 200;
  std::size_t n_subjects = 6;
  std::size_t sessions_per_subject = 1;
  double sample_rate = 50.0;
  // Relative per-cycle variation of the latent waveform; this is what makes
  // fingerprints subject-specific.
  double cycle_variation = 0.2;
  double period_jitter = 0.03;  // relative std of each cycle onset around the mean tempo
  std::map<signal::Position, PositionTransform> per_position;
  std::uint64_t rng_seed = 1;

  /// All seven body positions with default transforms.
  static SyntheticGaitSpec defaults();
};

/// Deterministic in rng_seed. Records of one subject and session share a
/// latent gait; different subjects draw independent ones.
Corpus generate_synthetic(const SyntheticGaitSpec& spec);

struct Window {
  std::size_t index = 0;  // tag shared by simultaneous recordings
  std::vector<std::size_t> boundaries;  // 2 * window_cycles + 1 half-cycle boundaries
  std::pair<std::size_t, std::size_t> span{0, 0};
};

/// Windows of `window_cycles` full cycles over detected half-cycle
/// boundaries; consecutive windows start round(window_cycles * (1 - overlap))
/// cycles apart. Throws SignalTooShort when not even one window fits.
std::vector<Window> sliding_windows(std::span<const std::size_t> boundaries, std::size_t window_cycles,
                                    double overlap = 0.5);

/// Preprocessed vertical signal as CSV (t_s,z).
void write_vertical(const signal::VerticalSignal& sig, const std::filesystem::path& path);
signal::VerticalSignal load_vertical(const std::filesystem::path& path);

}  // namespace bandana::dataset
