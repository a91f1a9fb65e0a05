#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bandana::signal {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

enum class Position { chest, forearm, head, shin, thigh, upperarm, waist, other };

inline constexpr std::array<Position, 7> kBodyPositions = {
    Position::chest, Position::forearm, Position::head,  Position::shin,
    Position::thigh, Position::upperarm, Position::waist};

std::string_view to_string(Position p) noexcept;
std::optional<Position> parse_position(std::string_view name) noexcept;

struct ImuSample {
  double t = 0.0;  // seconds
  Vec3 acc;        // m/s^2, sensor frame
  Vec3 gyro;       // rad/s, sensor frame
};

struct ImuRecord {
  double sample_rate = 0.0;  // Hz, nominal
  std::vector<ImuSample> samples;
  std::string subject_id;
  Position position = Position::other;
  std::string recording_id;
  // Records of one subject sharing a session were captured simultaneously.
  std::string session_id;

  /// Throws EmptyStream, NonFiniteSample, NonMonotoneTimestamps or InvalidArgument.
  void validate() const;
};

struct VerticalSignal {
  double sample_rate = 0.0;
  std::vector<double> z;
};

struct Quaternion {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const noexcept;
  Quaternion normalized() const noexcept;
  Quaternion conjugate() const noexcept { return {w, -x, -y, -z}; }
  /// v' = q v q*
  Vec3 rotate(const Vec3& v) const noexcept;

  static Quaternion from_axis_angle(const Vec3& axis, double angle) noexcept;
};

Quaternion operator*(const Quaternion& a, const Quaternion& b) noexcept;

/// Per-sample orientation of the sensor frame relative to the gravity-aligned
/// world frame: world = q * sensor * q^-1.
using Orientation = std::vector<Quaternion>;

struct FusionOptions {
  double gain = 0.1;  // Madgwick beta
  // Seed the first estimate from the first accelerometer reading instead of
  // the identity; removes the multi-second convergence transient.
  bool align_initial = true;
};

/// Gradient-descent IMU fusion (accelerometer + gyroscope, no magnetometer).
Orientation fuse_orientation(const ImuRecord& rec, const FusionOptions& options = {});

/// Third component of each accelerometer sample rotated into the world frame.
VerticalSignal extract_vertical(const ImuRecord& rec, const Orientation& orientation);

/// Linear-interpolation resampling of a record onto its nominal sample grid.
ImuRecord resample_uniform(const ImuRecord& rec);

/// Second-order section: b0 b1 b2 / 1 a1 a2.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

struct SosFilter {
  std::vector<Biquad> sections;

  std::complex<double> response(double freq_hz, double sample_rate) const;
  std::vector<std::complex<double>> poles() const;
};

/// Type-II Chebyshev bandpass. `order` is the analog prototype order (the
/// digital filter has 2*order poles); lo and hi are the stopband edges where
/// the attenuation first reaches stop_atten_db.
SosFilter design_cheby2_bandpass(double lo_hz, double hi_hz, double sample_rate, int order,
                                 double stop_atten_db);

/// Single forward pass with zero initial state.
std::vector<double> sosfilt(const SosFilter& filter, std::span<const double> x);

/// Zero-phase forward-backward filtering with odd-extension padding and
/// steady-state initial conditions.
std::vector<double> sosfiltfilt(const SosFilter& filter, std::span<const double> x);

VerticalSignal bandpass(const VerticalSignal& sig, double lo_hz, double hi_hz, int order = 4,
                        double stop_atten_db = 40.0);

struct PreprocessOptions {
  FusionOptions fusion;
  double band_lo_hz = 0.5;
  double band_hi_hz = 12.0;
  int filter_order = 4;
  double stop_atten_db = 40.0;
  double discard_seconds = 2.0;
};

/// Resample, fuse, extract the vertical axis, bandpass, drop the warm-up.
VerticalSignal preprocess(const ImuRecord& rec, const PreprocessOptions& options = {});

}  // namespace bandana::signal
