#include "bandana/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "bandana/error.hpp"

namespace bandana::signal {

using cdouble = std::complex<double>;

std::string_view to_string(Position p) noexcept {
  switch (p) {
    case Position::chest: return "chest";
    case Position::forearm: return "forearm";
    case Position::head: return "head";
    case Position::shin: return "shin";
    case Position::thigh: return "thigh";
    case Position::upperarm: return "upperarm";
    case Position::waist: return "waist";
    case Position::other: return "other";
  }
  return "other";
}

std::optional<Position> parse_position(std::string_view name) noexcept {
  for (Position p : kBodyPositions) {
    if (to_string(p) == name) return p;
  }
  if (name == "other") return Position::other;
  return std::nullopt;
}

namespace {

bool finite(const Vec3& v) { return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z); }

Vec3 lerp(const Vec3& a, const Vec3& b, double u) {
  return {a.x + (b.x - a.x) * u, a.y + (b.y - a.y) * u, a.z + (b.z - a.z) * u};
}

}  // namespace

void ImuRecord::validate() const {
  if (samples.size() < 2) throw Error(ErrorCode::EmptyStream, "record needs at least two samples");
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
    throw Error(ErrorCode::InvalidArgument, "sample rate must be positive");
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (!std::isfinite(s.t) || !finite(s.acc) || !finite(s.gyro)) {
      throw Error(ErrorCode::NonFiniteSample, "sample " + std::to_string(i) + " is not finite");
    }
    if (i > 0 && !(s.t > samples[i - 1].t)) {
      throw Error(ErrorCode::NonMonotoneTimestamps,
                  "timestamp at sample " + std::to_string(i) + " does not increase");
    }
  }
  const double mean_dt =
      (samples.back().t - samples.front().t) / static_cast<double>(samples.size() - 1);
  const double nominal = 1.0 / sample_rate;
  if (std::abs(mean_dt - nominal) > 0.1 * nominal) {
    throw Error(ErrorCode::InvalidArgument,
                "declared sample rate disagrees with timestamps by more than 10%");
  }
}

double Quaternion::norm() const noexcept { return std::sqrt(w * w + x * x + y * y + z * z); }

Quaternion Quaternion::normalized() const noexcept {
  const double n = norm();
  if (n == 0.0) return {};
  return {w / n, x / n, y / n, z / n};
}

Quaternion operator*(const Quaternion& a, const Quaternion& b) noexcept {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

Vec3 Quaternion::rotate(const Vec3& v) const noexcept {
  const Quaternion p{0.0, v.x, v.y, v.z};
  const Quaternion r = (*this) * p * conjugate();
  return {r.x, r.y, r.z};
}

Quaternion Quaternion::from_axis_angle(const Vec3& axis, double angle) noexcept {
  const double n = std::sqrt(axis.x * axis.x + axis.y * axis.y + axis.z * axis.z);
  if (n == 0.0) return {};
  const double s = std::sin(angle / 2.0) / n;
  return {std::cos(angle / 2.0), axis.x * s, axis.y * s, axis.z * s};
}

namespace {

// Shortest rotation taking the measured gravity direction onto world +z.
Quaternion align_to_gravity(const Vec3& acc) {
  const double n = std::sqrt(acc.x * acc.x + acc.y * acc.y + acc.z * acc.z);
  if (n == 0.0) return {};
  const Vec3 a{acc.x / n, acc.y / n, acc.z / n};
  const double d = a.z;  // a . ez
  if (d < -1.0 + 1e-12) return {0.0, 1.0, 0.0, 0.0};
  // a x ez = (a.y, -a.x, 0)
  return Quaternion{1.0 + d, a.y, -a.x, 0.0}.normalized();
}

}  // namespace

Orientation fuse_orientation(const ImuRecord& rec, const FusionOptions& options) {
  if (rec.samples.empty()) throw Error(ErrorCode::EmptyStream, "no samples to fuse");
  if (!(options.gain > 0.0)) throw Error(ErrorCode::InvalidArgument, "fusion gain must be > 0");
  for (std::size_t i = 0; i < rec.samples.size(); ++i) {
    if (!finite(rec.samples[i].acc) || !finite(rec.samples[i].gyro) ||
        !std::isfinite(rec.samples[i].t)) {
      throw Error(ErrorCode::NonFiniteSample, "sample " + std::to_string(i) + " is not finite");
    }
  }

  const double beta = options.gain;
  const double nominal_dt = rec.sample_rate > 0.0 ? 1.0 / rec.sample_rate : 0.0;
  Orientation out;
  out.reserve(rec.samples.size());
  Quaternion q = options.align_initial ? align_to_gravity(rec.samples.front().acc) : Quaternion{};

  for (std::size_t i = 0; i < rec.samples.size(); ++i) {
    const auto& s = rec.samples[i];
    const double dt = i == 0 ? nominal_dt : s.t - rec.samples[i - 1].t;

    // q_dot = 0.5 q (0, w)
    const Quaternion omega{0.0, s.gyro.x, s.gyro.y, s.gyro.z};
    Quaternion q_dot = q * omega;
    q_dot = {0.5 * q_dot.w, 0.5 * q_dot.x, 0.5 * q_dot.y, 0.5 * q_dot.z};

    const double an = std::sqrt(s.acc.x * s.acc.x + s.acc.y * s.acc.y + s.acc.z * s.acc.z);
    if (an > 0.0) {
      const double ax = s.acc.x / an, ay = s.acc.y / an, az = s.acc.z / an;
      // Residual between predicted and measured gravity direction (sensor frame).
      const double f0 = 2.0 * (q.x * q.z - q.w * q.y) - ax;
      const double f1 = 2.0 * (q.w * q.x + q.y * q.z) - ay;
      const double f2 = 2.0 * (0.5 - q.x * q.x - q.y * q.y) - az;
      // J^T f
      Quaternion grad{-2.0 * q.y * f0 + 2.0 * q.x * f1,
                      2.0 * q.z * f0 + 2.0 * q.w * f1 - 4.0 * q.x * f2,
                      -2.0 * q.w * f0 + 2.0 * q.z * f1 - 4.0 * q.y * f2,
                      2.0 * q.x * f0 + 2.0 * q.y * f1};
      const double gn = grad.norm();
      if (gn > 0.0) {
        q_dot.w -= beta * grad.w / gn;
        q_dot.x -= beta * grad.x / gn;
        q_dot.y -= beta * grad.y / gn;
        q_dot.z -= beta * grad.z / gn;
      }
    }
    q = Quaternion{q.w + q_dot.w * dt, q.x + q_dot.x * dt, q.y + q_dot.y * dt,
                   q.z + q_dot.z * dt}
            .normalized();
    out.push_back(q);
  }
  return out;
}

VerticalSignal extract_vertical(const ImuRecord& rec, const Orientation& orientation) {
  if (orientation.size() != rec.samples.size()) {
    throw Error(ErrorCode::LengthMismatch, "orientation and record lengths differ");
  }
  VerticalSignal out{rec.sample_rate, {}};
  out.z.reserve(rec.samples.size());
  for (std::size_t i = 0; i < rec.samples.size(); ++i) {
    out.z.push_back(orientation[i].rotate(rec.samples[i].acc).z);
  }
  return out;
}

ImuRecord resample_uniform(const ImuRecord& rec) {
  rec.validate();
  const double dt = 1.0 / rec.sample_rate;
  const double t0 = rec.samples.front().t;
  const double span = rec.samples.back().t - t0;
  const auto count = static_cast<std::size_t>(std::floor(span / dt + 1e-9)) + 1;

  bool uniform = count == rec.samples.size();
  for (std::size_t i = 0; uniform && i < rec.samples.size(); ++i) {
    uniform = std::abs(rec.samples[i].t - (t0 + static_cast<double>(i) * dt)) < 1e-9;
  }
  if (uniform) return rec;

  ImuRecord out = rec;
  out.samples.clear();
  out.samples.reserve(count);
  std::size_t j = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const double t = t0 + static_cast<double>(i) * dt;
    while (j + 2 < rec.samples.size() && rec.samples[j + 1].t < t) ++j;
    const auto& a = rec.samples[j];
    const auto& b = rec.samples[j + 1];
    const double u = std::clamp((t - a.t) / (b.t - a.t), 0.0, 1.0);
    out.samples.push_back({t, lerp(a.acc, b.acc, u), lerp(a.gyro, b.gyro, u)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Filter design
// ---------------------------------------------------------------------------

namespace {

struct Zpk {
  std::vector<cdouble> zeros;
  std::vector<cdouble> poles;
  double gain = 1.0;
};

// Analog Type-II prototype with its stopband edge at 1 rad/s.
Zpk cheby2_prototype(int order, double rs_db) {
  const double pi = std::numbers::pi;
  const double eps = 1.0 / std::sqrt(std::pow(10.0, 0.1 * rs_db) - 1.0);
  const double mu = std::asinh(1.0 / eps) / order;
  Zpk out;
  for (int m = -order + 1; m < order; m += 2) {
    if (order % 2 == 1 && m == 0) continue;  // zero at infinity
    const cdouble jz = cdouble(0.0, 1.0) / std::sin(m * pi / (2.0 * order));
    out.zeros.push_back(-std::conj(jz));
  }
  for (int m = -order + 1; m < order; m += 2) {
    cdouble p = -std::exp(cdouble(0.0, pi * m / (2.0 * order)));
    p = cdouble(std::sinh(mu) * p.real(), std::cosh(mu) * p.imag());
    out.poles.push_back(1.0 / p);
  }
  cdouble num(1.0, 0.0), den(1.0, 0.0);
  for (const auto& p : out.poles) num *= -p;
  for (const auto& z : out.zeros) den *= -z;
  out.gain = (num / den).real();
  return out;
}

Zpk lowpass_to_bandpass(const Zpk& in, double center, double width) {
  Zpk out;
  const auto degree = in.poles.size() - in.zeros.size();
  auto map = [&](const std::vector<cdouble>& roots, std::vector<cdouble>& dst) {
    std::vector<cdouble> lo, hi;
    for (const auto& r : roots) {
      const cdouble half = r * width / 2.0;
      const cdouble disc = std::sqrt(half * half - center * center);
      lo.push_back(half + disc);
      hi.push_back(half - disc);
    }
    dst.insert(dst.end(), lo.begin(), lo.end());
    dst.insert(dst.end(), hi.begin(), hi.end());
  };
  map(in.zeros, out.zeros);
  map(in.poles, out.poles);
  for (std::size_t i = 0; i < degree; ++i) out.zeros.emplace_back(0.0, 0.0);
  out.gain = in.gain * std::pow(width, static_cast<double>(degree));
  return out;
}

Zpk bilinear(const Zpk& in, double fs) {
  const double fs2 = 2.0 * fs;
  Zpk out;
  const auto degree = in.poles.size() - in.zeros.size();
  cdouble num(1.0, 0.0), den(1.0, 0.0);
  for (const auto& z : in.zeros) {
    out.zeros.push_back((fs2 + z) / (fs2 - z));
    num *= fs2 - z;
  }
  for (const auto& p : in.poles) {
    out.poles.push_back((fs2 + p) / (fs2 - p));
    den *= fs2 - p;
  }
  for (std::size_t i = 0; i < degree; ++i) out.zeros.emplace_back(-1.0, 0.0);
  out.gain = in.gain * (num / den).real();
  return out;
}

// Split roots into conjugate-pair representatives (imag > 0) and real roots.
void split_roots(const std::vector<cdouble>& roots, std::vector<cdouble>& complex_upper,
                 std::vector<double>& real) {
  constexpr double tol = 1e-10;
  for (const auto& r : roots) {
    if (std::abs(r.imag()) <= tol * std::max(1.0, std::abs(r))) {
      real.push_back(r.real());
    } else if (r.imag() > 0.0) {
      complex_upper.push_back(r);
    }
  }
}

struct Quadratic {
  double c1 = 0.0, c2 = 0.0;  // 1 + c1 z^-1 + c2 z^-2
  cdouble anchor;             // representative root for pairing
};

std::vector<Quadratic> to_quadratics(const std::vector<cdouble>& roots) {
  std::vector<cdouble> upper;
  std::vector<double> real;
  split_roots(roots, upper, real);
  std::vector<Quadratic> out;
  for (const auto& r : upper) out.push_back({-2.0 * r.real(), std::norm(r), r});
  std::sort(real.begin(), real.end());
  for (std::size_t i = 0; i < real.size(); i += 2) {
    if (i + 1 < real.size()) {
      out.push_back({-(real[i] + real[i + 1]), real[i] * real[i + 1], cdouble(real[i], 0.0)});
    } else {
      out.push_back({-real[i], 0.0, cdouble(real[i], 0.0)});
    }
  }
  return out;
}

SosFilter zpk_to_sos(const Zpk& zpk) {
  auto pole_quads = to_quadratics(zpk.poles);
  auto zero_quads = to_quadratics(zpk.zeros);
  while (zero_quads.size() < pole_quads.size()) zero_quads.push_back({0.0, 0.0, cdouble(0.0, 0.0)});
  if (zero_quads.size() > pole_quads.size()) {
    throw Error(ErrorCode::InvalidArgument, "improper transfer function");
  }
  // Poles farthest from the unit circle first; each takes its nearest zero pair.
  std::sort(pole_quads.begin(), pole_quads.end(),
            [](const Quadratic& a, const Quadratic& b) { return std::abs(a.anchor) < std::abs(b.anchor); });
  SosFilter sos;
  std::vector<bool> used(zero_quads.size(), false);
  for (const auto& pq : pole_quads) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < zero_quads.size(); ++i) {
      if (used[i]) continue;
      const double d = std::abs(zero_quads[i].anchor - pq.anchor);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    used[best] = true;
    const auto& zq = zero_quads[best];
    sos.sections.push_back({1.0, zq.c1, zq.c2, pq.c1, pq.c2});
  }
  auto& first = sos.sections.front();
  first.b0 *= zpk.gain;
  first.b1 *= zpk.gain;
  first.b2 *= zpk.gain;
  return sos;
}

}  // namespace

std::complex<double> SosFilter::response(double freq_hz, double sample_rate) const {
  const cdouble zinv = std::exp(cdouble(0.0, -2.0 * std::numbers::pi * freq_hz / sample_rate));
  cdouble h(1.0, 0.0);
  for (const auto& s : sections) {
    const cdouble num = s.b0 + s.b1 * zinv + s.b2 * zinv * zinv;
    const cdouble den = 1.0 + s.a1 * zinv + s.a2 * zinv * zinv;
    h *= num / den;
  }
  return h;
}

std::vector<std::complex<double>> SosFilter::poles() const {
  std::vector<cdouble> out;
  for (const auto& s : sections) {
    // z^2 + a1 z + a2 = 0
    const cdouble disc = std::sqrt(cdouble(s.a1 * s.a1 - 4.0 * s.a2, 0.0));
    out.push_back((-s.a1 + disc) / 2.0);
    out.push_back((-s.a1 - disc) / 2.0);
  }
  return out;
}

SosFilter design_cheby2_bandpass(double lo_hz, double hi_hz, double sample_rate, int order,
                                 double stop_atten_db) {
  if (!(sample_rate > 0.0) || !(lo_hz > 0.0) || !(lo_hz < hi_hz) || !(hi_hz < sample_rate / 2.0)) {
    throw Error(ErrorCode::InvalidBand, "band must satisfy 0 < lo < hi < sample_rate/2");
  }
  if (order < 1 || !(stop_atten_db > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "filter order and attenuation must be positive");
  }
  // Pre-warp with the normalized convention fs = 2.
  const double w1 = 4.0 * std::tan(std::numbers::pi * (lo_hz / (sample_rate / 2.0)) / 2.0);
  const double w2 = 4.0 * std::tan(std::numbers::pi * (hi_hz / (sample_rate / 2.0)) / 2.0);
  const Zpk analog = lowpass_to_bandpass(cheby2_prototype(order, stop_atten_db),
                                         std::sqrt(w1 * w2), w2 - w1);
  const Zpk digital = bilinear(analog, 2.0);
  for (const auto& p : digital.poles) {
    if (!(std::abs(p) < 1.0)) throw Error(ErrorCode::UnstableFilter, "designed pole outside unit circle");
  }
  SosFilter sos = zpk_to_sos(digital);
  for (const auto& p : sos.poles()) {
    if (!(std::abs(p) < 1.0)) throw Error(ErrorCode::UnstableFilter, "section pole outside unit circle");
  }
  return sos;
}

namespace {

struct SectionState {
  double z1 = 0.0, z2 = 0.0;
};

void run_sections(const SosFilter& f, std::vector<SectionState>& state, std::vector<double>& x) {
  for (double& v : x) {
    double in = v;
    for (std::size_t s = 0; s < f.sections.size(); ++s) {
      const auto& c = f.sections[s];
      auto& st = state[s];
      const double y = c.b0 * in + st.z1;
      st.z1 = c.b1 * in - c.a1 * y + st.z2;
      st.z2 = c.b2 * in - c.a2 * y;
      in = y;
    }
    v = in;
  }
}

// Step-response steady state of the cascade, per unit input.
std::vector<SectionState> steady_state(const SosFilter& f) {
  std::vector<SectionState> zi(f.sections.size());
  double scale = 1.0;
  for (std::size_t s = 0; s < f.sections.size(); ++s) {
    const auto& c = f.sections[s];
    const double dc = (c.b0 + c.b1 + c.b2) / (1.0 + c.a1 + c.a2);
    const double z2 = c.b2 - c.a2 * dc;
    const double z1 = c.b1 - c.a1 * dc + z2;
    zi[s] = {scale * z1, scale * z2};
    scale *= dc;
  }
  return zi;
}

std::vector<SectionState> scaled(std::vector<SectionState> zi, double k) {
  for (auto& s : zi) {
    s.z1 *= k;
    s.z2 *= k;
  }
  return zi;
}

}  // namespace

std::vector<double> sosfilt(const SosFilter& filter, std::span<const double> x) {
  std::vector<double> y(x.begin(), x.end());
  std::vector<SectionState> state(filter.sections.size());
  run_sections(filter, state, y);
  return y;
}

std::vector<double> sosfiltfilt(const SosFilter& filter, std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  std::size_t taps = 2 * filter.sections.size() + 1;
  std::size_t trivial_b = 0, trivial_a = 0;
  for (const auto& s : filter.sections) {
    trivial_b += s.b2 == 0.0;
    trivial_a += s.a2 == 0.0;
  }
  taps -= std::min(trivial_b, trivial_a);
  const std::size_t edge = std::min(3 * taps, n - 1);

  std::vector<double> ext;
  ext.reserve(n + 2 * edge);
  for (std::size_t i = edge; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= edge; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

  const auto zi = steady_state(filter);
  auto state = scaled(zi, ext.front());
  run_sections(filter, state, ext);
  std::reverse(ext.begin(), ext.end());
  state = scaled(zi, ext.front());
  run_sections(filter, state, ext);
  std::reverse(ext.begin(), ext.end());
  return {ext.begin() + static_cast<std::ptrdiff_t>(edge),
          ext.begin() + static_cast<std::ptrdiff_t>(edge + n)};
}

VerticalSignal bandpass(const VerticalSignal& sig, double lo_hz, double hi_hz, int order,
                        double stop_atten_db) {
  const SosFilter f = design_cheby2_bandpass(lo_hz, hi_hz, sig.sample_rate, order, stop_atten_db);
  for (double v : sig.z) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteSample, "signal contains non-finite values");
  }
  return {sig.sample_rate, sosfiltfilt(f, sig.z)};
}

VerticalSignal preprocess(const ImuRecord& rec, const PreprocessOptions& options) {
  const ImuRecord uniform = resample_uniform(rec);
  const Orientation ori = fuse_orientation(uniform, options.fusion);
  VerticalSignal z = extract_vertical(uniform, ori);
  z = bandpass(z, options.band_lo_hz, options.band_hi_hz, options.filter_order, options.stop_atten_db);
  const auto drop = static_cast<std::size_t>(std::llround(options.discard_seconds * z.sample_rate));
  if (drop >= z.z.size()) {
    throw Error(ErrorCode::SignalTooShort, "record shorter than the filter warm-up interval");
  }
  z.z.erase(z.z.begin(), z.z.begin() + static_cast<std::ptrdiff_t>(drop));
  return z;
}

}  // namespace bandana::signal
