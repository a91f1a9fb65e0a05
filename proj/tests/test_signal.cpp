#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bandana/signal.hpp"
#include "support.hpp"

using namespace bandana;
using namespace bandana::signal;
using testing::static_record;
using testing::throws_code;

namespace {

constexpr double kG = 9.81;

// Amplitude of the f-Hz component over x[start..), by direct projection.
double tone_amplitude(const std::vector<double>& x, double f, double fs, std::size_t start) {
  double c = 0.0, s = 0.0;
  const std::size_t n = x.size() - start;
  for (std::size_t i = start; i < x.size(); ++i) {
    const double ph = 2.0 * std::numbers::pi * f * static_cast<double>(i) / fs;
    c += x[i] * std::cos(ph);
    s += x[i] * std::sin(ph);
  }
  return 2.0 * std::hypot(c, s) / static_cast<double>(n);
}

std::vector<double> probe_input(std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i);
    x[i] = std::sin(0.3 * t) + 0.5 * std::cos(1.7 * t) + static_cast<double>(i % 7) * 0.1;
  }
  return x;
}

Vec3 matrix_rotate(const Quaternion& q, const Vec3& v) {
  const double w = q.w, x = q.x, y = q.y, z = q.z;
  const double r[3][3] = {{1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)},
                          {2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)},
                          {2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)}};
  return {r[0][0] * v.x + r[0][1] * v.y + r[0][2] * v.z, r[1][0] * v.x + r[1][1] * v.y + r[1][2] * v.z,
          r[2][0] * v.x + r[2][1] * v.y + r[2][2] * v.z};
}

}  // namespace

TEST_CASE("quaternion rotation agrees with the rotation matrix") {
  const auto q = Quaternion::from_axis_angle({0.3, -0.5, 0.8}, 1.1);
  CHECK(q.norm() == doctest::Approx(1.0).epsilon(1e-14));
  const Vec3 v{1.5, -2.0, 0.25};
  const auto a = q.rotate(v);
  const auto b = matrix_rotate(q, v);
  CHECK(a.x == doctest::Approx(b.x).epsilon(1e-12));
  CHECK(a.y == doctest::Approx(b.y).epsilon(1e-12));
  CHECK(a.z == doctest::Approx(b.z).epsilon(1e-12));

  const auto qx = Quaternion::from_axis_angle({1, 0, 0}, std::numbers::pi / 2);
  const auto e = qx.rotate({0, 1, 0});
  CHECK(std::abs(e.x) < 1e-12);
  CHECK(std::abs(e.y) < 1e-12);
  CHECK(e.z == doctest::Approx(1.0));

  const auto p = q * q.conjugate();
  CHECK(p.w == doctest::Approx(1.0));
  CHECK(std::abs(p.x) + std::abs(p.y) + std::abs(p.z) < 1e-12);
}

TEST_CASE("static upright device converges to gravity") {
  const auto rec = static_record({0, 0, kG}, 10.0);
  FusionOptions opt;
  opt.align_initial = false;
  const auto q = fuse_orientation(rec, opt);
  REQUIRE(q.size() == rec.samples.size());
  for (const auto& o : q) {
    CHECK(o.w == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(o.x) + std::abs(o.y) + std::abs(o.z) < 1e-12);
  }
  const auto v = extract_vertical(rec, q);
  CHECK(v.z.back() == doctest::Approx(kG).epsilon(1e-9));
}

TEST_CASE("device rotated about x converges to the closed-form pose") {
  const Vec3 acc{0, -kG, 0};
  const auto exact = Quaternion::from_axis_angle({1, 0, 0}, -std::numbers::pi / 2);
  CHECK(exact.rotate(acc).z == doctest::Approx(kG).epsilon(1e-12));

  const auto rec = static_record(acc, 30.0);
  FusionOptions opt;
  opt.align_initial = false;  // converge from the identity
  const auto v = extract_vertical(rec, fuse_orientation(rec, opt));
  CHECK(std::abs(v.z.back() - kG) < 0.1);

  const auto aligned = extract_vertical(rec, fuse_orientation(rec));
  for (const double z : aligned.z) CHECK(std::abs(z - kG) < 0.1);
}

TEST_CASE("vertical of a walking trace under a known pose") {
  const auto pose = Quaternion::from_axis_angle({0.2, 1.0, -0.4}, 0.7);
  ImuRecord rec;
  rec.sample_rate = 50.0;
  std::vector<double> expected;
  for (int i = 0; i < 500; ++i) {
    const double t = i / 50.0;
    const Vec3 world{0.4 * std::sin(3.1 * t), 0.2 * std::cos(1.3 * t), kG + 2.5 * std::sin(2 * std::numbers::pi * t)};
    rec.samples.push_back({t, pose.conjugate().rotate(world), {}});
    expected.push_back(world.z);
  }
  const Orientation known(rec.samples.size(), pose);
  const auto v = extract_vertical(rec, known);
  for (std::size_t i = 0; i < expected.size(); ++i) CHECK(v.z[i] == doctest::Approx(expected[i]).epsilon(1e-6));
}

TEST_CASE("zero acceleration gives a zero vertical signal") {
  const auto rec = static_record({0, 0, 0}, 2.0);
  const auto v = extract_vertical(rec, fuse_orientation(rec));
  for (const double z : v.z) CHECK(z == 0.0);
}

TEST_CASE("record validation") {
  auto rec = static_record({0, 0, kG}, 1.0);
  CHECK_NOTHROW(rec.validate());
  auto one = rec;
  one.samples.resize(1);
  CHECK(throws_code([&] { one.validate(); }, ErrorCode::EmptyStream));
  auto nan = rec;
  nan.samples[3].acc.y = std::nan("");
  CHECK(throws_code([&] { nan.validate(); }, ErrorCode::NonFiniteSample));
  auto back = rec;
  back.samples[5].t = back.samples[4].t;
  CHECK(throws_code([&] { back.validate(); }, ErrorCode::NonMonotoneTimestamps));
  auto rate = rec;
  rate.sample_rate = 0.0;
  CHECK(throws_code([&] { rate.validate(); }, ErrorCode::InvalidArgument));
  const Orientation short_q(3);
  CHECK(throws_code([&] { extract_vertical(rec, short_q); }, ErrorCode::LengthMismatch));
}

TEST_CASE("uniform resampling of jittered timestamps") {
  ImuRecord rec;
  rec.sample_rate = 50.0;
  for (int i = 0; i < 100; ++i) {
    const double t = i / 50.0 + ((i % 3 == 1) ? 0.004 : 0.0);
    rec.samples.push_back({t, {t, 2 * t, 3 - t}, {0, 0, 0.5 * t}});
  }
  const auto u = resample_uniform(rec);
  REQUIRE(u.samples.size() >= 98);
  for (std::size_t i = 0; i < u.samples.size(); ++i) {
    const auto& s = u.samples[i];
    CHECK(s.t == doctest::Approx(static_cast<double>(i) / 50.0));
    CHECK(s.acc.x == doctest::Approx(s.t));
    CHECK(s.acc.y == doctest::Approx(2 * s.t));
    CHECK(s.gyro.z == doctest::Approx(0.5 * s.t));
  }
}

TEST_CASE("cheby2 bandpass response matches reference values") {
  const auto f = design_cheby2_bandpass(0.5, 12.0, 50.0, 4, 40.0);
  CHECK(f.sections.size() == 4);
  const double freqs[] = {0.1, 0.3, 1, 2, 5, 10, 13, 20};
  const double mags[] = {0.00711681492116665, 0.008063520011083226, 0.8488481677059077, 0.9999969403629989,
                         0.9982513536838835,  0.114437569613128,    0.004348137336661651, 0.0036116188875056905};
  for (int i = 0; i < 8; ++i) {
    CHECK(std::abs(f.response(freqs[i], 50.0)) == doctest::Approx(mags[i]).epsilon(1e-9));
  }
  double pmax = 0.0;
  for (const auto& p : f.poles()) pmax = std::max(pmax, std::abs(p));
  CHECK(pmax == doctest::Approx(0.9686631113720491).epsilon(1e-9));
}

TEST_CASE("sosfilt and sosfiltfilt match reference values") {
  const auto f = design_cheby2_bandpass(0.5, 12.0, 50.0, 4, 40.0);
  const auto x = probe_input(200);
  const auto y1 = sosfilt(f, x);
  const std::size_t i1[] = {0, 1, 50, 100, 199};
  const double r1[] = {0.018827261302492966, 0.06659494502919627, 0.5983454522996399, -0.8551317576260048,
                       -0.3125335508390807};
  for (int i = 0; i < 5; ++i) CHECK(y1[i1[i]] == doctest::Approx(r1[i]).epsilon(1e-9));

  const auto y2 = sosfiltfilt(f, x);
  const std::size_t i2[] = {0, 1, 50, 100, 150, 198, 199};
  const double r2[] = {-0.10226351129393776, -0.00689169177679555, 0.47714912934902903, -1.119220615587694,
                       0.8103602351963495,   0.07151858434171754,  0.017792283677675547};
  for (int i = 0; i < 7; ++i) CHECK(y2[i2[i]] == doctest::Approx(r2[i]).epsilon(1e-9));
}

TEST_CASE("in-band tone passes, DC and 0.1 Hz are rejected") {
  const double fs = 50.0;
  const auto f = design_cheby2_bandpass(0.5, 12.0, fs, 4, 40.0);
  const std::size_t n = 5000;
  std::vector<double> two(n), slow(n), dc(n, kG);
  for (std::size_t i = 0; i < n; ++i) {
    two[i] = std::sin(2 * std::numbers::pi * 2.0 * static_cast<double>(i) / fs);
    slow[i] = std::sin(2 * std::numbers::pi * 0.1 * static_cast<double>(i) / fs);
  }
  const std::size_t settle = 1000;  // 20 s, integer number of periods remain for both tones
  const double g2 = tone_amplitude(sosfilt(f, two), 2.0, fs, settle);
  CHECK(std::abs(g2 - 1.0) < 0.05);
  const double g01 = tone_amplitude(sosfilt(f, slow), 0.1, fs, settle);
  CHECK(20 * std::log10(g01) <= -40.0);

  const auto y = bandpass(testing::make_signal(dc, fs), 0.5, 12.0);
  for (std::size_t i = 200; i < n - 200; ++i) CHECK(std::abs(y.z[i]) < 0.01);
}

TEST_CASE("filter design rejects invalid bands") {
  CHECK(throws_code([] { design_cheby2_bandpass(12.0, 0.5, 50.0, 4, 40.0); }, ErrorCode::InvalidBand));
  CHECK(throws_code([] { design_cheby2_bandpass(0.0, 12.0, 50.0, 4, 40.0); }, ErrorCode::InvalidBand));
  CHECK(throws_code([] { design_cheby2_bandpass(0.5, 25.0, 50.0, 4, 40.0); }, ErrorCode::InvalidBand));
  CHECK(throws_code([] { design_cheby2_bandpass(0.5, 12.0, 50.0, 0, 40.0); }, ErrorCode::InvalidArgument));
}

TEST_CASE("preprocess keeps gravity out and drops the warm-up") {
  const auto rec = static_record({0, 0, kG}, 10.0);
  const auto v = preprocess(rec);
  CHECK(v.sample_rate == 50.0);
  CHECK(v.z.size() == rec.samples.size() - 100);
  for (const double z : v.z) CHECK(std::abs(z) < 0.01);

  const auto tiny = static_record({0, 0, kG}, 1.5);
  CHECK(throws_code([&] { preprocess(tiny); }, ErrorCode::SignalTooShort));
}

TEST_CASE("position names round-trip") {
  for (const auto p : kBodyPositions) CHECK(parse_position(to_string(p)) == p);
  CHECK_FALSE(parse_position("elbow").has_value());
}
