#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "bandana/crypto.hpp"
#include "bandana/eval.hpp"
#include "support.hpp"

using namespace bandana;
using namespace bandana::eval;
using testing::throws_code;

namespace {

BitVector bits_of(const std::string& s) {
  BitVector v;
  for (char c : s) v.push_back(c == '1');
  return v;
}

// Welch coherence with a direct DFT, Hann window and 50% overlap.
std::vector<double> naive_coherence(const std::vector<double>& x, const std::vector<double>& y, std::size_t segments) {
  const std::size_t n = x.size();
  const std::size_t len = 2 * n / (segments + 1);
  const std::size_t bins = len / 2 + 1;
  std::vector<double> pxx(bins), pyy(bins);
  std::vector<std::complex<double>> pxy(bins);
  for (std::size_t start = 0; start + len <= n; start += len / 2) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < len; ++i) {
      mx += x[start + i] / static_cast<double>(len);
      my += y[start + i] / static_cast<double>(len);
    }
    for (std::size_t k = 0; k < bins; ++k) {
      std::complex<double> fx, fy;
      for (std::size_t i = 0; i < len; ++i) {
        const double w = std::pow(std::sin(std::numbers::pi * static_cast<double>(i) / static_cast<double>(len)), 2);
        const auto e = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k * i) / static_cast<double>(len));
        fx += w * (x[start + i] - mx) * e;
        fy += w * (y[start + i] - my) * e;
      }
      pxx[k] += std::norm(fx);
      pyy[k] += std::norm(fy);
      pxy[k] += std::conj(fx) * fy;
    }
  }
  std::vector<double> c(bins);
  for (std::size_t k = 0; k < bins; ++k) c[k] = pxx[k] * pyy[k] > 0 ? std::norm(pxy[k]) / (pxx[k] * pyy[k]) : 0.0;
  return c;
}

std::vector<ProcessedRecord> small_corpus(std::size_t subjects) {
  auto spec = dataset::SyntheticGaitSpec::defaults();
  spec.n_subjects = subjects;
  spec.n_cycles = 80;
  PipelineConfig cfg;
  cfg.jobs = 4;
  return process_corpus(dataset::generate_synthetic(spec), cfg);
}

}  // namespace

TEST_CASE("security arithmetic") {
  const auto s = security_arithmetic(200, 0.8, 128);
  CHECK(s.tries_per_day == 432);
  CHECK(s.t == 25);
  CHECK(security_arithmetic(86400, 0.8, 128).tries_per_day == 1);
  CHECK(security_arithmetic(96, 0.9, 127).t == 12);
  CHECK(throws_code([] { security_arithmetic(0, 0.8, 128); }, ErrorCode::InvalidArgument));
  CHECK(throws_code([] { security_arithmetic(200, 1.5, 128); }, ErrorCode::InvalidArgument));
}

TEST_CASE("randomness statistics on reference sequences") {
  CHECK(monobit_test(bits_of("1011010101")) == doctest::Approx(0.527089).epsilon(1e-5));
  CHECK(block_frequency_test(bits_of("0110011010"), 3) == doctest::Approx(0.801252).epsilon(1e-5));
  CHECK(runs_test(bits_of("1001101011")) == doctest::Approx(0.147232).epsilon(1e-5));
  const auto [p1, p2] = serial_test(bits_of("0011011101"), 3);
  CHECK(p1 == doctest::Approx(0.808792).epsilon(1e-5));
  CHECK(p2 == doctest::Approx(0.670320).epsilon(1e-5));
  CHECK(approximate_entropy_test(bits_of("0100110101"), 3) == doctest::Approx(0.261961).epsilon(1e-5));
  const auto lr = bits_of(
      "11001100000101010110110001001100111000000000001001001101010100010001001111010110100000001101011111001100111001"
      "101101100010110010");
  REQUIRE(lr.size() == 128);
  CHECK(longest_run_test(lr) == doctest::Approx(0.180598).epsilon(1e-5));
  CHECK(throws_code([] { longest_run_test(BitVector(100, 1)); }, ErrorCode::InsufficientBits));
}

TEST_CASE("suite accepts random bits and rejects degenerate streams") {
  crypto::SeededRandom rng(99);
  Bytes raw(12500);
  rng.fill(raw);
  const auto good = randomness_tests(unpack_bits(raw, 100000));
  CHECK(good.tests.size() == 6);
  CHECK(good.passed);

  const auto zeros = randomness_tests(BitVector(100000, 0));
  CHECK_FALSE(zeros.passed);
  CHECK(zeros.tests[0].p_values[0] < 1e-10);

  BitVector alt(100000);
  for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = i & 1u;
  CHECK_FALSE(randomness_tests(alt).passed);

  const std::vector<BitVector> few(99, BitVector(128, 1));
  CHECK(throws_code([&] { randomness_suite(few); }, ErrorCode::TooFewKeys));
}

TEST_CASE("summary statistics") {
  const auto s = summarize({1, 2, 3, 4, 5, 6, 7, 8, 100});
  CHECK(s.count == 9);
  CHECK(s.median == 5.0);
  CHECK(s.q1 == 3.0);
  CHECK(s.q3 == 7.0);
  CHECK(s.outliers == 1);
  CHECK(s.whisker_high == 8.0);
  CHECK(s.whisker_low == 1.0);
  CHECK(s.mean == doctest::Approx(136.0 / 9.0));
  CHECK(summarize({}).count == 0);
}

TEST_CASE("block entropy") {
  BitVector all;
  for (unsigned v = 0; v < 16; ++v) {
    for (int j = 3; j >= 0; --j) all.push_back((v >> j) & 1u);
  }
  CHECK(block_entropy(all) == doctest::Approx(1.0));
  CHECK(block_entropy(BitVector(64, 0)) == 0.0);
}

TEST_CASE("coherence") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> nd;
  std::vector<double> x(1800), y(1800);
  for (auto& v : x) v = nd(rng);
  for (auto& v : y) v = nd(rng);

  const auto self = coherence(x, x, 50.0);
  for (const double c : self.coherence) CHECK(c == doctest::Approx(1.0).epsilon(1e-9));

  const auto c = coherence(x, y, 50.0, 8);
  const auto ref = naive_coherence(x, y, 8);
  REQUIRE(c.coherence.size() == ref.size());
  double mean = 0.0;
  for (std::size_t k = 0; k < ref.size(); ++k) {
    CHECK(c.coherence[k] == doctest::Approx(ref[k]).epsilon(1e-9).scale(1.0));
    if (k > 0) mean += c.coherence[k];
  }
  mean /= static_cast<double>(ref.size() - 1);
  CHECK(mean > 0.5 / 8);
  CHECK(mean < 2.0 / 8);
  CHECK(c.frequency[1] == doctest::Approx(50.0 / 400.0));
  CHECK(throws_code([&] { coherence(x, std::vector<double>(10), 50.0); }, ErrorCode::LengthMismatch));
}

TEST_CASE("config validation") {
  PipelineConfig c;
  CHECK_NOTHROW(c.validate());
  c.cutoff = 200;
  CHECK(throws_code([&] { c.validate(); }, ErrorCode::InvalidArgument));
  c = {};
  c.bits_per_cycle = 3;
  CHECK(throws_code([&] { c.validate(); }, ErrorCode::InvalidArgument));
  c = {};
  c.threshold = 1.0;
  CHECK(throws_code([&] { c.validate(); }, ErrorCode::InvalidArgument));
}

TEST_CASE("pipeline analyses on a small synthetic corpus") {
  const auto recs = small_corpus(3);
  REQUIRE(recs.size() == 21);
  for (const auto& r : recs) CHECK(r.error.empty());
  PipelineConfig cfg;

  const auto windows = window_fingerprints(recs[0], 48, 192, cfg);
  REQUIRE_FALSE(windows.empty());
  CHECK(windows[0].extraction.fingerprint.size() == 192);

  const auto d = discriminability(recs, cfg);
  // Intra: C(7, 2) position pairs per subject per shared window.
  std::size_t intra = 0, inter = 0;
  for (const auto& p : d.pairs) (p.kind == PairKind::Intra ? intra : inter)++;
  CHECK(intra == d.intra.count);
  CHECK(intra % 21 == 0);
  CHECK(intra >= 3 * 21);
  CHECK(d.intra.mean > d.inter_all.mean);
  CHECK(d.inter_all.mean == doctest::Approx(0.5).epsilon(0.1));
  CHECK(d.inter.size() == 7);
  for (const auto& p : d.pairs) {
    if (p.kind == PairKind::Intra) {
      CHECK(p.subject_a == p.subject_b);
      CHECK(p.window_a == p.window_b);
      CHECK(p.position_a < p.position_b);
    } else {
      CHECK(p.subject_a != p.subject_b);
      CHECK(p.position_a == p.position_b);
    }
  }

  const auto sweep = reliability_sweep(recs, cfg);
  REQUIRE(sweep.size() == kSweepExtras.size());
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    CHECK(sweep[i].extra == kSweepExtras[i]);
    CHECK(sweep[i].fingerprint_bits == 128 + kSweepExtras[i]);
    CHECK(sweep[i].intra.count > 0);
  }

  const auto table = position_table(recs, cfg);
  for (std::size_t i = 0; i < 7; ++i) {
    CHECK(table.mean[i][i] == 1.0);
    for (std::size_t j = 0; j < 7; ++j) {
      CHECK(std::abs(table.mean[i][j] - table.mean[j][i]) < 1e-12);
      CHECK(table.count[i][j] == table.count[j][i]);
    }
  }
  std::vector<ProcessedRecord> no_head;
  for (const auto& r : recs) {
    if (r.position != signal::Position::head) no_head.push_back(r);
  }
  CHECK(throws_code([&] { position_table(no_head, cfg); }, ErrorCode::MissingPosition));

  const auto keys = corpus_keys(recs, cfg);
  CHECK_FALSE(keys.empty());
  for (const auto& k : keys) CHECK(k.size() == 128);
}

TEST_CASE("a single subject has no inter-body pairs") {
  const auto recs = small_corpus(1);
  CHECK(throws_code([&] { discriminability(recs, PipelineConfig{}); }, ErrorCode::InsufficientPairs));
}
