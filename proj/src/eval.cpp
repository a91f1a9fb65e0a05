#include "bandana/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <numeric>
#include <set>
#include <thread>

#include <json.hpp>

#include "bandana/error.hpp"
#include "bandana/fft.hpp"

namespace bandana::eval {
namespace {

using signal::Position;

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Results go into
// caller-owned slots indexed by i, so output order never depends on timing.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < jobs; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

struct RecordWindows {
  std::vector<WindowFingerprint> windows;
};

// Fingerprints for every usable record; records too short for one window
// contribute none.
std::vector<RecordWindows> all_fingerprints(std::span<const ProcessedRecord> records, std::size_t window_cycles,
                                            std::size_t fingerprint_bits, const PipelineConfig& config) {
  std::vector<RecordWindows> out(records.size());
  parallel_for(records.size(), config.jobs, [&](std::size_t i) {
    if (!records[i].error.empty()) return;
    try {
      out[i].windows = window_fingerprints(records[i], window_cycles, fingerprint_bits, config);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SignalTooShort) throw;
    }
  });
  return out;
}

double pair_similarity(const fingerprint::Extraction& a, const fingerprint::Extraction& b, std::size_t cutoff) {
  // The first device's reliability order is applied to both, as in pairing.
  const auto ra = fingerprint::reduce(a.fingerprint, a.order, cutoff);
  const auto rb = fingerprint::reduce(b.fingerprint, a.order, cutoff);
  return fingerprint::similarity(ra, rb);
}

const WindowFingerprint* find_window(const RecordWindows& w, std::size_t index) {
  for (const auto& f : w.windows) {
    if (f.window == index) return &f;
  }
  return nullptr;
}

// Same subject and session, different positions, same window index.
std::vector<PairSimilarity> intra_pairs(std::span<const ProcessedRecord> records,
                                        const std::vector<RecordWindows>& fps, std::size_t cutoff) {
  std::vector<PairSimilarity> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (std::size_t j = i + 1; j < records.size(); ++j) {
      const auto& a = records[i];
      const auto& b = records[j];
      if (a.subject_id != b.subject_id || a.session_id != b.session_id || a.position == b.position) continue;
      // Unordered pair; put the lower position first for a stable orientation.
      const bool swap = b.position < a.position;
      const auto& ra = swap ? b : a;
      const auto& rb = swap ? a : b;
      const auto& fa = fps[swap ? j : i];
      const auto& fb = fps[swap ? i : j];
      for (const auto& wa : fa.windows) {
        const auto* wb = find_window(fb, wa.window);
        if (!wb) continue;
        out.push_back({PairKind::Intra, ra.subject_id, rb.subject_id, ra.position, rb.position, wa.window,
                       wb->window, pair_similarity(wa.extraction, wb->extraction, cutoff)});
      }
    }
  }
  return out;
}

void check_config_bits(std::size_t bits, const PipelineConfig& config) {
  if (bits % config.bits_per_cycle != 0) {
    throw Error(ErrorCode::InvalidArgument, "fingerprint size " + std::to_string(bits) +
                                                " is not a multiple of the bits per cycle");
  }
  if (config.cutoff > bits) throw Error(ErrorCode::InsufficientBits, "cutoff exceeds fingerprint size");
}

nlohmann::json to_json(const DistributionSummary& s) {
  return {{"count", s.count},       {"mean", s.mean},
          {"median", s.median},     {"q1", s.q1},
          {"q3", s.q3},             {"whisker_low", s.whisker_low},
          {"whisker_high", s.whisker_high}, {"outliers", s.outliers}};
}

std::ofstream open_report(const std::filesystem::path& dir, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  std::ofstream out(dir / name);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + (dir / name).string());
  out.precision(17);
  return out;
}

std::string pos_name(Position p) { return std::string(signal::to_string(p)); }

void write_pairs_csv(std::ostream& out, const std::vector<PairSimilarity>& pairs) {
  out << "kind,subject_a,position_a,window_a,subject_b,position_b,window_b,similarity\n";
  for (const auto& p : pairs) {
    out << (p.kind == PairKind::Intra ? "intra" : "inter") << ',' << p.subject_a << ','
        << pos_name(p.position_a) << ',' << p.window_a << ',' << p.subject_b << ',' << pos_name(p.position_b) << ','
        << p.window_b << ',' << p.similarity << '\n';
  }
}

}  // namespace

void PipelineConfig::validate() const {
  if (bits_per_cycle == 0 || rho % bits_per_cycle != 0) {
    throw Error(ErrorCode::InvalidArgument, "bits per cycle must divide rho");
  }
  if (rho < 2 * bits_per_cycle) throw Error(ErrorCode::InvalidArgument, "rho must be at least twice bits per cycle");
  if (fingerprint_bits % bits_per_cycle != 0) {
    throw Error(ErrorCode::InvalidArgument, "fingerprint bits must be a multiple of bits per cycle");
  }
  if (cutoff == 0 || cutoff > fingerprint_bits) {
    throw Error(ErrorCode::InvalidArgument, "cutoff must be in [1, fingerprint bits]");
  }
  if (!(threshold > 0.0 && threshold < 1.0)) throw Error(ErrorCode::InvalidArgument, "threshold must be in (0, 1)");
  if (!(overlap >= 0.0 && overlap < 1.0)) throw Error(ErrorCode::InvalidArgument, "overlap must be in [0, 1)");
  if (!(preprocess.band_lo_hz > 0.0 && preprocess.band_lo_hz < preprocess.band_hi_hz)) {
    throw Error(ErrorCode::InvalidBand, "band edges must satisfy 0 < lo < hi");
  }
}

std::vector<ProcessedRecord> process_corpus(const dataset::Corpus& corpus, const PipelineConfig& config) {
  std::vector<ProcessedRecord> out(corpus.records.size());
  parallel_for(corpus.records.size(), config.jobs, [&](std::size_t i) {
    const auto& rec = corpus.records[i];
    auto& p = out[i];
    p.record = i;
    p.subject_id = rec.subject_id;
    p.session_id = rec.session_id;
    p.position = rec.position;
    try {
      p.vertical = signal::preprocess(rec, config.preprocess);
      p.boundaries = gait::detect_cycles(p.vertical, config.detect).minima;
    } catch (const Error& e) {
      p.error = e.what();
    }
  });
  return out;
}

std::vector<WindowFingerprint> window_fingerprints(const ProcessedRecord& rec, std::size_t window_cycles,
                                                   std::size_t fingerprint_bits, const PipelineConfig& config) {
  const std::size_t cycles = fingerprint_bits / config.bits_per_cycle;
  if (cycles == 0 || fingerprint_bits % config.bits_per_cycle != 0 || cycles > window_cycles) {
    throw Error(ErrorCode::InvalidArgument, "fingerprint does not fit the window");
  }
  std::vector<WindowFingerprint> out;
  for (const auto& w : dataset::sliding_windows(rec.boundaries, window_cycles, config.overlap)) {
    auto seq = gait::split_and_normalize(rec.vertical, w.boundaries, config.rho);
    seq.cycles.resize(cycles);
    out.push_back({w.index, fingerprint::extract(seq, config.bits_per_cycle)});
  }
  return out;
}

DistributionSummary summarize(std::vector<double> values) {
  DistributionSummary s;
  s.count = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  s.median = quantile(values, 0.5);
  s.q1 = quantile(values, 0.25);
  s.q3 = quantile(values, 0.75);
  const double iqr = s.q3 - s.q1;
  const double lo = s.q1 - 1.5 * iqr;
  const double hi = s.q3 + 1.5 * iqr;
  s.whisker_low = s.q1;
  s.whisker_high = s.q3;
  for (const double v : values) {
    if (v < lo || v > hi) {
      ++s.outliers;
      continue;
    }
    s.whisker_low = std::min(s.whisker_low, v);
    s.whisker_high = std::max(s.whisker_high, v);
  }
  return s;
}

double block_entropy(std::span<const std::uint8_t> bits) {
  const std::size_t blocks = bits.size() / 4;
  if (blocks == 0) return 0.0;
  std::array<std::size_t, 16> counts{};
  for (std::size_t i = 0; i < blocks; ++i) {
    unsigned v = 0;
    for (std::size_t j = 0; j < 4; ++j) v = (v << 1) | (bits[4 * i + j] & 1u);
    ++counts[v];
  }
  double h = 0.0;
  for (const auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(blocks);
    h -= p * std::log2(p);
  }
  return h / 4.0;
}

SimilarityReport discriminability(std::span<const ProcessedRecord> records, const PipelineConfig& config) {
  config.validate();
  check_config_bits(config.fingerprint_bits, config);
  const std::size_t window_cycles = config.fingerprint_bits / config.bits_per_cycle;
  const auto fps = all_fingerprints(records, window_cycles, config.fingerprint_bits, config);

  SimilarityReport report;
  report.fingerprint_bits = config.fingerprint_bits;
  report.cutoff = config.cutoff;
  report.collision_threshold = config.threshold;
  report.pairs = intra_pairs(records, fps, config.cutoff);
  const std::size_t n_intra = report.pairs.size();

  // Inter-body: one position, different subjects, every window combination.
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (std::size_t j = i + 1; j < records.size(); ++j) {
      const auto& a = records[i];
      const auto& b = records[j];
      if (a.subject_id == b.subject_id || a.position != b.position) continue;
      const bool swap = b.subject_id < a.subject_id;
      const auto& ra = swap ? b : a;
      const auto& rb = swap ? a : b;
      const auto& fa = fps[swap ? j : i];
      const auto& fb = fps[swap ? i : j];
      for (const auto& wa : fa.windows) {
        for (const auto& wb : fb.windows) {
          const double sim = pair_similarity(wa.extraction, wb.extraction, config.cutoff);
          report.pairs.push_back(
              {PairKind::Inter, ra.subject_id, rb.subject_id, ra.position, rb.position, wa.window, wb.window, sim});
          if (sim > config.threshold) {
            const auto da = fingerprint::reduce(wa.extraction.fingerprint, wa.extraction.order, config.cutoff);
            const auto db = fingerprint::reduce(wb.extraction.fingerprint, wa.extraction.order, config.cutoff);
            report.collisions.push_back({report.pairs.size() - 1, block_entropy(da.bits), block_entropy(db.bits)});
          }
        }
      }
    }
  }
  const std::size_t n_inter = report.pairs.size() - n_intra;
  if (n_intra == 0) throw Error(ErrorCode::InsufficientPairs, "no intra-body pairs: need two positions per subject");
  if (n_inter == 0) throw Error(ErrorCode::InsufficientPairs, "no inter-body pairs: need two subjects per position");

  std::vector<double> intra;
  std::vector<double> inter;
  std::map<Position, std::vector<double>> by_position;
  for (const auto& p : report.pairs) {
    if (p.kind == PairKind::Intra) {
      intra.push_back(p.similarity);
    } else {
      inter.push_back(p.similarity);
      by_position[p.position_a].push_back(p.similarity);
    }
  }
  report.intra = summarize(intra);
  report.inter_all = summarize(inter);
  for (auto& [pos, v] : by_position) report.inter[pos] = summarize(std::move(v));
  report.collision_rate = static_cast<double>(report.collisions.size()) / static_cast<double>(n_inter);
  return report;
}

SimilarityReport discriminability(const dataset::Corpus& corpus, const PipelineConfig& config) {
  config.validate();
  const auto records = process_corpus(corpus, config);
  return discriminability(records, config);
}

std::vector<SweepPoint> reliability_sweep(std::span<const ProcessedRecord> records, const PipelineConfig& config,
                                          std::span<const std::size_t> extras) {
  config.validate();
  if (extras.empty()) throw Error(ErrorCode::InvalidArgument, "no sweep configurations");
  const std::size_t max_extra = *std::max_element(extras.begin(), extras.end());
  for (const auto e : extras) check_config_bits(config.cutoff + e, config);
  const std::size_t window_cycles = (config.cutoff + max_extra) / config.bits_per_cycle;

  // Cut each window once; every configuration uses its first M / b cycles.
  std::vector<std::vector<std::pair<std::size_t, gait::GaitSequence>>> sequences(records.size());
  parallel_for(records.size(), config.jobs, [&](std::size_t i) {
    if (!records[i].error.empty()) return;
    try {
      for (const auto& w : dataset::sliding_windows(records[i].boundaries, window_cycles, config.overlap)) {
        sequences[i].emplace_back(w.index, gait::split_and_normalize(records[i].vertical, w.boundaries, config.rho));
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SignalTooShort) throw;
    }
  });
  const bool any = std::any_of(sequences.begin(), sequences.end(), [](const auto& s) { return !s.empty(); });
  if (!any) {
    throw Error(ErrorCode::InsufficientBits, "no record holds " + std::to_string(window_cycles) +
                                                 " cycles for M = " + std::to_string(config.cutoff + max_extra));
  }

  std::vector<SweepPoint> out;
  for (const auto extra : extras) {
    const std::size_t bits = config.cutoff + extra;
    const std::size_t cycles = bits / config.bits_per_cycle;
    std::vector<RecordWindows> fps(records.size());
    parallel_for(records.size(), config.jobs, [&](std::size_t i) {
      for (const auto& [index, seq] : sequences[i]) {
        auto cut = seq;
        cut.cycles.resize(cycles);
        fps[i].windows.push_back({index, fingerprint::extract(cut, config.bits_per_cycle)});
      }
    });
    SweepPoint point;
    point.extra = extra;
    point.fingerprint_bits = bits;
    point.pairs = intra_pairs(records, fps, config.cutoff);
    if (point.pairs.empty()) throw Error(ErrorCode::InsufficientPairs, "no intra-body pairs for the sweep");
    std::vector<double> v;
    for (const auto& p : point.pairs) v.push_back(p.similarity);
    point.intra = summarize(std::move(v));
    out.push_back(std::move(point));
  }
  return out;
}

std::vector<SweepPoint> reliability_sweep(const dataset::Corpus& corpus, const PipelineConfig& config,
                                          std::span<const std::size_t> extras) {
  config.validate();
  const auto records = process_corpus(corpus, config);
  return reliability_sweep(records, config, extras);
}

PositionTable position_table(std::span<const ProcessedRecord> records, const PipelineConfig& config) {
  config.validate();
  std::set<Position> present;
  for (const auto& r : records) {
    if (r.error.empty()) present.insert(r.position);
  }
  for (const auto p : signal::kBodyPositions) {
    if (!present.count(p)) {
      throw Error(ErrorCode::MissingPosition, "no usable record for position " + pos_name(p));
    }
  }
  check_config_bits(config.fingerprint_bits, config);
  const auto fps = all_fingerprints(records, config.fingerprint_bits / config.bits_per_cycle,
                                    config.fingerprint_bits, config);
  const auto pairs = intra_pairs(records, fps, config.cutoff);

  PositionTable table;
  auto slot = [&](Position p) {
    return static_cast<std::size_t>(std::find(table.positions.begin(), table.positions.end(), p) -
                                    table.positions.begin());
  };
  std::array<std::array<double, 7>, 7> sum{};
  for (const auto& p : pairs) {
    const auto i = slot(p.position_a);
    const auto j = slot(p.position_b);
    if (i >= 7 || j >= 7) continue;
    sum[i][j] += p.similarity;
    sum[j][i] += p.similarity;
    ++table.count[i][j];
    ++table.count[j][i];
  }
  for (std::size_t i = 0; i < 7; ++i) {
    for (std::size_t j = 0; j < 7; ++j) {
      if (i == j) {
        table.mean[i][j] = 1.0;
      } else {
        table.mean[i][j] = table.count[i][j] ? sum[i][j] / static_cast<double>(table.count[i][j]) : std::nan("");
      }
    }
  }
  return table;
}

PositionTable position_table(const dataset::Corpus& corpus, const PipelineConfig& config) {
  config.validate();
  const auto records = process_corpus(corpus, config);
  return position_table(records, config);
}

CoherenceSpectrum coherence(std::span<const double> x, std::span<const double> y, double sample_rate,
                            std::size_t segments) {
  if (x.size() != y.size()) throw Error(ErrorCode::LengthMismatch, "coherence needs equal-length signals");
  if (segments == 0) throw Error(ErrorCode::InvalidArgument, "need at least one segment");
  const std::size_t n = x.size();
  // With 50% overlap, `segments` segments of length L span (segments + 1) L / 2.
  const std::size_t len = 2 * n / (segments + 1);
  if (len < 4) throw Error(ErrorCode::InsufficientData, "signals too short for the requested segments");
  const std::size_t step = len / 2;

  std::vector<double> window(len);
  for (std::size_t i = 0; i < len; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(len));
  }
  const std::size_t bins = len / 2 + 1;
  std::vector<double> pxx(bins, 0.0), pyy(bins, 0.0);
  std::vector<std::complex<double>> pxy(bins, 0.0);
  std::vector<double> sx(len), sy(len);
  for (std::size_t start = 0; start + len <= n; start += step) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
      mx += x[start + i];
      my += y[start + i];
    }
    mx /= static_cast<double>(len);
    my /= static_cast<double>(len);
    for (std::size_t i = 0; i < len; ++i) {
      sx[i] = (x[start + i] - mx) * window[i];
      sy[i] = (y[start + i] - my) * window[i];
    }
    const auto fx = dsp::rfft(sx);
    const auto fy = dsp::rfft(sy);
    for (std::size_t k = 0; k < bins; ++k) {
      pxx[k] += std::norm(fx[k]);
      pyy[k] += std::norm(fy[k]);
      pxy[k] += std::conj(fx[k]) * fy[k];
    }
  }
  CoherenceSpectrum out;
  out.frequency.resize(bins);
  out.coherence.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    out.frequency[k] = static_cast<double>(k) * sample_rate / static_cast<double>(len);
    const double denom = pxx[k] * pyy[k];
    out.coherence[k] = denom > 0.0 ? std::min(1.0, std::norm(pxy[k]) / denom) : 0.0;
  }
  return out;
}

CoherenceReport coherence_analysis(const dataset::Corpus& corpus, const PipelineConfig& config,
                                   const CoherenceOptions& options) {
  config.validate();
  const std::size_t n = corpus.records.size();
  std::vector<std::vector<double>> vertical(n);
  std::vector<double> rate(n, 0.0);
  parallel_for(n, config.jobs, [&](std::size_t i) {
    try {
      const auto uniform = signal::resample_uniform(corpus.records[i]);
      const auto orientation = signal::fuse_orientation(uniform, config.preprocess.fusion);
      auto v = signal::extract_vertical(uniform, orientation);
      const auto skip = static_cast<std::size_t>(std::llround(config.preprocess.discard_seconds * v.sample_rate));
      if (v.z.size() > skip) v.z.erase(v.z.begin(), v.z.begin() + static_cast<std::ptrdiff_t>(skip));
      vertical[i] = std::move(v.z);
      rate[i] = v.sample_rate;
    } catch (const Error&) {
      vertical[i].clear();
    }
  });

  std::vector<std::pair<std::size_t, std::size_t>> intra, inter;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (vertical[i].empty() || vertical[j].empty() || rate[i] != rate[j]) continue;
      const auto& a = corpus.records[i];
      const auto& b = corpus.records[j];
      if (a.subject_id == b.subject_id) {
        if (a.session_id == b.session_id && a.position != b.position) intra.emplace_back(i, j);
      } else if (a.position == b.position) {
        inter.emplace_back(i, j);
      }
    }
  }
  if (intra.empty()) throw Error(ErrorCode::InsufficientPairs, "need two simultaneous recordings of one subject");
  if (inter.empty()) throw Error(ErrorCode::InsufficientPairs, "need recordings of two different subjects");

  // One shared length keeps every pair on the same frequency grid.
  std::size_t len = std::numeric_limits<std::size_t>::max();
  for (const auto& v : vertical) {
    if (!v.empty()) len = std::min(len, v.size());
  }
  double fs = 0.0;
  for (const double r : rate) fs = std::max(fs, r);

  auto average = [&](const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
    std::vector<std::vector<double>> spectra(pairs.size());
    parallel_for(pairs.size(), config.jobs, [&](std::size_t k) {
      const auto [i, j] = pairs[k];
      auto s = coherence(std::span(vertical[i]).first(len), std::span(vertical[j]).first(len), fs, options.segments);
      spectra[k] = std::move(s.coherence);
    });
    std::vector<double> mean(spectra.front().size(), 0.0);
    for (const auto& s : spectra) {
      for (std::size_t b = 0; b < s.size(); ++b) mean[b] += s[b];
    }
    for (double& m : mean) m /= static_cast<double>(spectra.size());
    return mean;
  };

  CoherenceReport report;
  report.intra_pairs = intra.size();
  report.inter_pairs = inter.size();
  report.frequency = coherence(std::span(vertical[intra[0].first]).first(len),
                               std::span(vertical[intra[0].second]).first(len), fs, options.segments)
                         .frequency;
  report.intra = average(intra);
  report.inter = average(inter);

  auto band_mean = [&](const std::vector<double>& c, double lo, double hi, bool include_dc) {
    double s = 0.0;
    std::size_t k = 0;
    for (std::size_t b = 0; b < c.size(); ++b) {
      const double f = report.frequency[b];
      if ((f == 0.0 && !include_dc) || f < lo || f > hi) continue;
      s += c[b];
      ++k;
    }
    return k ? s / static_cast<double>(k) : 0.0;
  };
  const double below = std::nextafter(options.low_band_hz, 0.0);
  report.intra_low_band = band_mean(report.intra, 0.0, below, false);
  report.inter_low_band = band_mean(report.inter, 0.0, below, false);
  report.intra_in_band = band_mean(report.intra, options.low_band_hz, options.band_hi_hz, false);
  report.inter_in_band = band_mean(report.inter, options.low_band_hz, options.band_hi_hz, false);
  report.low_band_correlated = report.inter_low_band > report.inter_in_band;
  return report;
}

SecurityArithmetic security_arithmetic(double session_seconds, double threshold, int cutoff) {
  if (!(session_seconds > 0.0)) throw Error(ErrorCode::InvalidArgument, "session duration must be positive");
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw Error(ErrorCode::InvalidArgument, "threshold must be in [0, 1]");
  if (cutoff <= 0) throw Error(ErrorCode::InvalidArgument, "cutoff must be positive");
  // The epsilon absorbs binary rounding of products like 128 * 0.2.
  constexpr double eps = 1e-9;
  SecurityArithmetic s;
  s.tries_per_day = static_cast<long long>(std::floor(86400.0 / session_seconds + eps));
  s.t = static_cast<long long>(std::floor(static_cast<double>(cutoff) * (1.0 - threshold) + eps));
  return s;
}

std::vector<BitVector> corpus_keys(std::span<const ProcessedRecord> records, const PipelineConfig& config) {
  config.validate();
  const auto fps = all_fingerprints(records, config.fingerprint_bits / config.bits_per_cycle,
                                    config.fingerprint_bits, config);
  std::vector<BitVector> keys;
  for (const auto& r : fps) {
    for (const auto& w : r.windows) {
      keys.push_back(fingerprint::reduce(w.extraction.fingerprint, w.extraction.order, config.cutoff).bits);
    }
  }
  return keys;
}

// ---------------------------------------------------------------------------
// Report writers

void write_report(const SimilarityReport& r, const std::filesystem::path& dir, ReportFormat f) {
  if (f == ReportFormat::Csv) {
    auto out = open_report(dir, "discriminability_pairs.csv");
    write_pairs_csv(out, r.pairs);
    auto col = open_report(dir, "discriminability_collisions.csv");
    col << "pair,subject_a,subject_b,position,similarity,entropy_a,entropy_b\n";
    for (const auto& c : r.collisions) {
      const auto& p = r.pairs[c.pair];
      col << c.pair << ',' << p.subject_a << ',' << p.subject_b << ',' << pos_name(p.position_a) << ','
          << p.similarity << ',' << c.entropy_a << ',' << c.entropy_b << '\n';
    }
    return;
  }
  nlohmann::json j;
  j["fingerprint_bits"] = r.fingerprint_bits;
  j["cutoff"] = r.cutoff;
  j["intra"] = to_json(r.intra);
  j["inter_all"] = to_json(r.inter_all);
  for (const auto& [pos, s] : r.inter) j["inter"][pos_name(pos)] = to_json(s);
  j["collision_threshold"] = r.collision_threshold;
  j["collision_rate"] = r.collision_rate;
  j["collisions"] = r.collisions.size();
  open_report(dir, "discriminability.json") << j.dump(2) << '\n';
}

void write_report(const std::vector<SweepPoint>& r, const std::filesystem::path& dir, ReportFormat f) {
  if (f == ReportFormat::Csv) {
    auto out = open_report(dir, "reliability_pairs.csv");
    out << "fingerprint_bits,extra,kind,subject_a,position_a,window_a,subject_b,position_b,window_b,similarity\n";
    for (const auto& p : r) {
      for (const auto& pair : p.pairs) {
        out << p.fingerprint_bits << ',' << p.extra << ",intra," << pair.subject_a << ',' << pos_name(pair.position_a)
            << ',' << pair.window_a << ',' << pair.subject_b << ',' << pos_name(pair.position_b) << ','
            << pair.window_b << ',' << pair.similarity << '\n';
      }
    }
    return;
  }
  nlohmann::json j = nlohmann::json::array();
  for (const auto& p : r) {
    j.push_back({{"fingerprint_bits", p.fingerprint_bits}, {"extra", p.extra}, {"intra", to_json(p.intra)}});
  }
  open_report(dir, "reliability.json") << j.dump(2) << '\n';
}

void write_report(const PositionTable& r, const std::filesystem::path& dir, ReportFormat f) {
  if (f == ReportFormat::Csv) {
    auto out = open_report(dir, "positions.csv");
    out << "position_a,position_b,mean_similarity,pairs\n";
    for (std::size_t i = 0; i < 7; ++i) {
      for (std::size_t j = 0; j < 7; ++j) {
        out << pos_name(r.positions[i]) << ',' << pos_name(r.positions[j]) << ',' << r.mean[i][j] << ','
            << r.count[i][j] << '\n';
      }
    }
    return;
  }
  nlohmann::json j;
  for (const auto p : r.positions) j["positions"].push_back(pos_name(p));
  for (std::size_t i = 0; i < 7; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t k = 0; k < 7; ++k) {
      if (std::isnan(r.mean[i][k])) {
        row.push_back(nullptr);
      } else {
        row.push_back(r.mean[i][k]);
      }
    }
    j["mean"].push_back(row);
  }
  open_report(dir, "positions.json") << j.dump(2) << '\n';
}

void write_report(const CoherenceReport& r, const std::filesystem::path& dir, ReportFormat f) {
  if (f == ReportFormat::Csv) {
    auto out = open_report(dir, "coherence.csv");
    out << "frequency_hz,group,coherence\n";
    for (std::size_t b = 0; b < r.frequency.size(); ++b) {
      out << r.frequency[b] << ",intra," << r.intra[b] << '\n';
      out << r.frequency[b] << ",inter," << r.inter[b] << '\n';
    }
    return;
  }
  nlohmann::json j = {{"intra_pairs", r.intra_pairs},         {"inter_pairs", r.inter_pairs},
                      {"intra_low_band", r.intra_low_band},   {"inter_low_band", r.inter_low_band},
                      {"intra_in_band", r.intra_in_band},     {"inter_in_band", r.inter_in_band},
                      {"low_band_correlated", r.low_band_correlated}};
  open_report(dir, "coherence.json") << j.dump(2) << '\n';
}

void write_report(const RandomnessReport& r, const std::filesystem::path& dir, ReportFormat f) {
  if (f == ReportFormat::Csv) {
    auto out = open_report(dir, "randomness.csv");
    out << "test,index,p_value,passed\n";
    for (const auto& t : r.tests) {
      for (std::size_t i = 0; i < t.p_values.size(); ++i) {
        out << t.name << ',' << i << ',' << t.p_values[i] << ',' << (t.passed ? 1 : 0) << '\n';
      }
    }
    return;
  }
  nlohmann::json j = {{"keys", r.keys}, {"bits", r.bits}, {"ones_fraction", r.ones_fraction}, {"passed", r.passed}};
  for (const auto& t : r.tests) j["tests"].push_back({{"name", t.name}, {"p_values", t.p_values}, {"passed", t.passed}});
  open_report(dir, "randomness.json") << j.dump(2) << '\n';
}

void write_report(const SecurityArithmetic& r, const std::filesystem::path& dir, ReportFormat f) {
  if (f == ReportFormat::Csv) {
    open_report(dir, "security.csv") << "tries_per_day,t\n" << r.tries_per_day << ',' << r.t << '\n';
    return;
  }
  open_report(dir, "security.json") << nlohmann::json({{"tries_per_day", r.tries_per_day}, {"t", r.t}}).dump(2)
                                    << '\n';
}

}  // namespace bandana::eval
