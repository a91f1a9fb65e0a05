#include "bandana/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "bandana/error.hpp"

namespace bandana::dataset {
namespace {

using signal::ImuRecord;
using signal::ImuSample;
using signal::Position;
using signal::Quaternion;
using signal::Vec3;

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    auto field = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
      field.remove_suffix(1);
    }
    out.push_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(std::string_view s, const std::string& where) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::SchemaMismatch, where + ": not a number: '" + std::string(s) + "'");
  }
  return v;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

// Millisecond text that reloads (as ms / 1000) to exactly t.
std::string format_timestamp_ms(double t) {
  const double ms = t * 1000.0;
  double up = ms, down = ms;
  for (int step = 0; step < 8; ++step) {
    if (up / 1000.0 == t) return format_double(up);
    if (down / 1000.0 == t) return format_double(down);
    up = std::nextafter(up, std::numeric_limits<double>::infinity());
    down = std::nextafter(down, -std::numeric_limits<double>::infinity());
  }
  return format_double(ms);
}

std::string record_key(const ImuRecord& r) {
  return r.subject_id + "/" + std::string(signal::to_string(r.position)) + "/" + r.recording_id;
}

}  // namespace

void Corpus::check_unique() const {
  std::set<std::string> seen;
  for (const auto& r : records) {
    if (!seen.insert(record_key(r)).second) {
      throw Error(ErrorCode::SchemaMismatch, "duplicate record " + record_key(r));
    }
  }
}

Corpus load_csv(const std::filesystem::path& path, const RecordMeta& meta) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  const std::string where = path.filename().string();

  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::SchemaMismatch, where + ": missing header row");
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // UTF-8 BOM
  const auto header = split(line);

  std::vector<int> column(std::size(kCsvColumns), -1);
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto* hit = std::find(std::begin(kCsvColumns), std::end(kCsvColumns), header[i]);
    if (hit == std::end(kCsvColumns)) {
      throw Error(ErrorCode::SchemaMismatch, where + ": unexpected column '" + std::string(header[i]) + "'");
    }
    column[static_cast<std::size_t>(hit - std::begin(kCsvColumns))] = static_cast<int>(i);
  }
  std::string missing;
  for (std::size_t c = 0; c < column.size(); ++c) {
    if (column[c] < 0) missing += (missing.empty() ? "" : ", ") + std::string(kCsvColumns[c]);
  }
  if (!missing.empty()) throw Error(ErrorCode::MissingColumns, where + ": missing columns " + missing);

  ImuRecord rec;
  rec.sample_rate = meta.sample_rate_hz;
  rec.subject_id = meta.subject_id;
  rec.position = meta.position;
  rec.recording_id = meta.recording_id;
  rec.session_id = meta.session_id;

  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto fields = split(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::SchemaMismatch, where + ": row " + std::to_string(row) + " has " +
                                                 std::to_string(fields.size()) + " fields");
    }
    const std::string at = where + ": row " + std::to_string(row);
    double v[7];
    for (std::size_t c = 0; c < 7; ++c) v[c] = parse_double(fields[static_cast<std::size_t>(column[c])], at);
    const ImuSample s{v[0] / 1000.0, {v[1], v[2], v[3]}, {v[4], v[5], v[6]}};
    if (!rec.samples.empty() && !(s.t > rec.samples.back().t)) {
      throw Error(ErrorCode::NonMonotoneTimestamps, at + ": timestamp does not increase");
    }
    rec.samples.push_back(s);
  }

  Corpus corpus;
  if (rec.samples.empty()) return corpus;
  try {
    rec.validate();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidArgument || e.code() == ErrorCode::EmptyStream) {
      throw Error(ErrorCode::SchemaMismatch, where + ": " + e.what());
    }
    throw;
  }
  corpus.records.push_back(std::move(rec));
  return corpus;
}

void write_csv(const ImuRecord& rec, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  for (std::size_t c = 0; c < std::size(kCsvColumns); ++c) out << (c ? "," : "") << kCsvColumns[c];
  out << '\n';
  for (const auto& s : rec.samples) {
    out << format_timestamp_ms(s.t) << ',' << format_double(s.acc.x) << ',' << format_double(s.acc.y) << ','
        << format_double(s.acc.z) << ',' << format_double(s.gyro.x) << ',' << format_double(s.gyro.y) << ','
        << format_double(s.gyro.z) << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::vector<std::string> osaka_warnings() {
  return {
      "osaka: all three sensors are mounted on one harness, so positions are not independent",
      "osaka: walking segments contain only 6-8 gait cycles, fewer than one fingerprint window",
  };
}

Corpus load_corpus(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + manifest.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaMismatch, "manifest is not valid JSON: " + std::string(e.what()));
  }

  Corpus corpus;
  try {
    corpus.schema_version = doc.at("schema_version").get<int>();
    if (corpus.schema_version != kSchemaVersion) {
      throw Error(ErrorCode::SchemaMismatch, "unsupported schema_version " + std::to_string(corpus.schema_version));
    }
    corpus.dataset = doc.value("dataset", std::string{});
    if (doc.contains("warnings")) corpus.warnings = doc.at("warnings").get<std::vector<std::string>>();
    const auto base = manifest.parent_path();
    for (const auto& entry : doc.at("records")) {
      RecordMeta meta;
      meta.file = entry.at("file").get<std::string>();
      meta.subject_id = entry.at("subject_id").get<std::string>();
      const auto pos_name = entry.at("position").get<std::string>();
      const auto pos = signal::parse_position(pos_name);
      if (!pos) throw Error(ErrorCode::SchemaMismatch, "unknown position '" + pos_name + "'");
      meta.position = *pos;
      meta.recording_id = entry.at("recording_id").get<std::string>();
      meta.session_id = entry.value("session_id", meta.recording_id);
      meta.sample_rate_hz = entry.at("sample_rate_hz").get<double>();
      auto part = load_csv(base / meta.file, meta);
      for (auto& r : part.records) corpus.records.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaMismatch, "manifest: " + std::string(e.what()));
  }
  if (corpus.dataset == "osaka") {
    for (auto& w : osaka_warnings()) {
      if (std::find(corpus.warnings.begin(), corpus.warnings.end(), w) == corpus.warnings.end()) {
        corpus.warnings.push_back(std::move(w));
      }
    }
  }
  corpus.check_unique();
  return corpus;
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
  corpus.check_unique();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());

  nlohmann::json doc;
  doc["schema_version"] = corpus.schema_version;
  doc["dataset"] = corpus.dataset;
  doc["warnings"] = corpus.warnings;
  doc["records"] = nlohmann::json::array();
  for (const auto& r : corpus.records) {
    std::string file = r.subject_id + "_" + std::string(signal::to_string(r.position)) + "_" + r.recording_id + ".csv";
    std::replace_if(file.begin(), file.end(), [](char c) { return c == '/' || c == '\\' || c == ' '; }, '-');
    write_csv(r, dir / file);
    doc["records"].push_back({{"file", file},
                              {"subject_id", r.subject_id},
                              {"position", std::string(signal::to_string(r.position))},
                              {"recording_id", r.recording_id},
                              {"session_id", r.session_id},
                              {"sample_rate_hz", r.sample_rate}});
  }
  std::ofstream out(dir / "manifest.json");
  if (!out) throw Error(ErrorCode::IoError, "cannot write manifest in " + dir.string());
  out << doc.dump(2) << '\n';
}

LayoutSummary summarize_layout(const Corpus& corpus) {
  LayoutSummary s;
  std::set<std::string> subjects;
  s.min_minutes = corpus.records.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  for (const auto& r : corpus.records) {
    subjects.insert(r.subject_id);
    ++s.records_per_position[r.position];
    const double minutes = r.samples.empty() ? 0.0 : (r.samples.back().t - r.samples.front().t) / 60.0;
    s.min_minutes = std::min(s.min_minutes, minutes);
    s.max_minutes = std::max(s.max_minutes, minutes);
  }
  s.subjects = subjects.size();
  s.warnings = corpus.warnings;

  if (corpus.dataset == "mannheim") {
    if (s.subjects != 15) s.warnings.push_back("mannheim: expected 15 subjects, found " + std::to_string(s.subjects));
    for (const auto p : signal::kBodyPositions) {
      if (s.records_per_position[p] == 0) {
        s.warnings.push_back("mannheim: no records for position " + std::string(signal::to_string(p)));
      }
    }
    if (!corpus.records.empty() && (s.min_minutes < 9.0 || s.max_minutes > 13.0)) {
      s.warnings.push_back("mannheim: recordings outside the usual 10-12 minute range");
    }
  } else if (corpus.dataset == "osaka") {
    for (const auto& [pos, count] : s.records_per_position) {
      if (pos != Position::thigh) {
        s.warnings.push_back("osaka: unexpected position " + std::string(signal::to_string(pos)));
      }
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Synthetic corpora

SyntheticGaitSpec SyntheticGaitSpec::defaults() {
  SyntheticGaitSpec spec;
  const std::pair<Position, PositionTransform> table[] = {
      {Position::chest, {0.0, 0.9, 42.0, 15.0, 3.0}},
      {Position::forearm, {0.0, 1.2, 38.0, 30.0, 12.0}},
      {Position::head, {0.0, 0.85, 42.0, 10.0, 2.0}},
      {Position::shin, {0.0, 1.4, 38.0, 20.0, 15.0}},
      {Position::thigh, {0.0, 1.2, 40.0, 20.0, 12.0}},
      {Position::upperarm, {0.0, 1.0, 40.0, 25.0, 8.0}},
      {Position::waist, {0.0, 1.0, 42.0, 10.0, 2.0}},
  };
  for (const auto& [p, t] : table) spec.per_position[p] = t;
  return spec;
}

namespace {

// SplitMix64-seeded xoshiro-free generator; explicit so output does not
// depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() {
    if (spare_) {
      spare_ = false;
      return cached_;
    }
    double u = 0.0;
    do u = uniform(); while (u <= 0.0);
    const double v = uniform();
    const double r = std::sqrt(-2.0 * std::log(u));
    cached_ = r * std::sin(2.0 * std::numbers::pi * v);
    spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * v);
  }

 private:
  std::uint64_t state_;
  bool spare_ = false;
  double cached_ = 0.0;
};

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  Rng r(a ^ (b * 0xD1B54A32D192ED03ULL));
  return r.next();
}

constexpr std::size_t kHarmonics = 5;
constexpr double kGravity = 9.80665;

// One body's walking motion: world-frame specific force minus gravity and a
// gait phase, both as functions of time.
class LatentGait {
 public:
  LatentGait(const SyntheticGaitSpec& spec, Rng& rng, double horizon) {
    const double period = spec.base_period * rng.uniform(0.9, 1.1);
    // Harmonics of the stride frequency. Vertical and forward motion peak at
    // the step frequency (k = 2), lateral sway at the stride frequency.
    const double base[3][kHarmonics] = {
        {0.3, 1.0, 0.3, 0.3, 0.1}, {1.0, 0.3, 0.3, 0.1, 0.05}, {0.45, 1.0, 0.25, 0.35, 0.12}};
    const double gain[3] = {1.2, 0.6, 3.0};
    for (int axis = 0; axis < 3; ++axis) {
      for (std::size_t k = 0; k < kHarmonics; ++k) {
        amp_[axis][k] = gain[axis] * base[axis][k] * std::max(0.2, 1.0 + 0.25 * rng.normal());
        phase_[axis][k] = rng.uniform(0.0, 2.0 * std::numbers::pi);
      }
    }
    // Step harmonics of the vertical axis roughly in phase: each heel strike
    // gives a sharp, well-defined minimum.
    phase_[2][1] = -0.5 * std::numbers::pi + 0.2 * rng.normal();
    phase_[2][3] = -0.5 * std::numbers::pi + 0.2 * rng.normal();
    // Cycle onsets jitter around a steady tempo instead of accumulating, so
    // the phase stays locked to the subject's mean period.
    const double bound = 0.25 * period;
    for (std::size_t i = 0; static_cast<double>(i) * period < horizon + 2.0 * period; ++i) {
      const double jitter = std::clamp(spec.period_jitter * period * rng.normal(), -bound, bound);
      starts_.push_back(i == 0 ? 0.0 : static_cast<double>(i) * period + jitter);
      CycleParams c;
      for (int axis = 0; axis < 3; ++axis) {
        for (std::size_t k = 0; k < kHarmonics; ++k) {
          c.gain[axis][k] = 1.0 + spec.cycle_variation * rng.normal();
          c.shift[axis][k] = 0.25 * spec.cycle_variation * rng.normal();
        }
      }
      cycles_.push_back(c);
    }
    starts_.push_back(static_cast<double>(starts_.size()) * period);
    cycles_.push_back(cycles_.back());
  }

  // Continuous gait phase in cycles and its time derivative.
  std::pair<double, double> phase(double t) const {
    if (t <= 0.0) return {t / (starts_[1] - starts_[0]), 1.0 / (starts_[1] - starts_[0])};
    const auto it = std::upper_bound(starts_.begin(), starts_.end(), t);
    const auto c = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - starts_.begin(),
                                                                     static_cast<std::ptrdiff_t>(starts_.size()) - 1)) - 1;
    const double len = starts_[c + 1] - starts_[c];
    return {static_cast<double>(c) + (t - starts_[c]) / len, 1.0 / len};
  }

  Vec3 motion(double t) const {
    const auto [phi, rate] = phase(t);
    const double whole = std::max(0.0, std::floor(phi));
    const auto c = std::min(static_cast<std::size_t>(whole), cycles_.size() - 2);
    // Smooth blend from this cycle's parameters to the next.
    const double u = std::clamp(phi - whole, 0.0, 1.0);
    const double w = u * u * (3.0 - 2.0 * u);
    double out[3] = {0.0, 0.0, 0.0};
    for (int axis = 0; axis < 3; ++axis) {
      for (std::size_t k = 0; k < kHarmonics; ++k) {
        const double g = (1.0 - w) * cycles_[c].gain[axis][k] + w * cycles_[c + 1].gain[axis][k];
        const double s = (1.0 - w) * cycles_[c].shift[axis][k] + w * cycles_[c + 1].shift[axis][k];
        out[axis] += amp_[axis][k] * g *
                     std::sin(2.0 * std::numbers::pi * static_cast<double>(k + 1) * phi + phase_[axis][k] + s);
      }
    }
    (void)rate;
    return {out[0], out[1], out[2]};
  }

 private:
  struct CycleParams {
    double gain[3][kHarmonics];
    double shift[3][kHarmonics];
  };
  double amp_[3][kHarmonics]{};
  double phase_[3][kHarmonics]{};
  std::vector<double> starts_;
  std::vector<CycleParams> cycles_;
};

ImuRecord render(const LatentGait& gait, const PositionTransform& tf, std::size_t n_samples, double fs, Rng& rng) {
  const double delay = tf.phase_jitter * rng.normal();
  const double deg = std::numbers::pi / 180.0;
  const double yaw = rng.uniform(0.0, tf.heading_deg * deg);
  const double tilt_axis = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double tilt = rng.uniform(0.0, tf.tilt_deg) * deg;
  const Quaternion mount = Quaternion::from_axis_angle({0, 0, 1}, yaw) *
                           Quaternion::from_axis_angle({std::cos(tilt_axis), std::sin(tilt_axis), 0}, tilt);
  const Vec3 swing_axis{0.0, 1.0, 0.0};
  const double swing = tf.swing_deg * deg;
  const double swing_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);

  ImuRecord rec;
  rec.sample_rate = fs;
  rec.samples.resize(n_samples);
  double power = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double t = static_cast<double>(i) / fs;
    const double tl = t + delay;
    const auto [phi, rate] = gait.phase(tl);
    const Vec3 m = gait.motion(tl);
    const Vec3 world{tf.amplitude_scale * m.x, tf.amplitude_scale * m.y, kGravity + tf.amplitude_scale * m.z};
    power += tf.amplitude_scale * tf.amplitude_scale * m.z * m.z;
    const double arg = 2.0 * std::numbers::pi * phi + swing_phase;
    const Quaternion q = mount * Quaternion::from_axis_angle(swing_axis, swing * std::sin(arg));
    const double omega = swing * std::cos(arg) * 2.0 * std::numbers::pi * rate;
    auto& s = rec.samples[i];
    s.t = t;
    s.acc = q.conjugate().rotate(world);
    s.gyro = {omega * swing_axis.x, omega * swing_axis.y, omega * swing_axis.z};
  }
  if (std::isfinite(tf.noise_snr_db) && n_samples > 0) {
    const double rms = std::sqrt(power / static_cast<double>(n_samples));
    const double sigma = rms * std::pow(10.0, -tf.noise_snr_db / 20.0);
    const double gyro_sigma = 0.01 * sigma;
    for (auto& s : rec.samples) {
      s.acc.x += sigma * rng.normal();
      s.acc.y += sigma * rng.normal();
      s.acc.z += sigma * rng.normal();
      s.gyro.x += gyro_sigma * rng.normal();
      s.gyro.y += gyro_sigma * rng.normal();
      s.gyro.z += gyro_sigma * rng.normal();
    }
  }
  return rec;
}

}  // namespace

Corpus generate_synthetic(const SyntheticGaitSpec& spec) {
  if (!(spec.base_period > 0.0) || !(spec.sample_rate > 0.0) || spec.n_cycles == 0) {
    throw Error(ErrorCode::InvalidArgument, "synthetic spec needs positive period, rate and cycle count");
  }
  for (const auto& [pos, tf] : spec.per_position) {
    if (std::isnan(tf.noise_snr_db) || tf.noise_snr_db == -std::numeric_limits<double>::infinity()) {
      throw Error(ErrorCode::InvalidArgument, "noise_snr_db must be a number or +infinity");
    }
  }
  Corpus corpus;
  corpus.dataset = "synthetic";
  // Two seconds of warm-up on top of the requested cycles.
  const double horizon = 2.0 + spec.base_period * 1.1 * static_cast<double>(spec.n_cycles) + 1.0;
  const auto n_samples = static_cast<std::size_t>(std::ceil(horizon * spec.sample_rate));
  for (std::size_t subject = 0; subject < spec.n_subjects; ++subject) {
    for (std::size_t session = 0; session < spec.sessions_per_subject; ++session) {
      Rng gait_rng(mix(mix(spec.rng_seed, subject + 1), session + 1));
      const LatentGait gait(spec, gait_rng, horizon);
      char subject_id[32], session_id[32];
      std::snprintf(subject_id, sizeof(subject_id), "subject%02zu", subject + 1);
      std::snprintf(session_id, sizeof(session_id), "session%zu", session + 1);
      for (const auto& [pos, tf] : spec.per_position) {
        Rng rec_rng(mix(gait_rng.next() ^ mix(spec.rng_seed, 0xABCDEF), static_cast<std::uint64_t>(pos) + 1));
        ImuRecord rec = render(gait, tf, n_samples, spec.sample_rate, rec_rng);
        rec.subject_id = subject_id;
        rec.position = pos;
        rec.session_id = session_id;
        rec.recording_id = session_id;
        corpus.records.push_back(std::move(rec));
      }
    }
  }
  return corpus;
}

// ---------------------------------------------------------------------------

std::vector<Window> sliding_windows(std::span<const std::size_t> boundaries, std::size_t window_cycles,
                                    double overlap) {
  if (window_cycles == 0) throw Error(ErrorCode::InvalidArgument, "window must cover at least one cycle");
  if (!(overlap >= 0.0 && overlap < 1.0)) throw Error(ErrorCode::InvalidArgument, "overlap must be in [0, 1)");
  const std::size_t half_cycles = 2 * window_cycles;
  if (boundaries.size() < half_cycles + 1) {
    throw Error(ErrorCode::SignalTooShort, "signal holds " + std::to_string(boundaries.size() / 2) +
                                               " cycles, window needs " + std::to_string(window_cycles));
  }
  const auto stride = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(static_cast<double>(window_cycles) * (1.0 - overlap))));
  std::vector<Window> out;
  for (std::size_t first = 0; first + half_cycles < boundaries.size(); first += 2 * stride) {
    Window w;
    w.index = out.size();
    w.boundaries.assign(boundaries.begin() + static_cast<std::ptrdiff_t>(first),
                        boundaries.begin() + static_cast<std::ptrdiff_t>(first + half_cycles + 1));
    w.span = {w.boundaries.front(), w.boundaries.back()};
    out.push_back(std::move(w));
  }
  return out;
}

void write_vertical(const signal::VerticalSignal& sig, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << "# sample_rate_hz=" << format_double(sig.sample_rate) << "\nt_s,z\n";
  for (std::size_t i = 0; i < sig.z.size(); ++i) {
    out << format_double(static_cast<double>(i) / sig.sample_rate) << ',' << format_double(sig.z[i]) << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

signal::VerticalSignal load_vertical(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  const std::string where = path.filename().string();
  signal::VerticalSignal sig;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# sample_rate_hz=", 0) != 0) {
    throw Error(ErrorCode::SchemaMismatch, where + ": missing sample rate line");
  }
  sig.sample_rate = parse_double(std::string_view(line).substr(17), where);
  if (!std::getline(in, line) || split(line) != std::vector<std::string_view>{"t_s", "z"}) {
    throw Error(ErrorCode::SchemaMismatch, where + ": expected header t_s,z");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 2) throw Error(ErrorCode::SchemaMismatch, where + ": bad row");
    sig.z.push_back(parse_double(f[1], where));
  }
  return sig;
}

}  // namespace bandana::dataset
