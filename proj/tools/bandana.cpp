// Command-line driver: synthetic corpora, preprocessing, simulated pairing
// and the evaluation reports.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "bandana/dataset.hpp"
#include "bandana/error.hpp"
#include "bandana/eval.hpp"
#include "bandana/fuzzy_ecc.hpp"
#include "bandana/protocol.hpp"

namespace fs = std::filesystem;
using namespace bandana;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSchema = 2;
constexpr int kExitSignal = 3;
constexpr int kExitPairing = 4;
constexpr int kExitInsufficient = 5;
constexpr int kExitUsage = 64;
constexpr int kExitIo = 74;

struct Options {
  std::size_t rho = 40;
  std::size_t bits_per_cycle = 4;
  std::size_t fingerprint_bits = 192;
  std::size_t cutoff = 128;
  double threshold = 0.8;
  std::string band = "0.5:12";
  double sample_rate = 50.0;
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 1;
  std::string format = "json";
};

eval::PipelineConfig make_config(const Options& o) {
  eval::PipelineConfig c;
  c.rho = o.rho;
  c.bits_per_cycle = o.bits_per_cycle;
  c.fingerprint_bits = o.fingerprint_bits;
  c.cutoff = o.cutoff;
  c.threshold = o.threshold;
  c.jobs = std::max<std::size_t>(1, o.jobs);
  const auto colon = o.band.find(':');
  if (colon == std::string::npos) throw Error(ErrorCode::InvalidArgument, "--band expects lo:hi");
  try {
    c.preprocess.band_lo_hz = std::stod(o.band.substr(0, colon));
    c.preprocess.band_hi_hz = std::stod(o.band.substr(colon + 1));
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidArgument, "--band expects two numbers, lo:hi");
  }
  if (!(c.preprocess.band_hi_hz < o.sample_rate / 2.0)) {
    throw Error(ErrorCode::InvalidBand, "upper band edge must lie below the Nyquist frequency");
  }
  c.validate();
  return c;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::SchemaMismatch:
    case ErrorCode::MissingColumns:
    case ErrorCode::NonMonotoneTimestamps:
      return kExitSchema;
    case ErrorCode::InsufficientPairs:
    case ErrorCode::InsufficientBits:
    case ErrorCode::MissingPosition:
    case ErrorCode::TooFewKeys:
    case ErrorCode::SignalTooShort:
    case ErrorCode::InsufficientData:
      return kExitInsufficient;
    case ErrorCode::IoError:
      return kExitIo;
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidBand:
      return kExitUsage;
    default:
      return kExitSignal;
  }
}

int report_error(const Error& e) {
  std::cerr << "bandana: " << e.what() << '\n';
  return exit_code_for(e.code());
}

// ---------------------------------------------------------------------------

int cmd_synth(const Options& o, const std::string& out, std::size_t subjects, std::size_t cycles, double period) {
  auto spec = dataset::SyntheticGaitSpec::defaults();
  spec.n_subjects = subjects;
  spec.n_cycles = cycles;
  spec.base_period = period;
  spec.sample_rate = o.sample_rate;
  spec.rng_seed = o.seed.value_or(1);
  const auto corpus = dataset::generate_synthetic(spec);
  dataset::write_corpus(corpus, out);
  std::cout << "wrote " << corpus.records.size() << " records to " << out << '\n';
  return kExitOk;
}

dataset::Corpus load_input(const std::string& input, const Options& o, const std::string& subject,
                           const std::string& position) {
  if (fs::path(input).extension() == ".json") return dataset::load_corpus(input);
  dataset::RecordMeta meta;
  meta.file = fs::path(input).filename().string();
  meta.subject_id = subject;
  const auto pos = signal::parse_position(position);
  if (!pos) throw Error(ErrorCode::InvalidArgument, "unknown position '" + position + "'");
  meta.position = *pos;
  meta.recording_id = fs::path(input).stem().string();
  meta.session_id = meta.recording_id;
  meta.sample_rate_hz = o.sample_rate;
  return dataset::load_csv(input, meta);
}

int cmd_preprocess(const eval::PipelineConfig& config, const Options& o, const std::string& input,
                   const std::string& output, const std::string& subject, const std::string& position) {
  const auto corpus = load_input(input, o, subject, position);
  fs::create_directories(output);
  nlohmann::json index = nlohmann::json::array();
  int status = kExitOk;
  for (const auto& rec : corpus.records) {
    const std::string name = rec.subject_id + "_" + std::string(signal::to_string(rec.position)) + "_" +
                             rec.recording_id;
    try {
      const auto v = signal::preprocess(rec, config.preprocess);
      // Segmentation is checked here so unusable recordings surface now.
      const auto det = gait::detect_cycles(v, config.detect);
      dataset::write_vertical(v, fs::path(output) / (name + ".vertical.csv"));
      index.push_back({{"file", name + ".vertical.csv"},
                       {"subject_id", rec.subject_id},
                       {"position", std::string(signal::to_string(rec.position))},
                       {"recording_id", rec.recording_id},
                       {"session_id", rec.session_id},
                       {"half_cycle_samples", det.delta_mean},
                       {"half_cycles", det.minima.size()}});
    } catch (const Error& e) {
      std::cerr << name << ": " << e.what() << '\n';
      status = std::max(status, exit_code_for(e.code()) == kExitSchema ? kExitSchema : kExitSignal);
    }
  }
  std::ofstream(fs::path(output) / "vertical_index.json") << index.dump(2) << '\n';
  std::cout << index.size() << " of " << corpus.records.size() << " recordings preprocessed\n";
  return status;
}

struct PairedWindow {
  std::size_t window = 0;
  gait::GaitSequence seq;
};

std::vector<PairedWindow> windows_of(const signal::VerticalSignal& v, const eval::PipelineConfig& config) {
  const auto det = gait::detect_cycles(v, config.detect);
  std::vector<PairedWindow> out;
  const std::size_t cycles = config.fingerprint_bits / config.bits_per_cycle;
  for (const auto& w : dataset::sliding_windows(det.minima, cycles, config.overlap)) {
    out.push_back({w.index, gait::split_and_normalize(v, w.boundaries, config.rho)});
  }
  return out;
}

int cmd_pair(const eval::PipelineConfig& config, const std::string& file_a, const std::string& file_b,
             std::optional<std::uint64_t> nonce_seed, std::optional<std::size_t> only_window, bool omit_timing) {
  const auto va = dataset::load_vertical(file_a);
  const auto vb = dataset::load_vertical(file_b);
  const auto wa = windows_of(va, config);
  const auto wb = windows_of(vb, config);

  auto code = std::make_shared<const ecc::BchCode>(ecc::choose_params(config.cutoff, 1.0 - config.threshold));
  protocol::SessionConfig sc;
  sc.bits_per_cycle = config.bits_per_cycle;
  sc.fingerprint_bits = config.fingerprint_bits;
  sc.code = code;

  std::unique_ptr<crypto::RandomSource> rng_a, rng_b;
  if (nonce_seed) {
    std::cerr << "bandana: WARNING: --insecure-nonce-seed makes protocol nonces and PAKE salts predictable\n";
    rng_a = std::make_unique<crypto::SeededRandom>(*nonce_seed);
    rng_b = std::make_unique<crypto::SeededRandom>(*nonce_seed ^ 0x9E3779B97F4A7C15ULL);
  } else {
    rng_a = std::make_unique<crypto::SystemRandom>();
    rng_b = std::make_unique<crypto::SystemRandom>();
  }

  nlohmann::json result;
  const auto& p = code->params();
  result["code"] = {{"n", p.n}, {"k", p.k}, {"t", p.t}};
  result["windows"] = nlohmann::json::array();
  std::size_t successes = 0, total = 0;
  for (const auto& a : wa) {
    if (only_window && a.window != *only_window) continue;
    const auto b = std::find_if(wb.begin(), wb.end(), [&](const PairedWindow& w) { return w.window == a.window; });
    if (b == wb.end()) continue;
    ++total;
    // Diagnostic only: both fingerprints are visible here, never to the protocol.
    auto cut_a = a.seq;
    auto cut_b = b->seq;
    cut_a.cycles.resize(config.fingerprint_bits / config.bits_per_cycle);
    cut_b.cycles.resize(config.fingerprint_bits / config.bits_per_cycle);
    const auto ea = fingerprint::extract(cut_a, config.bits_per_cycle);
    const auto eb = fingerprint::extract(cut_b, config.bits_per_cycle);
    const double sim = fingerprint::similarity(fingerprint::reduce(ea.fingerprint, ea.order, config.cutoff),
                                               fingerprint::reduce(eb.fingerprint, ea.order, config.cutoff));

    const auto started = std::chrono::steady_clock::now();
    const auto outcome = protocol::pair_in_memory(a.seq, b->seq, sc, sc, *rng_a, *rng_b);
    const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started);
    const bool ok = outcome.success() && outcome.initiator.secret == outcome.responder.secret;
    successes += ok;

    nlohmann::json w;
    w["window"] = a.window;
    w["similarity"] = sim;
    nlohmann::json decode;
    for (const auto* side : {&outcome.initiator, &outcome.responder}) {
      nlohmann::json d;
      d["decoded"] = side->key.has_value();
      if (side->key) d["distance_to_codeword"] = side->key->corrected_errors;
      decode.push_back(d);
    }
    w["decode"] = {{"initiator", decode[0]}, {"responder", decode[1]}};
    w["session"] = {{"success", ok},
                    {"initiator", std::string(protocol::to_string(outcome.initiator.reason))},
                    {"responder", std::string(protocol::to_string(outcome.responder.reason))}};
    if (!omit_timing) w["elapsed_ms"] = elapsed.count();
    result["windows"].push_back(w);
  }
  if (total == 0) throw Error(ErrorCode::SignalTooShort, "the recordings share no complete window");
  result["sessions"] = total;
  result["successes"] = successes;
  result["success"] = successes > 0;
  std::cout << result.dump(2) << '\n';
  return successes > 0 ? kExitOk : kExitPairing;
}

int cmd_eval(const eval::PipelineConfig& config, const Options& o, const std::string& analysis,
             const std::string& corpus_path, const std::string& out_dir, double session_seconds) {
  const auto format = o.format == "csv" ? eval::ReportFormat::Csv : eval::ReportFormat::Json;
  if (analysis == "security") {
    const auto s = eval::security_arithmetic(session_seconds, config.threshold, static_cast<int>(config.cutoff));
    std::cout << "tries_per_day=" << s.tries_per_day << " t=" << s.t << '\n';
    if (!out_dir.empty()) eval::write_report(s, out_dir, format);
    return kExitOk;
  }
  if (corpus_path.empty()) throw Error(ErrorCode::InvalidArgument, "--corpus is required for " + analysis);
  if (out_dir.empty()) throw Error(ErrorCode::InvalidArgument, "--out is required for " + analysis);
  const auto corpus = dataset::load_corpus(corpus_path);

  if (analysis == "coherence") {
    const auto r = eval::coherence_analysis(corpus, config);
    eval::write_report(r, out_dir, format);
    std::cout << "intra in-band " << r.intra_in_band << ", inter in-band " << r.inter_in_band << '\n';
    return kExitOk;
  }
  const auto records = eval::process_corpus(corpus, config);
  for (const auto& r : records) {
    if (!r.error.empty()) std::cerr << "record " << r.record << " skipped: " << r.error << '\n';
  }
  if (analysis == "reliability") {
    const auto r = eval::reliability_sweep(records, config);
    eval::write_report(r, out_dir, format);
    for (const auto& p : r) std::cout << "M=" << p.fingerprint_bits << " intra mean " << p.intra.mean << '\n';
  } else if (analysis == "discriminability") {
    const auto r = eval::discriminability(records, config);
    eval::write_report(r, out_dir, format);
    std::cout << "intra mean " << r.intra.mean << ", inter mean " << r.inter_all.mean << ", collision rate "
              << r.collision_rate << '\n';
  } else if (analysis == "positions") {
    eval::write_report(eval::position_table(records, config), out_dir, format);
  } else if (analysis == "randomness") {
    const auto keys = eval::corpus_keys(records, config);
    const auto r = eval::randomness_suite(keys);
    eval::write_report(r, out_dir, format);
    std::cout << "randomness " << (r.passed ? "passed" : "failed") << " over " << r.bits << " bits\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gait-based device pairing: preprocessing, pairing simulation and evaluation"};
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  app.add_option("--rho", o.rho, "Samples per normalized gait cycle")->capture_default_str();
  app.add_option("--bits-per-cycle", o.bits_per_cycle, "Fingerprint bits per cycle (b)")->capture_default_str();
  app.add_option("--fingerprint-bits", o.fingerprint_bits, "Fingerprint length before reduction (M)")
      ->capture_default_str();
  app.add_option("--cutoff", o.cutoff, "Reduced fingerprint length (N)")->capture_default_str();
  app.add_option("--threshold", o.threshold, "Required similarity; 1 - threshold sets the code strength")
      ->capture_default_str();
  app.add_option("--band", o.band, "Bandpass edges in Hz, lo:hi")->capture_default_str();
  app.add_option("--sample-rate", o.sample_rate, "Nominal sample rate in Hz")->capture_default_str();
  app.add_option("--seed", o.seed, "Seed for synthetic data");
  app.add_option("--jobs", o.jobs, "Worker threads for evaluation")->capture_default_str();
  app.add_option("--format", o.format, "Report format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  auto* synth = app.add_subcommand("synth", "Write a synthetic corpus");
  std::string synth_out;
  std::size_t subjects = 6, cycles = 200;
  double period = 1.0;
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--subjects", subjects, "Number of subjects")->capture_default_str();
  synth->add_option("--cycles", cycles, "Gait cycles per recording")->capture_default_str();
  synth->add_option("--period", period, "Mean gait cycle duration in seconds")->capture_default_str();

  auto* pre = app.add_subcommand("preprocess", "Extract vertical signals from recordings");
  std::string pre_in, pre_out, pre_subject = "subject", pre_position = "other";
  pre->add_option("--input", pre_in, "manifest.json or a single CSV recording")->required();
  pre->add_option("--output", pre_out, "Output directory")->required();
  pre->add_option("--subject", pre_subject, "Subject id for a single CSV");
  pre->add_option("--position", pre_position, "Body position for a single CSV");

  auto* pair = app.add_subcommand("pair", "Run the pairing protocol on two preprocessed recordings");
  std::string pair_a, pair_b;
  std::optional<std::uint64_t> nonce_seed;
  std::optional<std::size_t> only_window;
  bool omit_timing = false;
  pair->add_option("record_a", pair_a, "Vertical signal CSV of device A")->required();
  pair->add_option("record_b", pair_b, "Vertical signal CSV of device B")->required();
  pair->add_option("--insecure-nonce-seed", nonce_seed,
                   "INSECURE: derive nonces and PAKE salts from this seed instead of system entropy");
  pair->add_option("--window", only_window, "Only run the session for this window index");
  pair->add_flag("--omit-timing", omit_timing, "Leave timing out of the JSON result");

  auto* ev = app.add_subcommand("eval", "Run one evaluation analysis");
  std::string analysis, corpus_path, out_dir;
  double session_seconds = 200.0;
  ev->add_option("--analysis", analysis, "Analysis name")
      ->required()
      ->check(CLI::IsMember({"coherence", "reliability", "discriminability", "positions", "randomness", "security"}));
  ev->add_option("--corpus", corpus_path, "Corpus manifest.json");
  ev->add_option("--out", out_dir, "Report directory");
  ev->add_option("--session-seconds", session_seconds, "Pairing session duration for the security analysis")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << "bandana: " << e.what() << '\n' << "run with --help for usage\n";
    return kExitUsage;
  }

  // Configuration is validated before any file is touched.
  eval::PipelineConfig config;
  try {
    config = make_config(o);
  } catch (const Error& e) {
    std::cerr << "bandana: invalid configuration: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*synth) return cmd_synth(o, synth_out, subjects, cycles, period);
    if (*pre) return cmd_preprocess(config, o, pre_in, pre_out, pre_subject, pre_position);
    if (*pair) return cmd_pair(config, pair_a, pair_b, nonce_seed, only_window, omit_timing);
    if (*ev) return cmd_eval(config, o, analysis, corpus_path, out_dir, session_seconds);
  } catch (const Error& e) {
    return report_error(e);
  } catch (const std::exception& e) {
    std::cerr << "bandana: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}
