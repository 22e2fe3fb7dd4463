#include "specwatch/sigsim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "specwatch/errors.hpp"
#include "specwatch/hash.hpp"
#include "specwatch/rng.hpp"

namespace specwatch::sigsim {

static_assert(std::endian::native == std::endian::little,
              "IQ file writer assumes a little-endian host");

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// Mean |s|^2 over nonzero samples; returns 0 when nothing is active.
double active_power(const std::vector<cplx>& s) {
  double acc = 0.0;
  int64_t n_active = 0;
  for (const cplx& v : s) {
    const double p = std::norm(v);
    if (p > 0.0) {
      acc += p;
      ++n_active;
    }
  }
  return n_active > 0 ? acc / static_cast<double>(n_active) : 0.0;
}

void add_complex_gaussian(std::vector<cplx>& s, double variance, uint64_t seed) {
  Rng rng(seed);
  const double sigma = std::sqrt(variance);
  for (cplx& v : s) v += sigma * rng.complex_gaussian();
}

// Repeating linear FM, unit amplitude. tau is seconds since anomaly start.
cplx chirp_sample(double tau, double f0, double f1, double period_s) {
  const double t = std::fmod(tau, period_s);
  const double phase = kTwoPi * (f0 * t + 0.5 * (f1 - f0) * t * t / period_s);
  return {std::cos(phase), std::sin(phase)};
}

}  // namespace

int NetworkConfig::slot_samples() const {
  return static_cast<int>(std::llround(slot_duration_s * sample_rate_hz));
}

void NetworkConfig::validate() const {
  require(sample_rate_hz > 0 && symbol_rate_sps > 0 && samples_per_symbol > 0,
          "NetworkConfig: rates must be positive");
  require(std::abs(symbol_rate_sps * samples_per_symbol - sample_rate_hz) <
              1e-6 * sample_rate_hz,
          "NetworkConfig: sample_rate_hz must equal symbol_rate_sps * samples_per_symbol");
  const double slots = slot_duration_s * sample_rate_hz;
  require(slots > 0 && std::abs(slots - std::round(slots)) < 1e-6,
          "NetworkConfig: slot_duration_s must span an integer number of samples");
  require(num_source_nodes >= 1, "NetworkConfig: num_source_nodes must be >= 1");
  require(node_tx_gains.size() == static_cast<size_t>(num_source_nodes),
          "NetworkConfig: node_tx_gains size must match num_source_nodes");
}

const char* to_string(AnomalyKind k) {
  switch (k) {
    case AnomalyKind::none: return "none";
    case AnomalyKind::chirp: return "chirp";
    case AnomalyKind::two_chirp: return "two_chirp";
    case AnomalyKind::hijack: return "hijack";
    case AnomalyKind::node_failure: return "node_failure";
    case AnomalyKind::barrage: return "barrage";
    case AnomalyKind::sweep: return "sweep";
    case AnomalyKind::tone: return "tone";
  }
  return "unknown";
}

AnomalyKind anomaly_kind_from_string(const std::string& s) {
  for (AnomalyKind k : {AnomalyKind::none, AnomalyKind::chirp, AnomalyKind::two_chirp,
                        AnomalyKind::hijack, AnomalyKind::node_failure, AnomalyKind::barrage,
                        AnomalyKind::sweep, AnomalyKind::tone}) {
    if (s == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown anomaly kind: " + s);
}

void AnomalySpec::validate(const NetworkConfig& cfg, double recording_duration_s) const {
  if (kind == AnomalyKind::none) return;
  require(start_s >= 0.0 && duration_s > 0.0, "AnomalySpec: bad interval");
  require(start_s + duration_s <= recording_duration_s + 1e-9,
          "AnomalySpec: anomaly interval exceeds recording length");
  const double half_band = cfg.sample_rate_hz / 2.0;
  auto in_band = [&](double f) { return std::abs(f) <= half_band; };
  switch (kind) {
    case AnomalyKind::chirp:
    case AnomalyKind::two_chirp:
    case AnomalyKind::sweep:
      require(in_band(f_start_hz) && in_band(f_end_hz),
              "AnomalySpec: chirp/sweep frequencies outside +-fs/2");
      break;
    case AnomalyKind::tone:
      require(in_band(f_hz), "AnomalySpec: tone frequency outside +-fs/2");
      break;
    case AnomalyKind::hijack:
    case AnomalyKind::node_failure:
      require(victim_index >= 0 && victim_index < cfg.num_source_nodes,
              "AnomalySpec: victim index out of range");
      break;
    default:
      break;
  }
}

int64_t LabelTrack::num_samples() const {
  return runs.empty() ? 0 : runs.back().end_sample;
}

AnomalyKind LabelTrack::kind_at(int64_t sample) const {
  for (const LabelRun& r : runs) {
    if (sample >= r.start_sample && sample < r.end_sample) return r.kind;
  }
  return AnomalyKind::none;
}

AnomalyKind LabelTrack::kind_in(int64_t begin, int64_t end) const {
  for (const LabelRun& r : runs) {
    if (r.kind == AnomalyKind::none) continue;
    if (r.start_sample < end && begin < r.end_sample) return r.kind;
  }
  return AnomalyKind::none;
}

void LabelTrack::validate() const {
  require(!runs.empty(), "LabelTrack: empty");
  require(runs.front().start_sample == 0, "LabelTrack: runs must start at 0");
  for (size_t i = 0; i < runs.size(); ++i) {
    require(runs[i].end_sample > runs[i].start_sample, "LabelTrack: empty run");
    if (i > 0) {
      require(runs[i].start_sample == runs[i - 1].end_sample,
              "LabelTrack: runs must tile without gaps or overlap");
    }
  }
}

void IQRecording::validate() const {
  require(sample_rate_hz > 0, "IQRecording: bad sample rate");
  labels.validate();
  require(labels.num_samples() == static_cast<int64_t>(samples.size()),
          "IQRecording: labels must cover exactly the sample count");
  for (const cplx& v : samples) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw NumericalError("IQRecording: non-finite sample");
    }
  }
}

std::vector<cplx> bpsk_modulate(const std::vector<int>& bits, int samples_per_symbol) {
  require(!bits.empty(), "bpsk_modulate: empty bit sequence");
  require(samples_per_symbol > 0, "bpsk_modulate: samples_per_symbol must be positive");
  std::vector<cplx> out;
  out.reserve(bits.size() * samples_per_symbol);
  for (int b : bits) {
    require(b == 0 || b == 1, "bpsk_modulate: bits must be 0/1");
    const double amp = 1.0 - 2.0 * b;
    for (int i = 0; i < samples_per_symbol; ++i) out.emplace_back(amp, 0.0);
  }
  return out;
}

std::vector<cplx> apply_tdma(const std::vector<std::vector<cplx>>& per_node_signals,
                             const NetworkConfig& cfg) {
  cfg.validate();
  require(per_node_signals.size() == static_cast<size_t>(cfg.num_source_nodes),
          "apply_tdma: need one signal per node");
  const size_t n = per_node_signals[0].size();
  for (const auto& s : per_node_signals) {
    require(s.size() == n, "apply_tdma: node signals must have equal length");
  }
  const int slot = cfg.slot_samples();
  require(n % static_cast<size_t>(slot) == 0, "apply_tdma: slot length must divide signal length");
  std::vector<cplx> out(n);
  for (size_t t = 0; t < n; ++t) {
    const int owner = static_cast<int>((t / slot) % cfg.num_source_nodes);
    out[t] = per_node_signals[owner][t];
  }
  return out;
}

std::vector<cplx> awgn(const std::vector<cplx>& signal, double snr_db, uint64_t seed) {
  std::vector<cplx> out = signal;
  if (std::isinf(snr_db) && snr_db > 0) return out;
  const double p = active_power(signal);
  require(p > 0.0, "awgn: SNR undefined for an all-zero signal");
  add_complex_gaussian(out, p / db_to_linear(snr_db), seed);
  return out;
}

IQRecording generate_scenario(const NetworkConfig& cfg, const AnomalySpec& anomaly,
                              double duration_s, uint64_t seed) {
  cfg.validate();
  require(duration_s > 0, "generate_scenario: duration must be positive");
  anomaly.validate(cfg, duration_s);

  const int64_t n = std::llround(duration_s * cfg.sample_rate_hz);
  const int slot = cfg.slot_samples();
  const int64_t padded = (n + slot - 1) / slot * slot;

  // Normal traffic: every node runs a continuous BPSK stream; TDMA mutes
  // non-owners.
  std::vector<std::vector<cplx>> node_signals(cfg.num_source_nodes);
  for (int node = 0; node < cfg.num_source_nodes; ++node) {
    Rng bits_rng(derive_seed(seed, "node_bits_" + std::to_string(node)));
    const int64_t num_symbols =
        (padded + cfg.samples_per_symbol - 1) / cfg.samples_per_symbol;
    std::vector<int> bits(num_symbols);
    for (auto& b : bits) b = static_cast<int>(bits_rng.uniform_index(2));
    auto s = bpsk_modulate(bits, cfg.samples_per_symbol);
    s.resize(padded);
    const double g = cfg.node_tx_gains[node];
    for (auto& v : s) v *= g;
    node_signals[node] = std::move(s);
  }
  std::vector<cplx> clean = apply_tdma(node_signals, cfg);
  clean.resize(n);

  // Noise-floor normalization: unit noise variance, signal scaled to hit the
  // configured SNR over its active region.
  const bool noiseless = std::isinf(cfg.snr_db) && cfg.snr_db > 0;
  double p_act = active_power(clean);
  if (!noiseless) {
    require(p_act > 0.0, "generate_scenario: normal traffic has zero power");
    const double scale = std::sqrt(db_to_linear(cfg.snr_db) / p_act);
    for (auto& v : clean) v *= scale;
    p_act = db_to_linear(cfg.snr_db);
  }
  const double p_ref = p_act > 0.0 ? p_act : 1.0;

  const int64_t a0 = std::llround(anomaly.start_s * cfg.sample_rate_hz);
  const int64_t a1 =
      std::min<int64_t>(n, std::llround((anomaly.start_s + anomaly.duration_s) * cfg.sample_rate_hz));
  const double p_anom = p_ref * db_to_linear(anomaly.power_db_rel_signal);
  const double fs = cfg.sample_rate_hz;
  auto owner_of = [&](int64_t t) {
    return static_cast<int>((t / slot) % cfg.num_source_nodes);
  };

  std::vector<cplx> mixed = clean;
  switch (anomaly.kind) {
    case AnomalyKind::none:
      break;
    case AnomalyKind::node_failure:
      for (int64_t t = a0; t < a1; ++t) {
        if (owner_of(t) == anomaly.victim_index) mixed[t] = 0.0;
      }
      break;
    case AnomalyKind::hijack: {
      // Extra BPSK emitter keyed to the victim's slots, power relative to
      // the victim's own slot power.
      Rng bits_rng(derive_seed(seed, "hijack_bits"));
      double victim_power = 0.0;
      int64_t count = 0;
      for (int64_t t = 0; t < n; ++t) {
        if (owner_of(t) == anomaly.victim_index && std::norm(clean[t]) > 0) {
          victim_power += std::norm(clean[t]);
          ++count;
        }
      }
      const double amp = count > 0
                             ? std::sqrt(victim_power / count *
                                         db_to_linear(anomaly.power_db_rel_signal))
                             : std::sqrt(p_anom);
      const int64_t span = a1 - a0;
      if (span > 0) {
        const int64_t num_symbols =
            (span + cfg.samples_per_symbol - 1) / cfg.samples_per_symbol;
        std::vector<int> bits(num_symbols);
        for (auto& b : bits) b = static_cast<int>(bits_rng.uniform_index(2));
        auto s = bpsk_modulate(bits, cfg.samples_per_symbol);
        for (int64_t t = a0; t < a1; ++t) {
          if (owner_of(t) == anomaly.victim_index) mixed[t] += amp * s[t - a0];
        }
      }
      break;
    }
    case AnomalyKind::barrage: {
      Rng jam_rng(derive_seed(seed, "barrage"));
      const double amp = std::sqrt(p_anom);
      for (int64_t t = a0; t < a1; ++t) mixed[t] += amp * jam_rng.complex_gaussian();
      break;
    }
    case AnomalyKind::tone: {
      const double amp = std::sqrt(p_anom);
      for (int64_t t = a0; t < a1; ++t) {
        const double ph = kTwoPi * anomaly.f_hz * static_cast<double>(t - a0) / fs;
        mixed[t] += amp * cplx(std::cos(ph), std::sin(ph));
      }
      break;
    }
    case AnomalyKind::chirp:
    case AnomalyKind::sweep: {
      const double amp = std::sqrt(p_anom);
      const double period =
          anomaly.sweep_period_s > 0 ? anomaly.sweep_period_s : anomaly.duration_s;
      for (int64_t t = a0; t < a1; ++t) {
        const double tau = static_cast<double>(t - a0) / fs;
        mixed[t] += amp * chirp_sample(tau, anomaly.f_start_hz, anomaly.f_end_hz, period);
      }
      break;
    }
    case AnomalyKind::two_chirp: {
      // Two simultaneous chirping emitters sweeping in opposite directions.
      const double amp = std::sqrt(p_anom);
      const double period =
          anomaly.sweep_period_s > 0 ? anomaly.sweep_period_s : anomaly.duration_s;
      for (int64_t t = a0; t < a1; ++t) {
        const double tau = static_cast<double>(t - a0) / fs;
        mixed[t] += amp * chirp_sample(tau, anomaly.f_start_hz, anomaly.f_end_hz, period);
        mixed[t] += amp * chirp_sample(tau, anomaly.f_end_hz, anomaly.f_start_hz, period);
      }
      break;
    }
  }

  if (!noiseless) {
    // Unit-variance noise floor by construction (see scaling above).
    add_complex_gaussian(mixed, 1.0, derive_seed(seed, "awgn"));
  }

  IQRecording rec;
  rec.samples = std::move(mixed);
  rec.sample_rate_hz = fs;
  if (anomaly.kind == AnomalyKind::none || a1 <= a0) {
    rec.labels.runs = {{0, n, AnomalyKind::none}};
  } else {
    if (a0 > 0) rec.labels.runs.push_back({0, a0, AnomalyKind::none});
    rec.labels.runs.push_back({a0, a1, anomaly.kind});
    if (a1 < n) rec.labels.runs.push_back({a1, n, AnomalyKind::none});
  }
  rec.validate();
  return rec;
}

void save_iq(const IQRecording& rec, const std::string& iq_path) {
  std::ofstream f(iq_path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + iq_path);
  std::vector<float> buf(rec.samples.size() * 2);
  for (size_t i = 0; i < rec.samples.size(); ++i) {
    buf[2 * i] = static_cast<float>(rec.samples[i].real());
    buf[2 * i + 1] = static_cast<float>(rec.samples[i].imag());
  }
  f.write(reinterpret_cast<const char*>(buf.data()),
          static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!f) throw IoError("short write: " + iq_path);
}

std::vector<cplx> load_iq(const std::string& iq_path) {
  std::ifstream f(iq_path, std::ios::binary | std::ios::ate);
  if (!f) throw MissingInputError("cannot open IQ file: " + iq_path);
  const auto bytes = static_cast<size_t>(f.tellg());
  if (bytes % (2 * sizeof(float)) != 0) throw IoError("truncated IQ file: " + iq_path);
  f.seekg(0);
  std::vector<float> buf(bytes / sizeof(float));
  f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(bytes));
  if (!f) throw IoError("short read: " + iq_path);
  std::vector<cplx> out(buf.size() / 2);
  for (size_t i = 0; i < out.size(); ++i) out[i] = {buf[2 * i], buf[2 * i + 1]};
  return out;
}

void save_labels_csv(const LabelTrack& labels, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path);
  f << "start_sample,end_sample,kind\n";
  for (const LabelRun& r : labels.runs) {
    f << r.start_sample << ',' << r.end_sample << ',' << to_string(r.kind) << '\n';
  }
}

LabelTrack load_labels_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw MissingInputError("cannot open label file: " + path);
  LabelTrack track;
  std::string line;
  bool first = true;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("start_sample", 0) == 0) continue;
    }
    std::istringstream ss(line);
    std::string a, b, k;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, k)) {
      throw IoError("malformed label row: " + line);
    }
    track.runs.push_back({std::stoll(a), std::stoll(b), anomaly_kind_from_string(k)});
  }
  std::sort(track.runs.begin(), track.runs.end(),
            [](const LabelRun& x, const LabelRun& y) { return x.start_sample < y.start_sample; });
  track.validate();
  return track;
}

void save_meta(const IQRecording& rec, uint64_t seed, uint64_t config_hash,
               const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path);
  f << "sample_rate_hz = " << rec.sample_rate_hz << "\n"
    << "num_samples = " << rec.samples.size() << "\n"
    << "seed = " << seed << "\n"
    << "config_hash = " << hash_hex(config_hash) << "\n";
}

IQRecording load_recording(const std::string& iq_path, const std::string& labels_path,
                           double sample_rate_hz) {
  IQRecording rec;
  rec.samples = load_iq(iq_path);
  rec.sample_rate_hz = sample_rate_hz;
  rec.labels = load_labels_csv(labels_path);
  rec.validate();
  return rec;
}

}  // namespace specwatch::sigsim
