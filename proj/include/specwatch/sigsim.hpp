#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace specwatch::sigsim {

using cplx = std::complex<double>;

// Sentinel for "no noise added" (SNR = +inf).
constexpr double kNoNoiseSnrDb = std::numeric_limits<double>::infinity();

struct NetworkConfig {
  double sample_rate_hz = 500e3;
  double symbol_rate_sps = 62.5e3;
  int samples_per_symbol = 8;
  double slot_duration_s = 0.010;
  int num_source_nodes = 2;
  std::vector<double> node_tx_gains = {1.0, 0.8};
  double snr_db = 15.0;

  int slot_samples() const;
  void validate() const;
};

enum class AnomalyKind {
  none,
  chirp,
  two_chirp,
  hijack,
  node_failure,
  barrage,
  sweep,
  tone,
};

const char* to_string(AnomalyKind k);
AnomalyKind anomaly_kind_from_string(const std::string& s);

struct AnomalySpec {
  AnomalyKind kind = AnomalyKind::none;
  double start_s = 0.0;
  double duration_s = 0.0;
  double power_db_rel_signal = 0.0;
  // chirp / two_chirp / sweep
  double f_start_hz = 0.0;
  double f_end_hz = 0.0;
  double sweep_period_s = 0.0;
  // tone
  double f_hz = 0.0;
  // hijack: slot owner being impersonated; node_failure: failing node
  int victim_index = 0;

  void validate(const NetworkConfig& cfg, double recording_duration_s) const;
};

struct LabelRun {
  int64_t start_sample = 0;  // inclusive
  int64_t end_sample = 0;    // exclusive
  AnomalyKind kind = AnomalyKind::none;  // none == normal
};

// Disjoint, sorted runs tiling [0, num_samples).
struct LabelTrack {
  std::vector<LabelRun> runs;

  int64_t num_samples() const;
  AnomalyKind kind_at(int64_t sample) const;
  // Most severe (non-normal) kind intersecting [begin, end), or none.
  AnomalyKind kind_in(int64_t begin, int64_t end) const;
  void validate() const;
};

struct IQRecording {
  std::vector<cplx> samples;
  double sample_rate_hz = 0.0;
  LabelTrack labels;

  void validate() const;
};

// BPSK with rectangular pulses: bit b -> amplitude (1 - 2b) held for
// samples_per_symbol samples, zero imaginary part.
std::vector<cplx> bpsk_modulate(const std::vector<int>& bits, int samples_per_symbol);

// Round-robin TDMA: slot t belongs to node (t mod N); non-owners are muted.
std::vector<cplx> apply_tdma(const std::vector<std::vector<cplx>>& per_node_signals,
                             const NetworkConfig& cfg);

// Adds circularly-symmetric complex Gaussian noise with variance chosen so
// that (active-region signal power) / (noise power) = 10^(snr_db/10).
// snr_db = kNoNoiseSnrDb returns the input unchanged.
std::vector<cplx> awgn(const std::vector<cplx>& signal, double snr_db, uint64_t seed);

// Full scenario synthesis: normal TDMA/BPSK traffic of all nodes, scaled so
// the active-region signal power hits snr_db against a unit noise floor,
// plus the anomaly over [start, start+duration), plus AWGN. Labels mark the
// anomaly interval.
IQRecording generate_scenario(const NetworkConfig& cfg, const AnomalySpec& anomaly,
                              double duration_s, uint64_t seed);

// --- persistence (interleaved float32 LE I/Q, sidecar meta, label CSV) ---

void save_iq(const IQRecording& rec, const std::string& iq_path);
std::vector<cplx> load_iq(const std::string& iq_path);

void save_labels_csv(const LabelTrack& labels, const std::string& path);
LabelTrack load_labels_csv(const std::string& path);

void save_meta(const IQRecording& rec, uint64_t seed, uint64_t config_hash,
               const std::string& path);

IQRecording load_recording(const std::string& iq_path, const std::string& labels_path,
                           double sample_rate_hz);

}  // namespace specwatch::sigsim
