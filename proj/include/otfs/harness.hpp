#pragma once

#include <optional>
#include <string>

#include "otfs/channel.hpp"
#include "otfs/equalizer.hpp"
#include "otfs/estimation.hpp"
#include "otfs/zak.hpp"

namespace otfs {

enum class EqualizerKind { SsCga, Lmmse };

std::string_view to_string(EqualizerKind kind);
EqualizerKind parse_equalizer(std::string_view name);

struct SimConfig {
  GridConfig grid{32, 32, 30e3};
  Modulation modulation = Modulation::Qpsk;
  double snr_db = 25.0;
  double nu_max_hz = 100.0;
  double theta = 0.08;
  std::size_t iterations = 10;
  EqualizerKind equalizer = EqualizerKind::SsCga;
  std::size_t packets = 200;
  std::uint64_t seed = 1;
  std::size_t deadline_frames = 2;
  std::size_t workers = 1;

  /// deadline_frames * N / delta_f
  double deadline_s() const;
  double snr_linear() const;
  void validate() const;
};

/// Receiver stage wall times in seconds.
struct StageTimes {
  double pilot_dzt = 0.0;
  double chan_est = 0.0;
  double hdd_build = 0.0;
  double eq_prepare = 0.0;  // LMMSE filter formation; zero for SS-CGA
  double data_dzt = 0.0;
  double equalize = 0.0;
  double demod = 0.0;
};

struct PacketResult {
  double ber = 0.0;
  std::size_t bits_total = 0;
  std::size_t bit_errors = 0;
  std::size_t num_paths = 0;
  StageTimes stages;
  double pilot_time_s = 0.0;
  double data_time_s = 0.0;
  bool deadline_met = false;
  /// No path survived thresholding; ber is set to 0.5 by convention.
  bool failed = false;

  double total_time_s() const { return pilot_time_s + data_time_s; }
};

/// Per-iteration diagnostics for the CGA profiling mode.
struct PacketProfile {
  std::vector<double> c_norm;
  std::vector<double> ber_per_iteration;
};

/// Precomputed, read-only receiver state for one configuration, shared
/// across packets and workers.
class Pipeline {
 public:
  explicit Pipeline(SimConfig cfg);

  const SimConfig& config() const { return cfg_; }

  /// One pilot frame plus one data frame through a fresh Veh-A channel.
  PacketResult run(Rng& rng, PacketProfile* profile = nullptr) const;
  /// Same, with a caller-supplied channel realization.
  PacketResult run(Rng& rng, const PathSet& channel,
                   PacketProfile* profile = nullptr) const;

 private:
  SimConfig cfg_;
  Constellation constellation_;
  ZakKernel zak_;
  TwistKernel twist_;
  double pilot_amplitude_;
};

PacketResult run_packet(const SimConfig& cfg, Rng& rng);

/// Independent stream for packet `index`; results depend only on
/// (seed, index), never on worker scheduling.
Rng packet_rng(std::uint64_t seed, std::uint64_t index);

struct LatencyStats {
  std::size_t samples = 0;
  double median_s = 0.0;
  double p99_s = 0.0;
  double p999_s = 0.0;
  double max_s = 0.0;
  double deadline_s = 0.0;
  double deadline_met_rate = 0.0;
};

/// Nearest-rank percentiles over the given processing times.
LatencyStats latency_stats(std::vector<double> times_s, double deadline_s);

struct BatchSummary {
  std::size_t packets = 0;
  std::size_t failed_packets = 0;
  double ber_mean = 0.0;
  double ber_std = 0.0;  // sample std of per-packet BER
  std::size_t bits_total = 0;
  std::size_t bit_errors = 0;
  LatencyStats latency;
  StageTimes mean_stages;
  double mean_paths = 0.0;
  double throughput_mbps = 0.0;
};

BatchSummary summarize(const SimConfig& cfg, const std::vector<PacketResult>& results);

/// Runs cfg.packets packets on cfg.workers threads.
std::vector<PacketResult> run_packets(const SimConfig& cfg);
BatchSummary run_batch(const SimConfig& cfg);

enum class SweepAxis { Snr, NuMax, M, Theta };
SweepAxis parse_axis(std::string_view name);
std::string_view to_string(SweepAxis axis);

/// cfg with `axis` set to `value`; throws ConfigError naming the entry.
SimConfig with_axis_value(const SimConfig& cfg, SweepAxis axis, double value);

struct SweepRow {
  SimConfig config;
  BatchSummary summary;
};

std::vector<SweepRow> run_sweep(const SimConfig& cfg, SweepAxis axis,
                                const std::vector<double>& values);

/// Receiver latency over `packets` packets on a single worker.
LatencyStats benchmark_latency(const SimConfig& cfg, std::size_t packets);

/// 1/2 * B * b_mod * (1 - BER), in Mbps. The 1/2 accounts for one pilot
/// frame per data frame.
double throughput_mbps(const GridConfig& grid, Modulation mod, double mean_ber);

// CSV output. The column set is fixed; see csv_columns().
const std::vector<std::string>& csv_columns();
std::string csv_header();
std::string csv_row(const SimConfig& cfg, const BatchSummary& s);
/// Appends rows, writing the header only when the file is new or empty.
/// An existing file with a different header is a ConfigError.
void append_csv(const std::string& path, const std::vector<SweepRow>& rows);

// Oracle gate.

/// Random channel on the absolute grid with `num_paths` distinct taps.
DdFrame random_sparse_heff(const GridConfig& cfg, std::size_t num_paths, Rng& rng);

struct OracleOptions {
  GridConfig grid{16, 8, 30e3};
  std::size_t channels = 8;
  std::uint64_t seed = 7;
  /// Added to every forward coefficient before comparison (gate self-test).
  double perturb = 0.0;
};

struct OracleCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct OracleReport {
  std::vector<OracleCheck> checks;
  bool all_passed() const;
};

OracleReport oracle_check(const OracleOptions& opts);

}  // namespace otfs
