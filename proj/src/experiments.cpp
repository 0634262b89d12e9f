#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "otfs/harness.hpp"

namespace otfs {

LatencyStats latency_stats(std::vector<double> times_s, double deadline_s) {
  LatencyStats s;
  s.samples = times_s.size();
  s.deadline_s = deadline_s;
  if (times_s.empty()) return s;
  std::sort(times_s.begin(), times_s.end());
  const auto rank = [&](double pct) {
    const auto n = static_cast<double>(times_s.size());
    const auto idx = static_cast<std::size_t>(std::ceil(pct * n));
    return times_s[std::clamp<std::size_t>(idx, 1, times_s.size()) - 1];
  };
  s.median_s = rank(0.5);
  s.p99_s = rank(0.99);
  s.p999_s = rank(0.999);
  s.max_s = times_s.back();
  const auto met = std::count_if(times_s.begin(), times_s.end(),
                                 [&](double t) { return t <= deadline_s; });
  s.deadline_met_rate = static_cast<double>(met) / static_cast<double>(times_s.size());
  return s;
}

double throughput_mbps(const GridConfig& grid, Modulation mod, double mean_ber) {
  if (!(mean_ber >= 0.0 && mean_ber <= 1.0)) throw ConfigError("BER must lie in [0, 1]");
  const auto b_mod = static_cast<double>(Constellation::make(mod).bits_per_symbol);
  return 0.5 * grid.bandwidth() * b_mod * (1.0 - mean_ber) / 1e6;
}

BatchSummary summarize(const SimConfig& cfg, const std::vector<PacketResult>& results) {
  BatchSummary s;
  s.packets = results.size();
  if (results.empty()) return s;
  std::vector<double> times;
  times.reserve(results.size());
  double ber_sum = 0.0, ber_sq = 0.0, paths = 0.0;
  for (const auto& r : results) {
    ber_sum += r.ber;
    ber_sq += r.ber * r.ber;
    s.bits_total += r.bits_total;
    s.bit_errors += r.bit_errors;
    s.failed_packets += r.failed ? 1 : 0;
    paths += static_cast<double>(r.num_paths);
    times.push_back(r.total_time_s());
    s.mean_stages.pilot_dzt += r.stages.pilot_dzt;
    s.mean_stages.chan_est += r.stages.chan_est;
    s.mean_stages.hdd_build += r.stages.hdd_build;
    s.mean_stages.eq_prepare += r.stages.eq_prepare;
    s.mean_stages.data_dzt += r.stages.data_dzt;
    s.mean_stages.equalize += r.stages.equalize;
    s.mean_stages.demod += r.stages.demod;
  }
  const auto n = static_cast<double>(results.size());
  s.ber_mean = ber_sum / n;
  s.ber_std = n > 1 ? std::sqrt(std::max(0.0, (ber_sq - n * s.ber_mean * s.ber_mean) / (n - 1)))
                    : 0.0;
  s.mean_paths = paths / n;
  for (double* f : {&s.mean_stages.pilot_dzt, &s.mean_stages.chan_est, &s.mean_stages.hdd_build,
                    &s.mean_stages.eq_prepare, &s.mean_stages.data_dzt, &s.mean_stages.equalize,
                    &s.mean_stages.demod}) {
    *f /= n;
  }
  s.latency = latency_stats(std::move(times), cfg.deadline_s());
  s.throughput_mbps = throughput_mbps(cfg.grid, cfg.modulation, s.ber_mean);
  return s;
}

std::vector<PacketResult> run_packets(const SimConfig& cfg) {
  const Pipeline pipeline(cfg);
  std::vector<PacketResult> results(cfg.packets);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < results.size(); i = next++) {
      Rng rng = packet_rng(cfg.seed, i);
      results[i] = pipeline.run(rng);
    }
  };
  const std::size_t nthreads = std::min(cfg.workers, cfg.packets);
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }
  return results;
}

BatchSummary run_batch(const SimConfig& cfg) { return summarize(cfg, run_packets(cfg)); }

SweepAxis parse_axis(std::string_view name) {
  if (name == "snr") return SweepAxis::Snr;
  if (name == "nu-max") return SweepAxis::NuMax;
  if (name == "m") return SweepAxis::M;
  if (name == "theta") return SweepAxis::Theta;
  throw ConfigError("unknown sweep axis '" + std::string(name) + "'");
}

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Snr: return "snr";
    case SweepAxis::NuMax: return "nu-max";
    case SweepAxis::M: return "m";
    case SweepAxis::Theta: return "theta";
  }
  return "?";
}

SimConfig with_axis_value(const SimConfig& cfg, SweepAxis axis, double value) {
  SimConfig out = cfg;
  const auto bad = [&](const std::string& why) {
    std::ostringstream os;
    os << "invalid " << to_string(axis) << " value " << value << ": " << why;
    return ConfigError(os.str());
  };
  switch (axis) {
    case SweepAxis::Snr:
      if (std::isnan(value)) throw bad("not a number");
      out.snr_db = value;
      break;
    case SweepAxis::NuMax:
      if (!(value >= 0.0) || !std::isfinite(value)) throw bad("must be finite and >= 0");
      out.nu_max_hz = value;
      break;
    case SweepAxis::Theta:
      if (!(value >= 0.0) || !std::isfinite(value)) throw bad("must be finite and >= 0");
      out.theta = value;
      break;
    case SweepAxis::M: {
      if (!(value >= 2.0) || value != std::floor(value) || std::fmod(value, 2.0) != 0.0) {
        throw bad("M must be an even integer >= 2");
      }
      out.grid = GridConfig(static_cast<std::size_t>(value), cfg.grid.n(), cfg.grid.delta_f());
      break;
    }
  }
  try {
    out.validate();
  } catch (const ConfigError& e) {
    throw bad(e.what());
  }
  return out;
}

std::vector<SweepRow> run_sweep(const SimConfig& cfg, SweepAxis axis,
                                const std::vector<double>& values) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  std::vector<SimConfig> configs;
  for (double v : values) configs.push_back(with_axis_value(cfg, axis, v));
  std::vector<SweepRow> rows;
  for (const auto& c : configs) rows.push_back({c, run_batch(c)});
  return rows;
}

LatencyStats benchmark_latency(const SimConfig& cfg, std::size_t packets) {
  if (packets == 0) throw ConfigError("benchmark needs at least one packet");
  if (packets < 10000) {
    std::clog << "warning: " << packets
              << " packets is below the 10^4 needed for a stable p99.9\n";
  }
  SimConfig c = cfg;
  c.packets = packets;
  c.workers = 1;
  return summarize(c, run_packets(c)).latency;
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{
      "m", "n", "delta_f_hz", "mod", "snr_db", "nu_max_hz", "theta", "iters", "equalizer",
      "seed", "packets", "ber_mean", "bits_total", "bit_errors", "lat_median_us",
      "lat_p99_us", "lat_p999_us", "deadline_us", "deadline_met_rate", "throughput_mbps"};
  return cols;
}

std::string csv_header() {
  std::string h;
  for (const auto& c : csv_columns()) {
    if (!h.empty()) h += ',';
    h += c;
  }
  return h;
}

std::string csv_row(const SimConfig& cfg, const BatchSummary& s) {
  std::ostringstream os;
  os.precision(10);
  os << cfg.grid.m() << ',' << cfg.grid.n() << ',' << cfg.grid.delta_f() << ','
     << to_string(cfg.modulation) << ',' << cfg.snr_db << ',' << cfg.nu_max_hz << ','
     << cfg.theta << ',' << cfg.iterations << ',' << to_string(cfg.equalizer) << ','
     << cfg.seed << ',' << s.packets << ',' << s.ber_mean << ',' << s.bits_total << ','
     << s.bit_errors << ',' << s.latency.median_s * 1e6 << ',' << s.latency.p99_s * 1e6
     << ',' << s.latency.p999_s * 1e6 << ',' << cfg.deadline_s() * 1e6 << ','
     << s.latency.deadline_met_rate << ',' << s.throughput_mbps;
  return os.str();
}

void append_csv(const std::string& path, const std::vector<SweepRow>& rows) {
  namespace fs = std::filesystem;
  bool need_header = true;
  if (fs::exists(path) && fs::file_size(path) > 0) {
    std::ifstream in(path);
    std::string first;
    std::getline(in, first);
    if (first != csv_header()) {
      throw ConfigError("existing CSV '" + path + "' has a different column set");
    }
    need_header = false;
  }
  std::ofstream out(path, std::ios::app);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  if (need_header) out << csv_header() << '\n';
  for (const auto& r : rows) out << csv_row(r.config, r.summary) << '\n';
}

}  // namespace otfs
