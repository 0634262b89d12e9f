// otfs_cli: packet simulation, parameter sweeps, latency benchmarking and the
// dense-oracle gate for the structured-sparse receiver.
//
//   otfs_cli simulate --m 32 --n 32 --snr-db 25 --packets 200
//   otfs_cli sweep --axis snr --values 0 10 20 30 --out ber.csv
//   otfs_cli bench --m 1024 --packets 10000
//   otfs_cli oracle-check --m 16 --n 8

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "otfs/harness.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitOracle = 3;

struct CommonArgs {
  std::size_t m = 32;
  std::size_t n = 32;
  double delta_f = 30e3;
  std::string mod = "qpsk";
  double snr_db = 25.0;
  double nu_max = 100.0;
  double theta = 0.08;
  std::size_t iters = 10;
  std::string equalizer = "ss-cga";
  std::size_t packets = 200;
  std::uint64_t seed = 1;
  std::string out;
  std::size_t workers = 1;
  std::size_t deadline_frames = 2;

  otfs::SimConfig to_config() const {
    otfs::SimConfig c;
    c.grid = otfs::GridConfig(m, n, delta_f);
    c.modulation = otfs::parse_modulation(mod);
    c.snr_db = snr_db;
    c.nu_max_hz = nu_max;
    c.theta = theta;
    c.iterations = iters;
    c.equalizer = otfs::parse_equalizer(equalizer);
    c.packets = packets;
    c.seed = seed;
    c.workers = workers;
    c.deadline_frames = deadline_frames;
    c.validate();
    return c;
  }
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--m", a.m, "Delay bins M");
  cmd->add_option("--n", a.n, "Doppler bins N");
  cmd->add_option("--delta-f", a.delta_f, "Subcarrier spacing in Hz");
  cmd->add_option("--mod", a.mod, "Modulation")->check(CLI::IsMember({"qpsk", "qam16"}));
  cmd->add_option("--snr-db", a.snr_db, "SNR in dB (inf for noiseless)");
  cmd->add_option("--nu-max", a.nu_max, "Maximum Doppler in Hz");
  cmd->add_option("--theta", a.theta, "Relative path-detection threshold");
  cmd->add_option("--iters", a.iters, "CGA iterations");
  cmd->add_option("--equalizer", a.equalizer, "Equalizer")
      ->check(CLI::IsMember({"ss-cga", "lmmse"}));
  cmd->add_option("--packets", a.packets, "Packets per configuration");
  cmd->add_option("--seed", a.seed, "Base RNG seed");
  cmd->add_option("--out", a.out, "Append result rows to this CSV");
  cmd->add_option("--workers", a.workers, "Worker threads");
  cmd->add_option("--deadline-frames", a.deadline_frames, "Deadline in frame durations");
}

void print_summary(const otfs::SimConfig& c, const otfs::BatchSummary& s) {
  const auto& l = s.latency;
  std::cout << std::setprecision(6)
            << "grid (M,N)=(" << c.grid.m() << "," << c.grid.n() << ")  B="
            << c.grid.bandwidth() / 1e6 << " MHz  T=" << c.grid.frame_duration() * 1e3
            << " ms\n"
            << "mod=" << otfs::to_string(c.modulation) << "  snr=" << c.snr_db
            << " dB  nu_max=" << c.nu_max_hz << " Hz  theta=" << c.theta
            << "  iters=" << c.iterations << "  equalizer=" << otfs::to_string(c.equalizer)
            << "\n"
            << "packets=" << s.packets << " (failed " << s.failed_packets
            << ")  mean paths=" << s.mean_paths << "\n"
            << "BER mean=" << s.ber_mean << " std=" << s.ber_std << "  bits=" << s.bits_total
            << " errors=" << s.bit_errors << "\n"
            << "latency us: median=" << l.median_s * 1e6 << " p99=" << l.p99_s * 1e6
            << " p99.9=" << l.p999_s * 1e6 << " max=" << l.max_s * 1e6
            << "  deadline=" << l.deadline_s * 1e6 << " met=" << l.deadline_met_rate * 100
            << "%\n"
            << "stage means us: pilot_dzt=" << s.mean_stages.pilot_dzt * 1e6
            << " chan_est=" << s.mean_stages.chan_est * 1e6
            << " hdd_build=" << s.mean_stages.hdd_build * 1e6
            << " eq_prepare=" << s.mean_stages.eq_prepare * 1e6
            << " data_dzt=" << s.mean_stages.data_dzt * 1e6
            << " equalize=" << s.mean_stages.equalize * 1e6
            << " demod=" << s.mean_stages.demod * 1e6 << "\n"
            << "throughput=" << s.throughput_mbps << " Mbps\n";
}

void write_profile(const otfs::SimConfig& cfg, const std::string& path) {
  const otfs::Pipeline pipeline(cfg);
  std::ofstream os(path);
  if (!os) throw otfs::ConfigError("cannot open '" + path + "'");
  os << "packet,iter,c_norm,ber\n";
  os.precision(10);
  std::vector<double> mean_ber(cfg.iterations, 0.0);
  std::vector<std::size_t> counts(cfg.iterations, 0);
  for (std::size_t i = 0; i < cfg.packets; ++i) {
    otfs::Rng rng = otfs::packet_rng(cfg.seed, i);
    otfs::PacketProfile prof;
    pipeline.run(rng, &prof);
    for (std::size_t it = 0; it < prof.c_norm.size(); ++it) {
      os << i << ',' << it + 1 << ',' << prof.c_norm[it] << ',' << prof.ber_per_iteration[it]
         << '\n';
      mean_ber[it] += prof.ber_per_iteration[it];
      ++counts[it];
    }
  }
  std::vector<double> trace;
  for (std::size_t it = 0; it < mean_ber.size() && counts[it] > 0; ++it) {
    trace.push_back(mean_ber[it] / static_cast<double>(counts[it]));
  }
  if (trace.size() >= 2) {
    std::cout << "BER-converged iteration: " << otfs::ber_convergence_iteration(trace)
              << " of " << trace.size() << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zak-OTFS link-level simulator and receiver benchmark"};
  app.require_subcommand(1);

  CommonArgs sim_args, sweep_args, bench_args;
  bench_args.packets = 1000;

  auto* sim = app.add_subcommand("simulate", "Run one configuration and print a summary");
  add_common(sim, sim_args);
  std::string profile_out, channel_out;
  sim->add_option("--profile", profile_out,
                  "Write per-iteration (packet, iter, c_norm, ber) rows for SS-CGA");
  sim->add_option("--channel-out", channel_out, "Write packet 0's channel realization");

  auto* sweep = app.add_subcommand("sweep", "Sweep one parameter, one CSV row per value");
  add_common(sweep, sweep_args);
  std::string axis;
  std::vector<double> values;
  sweep->add_option("--axis", axis, "snr | nu-max | m | theta")->required();
  sweep->add_option("--values", values, "Values along the axis")->required();

  auto* bench = app.add_subcommand("bench", "Receiver latency percentiles on one worker");
  add_common(bench, bench_args);

  auto* oracle = app.add_subcommand("oracle-check", "Sparse-vs-dense equivalence gate");
  std::size_t om = 16, on = 8, channels = 8;
  std::uint64_t oseed = 7;
  double perturb = 0.0;
  std::string dump_tables;
  oracle->add_option("--m", om, "Delay bins M");
  oracle->add_option("--n", on, "Doppler bins N");
  oracle->add_option("--channels", channels, "Random channels to check");
  oracle->add_option("--seed", oseed, "RNG seed");
  oracle->add_option("--perturb", perturb, "Add this to every sparse coefficient (self-test)");
  oracle->add_option("--dump-tables", dump_tables, "Write sparse tables of one channel");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*sim) {
      const otfs::SimConfig cfg = sim_args.to_config();
      if (!channel_out.empty()) {
        otfs::Rng rng = otfs::packet_rng(cfg.seed, 0);
        std::ofstream os(channel_out);
        otfs::write_paths(os, otfs::draw_veha(cfg.nu_max_hz, cfg.grid, rng));
      }
      const otfs::BatchSummary s = otfs::run_batch(cfg);
      print_summary(cfg, s);
      if (!sim_args.out.empty()) otfs::append_csv(sim_args.out, {{cfg, s}});
      if (!profile_out.empty()) write_profile(cfg, profile_out);
    } else if (*sweep) {
      const otfs::SimConfig cfg = sweep_args.to_config();
      const auto rows = otfs::run_sweep(cfg, otfs::parse_axis(axis), values);
      std::cout << otfs::csv_header() << '\n';
      for (const auto& r : rows) std::cout << otfs::csv_row(r.config, r.summary) << '\n';
      if (!sweep_args.out.empty()) otfs::append_csv(sweep_args.out, rows);
    } else if (*bench) {
      otfs::SimConfig cfg = bench_args.to_config();
      cfg.workers = 1;
      if (cfg.packets < 10000) {
        std::clog << "warning: " << cfg.packets
                  << " packets is below the 10^4 needed for a stable p99.9\n";
      }
      const otfs::BatchSummary s = otfs::run_batch(cfg);
      print_summary(cfg, s);
      if (!bench_args.out.empty()) otfs::append_csv(bench_args.out, {{cfg, s}});
    } else if (*oracle) {
      otfs::OracleOptions opts{otfs::GridConfig(om, on), channels, oseed, perturb};
      const otfs::OracleReport report = otfs::oracle_check(opts);
      for (const auto& c : report.checks) {
        std::cout << (c.passed ? "[PASS] " : "[FAIL] ") << c.name;
        if (!c.detail.empty()) std::cout << "  (" << c.detail << ")";
        std::cout << '\n';
      }
      if (!dump_tables.empty()) {
        otfs::Rng rng(oseed);
        const otfs::DdFrame heff = otfs::random_sparse_heff(opts.grid, 4, rng);
        std::ofstream os(dump_tables);
        otfs::write_tables(os, otfs::build_ss_channel(otfs::detect_paths(heff, 0.0), opts.grid));
      }
      return report.all_passed() ? 0 : kExitOracle;
    }
  } catch (const otfs::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const otfs::DimensionError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const otfs::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
