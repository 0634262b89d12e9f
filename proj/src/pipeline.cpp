#include <chrono>
#include <cmath>

#include "otfs/harness.hpp"

namespace otfs {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point& mark) {
  const auto now = Clock::now();
  const double s = std::chrono::duration<double>(now - mark).count();
  mark = now;
  return s;
}

Bits random_bits(std::size_t count, Rng& rng) {
  Bits b(count);
  for (std::size_t i = 0; i < count; i += 64) {
    std::uint64_t word = rng();
    for (std::size_t j = i; j < std::min(count, i + 64); ++j, word >>= 1) {
      b[j] = static_cast<std::uint8_t>(word & 1u);
    }
  }
  return b;
}

}  // namespace

std::string_view to_string(EqualizerKind kind) {
  return kind == EqualizerKind::SsCga ? "ss-cga" : "lmmse";
}

EqualizerKind parse_equalizer(std::string_view name) {
  if (name == "ss-cga") return EqualizerKind::SsCga;
  if (name == "lmmse") return EqualizerKind::Lmmse;
  throw ConfigError("unknown equalizer '" + std::string(name) + "'");
}

double SimConfig::deadline_s() const {
  return static_cast<double>(deadline_frames) * grid.frame_duration();
}

double SimConfig::snr_linear() const { return std::pow(10.0, snr_db / 10.0); }

void SimConfig::validate() const {
  if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity()) {
    throw ConfigError("snr_db must be finite or +inf");
  }
  check_veha_fits(nu_max_hz, grid);
  if (!(theta >= 0.0) || !std::isfinite(theta)) throw ConfigError("theta must be >= 0");
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
  if (packets < 1) throw ConfigError("packets must be >= 1");
  if (deadline_frames < 1) throw ConfigError("deadline_frames must be >= 1");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (equalizer == EqualizerKind::Lmmse && grid.size() > kDenseMaxDim) {
    throw ConfigError("lmmse needs MN <= " + std::to_string(kDenseMaxDim));
  }
}

Pipeline::Pipeline(SimConfig cfg)
    : cfg_(std::move(cfg)),
      constellation_(Constellation::make(cfg_.modulation)),
      zak_(build_zak_kernel(cfg_.grid)),
      twist_(TwistKernel::build(cfg_.grid)),
      pilot_amplitude_(default_pilot_amplitude(cfg_.grid)) {
  cfg_.validate();
}

PacketResult Pipeline::run(Rng& rng, PacketProfile* profile) const {
  const PathSet channel = draw_veha(cfg_.nu_max_hz, cfg_.grid, rng);
  return run(rng, channel, profile);
}

PacketResult Pipeline::run(Rng& rng, const PathSet& channel,
                           PacketProfile* profile) const {
  const GridConfig& g = cfg_.grid;

  // Transmitter and channel, outside the timed region.
  const Bits tx_bits = random_bits(constellation_.bits_per_symbol * g.size(), rng);
  const TimeSignal pilot_tx = idzt(make_pilot_frame(g, pilot_amplitude_), g);
  const TimeSignal data_tx = idzt(modulate(tx_bits, constellation_, g), g);
  const TimeSignal pilot_rx = add_awgn(apply_channel(pilot_tx, channel, g), cfg_.snr_db, rng);
  const TimeSignal data_rx = add_awgn(apply_channel(data_tx, channel, g), cfg_.snr_db, rng);

  PacketResult res;
  res.bits_total = tx_bits.size();
  StageTimes& st = res.stages;

  // Pilot frame.
  auto mark = Clock::now();
  const DdFrame y_pilot = dzt_gemm(pilot_rx, zak_, g);
  st.pilot_dzt = seconds_since(mark);

  const DdFrame heff = estimate_heff(y_pilot, twist_, pilot_amplitude_);
  const std::vector<DominantPath> paths = detect_paths(heff, cfg_.theta);
  st.chan_est = seconds_since(mark);
  res.num_paths = paths.size();

  if (paths.empty()) {
    res.failed = true;
    res.ber = 0.5;
    res.bit_errors = res.bits_total / 2;
    res.pilot_time_s = st.pilot_dzt + st.chan_est;
    res.deadline_met = res.total_time_s() <= cfg_.deadline_s();
    return res;
  }

  std::optional<StructuredSparseChannel> sparse;
  std::optional<LmmseEqualizer> lmmse;
  if (cfg_.equalizer == EqualizerKind::SsCga) {
    sparse = build_ss_channel(paths, g);
    st.hdd_build = seconds_since(mark);
  } else {
    const DenseChannel dense = build_dense_hdd(sparsify_heff(paths, g), g);
    st.hdd_build = seconds_since(mark);
    lmmse.emplace(dense, cfg_.snr_linear());
    st.eq_prepare = seconds_since(mark);
  }

  // Data frame.
  mark = Clock::now();
  const DdFrame y_data = dzt_gemm(data_rx, zak_, g);
  st.data_dzt = seconds_since(mark);

  CVector x_hat;
  CgaTrace trace;
  if (sparse) {
    CgaConfig cga{cfg_.iterations, 1.0 / cfg_.snr_linear(), profile != nullptr};
    CgaResult r = cga_equalize(*sparse, y_data.values(), cga);
    x_hat = std::move(r.x_hat);
    trace = std::move(r.trace);
  } else {
    x_hat = lmmse->apply(y_data.values());
  }
  st.equalize = seconds_since(mark);

  const Demodulated demod = hard_demod(unflatten(x_hat, g), constellation_);
  st.demod = seconds_since(mark);

  res.pilot_time_s = st.pilot_dzt + st.chan_est + st.hdd_build + st.eq_prepare;
  res.data_time_s = st.data_dzt + st.equalize + st.demod;
  res.deadline_met = res.total_time_s() <= cfg_.deadline_s();
  res.bit_errors = bit_errors(tx_bits, demod.bits);
  res.ber = static_cast<double>(res.bit_errors) / static_cast<double>(res.bits_total);

  if (profile != nullptr) {
    profile->c_norm = trace.c_norm;
    profile->ber_per_iteration.clear();
    for (const CVector& snap : trace.snapshots) {
      const Demodulated d = hard_demod(unflatten(snap, g), constellation_);
      profile->ber_per_iteration.push_back(ber(tx_bits, d.bits));
    }
  }
  return res;
}

PacketResult run_packet(const SimConfig& cfg, Rng& rng) {
  return Pipeline(cfg).run(rng);
}

Rng packet_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

}  // namespace otfs
