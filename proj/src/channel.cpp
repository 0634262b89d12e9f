#include "otfs/channel.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "phase.hpp"

namespace otfs {

PathSpec PathSpec::on_grid(cplx gain, int delay_bin, double doppler_bins,
                           const GridConfig& cfg) {
  PathSpec p;
  p.gain = gain;
  p.delay_bin = delay_bin;
  p.delay_s = delay_bin * cfg.delay_resolution();
  p.doppler_frac = doppler_bins;
  p.doppler_hz = doppler_bins * cfg.doppler_resolution();
  return p;
}

double PathSet::total_power() const {
  double s = 0.0;
  for (const auto& p : paths) s += std::norm(p.gain);
  return s;
}

void PathSet::normalize() {
  const double pw = total_power();
  if (!(pw > 0.0)) throw ConfigError("cannot normalize a zero-power path set");
  const double s = 1.0 / std::sqrt(pw);
  for (auto& p : paths) p.gain *= s;
}

void check_veha_fits(double nu_max_hz, const GridConfig& cfg) {
  if (!(nu_max_hz >= 0.0) || !std::isfinite(nu_max_hz)) {
    throw ConfigError("nu_max must be finite and >= 0");
  }
  if (nu_max_hz * cfg.frame_duration() > static_cast<double>(cfg.n()) / 2.0) {
    throw ConfigError("nu_max exceeds half the Doppler period");
  }
  const double max_delay_s = VehAProfile::delays_us.back() * 1e-6;
  if (std::lround(max_delay_s * cfg.bandwidth()) >= static_cast<long>(cfg.m())) {
    throw ConfigError("Veh-A delay spread exceeds the delay period M/B");
  }
}

PathSet draw_veha(double nu_max_hz, const GridConfig& cfg, Rng& rng) {
  check_veha_fits(nu_max_hz, cfg);

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  PathSet set;
  for (std::size_t p = 0; p < VehAProfile::delays_us.size(); ++p) {
    const double mag = std::sqrt(std::pow(10.0, VehAProfile::powers_db[p] / 10.0));
    const double phase = 2.0 * std::numbers::pi * unif(rng);
    const double nu = nu_max_hz * std::cos(2.0 * std::numbers::pi * unif(rng));

    PathSpec ps;
    ps.gain = std::polar(mag, phase);
    ps.delay_s = VehAProfile::delays_us[p] * 1e-6;
    ps.delay_bin = static_cast<int>(std::lround(ps.delay_s * cfg.bandwidth()));
    ps.doppler_hz = nu;
    ps.doppler_frac = nu * cfg.frame_duration();
    set.paths.push_back(ps);
  }
  set.normalize();
  return set;
}

TimeSignal apply_channel(const TimeSignal& x, const PathSet& paths,
                         const GridConfig& cfg) {
  const std::size_t len = cfg.size();
  if (x.samples.size() != len) throw DimensionError("apply_channel: signal length mismatch");
  const double inv_b = 1.0 / cfg.bandwidth();

  TimeSignal y{CVector(len), x.sample_rate};
  for (const auto& p : paths.paths) {
    const auto shift = static_cast<std::size_t>(
        detail::mod(p.delay_bin, static_cast<long long>(len)));
    const double w = 2.0 * std::numbers::pi * p.doppler_hz;
    for (std::size_t i = 0; i < len; ++i) {
      const std::size_t src = (i + len - shift) % len;
      const double a = w * (static_cast<double>(i) * inv_b - p.delay_s);
      y.samples[i] += p.gain * x.samples[src] * cplx(std::cos(a), std::sin(a));
    }
  }
  return y;
}

TimeSignal add_awgn(const TimeSignal& y, double snr_db, Rng& rng) {
  if (std::isinf(snr_db) && snr_db > 0) return y;
  if (!std::isfinite(snr_db)) throw ConfigError("snr_db must be finite or +inf");
  const double gamma = std::pow(10.0, snr_db / 10.0);
  const double sigma = std::sqrt(y.mean_power() / gamma);
  std::normal_distribution<double> g(0.0, sigma / std::sqrt(2.0));

  TimeSignal out = y;
  for (cplx& s : out.samples) {
    const double re = g(rng);
    const double im = g(rng);
    s += cplx(re, im);
  }
  return out;
}

DdFrame ground_truth_heff(const PathSet& paths, const GridConfig& cfg) {
  DdFrame h(cfg);
  const auto m = static_cast<long long>(cfg.m());
  const auto n = static_cast<long long>(cfg.n());
  for (const auto& p : paths.paths) {
    const auto k = detail::mod(static_cast<long long>(cfg.k0()) + p.delay_bin, m);
    const auto l = detail::mod(static_cast<long long>(cfg.l0()) + std::llround(p.doppler_frac), n);
    h(static_cast<std::size_t>(k), static_cast<std::size_t>(l)) += p.gain;
  }
  return h;
}

void write_paths(std::ostream& os, const PathSet& paths) {
  os << "path,gain_re,gain_im,delay_s,doppler_hz\n";
  os.precision(17);
  for (std::size_t i = 0; i < paths.paths.size(); ++i) {
    const auto& p = paths.paths[i];
    os << i << ',' << p.gain.real() << ',' << p.gain.imag() << ',' << p.delay_s
       << ',' << p.doppler_hz << '\n';
  }
}

PathSet read_paths(std::istream& is, const GridConfig& cfg) {
  std::string line;
  if (!std::getline(is, line) || line != "path,gain_re,gain_im,delay_s,doppler_hz") {
    throw ConfigError("path record: missing or unexpected header");
  }
  PathSet set;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    double v[5];
    for (double& x : v) {
      if (!std::getline(ls, field, ',')) throw ConfigError("path record: short line '" + line + "'");
      x = std::stod(field);
    }
    PathSpec p;
    p.gain = {v[1], v[2]};
    p.delay_s = v[3];
    p.doppler_hz = v[4];
    p.delay_bin = static_cast<int>(std::lround(p.delay_s * cfg.bandwidth()));
    p.doppler_frac = p.doppler_hz * cfg.frame_duration();
    set.paths.push_back(p);
  }
  return set;
}

}  // namespace otfs
