#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "otfs/harness.hpp"

namespace otfs::test {

inline CVector random_cvector(std::size_t n, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CVector v(n);
  for (auto& x : v) x = {g(rng), g(rng)};
  return v;
}

inline DdFrame random_frame(const GridConfig& cfg, Rng& rng) {
  DdFrame f(cfg);
  const CVector v = random_cvector(cfg.size(), rng);
  std::copy(v.begin(), v.end(), f.values().begin());
  return f;
}

inline Bits random_bits(std::size_t n, Rng& rng) {
  std::bernoulli_distribution coin(0.5);
  Bits b(n);
  for (auto& x : b) x = coin(rng) ? 1 : 0;
  return b;
}

inline double max_abs_diff(std::span<const cplx> a, std::span<const cplx> b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

inline double energy(std::span<const cplx> v) {
  double s = 0.0;
  for (const cplx& x : v) s += std::norm(x);
  return s;
}

inline PathSet single_path(cplx gain, int delay_bin, double doppler_bins, const GridConfig& cfg) {
  return PathSet{{PathSpec::on_grid(gain, delay_bin, doppler_bins, cfg)}};
}

// Noiseless pilot through `paths`, returned as the absolute-grid estimate.
inline DdFrame loopback_estimate(const PathSet& paths, const GridConfig& cfg) {
  const DdFrame pilot = make_pilot_frame(cfg);
  const TimeSignal y = apply_channel(idzt(pilot, cfg), paths, cfg);
  return estimate_heff(dzt(y, cfg), TwistKernel::build(cfg), default_pilot_amplitude(cfg));
}

inline std::size_t count_nonzero(std::span<const cplx> v, double tol) {
  return static_cast<std::size_t>(
      std::count_if(v.begin(), v.end(), [&](const cplx& x) { return std::abs(x) > tol; }));
}

}  // namespace otfs::test
