#pragma once

#include <array>
#include <iosfwd>
#include <limits>
#include <random>

#include "otfs/grid.hpp"

namespace otfs {

using Rng = std::mt19937_64;

/// One propagation path. delay_bin = round(delay_s * B); doppler_frac is the
/// Doppler in units of the Doppler resolution and may be fractional.
struct PathSpec {
  cplx gain;
  double delay_s = 0.0;
  double doppler_hz = 0.0;
  int delay_bin = 0;
  double doppler_frac = 0.0;

  /// Path sitting exactly on grid point (delay_bin, doppler_bins).
  static PathSpec on_grid(cplx gain, int delay_bin, double doppler_bins,
                          const GridConfig& cfg);
};

struct PathSet {
  std::vector<PathSpec> paths;

  std::size_t size() const { return paths.size(); }
  double total_power() const;
  /// Rescales gains to unit total power.
  void normalize();
};

/// ITU Vehicular-A power-delay profile.
struct VehAProfile {
  static constexpr std::array<double, 6> delays_us{0.00, 0.31, 0.71, 1.09, 1.73, 2.51};
  static constexpr std::array<double, 6> powers_db{0.0, -1.0, -9.0, -10.0, -15.0, -20.0};
};

/// Throws ConfigError unless nu_max is finite, non-negative and within half
/// the Doppler period, and the Veh-A delay spread fits inside M/B.
void check_veha_fits(double nu_max_hz, const GridConfig& cfg);

/// Six-path Veh-A realization. Gains have the profile's relative powers
/// normalized to unit total, uniform random phases; Doppler per path is
/// nu_max * cos(2 pi U), U ~ U(0,1).
PathSet draw_veha(double nu_max_hz, const GridConfig& cfg, Rng& rng);

/// y[i] = sum_p h_p x[<i - k_p>_MN] e^{j2pi nu_p (i/B - tau_p)}
TimeSignal apply_channel(const TimeSignal& x, const PathSet& paths,
                         const GridConfig& cfg);

inline constexpr double kNoiseless = std::numeric_limits<double>::infinity();

/// Adds circular complex Gaussian noise of total power rho_s / gamma, with
/// rho_s the signal's mean power. snr_db = +inf leaves y untouched.
TimeSignal add_awgn(const TimeSignal& y, double snr_db, Rng& rng);

/// Effective-channel taps on the absolute grid: path p lands at
/// (<K0 + k_p>_M, <L0 + round(doppler_frac)>_N).
DdFrame ground_truth_heff(const PathSet& paths, const GridConfig& cfg);

/// Text record, one path per line:
///   path,gain_re,gain_im,delay_s,doppler_hz
void write_paths(std::ostream& os, const PathSet& paths);
PathSet read_paths(std::istream& is, const GridConfig& cfg);

}  // namespace otfs
