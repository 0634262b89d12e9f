#pragma once

#include "otfs/grid.hpp"

namespace otfs {

/// Twist phases e_twist[k, l] = e^{-j2pi K0 (l - L0) / MN}, constant along k.
struct TwistKernel {
  DdFrame e_twist;

  static TwistKernel build(const GridConfig& cfg);
};

double default_pilot_amplitude(const GridConfig& cfg);

/// Zero frame with a single impulse at (K0, L0). The default amplitude
/// sqrt(MN) gives the pilot frame the energy of a unit-power data frame.
DdFrame make_pilot_frame(const GridConfig& cfg, double amplitude);
DdFrame make_pilot_frame(const GridConfig& cfg);

/// Effective channel on the absolute grid: (Y_dd .* e_twist) / amplitude.
/// Entry (K0, L0) is the zero-delay, zero-Doppler tap.
DdFrame estimate_heff(const DdFrame& y_dd, const TwistKernel& kernel,
                      double amplitude);

}  // namespace otfs
