#include "otfs/estimation.hpp"

#include <cmath>

#include "phase.hpp"

namespace otfs {

TwistKernel TwistKernel::build(const GridConfig& cfg) {
  TwistKernel t{DdFrame(cfg)};
  const auto k0 = static_cast<long long>(cfg.k0());
  const auto l0 = static_cast<long long>(cfg.l0());
  const auto mn = static_cast<long long>(cfg.size());
  for (std::size_t l = 0; l < cfg.n(); ++l) {
    const cplx w = detail::unit_phase(-k0 * (static_cast<long long>(l) - l0), mn);
    for (std::size_t k = 0; k < cfg.m(); ++k) t.e_twist(k, l) = w;
  }
  return t;
}

double default_pilot_amplitude(const GridConfig& cfg) {
  return std::sqrt(static_cast<double>(cfg.size()));
}

DdFrame make_pilot_frame(const GridConfig& cfg, double amplitude) {
  if (!(amplitude > 0.0)) throw ConfigError("pilot amplitude must be positive");
  DdFrame f(cfg);
  f(cfg.k0(), cfg.l0()) = amplitude;
  return f;
}

DdFrame make_pilot_frame(const GridConfig& cfg) {
  return make_pilot_frame(cfg, default_pilot_amplitude(cfg));
}

DdFrame estimate_heff(const DdFrame& y_dd, const TwistKernel& kernel,
                      double amplitude) {
  if (!(amplitude > 0.0)) throw ConfigError("pilot amplitude must be positive");
  if (y_dd.m() != kernel.e_twist.m() || y_dd.n() != kernel.e_twist.n()) {
    throw DimensionError("estimate_heff: frame and twist kernel differ in shape");
  }
  DdFrame h(y_dd.m(), y_dd.n());
  auto in = y_dd.values();
  auto tw = kernel.e_twist.values();
  auto out = h.values();
  const double inv = 1.0 / amplitude;
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] * tw[i] * inv;
  return h;
}

}  // namespace otfs
