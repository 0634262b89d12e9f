#include "otfs/grid.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numeric>

namespace otfs {

GridConfig::GridConfig(std::size_t m, std::size_t n, double delta_f_hz)
    : m_(m), n_(n), delta_f_(delta_f_hz) {
  if (m < 2 || n < 2 || m % 2 != 0 || n % 2 != 0) {
    throw ConfigError("grid dimensions must be even and >= 2, got M=" +
                      std::to_string(m) + " N=" + std::to_string(n));
  }
  if (!(delta_f_hz > 0.0) || !std::isfinite(delta_f_hz)) {
    throw ConfigError("delta_f must be positive and finite");
  }
}

double DdFrame::energy() const {
  double e = 0.0;
  for (const cplx& v : data_) e += std::norm(v);
  return e;
}

double TimeSignal::mean_power() const {
  if (samples.empty()) return 0.0;
  double e = 0.0;
  for (const cplx& v : samples) e += std::norm(v);
  return e / static_cast<double>(samples.size());
}

std::string_view to_string(Modulation mod) {
  return mod == Modulation::Qpsk ? "qpsk" : "qam16";
}

Modulation parse_modulation(std::string_view name) {
  if (name == "qpsk") return Modulation::Qpsk;
  if (name == "qam16" || name == "16qam") return Modulation::Qam16;
  throw ConfigError("unknown modulation '" + std::string(name) + "'");
}

namespace {

// Gray-coded PAM levels for one axis: 2-bit index -> amplitude.
// 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3.
double pam4_level(std::uint32_t two_bits) {
  static constexpr std::array<double, 4> kLevels{-3.0, -1.0, 3.0, 1.0};
  return kLevels[two_bits & 3u];
}

}  // namespace

Constellation Constellation::make(Modulation kind) {
  Constellation c{kind, 0, {}, {}};
  if (kind == Modulation::Qpsk) {
    c.bits_per_symbol = 2;
    const double s = 1.0 / std::sqrt(2.0);
    for (std::uint32_t i = 0; i < 4; ++i) {
      const double re = (i & 2u) ? -s : s;
      const double im = (i & 1u) ? -s : s;
      c.points.emplace_back(re, im);
    }
  } else {
    c.bits_per_symbol = 4;
    const double s = 1.0 / std::sqrt(10.0);
    for (std::uint32_t i = 0; i < 16; ++i) {
      c.points.emplace_back(pam4_level(i >> 2) * s, pam4_level(i) * s);
    }
  }
  c.bit_map.resize(c.points.size());
  std::iota(c.bit_map.begin(), c.bit_map.end(), 0u);
  return c;
}

std::size_t Constellation::nearest(cplx x) const {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d = std::norm(x - points[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

CVector flatten(const DdFrame& frame, const GridConfig& cfg) {
  if (!frame.matches(cfg)) {
    throw DimensionError("flatten: frame shape does not match grid");
  }
  auto v = frame.values();
  return CVector(v.begin(), v.end());
}

DdFrame unflatten(std::span<const cplx> v, const GridConfig& cfg) {
  if (v.size() != cfg.size()) {
    throw DimensionError("unflatten: expected length " +
                         std::to_string(cfg.size()) + ", got " +
                         std::to_string(v.size()));
  }
  DdFrame f(cfg);
  std::copy(v.begin(), v.end(), f.values().begin());
  return f;
}

DdFrame modulate(std::span<const std::uint8_t> bits, const Constellation& c,
                 const GridConfig& cfg) {
  const std::size_t b = c.bits_per_symbol;
  if (bits.size() != b * cfg.size()) {
    throw ConfigError("modulate: need " + std::to_string(b * cfg.size()) +
                      " bits, got " + std::to_string(bits.size()));
  }
  // bit_map is the identity, so the pattern value is the point index.
  DdFrame f(cfg);
  auto out = f.values();
  for (std::size_t q = 0; q < cfg.size(); ++q) {
    std::uint32_t idx = 0;
    for (std::size_t j = 0; j < b; ++j) idx = (idx << 1) | (bits[q * b + j] & 1u);
    out[q] = c.points[idx];
  }
  return f;
}

Demodulated hard_demod(const DdFrame& x_hat, const Constellation& c) {
  Demodulated d{DdFrame(x_hat.m(), x_hat.n()), {}};
  const std::size_t b = c.bits_per_symbol;
  d.bits.resize(x_hat.size() * b);
  auto in = x_hat.values();
  auto out = d.symbols.values();
  for (std::size_t q = 0; q < in.size(); ++q) {
    const std::size_t idx = c.nearest(in[q]);
    out[q] = c.points[idx];
    const std::uint32_t pattern = c.bit_map[idx];
    for (std::size_t j = 0; j < b; ++j) {
      d.bits[q * b + j] = static_cast<std::uint8_t>((pattern >> (b - 1 - j)) & 1u);
    }
  }
  return d;
}

std::size_t bit_errors(std::span<const std::uint8_t> tx,
                       std::span<const std::uint8_t> rx) {
  if (tx.size() != rx.size()) {
    throw DimensionError("bit sequences differ in length");
  }
  std::size_t errs = 0;
  for (std::size_t i = 0; i < tx.size(); ++i) errs += (tx[i] & 1u) != (rx[i] & 1u);
  return errs;
}

double ber(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx) {
  const std::size_t errs = bit_errors(tx, rx);
  if (tx.empty()) return 0.0;
  return static_cast<double>(errs) / static_cast<double>(tx.size());
}

}  // namespace otfs
