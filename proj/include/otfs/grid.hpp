#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "otfs/errors.hpp"

namespace otfs {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;
using Bits = std::vector<std::uint8_t>;

/// Delay-Doppler grid geometry. M delay bins, N Doppler bins, subcarrier
/// spacing delta_f in Hz. Everything else is derived:
///   B = M * delta_f, T = N / delta_f, delay resolution 1/B, Doppler
///   resolution 1/T, pilot origin (K0, L0) = (M/2, N/2).
class GridConfig {
 public:
  GridConfig(std::size_t m, std::size_t n, double delta_f_hz = 30e3);

  std::size_t m() const { return m_; }
  std::size_t n() const { return n_; }
  std::size_t size() const { return m_ * n_; }
  double delta_f() const { return delta_f_; }

  double bandwidth() const { return static_cast<double>(m_) * delta_f_; }
  double frame_duration() const { return static_cast<double>(n_) / delta_f_; }
  double delay_resolution() const { return 1.0 / bandwidth(); }
  double doppler_resolution() const { return 1.0 / frame_duration(); }

  std::size_t k0() const { return m_ / 2; }
  std::size_t l0() const { return n_ / 2; }

  bool operator==(const GridConfig&) const = default;

 private:
  std::size_t m_;
  std::size_t n_;
  double delta_f_;
};

/// Complex M x N frame indexed [k, l]. Storage is column-major, so the
/// flat index of (k, l) is l*M + k.
class DdFrame {
 public:
  DdFrame() = default;
  DdFrame(std::size_t m, std::size_t n) : m_(m), n_(n), data_(m * n) {}
  explicit DdFrame(const GridConfig& cfg) : DdFrame(cfg.m(), cfg.n()) {}

  std::size_t m() const { return m_; }
  std::size_t n() const { return n_; }
  std::size_t size() const { return data_.size(); }

  cplx& operator()(std::size_t k, std::size_t l) { return data_[l * m_ + k]; }
  const cplx& operator()(std::size_t k, std::size_t l) const {
    return data_[l * m_ + k];
  }

  std::span<cplx> values() { return data_; }
  std::span<const cplx> values() const { return data_; }

  bool matches(const GridConfig& cfg) const {
    return m_ == cfg.m() && n_ == cfg.n();
  }

  double energy() const;

 private:
  std::size_t m_ = 0;
  std::size_t n_ = 0;
  CVector data_;
};

struct TimeSignal {
  CVector samples;
  double sample_rate = 0.0;

  double mean_power() const;
};

enum class Modulation { Qpsk, Qam16 };

std::string_view to_string(Modulation mod);
Modulation parse_modulation(std::string_view name);

/// Gray-mapped square constellation with unit average energy. Point i
/// carries the bit pattern i (MSB first), so bit_map is the identity on
/// indices and Gray adjacency follows from the per-axis level ordering.
struct Constellation {
  Modulation kind;
  std::size_t bits_per_symbol;
  std::vector<cplx> points;
  std::vector<std::uint32_t> bit_map;

  static Constellation make(Modulation kind);

  std::size_t nearest(cplx x) const;
};

CVector flatten(const DdFrame& frame, const GridConfig& cfg);
DdFrame unflatten(std::span<const cplx> v, const GridConfig& cfg);

/// Places symbol q on flat index q, consuming bits MSB-first.
DdFrame modulate(std::span<const std::uint8_t> bits, const Constellation& c,
                 const GridConfig& cfg);

struct Demodulated {
  DdFrame symbols;
  Bits bits;
};

/// Nearest-point hard decision. Ties go to the lowest constellation index.
Demodulated hard_demod(const DdFrame& x_hat, const Constellation& c);

std::size_t bit_errors(std::span<const std::uint8_t> tx,
                       std::span<const std::uint8_t> rx);
double ber(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx);

}  // namespace otfs
