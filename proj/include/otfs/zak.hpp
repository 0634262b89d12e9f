#pragma once

#include "otfs/grid.hpp"

namespace otfs {

/// Column convention of the DZT kernel matrix.
///   Plain     - e[l', l] = e^{-j2pi l'l/N} / sqrt(N), agrees with dzt().
///   HalfShift - additionally multiplies column l by (-1)^l. Kept only for
///               A/B comparison; it does not invert idzt().
enum class ZakConvention { Plain, HalfShift };

/// Precomputed N x N DZT kernel, column-major.
struct ZakKernel {
  std::size_t n = 0;
  ZakConvention convention = ZakConvention::Plain;
  CVector e_zak;

  const cplx& operator()(std::size_t row, std::size_t col) const {
    return e_zak[col * n + row];
  }
};

ZakKernel build_zak_kernel(std::size_t n,
                           ZakConvention convention = ZakConvention::Plain);
ZakKernel build_zak_kernel(const GridConfig& cfg,
                           ZakConvention convention = ZakConvention::Plain);

/// x[i] = 1/sqrt(N) sum_l X[<i>_M, l] e^{j2pi floor(i/M) l / N}
TimeSignal idzt(const DdFrame& x_dd, const GridConfig& cfg);

/// Y[k, l] = 1/sqrt(N) sum_i y[k + iM] e^{-j2pi i l / N}
DdFrame dzt(const TimeSignal& y, const GridConfig& cfg);

/// Same transform as dzt(), evaluated as one M x N by N x N product
/// with y reshaped column-major.
DdFrame dzt_gemm(const TimeSignal& y, const ZakKernel& kernel,
                 const GridConfig& cfg);

}  // namespace otfs
