#include "otfs/zak.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "phase.hpp"

namespace otfs {

using detail::unit_phase;

ZakKernel build_zak_kernel(std::size_t n, ZakConvention convention) {
  if (n == 0) throw ConfigError("zak kernel needs N >= 1");
  ZakKernel k{n, convention, CVector(n * n)};
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  const auto nn = static_cast<long long>(n);
  for (std::size_t col = 0; col < n; ++col) {
    const double sign =
        (convention == ZakConvention::HalfShift && col % 2 == 1) ? -1.0 : 1.0;
    for (std::size_t row = 0; row < n; ++row) {
      const auto prod = static_cast<long long>(row * col);
      k.e_zak[col * n + row] = sign * scale * unit_phase(-prod, nn);
    }
  }
  return k;
}

ZakKernel build_zak_kernel(const GridConfig& cfg, ZakConvention convention) {
  return build_zak_kernel(cfg.n(), convention);
}

TimeSignal idzt(const DdFrame& x_dd, const GridConfig& cfg) {
  if (!x_dd.matches(cfg)) throw DimensionError("idzt: frame shape mismatch");
  const std::size_t m = cfg.m(), n = cfg.n();
  const auto nn = static_cast<long long>(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));

  CVector twiddle(n);
  for (std::size_t t = 0; t < n; ++t) twiddle[t] = unit_phase(static_cast<long long>(t), nn);

  TimeSignal x{CVector(cfg.size()), cfg.bandwidth()};
  for (std::size_t blk = 0; blk < n; ++blk) {
    for (std::size_t k = 0; k < m; ++k) {
      cplx acc{};
      for (std::size_t l = 0; l < n; ++l) acc += x_dd(k, l) * twiddle[(blk * l) % n];
      x.samples[blk * m + k] = scale * acc;
    }
  }
  return x;
}

DdFrame dzt(const TimeSignal& y, const GridConfig& cfg) {
  if (y.samples.size() != cfg.size()) {
    throw DimensionError("dzt: signal length " + std::to_string(y.samples.size()) +
                         " != M*N = " + std::to_string(cfg.size()));
  }
  const std::size_t m = cfg.m(), n = cfg.n();
  const auto nn = static_cast<long long>(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));

  CVector twiddle(n);
  for (std::size_t t = 0; t < n; ++t) twiddle[t] = unit_phase(-static_cast<long long>(t), nn);

  DdFrame out(cfg);
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t k = 0; k < m; ++k) {
      cplx acc{};
      for (std::size_t i = 0; i < n; ++i) acc += y.samples[k + i * m] * twiddle[(i * l) % n];
      out(k, l) = scale * acc;
    }
  }
  return out;
}

DdFrame dzt_gemm(const TimeSignal& y, const ZakKernel& kernel,
                 const GridConfig& cfg) {
  if (y.samples.size() != cfg.size()) {
    throw DimensionError("dzt_gemm: signal length mismatch");
  }
  if (kernel.n != cfg.n()) {
    throw DimensionError("dzt_gemm: kernel built for N=" + std::to_string(kernel.n) +
                         ", grid has N=" + std::to_string(cfg.n()));
  }
  const auto m = static_cast<Eigen::Index>(cfg.m());
  const auto n = static_cast<Eigen::Index>(cfg.n());
  using Mat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor>;
  Eigen::Map<const Mat> y_mat(y.samples.data(), m, n);
  Eigen::Map<const Mat> e_mat(kernel.e_zak.data(), n, n);

  DdFrame out(cfg);
  Eigen::Map<Mat> out_mat(out.values().data(), m, n);
  out_mat.noalias() = y_mat * e_mat;
  return out;
}

}  // namespace otfs
