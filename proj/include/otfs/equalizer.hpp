#pragma once

#include "otfs/sparse_channel.hpp"

namespace otfs {

struct CgaConfig {
  std::size_t iterations = 10;
  /// Scalar noise covariance, 1 / SNR_linear.
  double lambda = 0.0;
  /// Keep a copy of x_hat after every iteration.
  bool keep_snapshots = false;
};

struct CgaTrace {
  double initial_c_norm = 0.0;
  /// ||c||^2 after each executed iteration.
  std::vector<double> c_norm;
  std::vector<CVector> snapshots;
  /// Set when p^H a_p was exactly zero and the loop stopped early.
  bool exact_exit = false;
  std::size_t mvm_count = 0;
};

struct CgaResult {
  CVector x_hat;
  CgaTrace trace;
};

/// Fixed-iteration conjugate gradient on (H^H H + lambda I) x = H^H y,
/// applying H^H H as two structured-sparse MVMs per iteration. The only
/// data-dependent exit is an exactly zero curvature p^H a_p.
CgaResult cga_equalize(const StructuredSparseChannel& ch, std::span<const cplx> y_dd,
                       const CgaConfig& cfg);

/// Direct solve of (H^H H + I/snr) x = H^H y by Cholesky.
CVector lmmse_equalize(const DenseChannel& dense, std::span<const cplx> y_dd,
                       double snr_linear);

using Cholesky = Eigen::LLT<CMatrix, Eigen::Lower>;

/// LMMSE split the way a receiver runs it: the pilot frame pays for the
/// O((MN)^3) Gram product and Cholesky factorization, each data frame is
/// an O((MN)^2) pair of triangular solves.
class LmmseEqualizer {
 public:
  LmmseEqualizer(const DenseChannel& dense, double snr_linear);
  CVector apply(std::span<const cplx> y_dd) const;

 private:
  CMatrix h_adj_;
  Cholesky llt_;
};

/// First iteration xi >= 2 whose signed relative BER change
///   r = (BER[xi-1] - BER[xi]) / max(BER[xi-1], zeta)
/// drops below eta. ber_trace[0] is the BER after iteration 1. Returns the
/// trace length when nothing qualifies.
std::size_t ber_convergence_iteration(std::span<const double> ber_trace,
                                      double eta = 1e-2, double zeta = 1e-12);

}  // namespace otfs
