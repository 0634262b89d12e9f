#include "otfs/equalizer.hpp"

#include <algorithm>
#include <cmath>

namespace otfs {

namespace {

double norm2(std::span<const cplx> v) {
  double s = 0.0;
  for (const cplx& x : v) s += std::norm(x);
  return s;
}

cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
  cplx s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

double lambda_for(double snr_linear) {
  if (!(snr_linear > 0.0)) throw ConfigError("snr must be positive");
  return std::isinf(snr_linear) ? 0.0 : 1.0 / snr_linear;
}

Cholesky factor_normal(const CMatrix& h, double lambda) {
  const auto dim = h.cols();
  CMatrix gram = CMatrix::Zero(dim, dim);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(h.adjoint());
  gram.diagonal().array() += lambda;
  Cholesky llt(gram);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("LMMSE normal matrix is not positive definite");
  }
  return llt;
}

}  // namespace

CgaResult cga_equalize(const StructuredSparseChannel& ch, std::span<const cplx> y_dd,
                       const CgaConfig& cfg) {
  if (cfg.iterations < 1) throw ConfigError("CGA needs at least one iteration");
  if (!(cfg.lambda >= 0.0)) throw ConfigError("CGA lambda must be >= 0");
  const std::size_t dim = ch.dim();
  if (y_dd.size() != dim) throw DimensionError("cga_equalize: y length mismatch");

  CgaResult res;
  CgaTrace& tr = res.trace;
  res.x_hat.assign(dim, cplx{});
  CVector b(dim), hp(dim), a_p(dim);

  ss_mvm_hermitian(ch, y_dd, b);
  tr.mvm_count = 1;
  CVector c = b;
  CVector p = b;
  double c_norm = norm2(c);
  tr.initial_c_norm = c_norm;
  tr.c_norm.reserve(cfg.iterations);

  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    ss_mvm(ch, p, hp);
    ss_mvm_hermitian(ch, hp, a_p);
    tr.mvm_count += 2;
    for (std::size_t i = 0; i < dim; ++i) a_p[i] += cfg.lambda * p[i];

    const double curvature = dot(p, a_p).real();
    if (curvature == 0.0) {
      tr.exact_exit = true;
      break;
    }
    const double alpha = c_norm / curvature;
    for (std::size_t i = 0; i < dim; ++i) {
      res.x_hat[i] += alpha * p[i];
      c[i] -= alpha * a_p[i];
    }
    const double c_norm_next = norm2(c);
    // The residual norm can underflow to zero well before the budget runs out.
    const double beta = c_norm_next == 0.0 ? 0.0 : c_norm_next / c_norm;
    for (std::size_t i = 0; i < dim; ++i) p[i] = c[i] + beta * p[i];
    c_norm = c_norm_next;

    tr.c_norm.push_back(c_norm);
    if (cfg.keep_snapshots) tr.snapshots.push_back(res.x_hat);
  }
  return res;
}

CVector lmmse_equalize(const DenseChannel& dense, std::span<const cplx> y_dd,
                       double snr_linear) {
  const double lambda = lambda_for(snr_linear);
  const auto dim = dense.h_dd.rows();
  if (static_cast<Eigen::Index>(y_dd.size()) != dim) {
    throw DimensionError("lmmse_equalize: y length mismatch");
  }
  Eigen::Map<const Eigen::VectorXcd> y(y_dd.data(), dim);

  const auto llt = factor_normal(dense.h_dd, lambda);
  Eigen::VectorXcd x = llt.solve(dense.h_dd.adjoint() * y);
  if (!x.allFinite()) throw NumericalError("LMMSE solve produced non-finite values");
  return CVector(x.data(), x.data() + x.size());
}

LmmseEqualizer::LmmseEqualizer(const DenseChannel& dense, double snr_linear) {
  const double lambda = lambda_for(snr_linear);
  h_adj_ = dense.h_dd.adjoint();
  llt_ = factor_normal(dense.h_dd, lambda);
}

CVector LmmseEqualizer::apply(std::span<const cplx> y_dd) const {
  if (static_cast<Eigen::Index>(y_dd.size()) != h_adj_.cols()) {
    throw DimensionError("LmmseEqualizer::apply: y length mismatch");
  }
  Eigen::Map<const Eigen::VectorXcd> y(y_dd.data(), h_adj_.cols());
  Eigen::VectorXcd x = llt_.solve(h_adj_ * y);
  if (!x.allFinite()) throw NumericalError("LMMSE solve produced non-finite values");
  return CVector(x.data(), x.data() + x.size());
}

std::size_t ber_convergence_iteration(std::span<const double> ber_trace, double eta,
                                      double zeta) {
  if (ber_trace.size() < 2) throw ConfigError("BER trace needs at least 2 entries");
  for (std::size_t xi = 2; xi <= ber_trace.size(); ++xi) {
    const double prev = ber_trace[xi - 2];
    const double cur = ber_trace[xi - 1];
    const double r = (prev - cur) / std::max(prev, zeta);
    if (r < eta) return xi;
  }
  return ber_trace.size();
}

}  // namespace otfs
