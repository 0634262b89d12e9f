#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "otfs/harness.hpp"

namespace otfs {

namespace {

CVector random_vector(std::size_t n, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CVector v(n);
  for (auto& x : v) x = {g(rng), g(rng)};
  return v;
}

double max_abs_diff(std::span<const cplx> a, std::span<const cplx> b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

}  // namespace

DdFrame random_sparse_heff(const GridConfig& cfg, std::size_t num_paths, Rng& rng) {
  if (num_paths == 0 || num_paths > cfg.size()) {
    throw ConfigError("random channel needs 1 <= P <= MN");
  }
  std::vector<std::size_t> idx(cfg.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  DdFrame h(cfg);
  for (std::size_t p = 0; p < num_paths; ++p) {
    const auto j = p + static_cast<std::size_t>(unif(rng) * static_cast<double>(idx.size() - p));
    std::swap(idx[p], idx[std::min(j, idx.size() - 1)]);
    const double mag = 0.2 + 0.8 * unif(rng);
    h.values()[idx[p]] = std::polar(mag, 2.0 * std::numbers::pi * unif(rng));
  }
  return h;
}

bool OracleReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

OracleReport oracle_check(const OracleOptions& opts) {
  const GridConfig& g = opts.grid;
  if (g.size() > kDenseMaxDim) {
    throw ConfigError("oracle-check needs MN <= " + std::to_string(kDenseMaxDim));
  }
  OracleReport report;
  constexpr double kTol = 1e-9;

  {
    const GridConfig fig(8, 2);
    const auto p0 = DominantPath::at(4, 1, 1.0, fig);
    const auto p1 = DominantPath::at(0, 0, 1.0, fig);
    const std::size_t r0 = forward_index(p0, 7, fig);
    const std::size_t r1 = forward_index(p1, 7, fig);
    const bool inv_ok = inverse_index(p0, r0, fig) == 7 && inverse_index(p1, r1, fig) == 7;
    report.checks.push_back({"index map (8,2) worked example", r0 == 7 && r1 == 11 && inv_ok,
                             "r0(7)=" + std::to_string(r0) + " r1(7)=" + std::to_string(r1)});
  }

  Rng rng(opts.seed);
  double fwd_err = 0.0, herm_err = 0.0, coef_err = 0.0, adj_err = 0.0;
  bool bijective = true;
  const std::size_t mn = g.size();
  for (std::size_t c = 0; c < opts.channels; ++c) {
    const std::size_t num_paths = 1 + c % std::min<std::size_t>(6, mn);
    const DdFrame heff = random_sparse_heff(g, num_paths, rng);
    StructuredSparseChannel ch = build_ss_channel(detect_paths(heff, 0.0), g);
    if (opts.perturb != 0.0) {
      for (auto& x : ch.fwd_coef) x += opts.perturb;
    }
    const DenseChannel dense = build_dense_hdd(heff, g);

    const CVector v = random_vector(mn, rng);
    const CVector w = random_vector(mn, rng);
    Eigen::Map<const Eigen::VectorXcd> vm(v.data(), static_cast<Eigen::Index>(mn));
    const Eigen::VectorXcd dv = dense.h_dd * vm;
    const Eigen::VectorXcd dhv = dense.h_dd.adjoint() * vm;
    const CVector sv = ss_mvm(ch, v);
    const CVector shv = ss_mvm_hermitian(ch, v);
    fwd_err = std::max(fwd_err, max_abs_diff(sv, {dv.data(), mn}));
    herm_err = std::max(herm_err, max_abs_diff(shv, {dhv.data(), mn}));

    for (std::size_t p = 0; p < ch.num_paths; ++p) {
      std::vector<bool> seen(mn, false);
      for (std::size_t q = 0; q < mn; ++q) {
        const std::size_t r = ch.fwd_col[p * mn + q];
        coef_err = std::max(coef_err, std::abs(ch.fwd_coef[p * mn + q] -
                                               dense.h_dd(static_cast<Eigen::Index>(q),
                                                          static_cast<Eigen::Index>(r))));
        bijective = bijective && !seen[r] && ch.herm_row[p * mn + r] == q;
        seen[r] = true;
      }
    }

    const CVector hw = ss_mvm_hermitian(ch, w);
    const CVector hv = ss_mvm(ch, v);
    cplx lhs{}, rhs{};
    for (std::size_t i = 0; i < mn; ++i) {
      lhs += std::conj(hv[i]) * w[i];
      rhs += std::conj(v[i]) * hw[i];
    }
    adj_err = std::max(adj_err, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
  }
  const std::string grid_tag =
      " on (" + std::to_string(g.m()) + "," + std::to_string(g.n()) + ")";
  report.checks.push_back({"sparse MVM == dense H*v" + grid_tag, fwd_err < kTol,
                           "max abs err " + fmt(fwd_err)});
  report.checks.push_back({"sparse hermitian MVM == dense H^H*v" + grid_tag, herm_err < kTol,
                           "max abs err " + fmt(herm_err)});
  report.checks.push_back({"D[p,q] == dense entry [q, r_p(q)]" + grid_tag, coef_err < kTol,
                           "max abs err " + fmt(coef_err)});
  report.checks.push_back({"index maps are inverse bijections" + grid_tag, bijective, ""});
  report.checks.push_back({"adjoint identity <Ha,b> == <a,H^H b>" + grid_tag, adj_err < kTol,
                           "rel err " + fmt(adj_err)});

  {
    const GridConfig small = g.size() <= 512 ? g : GridConfig(16, 8);
    const DdFrame heff = random_sparse_heff(small, 3, rng);
    StructuredSparseChannel ch = build_ss_channel(detect_paths(heff, 0.0), small);
    if (opts.perturb != 0.0) {
      for (auto& x : ch.fwd_coef) x += opts.perturb;
    }
    const CVector y = random_vector(small.size(), rng);
    const double lambda = 1e-3;
    const CgaResult cga = cga_equalize(ch, y, {small.size(), lambda, false});
    const CVector ref = lmmse_equalize(build_dense_hdd(heff, small), y, 1.0 / lambda);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
      num += std::norm(cga.x_hat[i] - ref[i]);
      den += std::norm(ref[i]);
    }
    const double rel = std::sqrt(num / den);
    report.checks.push_back({"CGA at Xi=MN == LMMSE on (" + std::to_string(small.m()) + "," +
                                 std::to_string(small.n()) + ")",
                             rel < 1e-6, "rel err " + fmt(rel)});
  }
  return report;
}

}  // namespace otfs
