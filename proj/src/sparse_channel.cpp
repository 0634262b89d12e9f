#include "otfs/sparse_channel.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "phase.hpp"

namespace otfs {

using detail::floor_div;
using detail::mod;
using detail::unit_phase;

DominantPath DominantPath::at(int k, int l, cplx gain, const GridConfig& cfg) {
  return DominantPath{k, l, gain, static_cast<int>(cfg.k0()) - k,
                      static_cast<int>(cfg.l0()) - l};
}

std::vector<DominantPath> detect_paths(const DdFrame& heff, double theta) {
  if (!(theta >= 0.0)) throw ConfigError("threshold must be >= 0");
  auto v = heff.values();
  double peak = 0.0;
  for (const cplx& x : v) peak = std::max(peak, std::abs(x));
  if (peak == 0.0) return {};

  const GridConfig cfg(heff.m(), heff.n());
  std::vector<std::pair<double, std::size_t>> hits;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]);
    if (mag / peak > theta) hits.emplace_back(mag, i);
  }
  std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });

  std::vector<DominantPath> out;
  out.reserve(hits.size());
  for (const auto& [mag, i] : hits) {
    const auto k = static_cast<int>(i % heff.m());
    const auto l = static_cast<int>(i / heff.m());
    out.push_back(DominantPath::at(k, l, v[i], cfg));
  }
  return out;
}

std::size_t forward_index(const DominantPath& path, std::size_t q,
                          const GridConfig& cfg) {
  const auto m = static_cast<long long>(cfg.m());
  const auto n = static_cast<long long>(cfg.n());
  const auto kq = static_cast<long long>(q) % m;
  const auto lq = static_cast<long long>(q) / m;
  return static_cast<std::size_t>(mod(lq + path.d_l, n) * m + mod(kq + path.d_k, m));
}

std::size_t inverse_index(const DominantPath& path, std::size_t r,
                          const GridConfig& cfg) {
  const auto m = static_cast<long long>(cfg.m());
  const auto n = static_cast<long long>(cfg.n());
  const auto kr = static_cast<long long>(r) % m;
  const auto lr = static_cast<long long>(r) / m;
  return static_cast<std::size_t>(mod(lr - path.d_l, n) * m + mod(kr - path.d_k, m));
}

namespace {

// Numerator t of the coefficient phase 2pi t / MN, reduced to [0, MN).
long long phase_numerator(const DominantPath& path, std::size_t q, const GridConfig& cfg) {
  const auto m = static_cast<long long>(cfg.m());
  const auto n = static_cast<long long>(cfg.n());
  const auto k0 = static_cast<long long>(cfg.k0());
  const auto l0 = static_cast<long long>(cfg.l0());
  const auto kq = static_cast<long long>(q) % m;
  const auto lq = static_cast<long long>(q) / m;

  const long long a = k0 + kq - path.k;
  const long long wraps = floor_div(a, m);
  const long long l_in = mod(l0 + lq - path.l, n);
  return mod((path.l - l0) * a + wraps * l_in * m, m * n);
}

// e^{j2pi t/MN} for t in [0, MN).
CVector twiddle_table(std::size_t mn) {
  CVector t(mn);
  for (std::size_t i = 0; i < mn; ++i) {
    t[i] = unit_phase(static_cast<long long>(i), static_cast<long long>(mn));
  }
  return t;
}

}  // namespace

cplx coefficient(const DominantPath& path, std::size_t q, const GridConfig& cfg) {
  return path.gain *
         unit_phase(phase_numerator(path, q, cfg), static_cast<long long>(cfg.size()));
}

std::size_t StructuredSparseChannel::memory_bytes() const {
  return fwd_coef.size() * sizeof(cplx) + herm_coef.size() * sizeof(cplx) +
         fwd_col.size() * sizeof(std::uint32_t) + herm_row.size() * sizeof(std::uint32_t);
}

StructuredSparseChannel build_ss_channel(const std::vector<DominantPath>& paths,
                                         const GridConfig& cfg) {
  if (paths.empty()) throw EmptyChannelError("no dominant paths above threshold");
  const std::size_t mn = cfg.size();
  StructuredSparseChannel ch;
  ch.num_paths = paths.size();
  ch.m = cfg.m();
  ch.n = cfg.n();
  ch.paths = paths;
  ch.fwd_coef.resize(ch.num_paths * mn);
  ch.fwd_col.resize(ch.num_paths * mn);
  ch.herm_coef.resize(ch.num_paths * mn);
  ch.herm_row.resize(ch.num_paths * mn);

  // One twiddle table per grid and thread; the phases only depend on MN.
  thread_local CVector twiddle;
  if (twiddle.size() != mn) twiddle = twiddle_table(mn);

  // Same values as forward_index / coefficient, walked row by row so the
  // per-entry work is additions and compares. For a fixed output Doppler
  // row l_q the delay offset A = K0 + k_q - k_p grows by one per k_q and
  // the wrap count floor(A/M) changes at most twice.
  const auto m = static_cast<long long>(cfg.m());
  const auto n = static_cast<long long>(cfg.n());
  const auto k0 = static_cast<long long>(cfg.k0());
  const auto l0 = static_cast<long long>(cfg.l0());
  const auto total = static_cast<long long>(mn);
  for (std::size_t p = 0; p < paths.size(); ++p) {
    const DominantPath& path = paths[p];
    const std::size_t base = p * mn;
    const long long dl = path.l - l0;
    const long long step = mod(dl, total);
    const long long dk_mod = mod(path.d_k, m);
    for (long long lq = 0; lq < n; ++lq) {
      const long long col_row = mod(lq + path.d_l, n) * m;
      const long long l_in = mod(l0 + lq - path.l, n);
      const long long a0 = k0 - path.k;
      long long lin = mod(dl * a0, total);
      for (long long kq = 0; kq < m; ++kq) {
        const long long a = a0 + kq;
        const long long wraps = a < 0 ? -1 : (a >= m ? 1 : 0);
        long long t = lin + mod(wraps * l_in * m, total);
        if (t >= total) t -= total;
        long long kr = kq + dk_mod;
        if (kr >= m) kr -= m;
        const auto q = static_cast<std::size_t>(lq * m + kq);
        ch.fwd_col[base + q] = static_cast<std::uint32_t>(col_row + kr);
        ch.fwd_coef[base + q] = path.gain * twiddle[static_cast<std::size_t>(t)];
        lin += step;
        if (lin >= total) lin -= total;
      }
    }
    for (std::size_t q = 0; q < mn; ++q) {
      const std::uint32_t r = ch.fwd_col[base + q];
      ch.herm_row[base + r] = static_cast<std::uint32_t>(q);
      ch.herm_coef[base + r] = std::conj(ch.fwd_coef[base + q]);
    }
  }
  return ch;
}

namespace {

// Gather-multiply-reduce over a fixed number of path planes. Outputs are
// processed in blocks so each block's accumulator stays in cache while the
// path planes stream through.
void gather_reduce(std::size_t num_paths, std::size_t dim, const CVector& coef,
                   const std::vector<std::uint32_t>& idx, std::span<const cplx> v,
                   std::span<cplx> out) {
  constexpr std::size_t kBlock = 512;
  for (std::size_t start = 0; start < dim; start += kBlock) {
    const std::size_t stop = std::min(dim, start + kBlock);
    for (std::size_t i = start; i < stop; ++i) out[i] = cplx{};
    for (std::size_t p = 0; p < num_paths; ++p) {
      const cplx* c = coef.data() + p * dim;
      const std::uint32_t* ix = idx.data() + p * dim;
      for (std::size_t i = start; i < stop; ++i) out[i] += c[i] * v[ix[i]];
    }
  }
}

void check_lengths(const StructuredSparseChannel& ch, std::size_t in, std::size_t out) {
  if (in != ch.dim() || out != ch.dim()) {
    throw DimensionError("sparse MVM: vector length " + std::to_string(in) +
                         " does not match MN = " + std::to_string(ch.dim()));
  }
}

}  // namespace

void ss_mvm(const StructuredSparseChannel& ch, std::span<const cplx> v,
            std::span<cplx> out) {
  check_lengths(ch, v.size(), out.size());
  gather_reduce(ch.num_paths, ch.dim(), ch.fwd_coef, ch.fwd_col, v, out);
}

void ss_mvm_hermitian(const StructuredSparseChannel& ch, std::span<const cplx> v,
                      std::span<cplx> out) {
  check_lengths(ch, v.size(), out.size());
  gather_reduce(ch.num_paths, ch.dim(), ch.herm_coef, ch.herm_row, v, out);
}

CVector ss_mvm(const StructuredSparseChannel& ch, std::span<const cplx> v) {
  CVector out(ch.dim());
  ss_mvm(ch, v, out);
  return out;
}

CVector ss_mvm_hermitian(const StructuredSparseChannel& ch, std::span<const cplx> v) {
  CVector out(ch.dim());
  ss_mvm_hermitian(ch, v, out);
  return out;
}

void write_tables(std::ostream& os, const StructuredSparseChannel& ch) {
  os << "path,q,r,coef_re,coef_im\n";
  os.precision(17);
  const std::size_t mn = ch.dim();
  for (std::size_t p = 0; p < ch.num_paths; ++p) {
    for (std::size_t q = 0; q < mn; ++q) {
      const cplx c = ch.fwd_coef[p * mn + q];
      os << p << ',' << q << ',' << ch.fwd_col[p * mn + q] << ',' << c.real() << ','
         << c.imag() << '\n';
    }
  }
}

DenseChannel build_dense_hdd(const DdFrame& heff, const GridConfig& cfg) {
  if (!heff.matches(cfg)) throw DimensionError("build_dense_hdd: frame shape mismatch");
  if (cfg.size() > kDenseMaxDim) {
    throw ConfigError("dense H_dd limited to MN <= " + std::to_string(kDenseMaxDim) +
                      ", got " + std::to_string(cfg.size()));
  }
  const auto m = static_cast<long long>(cfg.m());
  const auto n = static_cast<long long>(cfg.n());
  const auto k0 = static_cast<long long>(cfg.k0());
  const auto l0 = static_cast<long long>(cfg.l0());
  const auto mn = m * n;

  DenseChannel d{CMatrix::Zero(mn, mn)};
  for (long long lo = 0; lo < n; ++lo) {
    for (long long ko = 0; ko < m; ++ko) {
      const long long row = lo * m + ko;
      for (long long li = 0; li < n; ++li) {
        const long long mw = floor_div(lo - li + n / 2, n);
        const long long dl = lo - li - mw * n;
        for (long long ki = 0; ki < m; ++ki) {
          const long long nw = floor_div(ko - ki + m / 2, m);
          const long long dk = ko - ki - nw * m;
          const cplx h = heff(static_cast<std::size_t>(dk + k0),
                              static_cast<std::size_t>(dl + l0));
          if (h == cplx{}) continue;
          const long long num = dl * (ki + nw * m) + nw * li * m;
          d.h_dd(row, li * m + ki) = h * unit_phase(num, mn);
        }
      }
    }
  }
  return d;
}

DdFrame sparsify_heff(const std::vector<DominantPath>& paths, const GridConfig& cfg) {
  DdFrame h(cfg);
  for (const auto& p : paths) {
    h(static_cast<std::size_t>(p.k), static_cast<std::size_t>(p.l)) = p.gain;
  }
  return h;
}

}  // namespace otfs
