#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>

#include "otfs/grid.hpp"

namespace otfs {

/// A thresholded tap of the absolute-grid effective channel.
/// d_k = K0 - k, d_l = L0 - l are the grid shifts the path induces.
struct DominantPath {
  int k = 0;
  int l = 0;
  cplx gain;
  int d_k = 0;
  int d_l = 0;

  static DominantPath at(int k, int l, cplx gain, const GridConfig& cfg);
};

/// Taps whose magnitude, relative to the strongest tap, exceeds theta.
/// Sorted by descending magnitude (ties by flat index). An all-zero frame
/// or a large theta yields an empty list; build_ss_channel rejects it.
std::vector<DominantPath> detect_paths(const DdFrame& heff, double theta);

/// Column of the p-th dominant entry in row q:
///   r = <l_q + d_l>_N * M + <k_q + d_k>_M
std::size_t forward_index(const DominantPath& path, std::size_t q,
                          const GridConfig& cfg);

/// Row whose forward image is r: q = <l_r - d_l>_N * M + <k_r - d_k>_M
std::size_t inverse_index(const DominantPath& path, std::size_t r,
                          const GridConfig& cfg);

/// D_{p,q} = h_p e^{j phi}, with
///   A   = K0 + k_q - k_p,   n = floor(A / M),   l' = <L0 + l_q - l_p>_N
///   phi = 2pi/MN * [(l_p - L0) A + n l' M]
/// This is the single surviving term of the dense construction at
/// [q, r_p(q)].
cplx coefficient(const DominantPath& path, std::size_t q, const GridConfig& cfg);

/// Path-indexed replacement for the MN x MN channel matrix. Each table is
/// path-major: entry (p, i) lives at p*MN + i.
///   forward:   u[q] = sum_p fwd_coef[p,q]  * v[fwd_col[p,q]]
///   hermitian: u[r] = sum_p herm_coef[p,r] * v[herm_row[p,r]]
struct StructuredSparseChannel {
  std::size_t num_paths = 0;
  std::size_t m = 0;
  std::size_t n = 0;
  CVector fwd_coef;
  std::vector<std::uint32_t> fwd_col;
  CVector herm_coef;
  std::vector<std::uint32_t> herm_row;
  std::vector<DominantPath> paths;

  std::size_t dim() const { return m * n; }
  /// Coefficient/index pairs stored per direction (P * MN).
  std::size_t entries_per_direction() const { return num_paths * dim(); }
  std::size_t memory_bytes() const;
};

StructuredSparseChannel build_ss_channel(const std::vector<DominantPath>& paths,
                                         const GridConfig& cfg);

CVector ss_mvm(const StructuredSparseChannel& ch, std::span<const cplx> v);
CVector ss_mvm_hermitian(const StructuredSparseChannel& ch, std::span<const cplx> v);

// Output-buffer variants used inside the equalizer loop.
void ss_mvm(const StructuredSparseChannel& ch, std::span<const cplx> v,
            std::span<cplx> out);
void ss_mvm_hermitian(const StructuredSparseChannel& ch, std::span<const cplx> v,
                      std::span<cplx> out);

/// Debug dump: path,q,r,coef_re,coef_im for the forward tables.
void write_tables(std::ostream& os, const StructuredSparseChannel& ch);

inline constexpr std::size_t kDenseMaxDim = 4096;

using CMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;

/// Full MN x MN channel matrix, rows and columns in flat q = l*M + k order.
/// Only for oracle use on small grids (MN <= 4096).
struct DenseChannel {
  CMatrix h_dd;
};

/// Dense construction from the absolute-grid effective channel. For each
/// (row, col) the signed shift (k'-k-nM, l'-l-mN) is wrapped into
/// [-M/2, M/2) x [-N/2, N/2); that single term contributes
///   e^{j2pi (l'-l-mN)(k+nM)/MN} * h[shift] * e^{j2pi n l / N}.
DenseChannel build_dense_hdd(const DdFrame& heff, const GridConfig& cfg);

/// Keeps only the taps listed in paths.
DdFrame sparsify_heff(const std::vector<DominantPath>& paths, const GridConfig& cfg);

}  // namespace otfs
