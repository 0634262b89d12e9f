#include <doctest.h>

#include <set>
#include <sstream>

#include "support.hpp"

using namespace otfs;
using otfs::test::loopback_estimate;
using otfs::test::max_abs_diff;
using otfs::test::random_cvector;

namespace {

// Channel matrix measured end to end: column r is the received DD frame
// when the transmitted frame is the r-th unit vector.
CMatrix measured_hdd(const PathSet& ps, const GridConfig& g) {
  const auto mn = static_cast<Eigen::Index>(g.size());
  CMatrix h(mn, mn);
  for (Eigen::Index r = 0; r < mn; ++r) {
    CVector e(g.size());
    e[static_cast<std::size_t>(r)] = 1.0;
    const DdFrame y = dzt(apply_channel(idzt(unflatten(e, g), g), ps, g), g);
    const CVector col = flatten(y, g);
    for (Eigen::Index q = 0; q < mn; ++q) h(q, r) = col[static_cast<std::size_t>(q)];
  }
  return h;
}

CVector dense_times(const CMatrix& h, const CVector& v, bool adjoint) {
  Eigen::Map<const Eigen::VectorXcd> vm(v.data(), static_cast<Eigen::Index>(v.size()));
  const Eigen::VectorXcd out = adjoint ? Eigen::VectorXcd(h.adjoint() * vm) : Eigen::VectorXcd(h * vm);
  return CVector(out.data(), out.data() + out.size());
}

DominantPath random_path(const GridConfig& g, Rng& rng) {
  std::uniform_int_distribution<int> k(0, static_cast<int>(g.m()) - 1);
  std::uniform_int_distribution<int> l(0, static_cast<int>(g.n()) - 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return DominantPath::at(k(rng), l(rng), std::polar(0.2 + u(rng), 6.283 * u(rng)), g);
}

PathSet fig3_channel(const GridConfig& g) {
  return PathSet{{PathSpec::on_grid(1.0, 0, 0.0, g), PathSpec::on_grid(1.0, 4, 1.0, g)}};
}

}  // namespace

TEST_CASE("worked index example on (8,2)") {
  const GridConfig g(8, 2);
  const auto p0 = DominantPath::at(4, 1, 1.0, g);
  const auto p1 = DominantPath::at(0, 0, 1.0, g);
  CHECK(p0.d_k == 0);
  CHECK(p0.d_l == 0);
  CHECK(p1.d_k == 4);
  CHECK(p1.d_l == 1);
  CHECK(forward_index(p0, 7, g) == 7);
  CHECK(forward_index(p1, 7, g) == 11);
  CHECK(inverse_index(p1, 11, g) == 7);
  CHECK(inverse_index(p0, 7, g) == 7);
}

TEST_CASE("zero-shift path maps every index to itself") {
  for (auto [m, n] : {std::pair<std::size_t, std::size_t>{8, 2}, {16, 8}, {32, 32}}) {
    const GridConfig g(m, n);
    const auto p = DominantPath::at(static_cast<int>(g.k0()), static_cast<int>(g.l0()), 1.0, g);
    for (std::size_t q = 0; q < g.size(); ++q) {
      CHECK(forward_index(p, q, g) == q);
      CHECK(inverse_index(p, q, g) == q);
    }
  }
}

TEST_CASE("forward and inverse maps are inverse permutations") {
  Rng rng(1);
  for (auto [m, n] : {std::pair<std::size_t, std::size_t>{16, 8}, {6, 4}, {64, 2}}) {
    const GridConfig g(m, n);
    for (int trial = 0; trial < 10; ++trial) {
      const DominantPath p = random_path(g, rng);
      std::vector<bool> seen(g.size(), false);
      for (std::size_t q = 0; q < g.size(); ++q) {
        const std::size_t r = forward_index(p, q, g);
        REQUIRE(r < g.size());
        CHECK_FALSE(seen[r]);
        seen[r] = true;
        CHECK(inverse_index(p, r, g) == q);
        CHECK(forward_index(p, inverse_index(p, q, g), g) == q);
      }
    }
  }
}

TEST_CASE("coefficient magnitude and the zero-shift case") {
  Rng rng(2);
  const GridConfig g(16, 8);
  for (int trial = 0; trial < 20; ++trial) {
    const DominantPath p = random_path(g, rng);
    for (std::size_t q = 0; q < g.size(); ++q) {
      CHECK(std::abs(std::abs(coefficient(p, q, g)) - std::abs(p.gain)) < 1e-14);
    }
  }
  const cplx h{0.3, -0.4};
  const auto z = DominantPath::at(8, 4, h, g);
  for (std::size_t q = 0; q < g.size(); ++q) {
    if (q % g.m() < g.k0()) CHECK(std::abs(coefficient(z, q, g) - h) < 1e-15);
  }
}

TEST_CASE("tables agree with the scalar index and coefficient functions") {
  Rng rng(3);
  for (auto [m, n] : {std::pair<std::size_t, std::size_t>{8, 2}, {16, 8}, {6, 10}, {128, 32}}) {
    const GridConfig g(m, n);
    std::vector<DominantPath> paths;
    for (int p = 0; p < 5; ++p) paths.push_back(random_path(g, rng));
    const StructuredSparseChannel ch = build_ss_channel(paths, g);
    REQUIRE(ch.entries_per_direction() == 5 * g.size());
    double err = 0.0;
    bool idx_ok = true;
    for (std::size_t p = 0; p < paths.size(); ++p) {
      for (std::size_t q = 0; q < g.size(); ++q) {
        const std::size_t at = p * g.size() + q;
        idx_ok = idx_ok && ch.fwd_col[at] == forward_index(paths[p], q, g) &&
                 ch.herm_row[at] == inverse_index(paths[p], q, g);
        err = std::max(err, std::abs(ch.fwd_coef[at] - coefficient(paths[p], q, g)));
        const std::size_t src = ch.herm_row[at];
        err = std::max(err, std::abs(ch.herm_coef[at] - std::conj(ch.fwd_coef[p * g.size() + src])));
      }
    }
    CHECK(idx_ok);
    CHECK(err < 1e-13);
  }
}

TEST_CASE("dense construction equals the measured channel matrix") {
  Rng rng(4);
  const GridConfig g(16, 8);
  std::uniform_int_distribution<int> dk(0, 7), dl(-4, 3);
  for (int trial = 0; trial < 6; ++trial) {
    PathSet ps;
    for (int p = 0; p < 3; ++p) {
      ps.paths.push_back(PathSpec::on_grid(std::polar(1.0, 1.1 * p + trial), dk(rng), dl(rng), g));
    }
    const DdFrame heff = loopback_estimate(ps, g);
    const DenseChannel dense = build_dense_hdd(heff, g);
    const CMatrix meas = measured_hdd(ps, g);
    CHECK((dense.h_dd - meas).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("identity effective channel gives the identity matrix") {
  const GridConfig g(8, 4);
  DdFrame h(g);
  h(g.k0(), g.l0()) = 1.0;
  const DenseChannel d = build_dense_hdd(h, g);
  CHECK((d.h_dd - CMatrix::Identity(32, 32)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("two-path (8,2) example: detection and matrix pattern") {
  const GridConfig g(8, 2);
  const DdFrame heff = loopback_estimate(fig3_channel(g), g);
  const auto paths = detect_paths(heff, 0.12);
  REQUIRE(paths.size() == 2);
  std::set<std::pair<int, int>> where;
  for (const auto& p : paths) where.insert({p.k, p.l});
  CHECK(where == std::set<std::pair<int, int>>{{4, 1}, {0, 0}});

  const DenseChannel dense = build_dense_hdd(sparsify_heff(paths, g), g);
  const StructuredSparseChannel ch = build_ss_channel(paths, g);
  for (std::size_t q = 0; q < g.size(); ++q) {
    std::set<std::size_t> expect;
    for (std::size_t p = 0; p < 2; ++p) expect.insert(ch.fwd_col[p * g.size() + q]);
    std::set<std::size_t> got;
    for (std::size_t r = 0; r < g.size(); ++r) {
      if (std::abs(dense.h_dd(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(r))) > 1e-12) {
        got.insert(r);
      }
    }
    CHECK(got == expect);
    for (std::size_t p = 0; p < 2; ++p) {
      const std::size_t r = ch.fwd_col[p * g.size() + q];
      CHECK(std::abs(ch.fwd_coef[p * g.size() + q] -
                     dense.h_dd(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(r))) < 1e-9);
    }
  }
}

TEST_CASE("detect_paths thresholds normalized magnitudes") {
  const GridConfig g(16, 8);
  DdFrame h(g);
  h(3, 2) = {0.0, 2.0};
  h(8, 4) = 1.0;
  h(0, 7) = 0.1;
  h(15, 0) = {0.5, 0.5};
  CHECK(detect_paths(h, 0.0).size() == 4);
  const auto p = detect_paths(h, 0.2);
  REQUIRE(p.size() == 3);
  CHECK(p[0].k == 3);
  CHECK(p[1].k == 8);
  CHECK(p[2].k == 15);
  CHECK(p[0].gain == cplx{0.0, 2.0});
  CHECK(p[1].d_k == 0);
  CHECK(p[1].d_l == 0);
  // Exactly at the threshold is not above it.
  CHECK(detect_paths(h, 0.5).size() == 1);
  CHECK(detect_paths(h, 1.0).empty());
  CHECK(detect_paths(DdFrame(g), 0.1).empty());
  CHECK_THROWS_AS(detect_paths(h, -0.1), ConfigError);
}

TEST_CASE("noiseless Veh-A recovers six paths at theta = 0.08") {
  Rng rng(5);
  const GridConfig g(128, 32);
  for (int trial = 0; trial < 10; ++trial) {
    const PathSet ps = draw_veha(0.0, g, rng);
    CHECK(detect_paths(loopback_estimate(ps, g), 0.08).size() == 6);
  }
}

TEST_CASE("empty path list is rejected") {
  CHECK_THROWS_AS(build_ss_channel({}, GridConfig(8, 2)), EmptyChannelError);
}

TEST_CASE("storage is P*MN per direction") {
  const GridConfig g(48, 32);
  Rng rng(6);
  std::vector<DominantPath> paths;
  for (int p = 0; p < 5; ++p) paths.push_back(random_path(g, rng));
  const StructuredSparseChannel ch = build_ss_channel(paths, g);
  CHECK(ch.entries_per_direction() == 7680);
  CHECK(ch.fwd_coef.size() == 7680);
  CHECK(ch.fwd_col.size() == 7680);
  CHECK(ch.herm_coef.size() == 7680);
  CHECK(ch.herm_row.size() == 7680);
  CHECK(ch.memory_bytes() == 2 * 7680 * (sizeof(cplx) + sizeof(std::uint32_t)));
}

TEST_CASE("unit zero-shift path: tables and MVMs are the identity") {
  const GridConfig g(16, 8);
  const auto p = DominantPath::at(8, 4, 1.0, g);
  const StructuredSparseChannel ch = build_ss_channel({p}, g);
  for (std::size_t q = 0; q < g.size(); ++q) {
    CHECK(ch.fwd_coef[q] == cplx{1.0});
    CHECK(ch.fwd_col[q] == q);
  }
  Rng rng(7);
  const CVector v = random_cvector(g.size(), rng);
  CHECK(max_abs_diff(ss_mvm(ch, v), v) < 1e-15);
  CHECK(max_abs_diff(ss_mvm_hermitian(ch, v), v) < 1e-15);
}

TEST_CASE("pilot impulse through P paths gives P nonzeros") {
  Rng rng(8);
  const GridConfig g(32, 16);
  for (std::size_t np = 1; np <= 6; ++np) {
    const DdFrame heff = random_sparse_heff(g, np, rng);
    const StructuredSparseChannel ch = build_ss_channel(detect_paths(heff, 0.0), g);
    const CVector v = flatten(make_pilot_frame(g, 1.0), g);
    CHECK(otfs::test::count_nonzero(ss_mvm(ch, v), 1e-12) == np);
  }
}

TEST_CASE("sparse MVMs match the dense matrix on random channels") {
  Rng rng(9);
  for (auto [m, n] : {std::pair<std::size_t, std::size_t>{16, 8}, {8, 2}, {32, 16}, {10, 6}}) {
    const GridConfig g(m, n);
    for (std::size_t np = 1; np <= 7; ++np) {
      const DdFrame heff = random_sparse_heff(g, np, rng);
      const StructuredSparseChannel ch = build_ss_channel(detect_paths(heff, 0.0), g);
      const DenseChannel dense = build_dense_hdd(heff, g);
      const CVector v = random_cvector(g.size(), rng);
      CHECK(max_abs_diff(ss_mvm(ch, v), dense_times(dense.h_dd, v, false)) < 1e-9);
      CHECK(max_abs_diff(ss_mvm_hermitian(ch, v), dense_times(dense.h_dd, v, true)) < 1e-9);

      const CVector a = random_cvector(g.size(), rng), b = random_cvector(g.size(), rng);
      const CVector ha = ss_mvm(ch, a), hb = ss_mvm_hermitian(ch, b);
      cplx lhs{}, rhs{};
      for (std::size_t i = 0; i < g.size(); ++i) {
        lhs += std::conj(ha[i]) * b[i];
        rhs += std::conj(a[i]) * hb[i];
      }
      CHECK(std::abs(lhs - rhs) / std::abs(lhs) < 1e-9);
    }
  }
}

TEST_CASE("MVM length checks") {
  const GridConfig g(8, 2);
  const StructuredSparseChannel ch = build_ss_channel({DominantPath::at(1, 1, 1.0, g)}, g);
  CHECK_THROWS_AS(ss_mvm(ch, CVector(15)), DimensionError);
  CHECK_THROWS_AS(ss_mvm_hermitian(ch, CVector(17)), DimensionError);
  CVector out(15);
  CHECK_THROWS_AS(ss_mvm(ch, CVector(16), out), DimensionError);
}

TEST_CASE("dense guard and shape checks") {
  CHECK_THROWS_AS(build_dense_hdd(DdFrame(GridConfig(128, 64)), GridConfig(128, 64)), ConfigError);
  CHECK_NOTHROW(build_dense_hdd(DdFrame(GridConfig(8, 4)), GridConfig(8, 4)));
  CHECK_THROWS_AS(build_dense_hdd(DdFrame(4, 8), GridConfig(8, 4)), DimensionError);
}

TEST_CASE("sparsify keeps only the listed taps") {
  Rng rng(10);
  const GridConfig g(16, 8);
  const DdFrame heff = random_sparse_heff(g, 5, rng);
  auto paths = detect_paths(heff, 0.0);
  paths.resize(3);
  const DdFrame s = sparsify_heff(paths, g);
  CHECK(otfs::test::count_nonzero(s.values(), 0.0) == 3);
  for (const auto& p : paths) {
    CHECK(s(static_cast<std::size_t>(p.k), static_cast<std::size_t>(p.l)) == p.gain);
  }
}

TEST_CASE("table dump format") {
  const GridConfig g(8, 2);
  const StructuredSparseChannel ch =
      build_ss_channel({DominantPath::at(4, 1, 1.0, g), DominantPath::at(0, 0, 1.0, g)}, g);
  std::stringstream ss;
  write_tables(ss, ch);
  std::string line;
  std::getline(ss, line);
  CHECK(line == "path,q,r,coef_re,coef_im");
  std::size_t rows = 0;
  bool found = false;
  while (std::getline(ss, line)) {
    ++rows;
    if (line.rfind("1,7,11,", 0) == 0) found = true;
  }
  CHECK(rows == 32);
  CHECK(found);
}
