#include <doctest.h>

#include "support.hpp"

using namespace otfs;
using otfs::test::count_nonzero;
using otfs::test::loopback_estimate;
using otfs::test::max_abs_diff;
using otfs::test::random_frame;
using otfs::test::single_path;

TEST_CASE("pilot frame placement and energy") {
  const DdFrame p82 = make_pilot_frame(GridConfig(8, 2));
  CHECK(p82(4, 1) == cplx{4.0});
  CHECK(count_nonzero(p82.values(), 0.0) == 1);

  const DdFrame p44 = make_pilot_frame(GridConfig(4, 4), 4.0);
  CHECK(p44.energy() == doctest::Approx(16.0));
  CHECK(p44(2, 2) == cplx{4.0});

  const DdFrame p22 = make_pilot_frame(GridConfig(2, 2));
  CHECK(p22(1, 1) == cplx{2.0});
  CHECK(default_pilot_amplitude(GridConfig(32, 32)) == doctest::Approx(32.0));

  CHECK_THROWS_AS(make_pilot_frame(GridConfig(4, 4), 0.0), ConfigError);
  CHECK_THROWS_AS(make_pilot_frame(GridConfig(4, 4), -1.0), ConfigError);
}

TEST_CASE("twist kernel is unit magnitude and constant along delay") {
  const GridConfig g(16, 8);
  const TwistKernel t = TwistKernel::build(g);
  for (std::size_t l = 0; l < g.n(); ++l) {
    const double ang = -2.0 * std::numbers::pi * static_cast<double>(g.k0()) *
                       (static_cast<double>(l) - static_cast<double>(g.l0())) /
                       static_cast<double>(g.size());
    for (std::size_t k = 0; k < g.m(); ++k) {
      CHECK(std::abs(std::abs(t.e_twist(k, l)) - 1.0) < 1e-15);
      CHECK(t.e_twist(k, l) == t.e_twist(0, l));
    }
    CHECK(std::abs(t.e_twist(0, l) - std::polar(1.0, ang)) < 1e-14);
  }
}

TEST_CASE("identity channel estimate is a unit tap at the origin") {
  for (auto [m, n] : {std::pair<std::size_t, std::size_t>{8, 2}, {32, 32}, {128, 32}}) {
    const GridConfig g(m, n);
    const DdFrame h = loopback_estimate(single_path(1.0, 0, 0.0, g), g);
    CHECK(std::abs(h(g.k0(), g.l0()) - 1.0) < 1e-9);
    DdFrame off = h;
    off(g.k0(), g.l0()) = 0.0;
    for (const cplx& x : off.values()) CHECK(std::abs(x) < 1e-9);
  }
}

TEST_CASE("single integer-shift path lands at (K0+dk, L0+dl)") {
  Rng rng(3);
  std::uniform_int_distribution<int> pick_dk(0, 7), pick_dl(-4, 4);
  const GridConfig g(32, 16);
  for (int trial = 0; trial < 30; ++trial) {
    const int dk = pick_dk(rng), dl = pick_dl(rng);
    const cplx gain = std::polar(0.3 + 0.05 * trial, 0.4 * trial);
    const DdFrame h = loopback_estimate(single_path(gain, dk, dl, g), g);
    const auto k = static_cast<std::size_t>((static_cast<int>(g.k0()) + dk) % 32);
    const auto l = static_cast<std::size_t>((static_cast<int>(g.l0()) + dl + 16) % 16);
    CHECK(std::abs(std::abs(h(k, l)) - std::abs(gain)) < 1e-9);
    // Small delays (below M/2) come back with the exact gain.
    CHECK(std::abs(h(k, l) - gain) < 1e-9);
    CHECK(count_nonzero(h.values(), 1e-9) == 1);
  }
}

TEST_CASE("estimate matches ground truth for integer-Doppler channels") {
  Rng rng(4);
  const GridConfig g(128, 32);
  for (int trial = 0; trial < 5; ++trial) {
    PathSet ps = draw_veha(0.0, g, rng);
    std::uniform_int_distribution<int> pick(-3, 3);
    for (auto& p : ps.paths) p = PathSpec::on_grid(p.gain, p.delay_bin, pick(rng), g);
    const DdFrame truth = ground_truth_heff(ps, g);
    const DdFrame est = loopback_estimate(ps, g);
    CHECK(max_abs_diff(est.values(), truth.values()) < 1e-9);
  }
}

TEST_CASE("two-path (8,2) example: taps at (4,1) and (0,0)") {
  const GridConfig g(8, 2);
  PathSet ps{{PathSpec::on_grid(1.0, 0, 0.0, g), PathSpec::on_grid(1.0, 4, 1.0, g)}};
  const DdFrame h = loopback_estimate(ps, g);
  CHECK(std::abs(std::abs(h(4, 1)) - 1.0) < 1e-9);
  CHECK(std::abs(std::abs(h(0, 0)) - 1.0) < 1e-9);
  CHECK(count_nonzero(h.values(), 1e-9) == 2);
}

TEST_CASE("estimate is linear in the received frame") {
  Rng rng(5);
  const GridConfig g(16, 8);
  const TwistKernel t = TwistKernel::build(g);
  const DdFrame a = random_frame(g, rng), b = random_frame(g, rng);
  DdFrame mix(g);
  const cplx alpha{1.5, -0.5}, beta{0.0, 2.0};
  for (std::size_t i = 0; i < g.size(); ++i) {
    mix.values()[i] = alpha * a.values()[i] + beta * b.values()[i];
  }
  const DdFrame ea = estimate_heff(a, t, 3.0), eb = estimate_heff(b, t, 3.0);
  const DdFrame em = estimate_heff(mix, t, 3.0);
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    err = std::max(err, std::abs(em.values()[i] - alpha * ea.values()[i] - beta * eb.values()[i]));
  }
  CHECK(err < 1e-12);
}

TEST_CASE("estimate rejects bad amplitude and shape") {
  const GridConfig g(8, 4);
  const TwistKernel t = TwistKernel::build(g);
  CHECK_THROWS_AS(estimate_heff(DdFrame(g), t, 0.0), ConfigError);
  CHECK_THROWS_AS(estimate_heff(DdFrame(4, 8), t, 1.0), DimensionError);
}

TEST_CASE("at 30 dB the six Veh-A taps are the six largest estimates") {
  const GridConfig g(128, 32);
  const ZakKernel zk = build_zak_kernel(g);
  const TwistKernel t = TwistKernel::build(g);
  const DdFrame pilot = make_pilot_frame(g);
  const TimeSignal tx = idzt(pilot, g);
  const int trials = 200;
  int hits = 0;
  for (int s = 0; s < trials; ++s) {
    Rng rng = packet_rng(99, static_cast<std::uint64_t>(s));
    const PathSet ps = draw_veha(0.0, g, rng);
    const TimeSignal y = add_awgn(apply_channel(tx, ps, g), 30.0, rng);
    const DdFrame est = estimate_heff(dzt_gemm(y, zk, g), t, default_pilot_amplitude(g));
    const DdFrame truth = ground_truth_heff(ps, g);
    const auto top = detect_paths(est, 0.0);
    bool ok = top.size() >= 6;
    for (std::size_t i = 0; ok && i < 6; ++i) {
      ok = truth(static_cast<std::size_t>(top[i].k), static_cast<std::size_t>(top[i].l)) != cplx{};
    }
    hits += ok ? 1 : 0;
  }
  CHECK(hits >= static_cast<int>(0.99 * trials));
}
