#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "starpdd/closed_form.hpp"
#include "starpdd/rng.hpp"

using namespace starpdd;

namespace {

ComplexVector single(Complex z) {
  ComplexVector v(1);
  v[0] = z;
  return v;
}

double block_objective(const ComplexVector& vt, const ComplexVector& vr,
                       const ComplexVector& theta_t,
                       const ComplexVector& theta_r) {
  double f = 0.0;
  for (Eigen::Index i = 0; i < vt.size(); ++i) {
    f += (std::conj(vt[i]) * theta_t[i]).real() +
         (std::conj(vr[i]) * theta_r[i]).real();
  }
  return f;
}

// alternate the two exact blocks to a fixed point; the coupled optimum
// reference for the relaxation-dominance checks
double coupled_block_optimum(Complex vt, Complex vr) {
  RealVector bt = RealVector::Constant(1, M_SQRT1_2);
  RealVector br = RealVector::Constant(1, M_SQRT1_2);
  ComplexVector pt = single(Complex{1.0, 0.0});
  ComplexVector pr = single(Complex{0.0, 1.0});
  const ComplexVector vts = single(vt);
  const ComplexVector vrs = single(vr);
  for (int round = 0; round < 50; ++round) {
    std::tie(pt, pr) = update_phases(bt, br, vts, vrs);
    const AmplitudeUpdate amp = update_amplitudes(pt, pr, vts, vrs);
    bt = amp.beta_t;
    br = amp.beta_r;
  }
  ComplexVector tt(1), tr(1);
  tt[0] = bt[0] * pt[0];
  tr[0] = br[0] * pr[0];
  return block_objective(vts, vrs, tt, tr);
}

}  // namespace

TEST_CASE("phase update matches the worked candidates") {
  const RealVector one = RealVector::Ones(1);

  // reflection target zero: tie between candidates, phi_plus wins
  auto [t0, r0] = update_phases(one, one, single({1.0, 0.0}),
                                single({0.0, 0.0}));
  CHECK(t0[0].real() == Catch::Approx(-1.0));
  CHECK(t0[0].imag() == Catch::Approx(0.0).margin(1e-15));
  CHECK(r0[0].real() == Catch::Approx(0.0).margin(1e-15));
  CHECK(r0[0].imag() == Catch::Approx(-1.0));

  // vt=1, vr=j: phi_plus branch attains -2, the degenerate phi_minus 0
  auto [t1, r1] = update_phases(one, one, single({1.0, 0.0}),
                                single({0.0, 1.0}));
  CHECK(t1[0].real() == Catch::Approx(-1.0));
  CHECK(r1[0].imag() == Catch::Approx(-1.0));
  const double f = block_objective(single({1.0, 0.0}), single({0.0, 1.0}),
                                   ComplexVector(t1), ComplexVector(r1));
  CHECK(f == Catch::Approx(-2.0));
}

TEST_CASE("phase update output is exactly on the coupled set") {
  Rng rng(5);
  const int n = 32;
  ComplexVector vt(n), vr(n);
  RealVector bt(n), br(n);
  for (int i = 0; i < n; ++i) {
    vt[i] = rng.complex_normal();
    vr[i] = rng.complex_normal();
    const double omega = rng.uniform(0.0, M_PI / 2.0);
    bt[i] = std::sin(omega);
    br[i] = std::cos(omega);
  }
  const auto [pt, pr] = update_phases(bt, br, vt, vr);
  for (int i = 0; i < n; ++i) {
    CHECK(std::abs(pt[i]) == Catch::Approx(1.0).margin(1e-12));
    // psi_r is an exact +-90 degree rotation of psi_t, so the coupling
    // residual Re(conj(psi_t) psi_r) cancels exactly in floating point
    CHECK((std::conj(pt[i]) * pr[i]).real() == 0.0);
  }
}

TEST_CASE("phase update never loses to the grid oracle") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const Complex vt = rng.complex_normal();
    const Complex vr = rng.complex_normal();
    const double omega = rng.uniform(0.0, M_PI / 2.0);
    const RealVector bt = RealVector::Constant(1, std::sin(omega));
    const RealVector br = RealVector::Constant(1, std::cos(omega));
    const auto [pt, pr] = update_phases(bt, br, single(vt), single(vr));
    const double closed =
        (std::conj(bt[0] * vt) * pt[0]).real() +
        (std::conj(br[0] * vr) * pr[0]).real();
    const double grid = oracles::phase_grid_min(bt[0] * vt, br[0] * vr);
    CHECK(closed <= grid + 1e-4);
  }
}

TEST_CASE("amplitude update follows the three-branch rule") {
  const ComplexVector unit = single({1.0, 0.0});

  // all mass to the transmit side; xi = pi lands in the else branch
  const auto p1 = make_element_amplitude_problem({1.0, 0.0}, {1.0, 0.0},
                                                 {-1.0, 0.0}, {0.0, 0.0});
  CHECK(p1.a == -1.0);
  CHECK(p1.b == 0.0);
  CHECK(p1.xi == Catch::Approx(M_PI));
  CHECK(p1.omega == Catch::Approx(M_PI / 2.0));
  const auto a1 = update_amplitudes(unit, unit, single({-1.0, 0.0}),
                                    single({0.0, 0.0}));
  CHECK(a1.beta_t[0] == 1.0);
  CHECK(a1.beta_r[0] == 0.0);

  // interior branch: xi = -3pi/4 -> omega = pi/4
  const auto p2 = make_element_amplitude_problem({1.0, 0.0}, {1.0, 0.0},
                                                 {-1.0, 0.0}, {-1.0, 0.0});
  CHECK(p2.xi == Catch::Approx(-3.0 * M_PI / 4.0));
  CHECK(p2.omega == Catch::Approx(M_PI / 4.0));
  const auto a2 = update_amplitudes(unit, unit, single({-1.0, 0.0}),
                                    single({-1.0, 0.0}));
  CHECK(a2.beta_t[0] == Catch::Approx(M_SQRT1_2));
  CHECK(a2.beta_r[0] == Catch::Approx(M_SQRT1_2));

  // endpoint tie at xi = pi/4: rule picks omega = pi/2, i.e. (1, 0)
  const auto a3 = update_amplitudes(unit, unit, single({1.0, 0.0}),
                                    single({1.0, 0.0}));
  CHECK(a3.beta_t[0] == 1.0);
  CHECK(a3.beta_r[0] == 0.0);

  // a = b = 0 is flagged and falls back to (0, 1)
  const auto a4 = update_amplitudes(unit, unit, single({0.0, 1.0}),
                                    single({0.0, 1.0}));
  CHECK(a4.beta_t[0] == 0.0);
  CHECK(a4.beta_r[0] == 1.0);
  REQUIRE(a4.degenerate.size() == 1);
  CHECK(a4.degenerate[0] == 0);
}

TEST_CASE("amplitude update never loses to the grid oracle") {
  Rng rng(29);
  for (int trial = 0; trial < 200; ++trial) {
    const Complex pt = std::polar(1.0, rng.uniform(0.0, kTwoPi));
    const Complex pr = std::polar(1.0, rng.uniform(0.0, kTwoPi));
    const Complex vt = rng.complex_normal();
    const Complex vr = rng.complex_normal();
    const auto amp = update_amplitudes(single(pt), single(pr), single(vt),
                                       single(vr));
    const double a = (std::conj(pt) * vt).real();
    const double b = (std::conj(pr) * vr).real();
    const double closed = a * amp.beta_t[0] + b * amp.beta_r[0];
    CHECK(closed <= oracles::amplitude_grid_min(a, b) + 1e-4);
    CHECK(amp.beta_t[0] * amp.beta_t[0] + amp.beta_r[0] * amp.beta_r[0] ==
          Catch::Approx(1.0).margin(1e-15));
  }
}

TEST_CASE("alternating blocks never increase the subproblem objective") {
  Rng rng(31);
  const int n = 8;
  for (int trial = 0; trial < 20; ++trial) {
    ComplexVector vt(n), vr(n);
    RealVector bt(n), br(n);
    ComplexVector pt(n), pr(n);
    for (int i = 0; i < n; ++i) {
      vt[i] = rng.complex_normal();
      vr[i] = rng.complex_normal();
      const double omega = rng.uniform(0.0, M_PI / 2.0);
      bt[i] = std::sin(omega);
      br[i] = std::cos(omega);
      pt[i] = std::polar(1.0, rng.uniform(0.0, kTwoPi));
      pr[i] = rng.uniform() < 0.5 ? detail::times_j(pt[i])
                                  : detail::times_minus_j(pt[i]);
    }
    auto compose = [&](ComplexVector& tt, ComplexVector& tr) {
      tt.resize(n);
      tr.resize(n);
      for (int i = 0; i < n; ++i) {
        tt[i] = bt[i] * pt[i];
        tr[i] = br[i] * pr[i];
      }
    };
    ComplexVector tt, tr;
    compose(tt, tr);
    double prev = block_objective(vt, vr, tt, tr);
    for (int round = 0; round < 20; ++round) {
      std::tie(pt, pr) = update_phases(bt, br, vt, vr);
      compose(tt, tr);
      const double after_phase = block_objective(vt, vr, tt, tr);
      CHECK(after_phase <= prev + 1e-12);
      const AmplitudeUpdate amp = update_amplitudes(pt, pr, vt, vr);
      bt = amp.beta_t;
      br = amp.beta_r;
      compose(tt, tr);
      const double after_amp = block_objective(vt, vr, tt, tr);
      CHECK(after_amp <= after_phase + 1e-12);
      prev = after_amp;
    }
  }
}

TEST_CASE("norm expansion identity holds on energy-feasible points") {
  Rng rng(37);
  const int n = 16;
  for (int trial = 0; trial < 20; ++trial) {
    ComplexVector vt(n), vr(n), tt(n), tr(n);
    for (int i = 0; i < n; ++i) {
      vt[i] = rng.complex_normal();
      vr[i] = rng.complex_normal();
      const double omega = rng.uniform(0.0, M_PI / 2.0);
      tt[i] = std::sin(omega) * std::polar(1.0, rng.uniform(0.0, kTwoPi));
      tr[i] = std::cos(omega) * std::polar(1.0, rng.uniform(0.0, kTwoPi));
    }
    const double lhs = (tt + vt).squaredNorm() + (tr + vr).squaredNorm();
    const double rhs = n + vt.squaredNorm() + vr.squaredNorm() +
                       2.0 * block_objective(vt, vr, tt, tr);
    CHECK(lhs == Catch::Approx(rhs).margin(1e-10));
  }
}

TEST_CASE("independent projection matches the worked examples") {
  const auto p1 = project_independent(single({1.0, 0.0}), single({0.0, 0.0}));
  CHECK(p1.theta_t[0].real() == Catch::Approx(-1.0));
  CHECK(p1.theta_r[0] == Complex{0.0, 0.0});
  CHECK(p1.degenerate.empty());

  const auto p2 = project_independent(single({3.0, 0.0}), single({4.0, 0.0}));
  CHECK(std::abs(p2.theta_t[0]) == Catch::Approx(0.6));
  CHECK(std::abs(p2.theta_r[0]) == Catch::Approx(0.8));
  CHECK(wrap_angle(std::arg(p2.theta_t[0])) == Catch::Approx(M_PI));
  CHECK(wrap_angle(std::arg(p2.theta_r[0])) == Catch::Approx(M_PI));
  const double obj = block_objective(single({3.0, 0.0}), single({4.0, 0.0}),
                                     ComplexVector(p2.theta_t),
                                     ComplexVector(p2.theta_r));
  CHECK(obj == Catch::Approx(-5.0));

  const auto p3 = project_independent(single({0.0, 0.0}), single({0.0, 0.0}));
  CHECK(p3.theta_t[0] == Complex{0.0, 0.0});
  CHECK(p3.theta_r[0] == Complex{1.0, 0.0});
  REQUIRE(p3.degenerate.size() == 1);
}

TEST_CASE("independent projection dominates the coupled optimum") {
  Rng rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const Complex vt = rng.complex_normal();
    const Complex vr = rng.complex_normal();
    const auto proj = project_independent(single(vt), single(vr));
    const double indep = block_objective(single(vt), single(vr),
                                         ComplexVector(proj.theta_t),
                                         ComplexVector(proj.theta_r));
    CHECK(indep == Catch::Approx(-std::hypot(std::abs(vt), std::abs(vr)))
                       .margin(1e-12));
    CHECK(indep <= coupled_block_optimum(vt, vr) + 1e-12);
  }
}

TEST_CASE("unit-modulus projection opposes its target") {
  const ComplexVector r1 = project_unit_modulus(single({1.0, 0.0}));
  CHECK(r1[0].real() == Catch::Approx(-1.0));

  // target j: objective -1 is attained at -j only
  const ComplexVector r2 = project_unit_modulus(single({0.0, 1.0}));
  CHECK(r2[0].imag() == Catch::Approx(-1.0));
  CHECK((std::conj(Complex{0.0, 1.0}) * r2[0]).real() == Catch::Approx(-1.0));

  const ComplexVector r3 = project_unit_modulus(single({0.0, 0.0}));
  CHECK(r3[0] == Complex{-1.0, 0.0});

  Rng rng(43);
  ComplexVector v(64);
  for (int i = 0; i < 64; ++i) v[i] = rng.complex_normal();
  const ComplexVector psi = project_unit_modulus(v);
  double obj = 0.0;
  double mags = 0.0;
  for (int i = 0; i < 64; ++i) {
    obj += (std::conj(v[i]) * psi[i]).real();
    mags += std::abs(v[i]);
  }
  CHECK(obj == Catch::Approx(-mags).margin(1e-12));
}

TEST_CASE("closed-form updates reject malformed inputs") {
  const RealVector one = RealVector::Ones(1);
  const ComplexVector v2 = ComplexVector::Zero(2);
  CHECK_THROWS_AS(update_phases(one, one, single({1.0, 0.0}), v2),
                  InvalidInputError);
  RealVector bad = RealVector::Constant(1, 1.5);
  CHECK_THROWS_AS(update_phases(bad, one, single({1.0, 0.0}),
                                single({1.0, 0.0})),
                  InvalidInputError);
  ComplexVector not_unit = single({0.5, 0.0});
  CHECK_THROWS_AS(update_amplitudes(not_unit, single({1.0, 0.0}),
                                    single({1.0, 0.0}), single({1.0, 0.0})),
                  InvalidInputError);
  CHECK_THROWS_AS(project_independent(single({1.0, 0.0}), v2),
                  InvalidInputError);
}
