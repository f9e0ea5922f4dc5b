#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "starpdd/baselines.hpp"

using namespace starpdd;

namespace {

ChannelSet small_channels(std::uint64_t seed, int n = 8, int k = 4,
                          int m = 4) {
  SystemConfig cfg;
  cfg.n = n;
  cfg.k = k;
  cfg.m = m;
  cfg.seed = seed;
  return generate_channels(cfg);
}

double default_pt() { return SystemConfig{}.pt_watts(); }

SolveOptions seeded_options(std::uint64_t seed) {
  SolveOptions opts;
  opts.init_seed = seed;
  return opts;
}

}  // namespace

TEST_CASE("scheme names round-trip and reject unknowns") {
  for (const SchemeId id : all_schemes()) {
    CHECK(parse_scheme(scheme_name(id)) == id);
  }
  CHECK(all_schemes().size() == 6);
  CHECK_THROWS_AS(parse_scheme("abc"), InvalidInputError);
  CHECK_THROWS_AS(parse_scheme(""), InvalidInputError);
}

TEST_CASE("output validation catches constraint violations") {
  StarCoefficients c;
  c.beta_t = RealVector::Constant(2, M_SQRT1_2);
  c.beta_r = RealVector::Constant(2, M_SQRT1_2);
  c.phi_t = RealVector::Zero(2);
  c.phi_r = RealVector::Constant(2, M_PI / 2.0);
  CHECK_NOTHROW(validate_scheme_output(SchemeId::CoupledPdd, c));

  StarCoefficients bad_energy = c;
  bad_energy.beta_t[0] = 1.0;
  CHECK_THROWS_AS(validate_scheme_output(SchemeId::CoupledPdd, bad_energy),
                  InternalError);
  CHECK_THROWS_AS(validate_scheme_output(SchemeId::IndependentStar, bad_energy),
                  InternalError);

  StarCoefficients bad_phase = c;
  bad_phase.phi_r[1] = 0.3;
  CHECK_THROWS_AS(validate_scheme_output(SchemeId::PsPscT, bad_phase),
                  InternalError);
  // the independent scheme does not own the phase coupling
  CHECK_NOTHROW(validate_scheme_output(SchemeId::IndependentStar, bad_phase));
}

TEST_CASE("independent relaxation dominates coupled PDD per seed") {
  int clustered = 0;
  int total = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const ChannelSet cs = small_channels(seed);
    const SolveOptions opts = seeded_options(seed);
    const SchemeResult coupled = solve_coupled_pdd(cs, default_pt(), opts);
    const SchemeResult indep = solve_independent(cs, default_pt(), opts);

    CHECK(indep.rate >= coupled.rate * (1.0 - 1e-3));

    const ConstraintResiduals res = constraint_residuals(indep.coefficients);
    CHECK(res.energy.cwiseAbs().maxCoeff() <= 1e-12);

    // count gaps near the coupled values pi/2, 3pi/2
    for (Eigen::Index i = 0; i < indep.coefficients.size(); ++i) {
      const double gap = wrap_angle(indep.coefficients.phi_t[i] -
                                    indep.coefficients.phi_r[i]);
      const double d = std::min(std::abs(gap - M_PI / 2.0),
                                std::abs(gap - 3.0 * M_PI / 2.0));
      if (d < 0.1) ++clustered;
      ++total;
    }
  }
  // phase gaps are unconstrained: they must not all sit on the coupled set
  CHECK(clustered < total / 2);
}

TEST_CASE("conventional split keeps its structure and loses to independent") {
  const ChannelSet cs = small_channels(3, 2, 2, 2);
  const SolveOptions opts = seeded_options(3);
  const SchemeResult conv = solve_conventional(cs, default_pt(), opts);

  REQUIRE(conv.coefficients.size() == 2);
  CHECK(conv.coefficients.beta_t[0] == 1.0);
  CHECK(conv.coefficients.beta_r[0] == 0.0);
  CHECK(conv.coefficients.beta_t[1] == 0.0);
  CHECK(conv.coefficients.beta_r[1] == 1.0);
  CHECK_NOTHROW(validate_scheme_output(SchemeId::ConventionalRis,
                                       conv.coefficients));

  const SchemeResult indep = solve_independent(cs, default_pt(), opts);
  CHECK(conv.rate <= indep.rate * (1.0 + 1e-3));

  // odd element counts cannot split in half
  const ChannelSet odd = small_channels(3, 3, 2, 2);
  CHECK_THROWS_AS(solve_conventional(odd, default_pt(), opts),
                  InvalidInputError);
}

TEST_CASE("conventional structure holds at paper scale") {
  const ChannelSet cs = small_channels(1, 10, 4, 4);
  const SchemeResult conv =
      solve_conventional(cs, default_pt(), seeded_options(1));
  for (Eigen::Index i = 0; i < 10; ++i) {
    const bool transmit_half = i < 5;
    CHECK(conv.coefficients.beta_t[i] == (transmit_half ? 1.0 : 0.0));
    CHECK(conv.coefficients.beta_r[i] == (transmit_half ? 0.0 : 1.0));
  }
}

TEST_CASE("PS-PSC is coupled-feasible and copies the primary side") {
  for (const Side primary : {Side::Transmit, Side::Reflect}) {
    const ChannelSet cs = small_channels(5);
    const SolveOptions opts = seeded_options(5);
    const SchemeResult ps = solve_pspsc(cs, default_pt(), opts, primary);
    const SchemeResult indep = solve_independent(cs, default_pt(), opts);

    const ConstraintResiduals res = constraint_residuals(ps.coefficients);
    CHECK(res.max_abs() <= 1e-12);

    const bool primary_t = primary == Side::Transmit;
    const RealVector& beta_p =
        primary_t ? ps.coefficients.beta_t : ps.coefficients.beta_r;
    const RealVector& phi_p =
        primary_t ? ps.coefficients.phi_t : ps.coefficients.phi_r;
    const RealVector& ibeta =
        primary_t ? indep.coefficients.beta_t : indep.coefficients.beta_r;
    const RealVector& iphi =
        primary_t ? indep.coefficients.phi_t : indep.coefficients.phi_r;
    const RealVector& beta_s =
        primary_t ? ps.coefficients.beta_r : ps.coefficients.beta_t;
    const RealVector& phi_s =
        primary_t ? ps.coefficients.phi_r : ps.coefficients.phi_t;

    for (Eigen::Index i = 0; i < 8; ++i) {
      // bit-identical primary copy
      CHECK(beta_p[i] == ibeta[i]);
      CHECK(phi_p[i] == iphi[i]);
      // secondary amplitude closes the energy budget
      CHECK(beta_s[i] ==
            std::sqrt(std::max(0.0, 1.0 - beta_p[i] * beta_p[i])));
      // secondary phase sits a quarter turn from the primary
      const double gap = wrap_angle(phi_s[i] - phi_p[i]);
      const double d = std::min(std::abs(gap - M_PI / 2.0),
                                std::abs(gap - 3.0 * M_PI / 2.0));
      CHECK(d < 1e-12);
    }
  }
}

TEST_CASE("PS-PSC mean rate stays below coupled PDD") {
  double ps_sum = 0.0;
  double pdd_sum = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const ChannelSet cs = small_channels(seed);
    const SolveOptions opts = seeded_options(seed);
    ps_sum += solve_pspsc(cs, default_pt(), opts, Side::Transmit).rate;
    pdd_sum += solve_coupled_pdd(cs, default_pt(), opts).rate;
  }
  CHECK(ps_sum / 20.0 <= pdd_sum / 20.0);
}

TEST_CASE("AO stays coupled-feasible and below coupled PDD on average") {
  double ao_sum = 0.0;
  double pdd_sum = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const ChannelSet cs = small_channels(seed);
    const SolveOptions opts = seeded_options(seed);
    const SchemeResult ao = solve_ao(cs, default_pt(), opts);
    CHECK_NOTHROW(validate_scheme_output(SchemeId::CoupledAo,
                                         ao.coefficients));
    const ConstraintResiduals res = constraint_residuals(ao.coefficients);
    CHECK(res.max_abs() <= 1e-9);
    ao_sum += ao.rate;
    pdd_sum += solve_coupled_pdd(cs, default_pt(), opts).rate;
  }
  CHECK(ao_sum / 10.0 <= pdd_sum / 10.0);

  SolveOptions coarse = seeded_options(1);
  coarse.ao_amp_levels = 1;
  CHECK_THROWS_AS(solve_ao(small_channels(1), default_pt(), coarse),
                  InvalidInputError);
}

TEST_CASE("fine-grid AO approaches coupled PDD on a micro instance") {
  const ChannelSet cs = small_channels(7, 1, 2, 2);
  SolveOptions opts = seeded_options(7);
  opts.ao_amp_levels = 201;
  opts.ao_phase_levels = 256;
  const SchemeResult ao = solve_ao(cs, default_pt(), opts);
  const SchemeResult pdd =
      solve_coupled_pdd(cs, default_pt(), seeded_options(7));
  CHECK(std::abs(ao.rate - pdd.rate) <= 0.02 * pdd.rate);
}

TEST_CASE("solve_scheme dispatches every id") {
  const ChannelSet cs = small_channels(9);
  const SolveOptions opts = seeded_options(9);
  for (const SchemeId id : all_schemes()) {
    const SchemeResult r = solve_scheme(id, cs, default_pt(), opts);
    CHECK(r.scheme == id);
    CHECK(r.rate > 0.0);
    CHECK_NOTHROW(validate_scheme_output(id, r.coefficients));
  }
}
