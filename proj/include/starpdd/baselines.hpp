#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "starpdd/channel.hpp"
#include "starpdd/closed_form.hpp"
#include "starpdd/errors.hpp"
#include "starpdd/pdd.hpp"
#include "starpdd/star.hpp"
#include "starpdd/throughput.hpp"

namespace starpdd {

enum class SchemeId {
  CoupledPdd,
  CoupledAo,
  PsPscT,
  PsPscR,
  IndependentStar,
  ConventionalRis,
};

inline const char* scheme_name(SchemeId id) {
  switch (id) {
    case SchemeId::CoupledPdd: return "coupled_pdd";
    case SchemeId::CoupledAo: return "coupled_ao";
    case SchemeId::PsPscT: return "pspsc_t";
    case SchemeId::PsPscR: return "pspsc_r";
    case SchemeId::IndependentStar: return "independent";
    case SchemeId::ConventionalRis: return "conventional";
  }
  throw InvalidInputError("scheme_name: bad scheme id");
}

inline SchemeId parse_scheme(const std::string& name) {
  if (name == "coupled_pdd") return SchemeId::CoupledPdd;
  if (name == "coupled_ao") return SchemeId::CoupledAo;
  if (name == "pspsc_t") return SchemeId::PsPscT;
  if (name == "pspsc_r") return SchemeId::PsPscR;
  if (name == "independent") return SchemeId::IndependentStar;
  if (name == "conventional") return SchemeId::ConventionalRis;
  throw InvalidInputError("unknown scheme '" + name + "'");
}

inline std::vector<SchemeId> all_schemes() {
  return {SchemeId::CoupledPdd,      SchemeId::CoupledAo,
          SchemeId::PsPscT,          SchemeId::PsPscR,
          SchemeId::IndependentStar, SchemeId::ConventionalRis};
}

struct SolveOptions {
  PddOptions pdd;
  std::uint64_t init_seed = 1;
  int ao_amp_levels = 11;
  int ao_phase_levels = 16;
};

struct SchemeResult {
  SchemeId scheme = SchemeId::CoupledPdd;
  StarCoefficients coefficients;
  WmmseState state;
  double rate = 0.0;
  bool converged = true;
  PddSummary summary;
};

/// Checks a scheme's own constraint set: energy split everywhere, the
/// phase coupling only for coupled schemes, the 0/1 split pattern for the
/// conventional layout. Throws InternalError on violation.
inline void validate_scheme_output(SchemeId id, const StarCoefficients& c) {
  const ConstraintResiduals res = constraint_residuals(c);
  if (res.energy.size() > 0 && res.energy.cwiseAbs().maxCoeff() > 1e-8) {
    throw InternalError(std::string(scheme_name(id)) +
                        ": energy constraint violated");
  }
  const bool coupled = id == SchemeId::CoupledPdd || id == SchemeId::CoupledAo ||
                       id == SchemeId::PsPscT || id == SchemeId::PsPscR;
  if (coupled && res.phase.size() > 0 &&
      res.phase.cwiseAbs().maxCoeff() > 1e-5) {
    throw InternalError(std::string(scheme_name(id)) +
                        ": phase coupling violated");
  }
  if (id == SchemeId::ConventionalRis) {
    const Eigen::Index n = c.size();
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool transmit_half = i < n / 2;
      if (c.beta_t[i] != (transmit_half ? 1.0 : 0.0) ||
          c.beta_r[i] != (transmit_half ? 0.0 : 1.0)) {
        throw InternalError("conventional: split amplitude pattern broken");
      }
    }
  }
}

namespace detail {

inline SchemeResult solve_with_pdd(SchemeId id, AuxPolicy policy,
                                   const ChannelSet& cs, double pt_watts,
                                   const SolveOptions& opts) {
  WmmseContext ctx = make_context(cs, pt_watts);
  ThroughputProblem problem = ThroughputProblem::init(ctx, policy,
                                                     opts.init_seed);
  SchemeResult out;
  out.scheme = id;
  out.summary = solve(problem, opts.pdd);
  out.coefficients = problem.coefficients();
  out.state = problem.state();
  out.rate = out.summary.final_objective;
  out.converged = out.summary.converged;
  return out;
}

inline SchemeResult solve_warm_pdd(SchemeId id, AuxPolicy policy,
                                   const ChannelSet& cs, double pt_watts,
                                   const StarCoefficients& start,
                                   const SolveOptions& opts) {
  WmmseContext ctx = make_context(cs, pt_watts);
  ThroughputProblem problem = ThroughputProblem::init_from(ctx, policy, start);
  SchemeResult out;
  out.scheme = id;
  out.summary = solve(problem, opts.pdd);
  out.coefficients = problem.coefficients();
  out.state = problem.state();
  out.rate = out.summary.final_objective;
  out.converged = out.summary.converged;
  return out;
}

inline double rate_from_rx(const ComplexMatrix& rx, const RealVector& sigma2) {
  double rate = 0.0;
  for (Eigen::Index k = 0; k < rx.rows(); ++k) {
    double interference = 0.0;
    for (Eigen::Index l = 0; l < rx.cols(); ++l) {
      if (l != k) interference += std::norm(rx(k, l));
    }
    rate += std::log2(1.0 + std::norm(rx(k, k)) / (interference + sigma2[k]));
  }
  return rate;
}

}  // namespace detail

inline SchemeResult solve_coupled_pdd(const ChannelSet& cs, double pt_watts,
                                      const SolveOptions& opts) {
  return detail::solve_with_pdd(SchemeId::CoupledPdd, AuxPolicy::Coupled, cs,
                                pt_watts, opts);
}

/// Independent phases relax the coupled set, so on the same channels this
/// scheme should never end up below the coupled solution. A single local
/// run does not guarantee that, so use a small multi-start: a fresh run,
/// a run warm-started at the coupled solution, and the coupled solution
/// itself (feasible here as well); keep the best rate.
inline SchemeResult solve_independent(const ChannelSet& cs, double pt_watts,
                                      const SolveOptions& opts) {
  SchemeResult best = detail::solve_with_pdd(SchemeId::IndependentStar,
                                             AuxPolicy::Independent, cs,
                                             pt_watts, opts);
  SchemeResult coupled = solve_coupled_pdd(cs, pt_watts, opts);
  SchemeResult warm = detail::solve_warm_pdd(
      SchemeId::IndependentStar, AuxPolicy::Independent, cs, pt_watts,
      coupled.coefficients, opts);
  if (warm.rate > best.rate) best = std::move(warm);
  if (coupled.rate > best.rate) {
    coupled.scheme = SchemeId::IndependentStar;
    best = std::move(coupled);
  }
  return best;
}

inline SchemeResult solve_conventional(const ChannelSet& cs, double pt_watts,
                                       const SolveOptions& opts) {
  return detail::solve_with_pdd(SchemeId::ConventionalRis,
                                AuxPolicy::ConventionalSplit, cs, pt_watts,
                                opts);
}

/// Primary-secondary configuration: reuse the independent solution on the
/// primary side, force the secondary amplitudes onto the coupling circle,
/// and pick each secondary phase from primary +- 90 degrees. Three sign
/// assignments are tried (greedy toward the strongest secondary user's
/// effective channel, all-plus, all-minus); each gets a fresh WMMSE run
/// and the best rate wins.
inline SchemeResult solve_pspsc(const ChannelSet& cs, double pt_watts,
                                const SolveOptions& opts, Side primary) {
  const SchemeResult indep = solve_independent(cs, pt_watts, opts);
  const StarCoefficients& ic = indep.coefficients;
  const Eigen::Index n = ic.size();
  const bool primary_t = primary == Side::Transmit;

  const RealVector& beta_p = primary_t ? ic.beta_t : ic.beta_r;
  const RealVector& phi_p = primary_t ? ic.phi_t : ic.phi_r;
  RealVector beta_s(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    beta_s[i] = std::sqrt(std::max(0.0, 1.0 - beta_p[i] * beta_p[i]));
  }

  WmmseContext ctx = make_context(cs, pt_watts);
  const Side secondary = primary_t ? Side::Reflect : Side::Transmit;
  Eigen::Index strongest = -1;
  double best_norm = -1.0;
  for (int u = 0; u < ctx.users(); ++u) {
    if (ctx.side[u] != secondary) continue;
    const double norm = cs.h[u].norm();
    if (norm > best_norm) {
      best_norm = norm;
      strongest = u;
    }
  }
  if (strongest < 0) {
    throw InvalidInputError("solve_pspsc: no users on the secondary side");
  }

  std::vector<std::vector<int>> sign_sets;
  {
    std::vector<int> greedy(n, 1);
    ComplexVector running = ComplexVector::Zero(ctx.antennas());
    const ComplexMatrix& d = ctx.d[strongest];
    for (Eigen::Index i = 0; i < n; ++i) {
      const Complex plus = std::polar(beta_s[i], phi_p[i] + kPi / 2.0);
      const Complex minus = std::polar(beta_s[i], phi_p[i] - kPi / 2.0);
      const ComplexVector row = d.row(i).transpose();
      const double gain_plus = (running + plus * row).norm();
      const double gain_minus = (running + minus * row).norm();
      greedy[i] = gain_plus >= gain_minus ? 1 : -1;
      running += (greedy[i] > 0 ? plus : minus) * row;
    }
    sign_sets.push_back(std::move(greedy));
    sign_sets.emplace_back(n, 1);
    sign_sets.emplace_back(n, -1);
  }

  SchemeResult out;
  out.scheme = primary_t ? SchemeId::PsPscT : SchemeId::PsPscR;
  out.converged = indep.converged;
  double best_rate = -1.0;
  std::vector<int> best_signs;
  for (const auto& signs : sign_sets) {
    SidePair theta;
    ComplexVector prim(n), sec(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      prim[i] = std::polar(beta_p[i], phi_p[i]);
      sec[i] = std::polar(beta_s[i], phi_p[i] + signs[i] * kPi / 2.0);
    }
    theta.t = primary_t ? prim : sec;
    theta.r = primary_t ? sec : prim;
    const FixedThetaResult fx = wmmse_fixed_theta(ctx, theta);
    if (fx.rate > best_rate) {
      best_rate = fx.rate;
      best_signs = signs;
      out.state = fx.state;
      out.rate = fx.rate;
    }
  }

  StarCoefficients c;
  c.beta_t.resize(n);
  c.beta_r.resize(n);
  c.phi_t.resize(n);
  c.phi_r.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double phi_s = wrap_angle(phi_p[i] + best_signs[i] * kPi / 2.0);
    if (primary_t) {
      c.beta_t[i] = beta_p[i];
      c.phi_t[i] = phi_p[i];
      c.beta_r[i] = beta_s[i];
      c.phi_r[i] = phi_s;
    } else {
      c.beta_r[i] = beta_p[i];
      c.phi_r[i] = phi_p[i];
      c.beta_t[i] = beta_s[i];
      c.phi_t[i] = phi_s;
    }
  }
  out.coefficients = std::move(c);
  return out;
}

/// Alternating per-element exhaustive search over a discretized coupled-
/// feasible set. The active side's element takes (beta, phi) from the
/// grid, the partner side is forced to the complementary amplitude and a
/// +-90 degree phase offset; candidates are scored by sum rate with W
/// fixed, and W is re-optimized by WMMSE between passes.
inline SchemeResult solve_ao(const ChannelSet& cs, double pt_watts,
                             const SolveOptions& opts) {
  if (opts.ao_amp_levels < 2 || opts.ao_phase_levels < 2) {
    throw InvalidInputError("solve_ao: grid levels must be >= 2");
  }
  WmmseContext ctx = make_context(cs, pt_watts);
  const Eigen::Index n = ctx.elements();
  const int k = ctx.users();

  Rng rng(opts.init_seed);
  StarCoefficients c;
  c.beta_t = RealVector::Constant(n, M_SQRT1_2);
  c.beta_r = RealVector::Constant(n, M_SQRT1_2);
  c.phi_t.resize(n);
  c.phi_r.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    c.phi_t[i] = rng.uniform(0.0, kTwoPi);
    const double sign = rng.uniform() < 0.5 ? 1.0 : -1.0;
    c.phi_r[i] = wrap_angle(c.phi_t[i] + sign * kPi / 2.0);
  }

  std::vector<double> amp_grid(opts.ao_amp_levels);
  for (int a = 0; a < opts.ao_amp_levels; ++a) {
    amp_grid[a] = static_cast<double>(a) / (opts.ao_amp_levels - 1);
  }
  std::vector<double> phase_grid(opts.ao_phase_levels);
  for (int p = 0; p < opts.ao_phase_levels; ++p) {
    phase_grid[p] = kTwoPi * p / opts.ao_phase_levels;
  }

  const auto theta_of = [&]() {
    auto [tt, tr] = to_complex(c);
    return SidePair{std::move(tt), std::move(tr)};
  };

  FixedThetaResult fx = wmmse_fixed_theta(ctx, theta_of());
  SchemeResult out;
  out.scheme = SchemeId::CoupledAo;
  out.coefficients = c;
  out.state = fx.state;
  out.rate = fx.rate;

  // One pass over every element of one side with W frozen. Receive
  // coefficients rx(k,l) = hhat_k w_l are patched incrementally.
  const auto side_pass = [&](Side active, const ComplexMatrix& w) {
    std::vector<ComplexMatrix> t(k);  // per user, D_k W is N x K
    for (int u = 0; u < k; ++u) t[u] = ctx.d[u] * w;
    SidePair theta = theta_of();
    ComplexMatrix rx(k, k);
    for (int u = 0; u < k; ++u) {
      const ComplexVector& th =
          ctx.side[u] == Side::Transmit ? theta.t : theta.r;
      rx.row(u) = th.transpose() * t[u];
    }
    double current = detail::rate_from_rx(rx, ctx.sigma2);
    bool improved = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      ComplexMatrix base(k, k);
      for (int u = 0; u < k; ++u) {
        const Complex cur_coeff = ctx.side[u] == Side::Transmit
                                      ? theta.t[i]
                                      : theta.r[i];
        base.row(u) = rx.row(u) - cur_coeff * t[u].row(i);
      }
      double best_rate = current;
      double best_beta = -1.0, best_phi = 0.0, best_offset = 0.0;
      Complex best_active, best_partner;
      for (double beta : amp_grid) {
        const double partner_beta = std::sqrt(std::max(0.0, 1.0 - beta * beta));
        for (double phi : phase_grid) {
          const Complex active_coeff = std::polar(beta, phi);
          for (double offset : {kPi / 2.0, -kPi / 2.0}) {
            const Complex partner_coeff = std::polar(partner_beta, phi + offset);
            const Complex cand_t =
                active == Side::Transmit ? active_coeff : partner_coeff;
            const Complex cand_r =
                active == Side::Transmit ? partner_coeff : active_coeff;
            double rate = 0.0;
            for (int u = 0; u < k; ++u) {
              const Complex coeff =
                  ctx.side[u] == Side::Transmit ? cand_t : cand_r;
              double sig = 0.0, interference = 0.0;
              for (int l = 0; l < k; ++l) {
                const double p2 = std::norm(base(u, l) + coeff * t[u](i, l));
                if (l == u) sig = p2; else interference += p2;
              }
              rate += std::log2(1.0 + sig / (interference + ctx.sigma2[u]));
            }
            if (rate > best_rate) {
              best_rate = rate;
              best_beta = beta;
              best_phi = phi;
              best_offset = offset;
              best_active = active_coeff;
              best_partner = partner_coeff;
            }
          }
        }
      }
      if (best_beta >= 0.0) {
        improved = true;
        current = best_rate;
        const double partner_beta =
            std::sqrt(std::max(0.0, 1.0 - best_beta * best_beta));
        if (active == Side::Transmit) {
          c.beta_t[i] = best_beta;
          c.phi_t[i] = wrap_angle(best_phi);
          c.beta_r[i] = partner_beta;
          c.phi_r[i] = wrap_angle(best_phi + best_offset);
          theta.t[i] = best_active;
          theta.r[i] = best_partner;
        } else {
          c.beta_r[i] = best_beta;
          c.phi_r[i] = wrap_angle(best_phi);
          c.beta_t[i] = partner_beta;
          c.phi_t[i] = wrap_angle(best_phi + best_offset);
          theta.r[i] = best_active;
          theta.t[i] = best_partner;
        }
        for (int u = 0; u < k; ++u) {
          const Complex coeff = ctx.side[u] == Side::Transmit
                                    ? theta.t[i]
                                    : theta.r[i];
          rx.row(u) = base.row(u) + coeff * t[u].row(i);
        }
      }
    }
    return improved;
  };

  for (int sweep = 0; sweep < 100; ++sweep) {
    bool improved = side_pass(Side::Transmit, fx.state.w);
    improved = side_pass(Side::Reflect, fx.state.w) || improved;
    if (!improved) break;
    fx = wmmse_fixed_theta(ctx, theta_of());
    if (fx.rate > out.rate) {
      out.rate = fx.rate;
      out.state = fx.state;
      out.coefficients = c;
    }
  }
  return out;
}

inline SchemeResult solve_scheme(SchemeId id, const ChannelSet& cs,
                                 double pt_watts, const SolveOptions& opts) {
  switch (id) {
    case SchemeId::CoupledPdd: return solve_coupled_pdd(cs, pt_watts, opts);
    case SchemeId::CoupledAo: return solve_ao(cs, pt_watts, opts);
    case SchemeId::PsPscT:
      return solve_pspsc(cs, pt_watts, opts, Side::Transmit);
    case SchemeId::PsPscR:
      return solve_pspsc(cs, pt_watts, opts, Side::Reflect);
    case SchemeId::IndependentStar:
      return solve_independent(cs, pt_watts, opts);
    case SchemeId::ConventionalRis:
      return solve_conventional(cs, pt_watts, opts);
  }
  throw InvalidInputError("solve_scheme: bad scheme id");
}

}  // namespace starpdd
