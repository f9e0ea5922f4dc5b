#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "starpdd/closed_form.hpp"
#include "starpdd/errors.hpp"
#include "starpdd/pdd.hpp"
#include "starpdd/rng.hpp"
#include "starpdd/star.hpp"
#include "starpdd/wmmse.hpp"

namespace starpdd {

/// How the auxiliary copy is projected each sweep: the coupled closed
/// forms, the energy-only relaxation, or a fixed transmit/reflect split
/// with phase-only updates.
enum class AuxPolicy { Coupled, Independent, ConventionalSplit };

/// WMMSE throughput instance driven by the PDD engine. Keeps the
/// auxiliary copy factored as beta .* psi so zero-amplitude elements do
/// not lose their phase between the two closed-form blocks.
class ThroughputProblem {
 public:
  static ThroughputProblem init(const WmmseContext& ctx, AuxPolicy policy,
                                std::uint64_t seed) {
    const int n = ctx.elements();
    if (policy == AuxPolicy::ConventionalSplit && n % 2 != 0) {
      throw InvalidInputError(
          "ThroughputProblem: conventional split needs an even element count");
    }
    ThroughputProblem p;
    p.ctx_ = &ctx;
    p.policy_ = policy;
    Rng rng(seed);
    p.psi_.t.resize(n);
    p.psi_.r.resize(n);
    p.beta_t_.resize(n);
    p.beta_r_.resize(n);
    for (int i = 0; i < n; ++i) {
      p.psi_.t[i] = std::polar(1.0, rng.uniform(0.0, kTwoPi));
      if (policy == AuxPolicy::Coupled) {
        // Start on the coupled set (each marginal still uniform) so the
        // first phase block is a descent step over a set containing the
        // current point.
        p.psi_.r[i] = rng.uniform() < 0.5 ? detail::times_j(p.psi_.t[i])
                                          : detail::times_minus_j(p.psi_.t[i]);
      } else {
        p.psi_.r[i] = std::polar(1.0, rng.uniform(0.0, kTwoPi));
      }
      if (policy == AuxPolicy::ConventionalSplit) {
        const bool transmit_half = i < n / 2;
        p.beta_t_[i] = transmit_half ? 1.0 : 0.0;
        p.beta_r_[i] = transmit_half ? 0.0 : 1.0;
      } else {
        p.beta_t_[i] = M_SQRT1_2;
        p.beta_r_[i] = M_SQRT1_2;
      }
    }
    p.compose_theta_tilde();
    p.theta_ = p.theta_tilde_;
    p.hhat_ = effective_channels(ctx, p.theta_);

    const int k = ctx.users();
    p.state_.w = p.hhat_.adjoint();
    const double power = p.state_.w.squaredNorm();
    if (power > 0.0) {
      p.state_.w *= std::sqrt(ctx.pt / power);
    } else {
      p.state_.w.setZero();
    }
    p.state_.varpi = RealVector::Ones(k);
    p.state_.upsilon = ComplexVector::Zero(k);
    return p;
  }

  /// Warm start from an existing coefficient set (e.g. another scheme's
  /// solution); W starts as a full-power matched filter as in init().
  static ThroughputProblem init_from(const WmmseContext& ctx, AuxPolicy policy,
                                     const StarCoefficients& start) {
    start.validate();
    const int n = ctx.elements();
    if (start.size() != n) {
      throw InvalidInputError("ThroughputProblem: start size mismatch");
    }
    ThroughputProblem p;
    p.ctx_ = &ctx;
    p.policy_ = policy;
    p.beta_t_ = start.beta_t;
    p.beta_r_ = start.beta_r;
    p.psi_.t.resize(n);
    p.psi_.r.resize(n);
    for (int i = 0; i < n; ++i) {
      p.psi_.t[i] = std::polar(1.0, start.phi_t[i]);
      p.psi_.r[i] = std::polar(1.0, start.phi_r[i]);
    }
    p.compose_theta_tilde();
    p.theta_ = p.theta_tilde_;
    p.hhat_ = effective_channels(ctx, p.theta_);
    p.state_.w = p.hhat_.adjoint();
    const double power = p.state_.w.squaredNorm();
    if (power > 0.0) {
      p.state_.w *= std::sqrt(ctx.pt / power);
    } else {
      p.state_.w.setZero();
    }
    p.state_.varpi = RealVector::Ones(ctx.users());
    p.state_.upsilon = ComplexVector::Zero(ctx.users());
    return p;
  }

  int block_count() const { return 5; }

  void update_block(int b, const PddState& s) {
    switch (b) {
      case 0: {
        auto [varpi, upsilon] =
            update_weights_receivers(*ctx_, state_.w, hhat_);
        state_.varpi = std::move(varpi);
        state_.upsilon = std::move(upsilon);
        break;
      }
      case 1: {
        auto [w, info] = update_beamformer(*ctx_, state_.varpi,
                                           state_.upsilon, hhat_, ctx_->pt);
        state_.w = std::move(w);
        binfo_ = info;
        break;
      }
      case 2: {
        theta_ = update_theta(*ctx_, state_.varpi, state_.upsilon, state_.w,
                              theta_tilde_, s.lambda, s.rho);
        hhat_ = effective_channels(*ctx_, theta_);
        break;
      }
      case 3:
        update_aux_phases(s);
        break;
      case 4:
        update_aux_amplitudes(s);
        break;
      default:
        throw InvalidInputError("update_block: bad block index");
    }
  }

  double augmented_lagrangian(const PddState& s) const {
    const double pen =
        ((theta_tilde_.t - theta_.t + s.rho * s.lambda.t).squaredNorm() +
         (theta_tilde_.r - theta_.r + s.rho * s.lambda.r).squaredNorm()) /
        (2.0 * s.rho);
    return wmmse_objective(*ctx_, state_, hhat_) + pen;
  }

  double objective_value() const { return sum_rate(*ctx_, state_.w, hhat_); }

  const SidePair& theta() const { return theta_; }
  const SidePair& theta_tilde() const { return theta_tilde_; }
  const WmmseState& state() const { return state_; }
  const WmmseContext& context() const { return *ctx_; }
  const BeamformerInfo& beamformer_info() const { return binfo_; }
  const std::vector<Eigen::Index>& degenerate_elements() const {
    return degenerate_;
  }

  /// Adopt the exactly constrained copy, then refresh W and the receivers
  /// so the reported rate belongs to a feasible configuration.
  void finalize(const PddState&) {
    theta_ = theta_tilde_;
    hhat_ = effective_channels(*ctx_, theta_);
    auto [w, info] = update_beamformer(*ctx_, state_.varpi, state_.upsilon,
                                       hhat_, ctx_->pt);
    state_.w = std::move(w);
    binfo_ = info;
    auto [varpi, upsilon] = update_weights_receivers(*ctx_, state_.w, hhat_);
    state_.varpi = std::move(varpi);
    state_.upsilon = std::move(upsilon);
  }

  /// Polar form of the auxiliary copy; amplitudes come straight from the
  /// stored beta vectors so branch-exact 0/1 values survive.
  StarCoefficients coefficients() const {
    StarCoefficients c;
    c.beta_t = beta_t_;
    c.beta_r = beta_r_;
    const Eigen::Index n = beta_t_.size();
    c.phi_t.resize(n);
    c.phi_r.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      c.phi_t[i] = wrap_angle(std::arg(psi_.t[i]));
      c.phi_r[i] = wrap_angle(std::arg(psi_.r[i]));
    }
    return c;
  }

 private:
  SidePair vartheta(const PddState& s) const {
    SidePair v;
    v.t = -theta_.t + s.rho * s.lambda.t;
    v.r = -theta_.r + s.rho * s.lambda.r;
    return v;
  }

  void compose_theta_tilde() {
    const Eigen::Index n = beta_t_.size();
    theta_tilde_.t.resize(n);
    theta_tilde_.r.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      theta_tilde_.t[i] = beta_t_[i] * psi_.t[i];
      theta_tilde_.r[i] = beta_r_[i] * psi_.r[i];
    }
  }

  void update_aux_phases(const PddState& s) {
    const SidePair v = vartheta(s);
    switch (policy_) {
      case AuxPolicy::Coupled: {
        auto [pt, pr] = update_phases(beta_t_, beta_r_, v.t, v.r);
        psi_.t = std::move(pt);
        psi_.r = std::move(pr);
        break;
      }
      case AuxPolicy::Independent: {
        IndependentProjection proj = project_independent(v.t, v.r);
        const Eigen::Index n = beta_t_.size();
        for (Eigen::Index i = 0; i < n; ++i) {
          beta_t_[i] = std::min(std::abs(proj.theta_t[i]), 1.0);
          beta_r_[i] = std::min(std::abs(proj.theta_r[i]), 1.0);
          psi_.t[i] = beta_t_[i] > 0.0 ? Complex(proj.theta_t[i] / beta_t_[i])
                                       : Complex{1.0, 0.0};
          psi_.r[i] = beta_r_[i] > 0.0 ? Complex(proj.theta_r[i] / beta_r_[i])
                                       : Complex{1.0, 0.0};
        }
        degenerate_ = std::move(proj.degenerate);
        break;
      }
      case AuxPolicy::ConventionalSplit: {
        const Eigen::Index n = beta_t_.size();
        for (Eigen::Index i = 0; i < n; ++i) {
          if (i < n / 2) {
            const double mag = std::abs(v.t[i]);
            psi_.t[i] = mag == 0.0 ? Complex{-1.0, 0.0} : Complex(-v.t[i] / mag);
          } else {
            const double mag = std::abs(v.r[i]);
            psi_.r[i] = mag == 0.0 ? Complex{-1.0, 0.0} : Complex(-v.r[i] / mag);
          }
        }
        break;
      }
    }
    compose_theta_tilde();
  }

  void update_aux_amplitudes(const PddState& s) {
    if (policy_ != AuxPolicy::Coupled) return;
    const SidePair v = vartheta(s);
    AmplitudeUpdate res = update_amplitudes(psi_.t, psi_.r, v.t, v.r);
    beta_t_ = std::move(res.beta_t);
    beta_r_ = std::move(res.beta_r);
    degenerate_ = std::move(res.degenerate);
    compose_theta_tilde();
  }

  const WmmseContext* ctx_ = nullptr;
  AuxPolicy policy_ = AuxPolicy::Coupled;
  WmmseState state_;
  SidePair theta_;
  SidePair theta_tilde_;
  SidePair psi_;
  RealVector beta_t_;
  RealVector beta_r_;
  ComplexMatrix hhat_;
  BeamformerInfo binfo_;
  std::vector<Eigen::Index> degenerate_;
};

struct FixedThetaResult {
  WmmseState state;
  BeamformerInfo info;
  double rate = 0.0;
  int iterations = 0;
};

/// Plain WMMSE with theta frozen: alternate the receiver/weight update and
/// the beamformer until the scalarized objective settles, then refresh the
/// weights once so varpi_k = 1 + SINR_k holds for the returned W.
inline FixedThetaResult wmmse_fixed_theta(const WmmseContext& ctx,
                                          const SidePair& theta,
                                          double tol = 1e-8,
                                          int max_iter = 500) {
  if (!(tol > 0.0) || max_iter < 1) {
    throw InvalidInputError("wmmse_fixed_theta: bad tolerance or cap");
  }
  const ComplexMatrix hhat = effective_channels(ctx, theta);
  FixedThetaResult out;
  out.state.w = hhat.adjoint();
  const double power = out.state.w.squaredNorm();
  if (power > 0.0) {
    out.state.w *= std::sqrt(ctx.pt / power);
  } else {
    out.state.w.setZero();
  }
  out.state.varpi = RealVector::Ones(ctx.users());
  out.state.upsilon = ComplexVector::Zero(ctx.users());

  double prev = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iter; ++it) {
    out.iterations = it;
    auto [varpi, upsilon] = update_weights_receivers(ctx, out.state.w, hhat);
    out.state.varpi = std::move(varpi);
    out.state.upsilon = std::move(upsilon);
    auto [w, info] = update_beamformer(ctx, out.state.varpi, out.state.upsilon,
                                       hhat, ctx.pt);
    out.state.w = std::move(w);
    out.info = info;
    const double f = wmmse_objective(ctx, out.state, hhat);
    if (std::abs(prev - f) <= tol * std::max(1.0, std::abs(f))) break;
    prev = f;
  }
  auto [varpi, upsilon] = update_weights_receivers(ctx, out.state.w, hhat);
  out.state.varpi = std::move(varpi);
  out.state.upsilon = std::move(upsilon);
  out.rate = sum_rate(ctx, out.state.w, hhat);
  return out;
}

}  // namespace starpdd
