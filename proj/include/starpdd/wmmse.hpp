#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "starpdd/channel.hpp"
#include "starpdd/errors.hpp"
#include "starpdd/numerics.hpp"

namespace starpdd {

/// Transmission-side / reflection-side vector bundle; used for theta, the
/// auxiliary copy, the duals and the targets alike.
struct SidePair {
  ComplexVector t;
  ComplexVector r;
};

struct WmmseState {
  ComplexMatrix w;        // M x K, columns are beamformers
  RealVector varpi;       // weights, >= 1 after an update
  ComplexVector upsilon;  // scalar receivers
};

/// Per-channel-set constants: D_k = diag(h_k^H) G, one N x M matrix per
/// user, plus noise powers and side labels.
struct WmmseContext {
  std::vector<ComplexMatrix> d;
  RealVector sigma2;
  std::vector<Side> side;
  double pt = 0.0;

  int users() const { return static_cast<int>(d.size()); }
  int elements() const { return d.empty() ? 0 : static_cast<int>(d[0].rows()); }
  int antennas() const { return d.empty() ? 0 : static_cast<int>(d[0].cols()); }
};

inline WmmseContext make_context(const ChannelSet& cs, double pt_watts) {
  if (!(pt_watts > 0.0)) {
    throw InvalidInputError("make_context: transmit power must be positive");
  }
  WmmseContext ctx;
  const int k = static_cast<int>(cs.h.size());
  ctx.d.resize(k);
  for (int u = 0; u < k; ++u) {
    ctx.d[u] = cs.h[u].conjugate().asDiagonal() * cs.g;
  }
  ctx.sigma2 = cs.sigma2;
  ctx.side = cs.side;
  ctx.pt = pt_watts;
  return ctx;
}

/// Row k is hhat_k = theta_i^T D_k for user k on side i.
inline ComplexMatrix effective_channels(const WmmseContext& ctx,
                                        const SidePair& theta) {
  const int k = ctx.users();
  ComplexMatrix hhat(k, ctx.antennas());
  for (int u = 0; u < k; ++u) {
    const ComplexVector& th =
        ctx.side[u] == Side::Transmit ? theta.t : theta.r;
    if (th.size() != ctx.d[u].rows()) {
      throw InvalidInputError("effective_channels: theta length mismatch");
    }
    hhat.row(u) = th.transpose() * ctx.d[u];
  }
  return hhat;
}

inline double sinr(const WmmseContext& ctx, int k, const ComplexMatrix& w,
                   const ComplexMatrix& hhat) {
  const ComplexVector rx = (hhat.row(k) * w).transpose();
  const double sig = std::norm(rx[k]);
  double interference = 0.0;
  for (Eigen::Index l = 0; l < rx.size(); ++l) {
    if (l != k) interference += std::norm(rx[l]);
  }
  return sig / (interference + ctx.sigma2[k]);
}

inline double sinr(const WmmseContext& ctx, int k, const ComplexMatrix& w,
                   const SidePair& theta) {
  return sinr(ctx, k, w, effective_channels(ctx, theta));
}

inline double sum_rate(const WmmseContext& ctx, const ComplexMatrix& w,
                       const ComplexMatrix& hhat) {
  double rate = 0.0;
  for (int u = 0; u < ctx.users(); ++u) {
    rate += std::log2(1.0 + sinr(ctx, u, w, hhat));
  }
  return rate;
}

inline double sum_rate(const WmmseContext& ctx, const ComplexMatrix& w,
                       const SidePair& theta) {
  return sum_rate(ctx, w, effective_channels(ctx, theta));
}

inline double mse(const WmmseContext& ctx, int k, const WmmseState& state,
                  const ComplexMatrix& hhat) {
  const ComplexVector rx = (hhat.row(k) * state.w).transpose();
  const double total = rx.squaredNorm() + ctx.sigma2[k];
  const Complex u = state.upsilon[k];
  return std::norm(u) * total - 2.0 * (std::conj(u) * rx[k]).real() + 1.0;
}

/// Joint closed-form update: upsilon_k is the MMSE receiver, varpi_k the
/// inverse of the resulting MSE, which equals 1 + SINR_k.
inline std::pair<RealVector, ComplexVector> update_weights_receivers(
    const WmmseContext& ctx, const ComplexMatrix& w,
    const ComplexMatrix& hhat) {
  const int k = ctx.users();
  RealVector varpi(k);
  ComplexVector upsilon(k);
  for (int u = 0; u < k; ++u) {
    const ComplexVector rx = (hhat.row(u) * w).transpose();
    const double total = rx.squaredNorm() + ctx.sigma2[u];
    upsilon[u] = rx[u] / total;
    varpi[u] = 1.0 + sinr(ctx, u, w, hhat);
  }
  return {std::move(varpi), std::move(upsilon)};
}

/// The data half of the scalarized objective, sum_k (varpi_k e_k -
/// ln varpi_k). Block minimizers of the augmented Lagrangian built on this
/// never increase it.
inline double wmmse_objective(const WmmseContext& ctx, const WmmseState& state,
                              const ComplexMatrix& hhat) {
  double f = 0.0;
  for (int u = 0; u < ctx.users(); ++u) {
    if (!(state.varpi[u] > 0.0)) {
      throw InvalidInputError("wmmse_objective: weights must be positive");
    }
    f += state.varpi[u] * mse(ctx, u, state, hhat) - std::log(state.varpi[u]);
  }
  return f;
}

struct BeamformerInfo {
  double mu = 0.0;
  double power = 0.0;
  bool used_bisection = false;
  bool degenerate = false;
};

/// Exact minimizer of sum_k varpi_k e_k over tr(WW^H) <= pt. Solved in the
/// eigenbasis of the quadratic coefficient; the multiplier comes from
/// bisection on the monotone power function, then a few Newton steps on
/// p(mu)^{-1/2} (nearly linear in mu) to pin the power to pt.
inline std::pair<ComplexMatrix, BeamformerInfo> update_beamformer(
    const WmmseContext& ctx, const RealVector& varpi,
    const ComplexVector& upsilon, const ComplexMatrix& hhat, double pt) {
  if (!(pt > 0.0)) {
    throw InvalidInputError("update_beamformer: power budget must be positive");
  }
  const int m = ctx.antennas();
  const int k = ctx.users();
  ComplexMatrix a = ComplexMatrix::Zero(m, m);
  ComplexMatrix b(m, k);
  for (int u = 0; u < k; ++u) {
    const auto h = hhat.row(u);
    a.noalias() += (varpi[u] * std::norm(upsilon[u])) * (h.adjoint() * h);
    b.col(u) = (varpi[u] * upsilon[u]) * h.adjoint();
  }

  BeamformerInfo info;
  if (b.cwiseAbs().maxCoeff() == 0.0) {
    info.degenerate = true;
    return {ComplexMatrix::Zero(m, k), info};
  }

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a);
  if (es.info() != Eigen::Success) {
    throw NumericalError("update_beamformer: eigendecomposition failed");
  }
  RealVector lam = es.eigenvalues().cwiseMax(0.0);
  const double tau = 1e-12 * std::max(lam.maxCoeff(), 1.0);
  for (int i = 0; i < m; ++i) {
    if (lam[i] <= tau) lam[i] = 0.0;
  }
  const ComplexMatrix q = es.eigenvectors().adjoint() * b;
  RealVector q2(m);
  for (int i = 0; i < m; ++i) q2[i] = q.row(i).squaredNorm();

  const auto power = [&](double mu) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) {
      if (q2[i] == 0.0) continue;
      const double den = lam[i] + mu;
      s += q2[i] / (den * den);
    }
    return s;
  };

  double p0 = 0.0;
  double null_mass = 0.0;
  for (int i = 0; i < m; ++i) {
    if (lam[i] > 0.0) {
      p0 += q2[i] / (lam[i] * lam[i]);
    } else {
      null_mass += q2[i];
    }
  }

  double mu = 0.0;
  if (null_mass <= 1e-14 * q2.sum() && p0 <= pt) {
    info.power = p0;
  } else {
    double hi = 1.0;
    int guard = 0;
    while (power(hi) > pt) {
      hi *= 2.0;
      if (++guard > 200) {
        throw NumericalError("update_beamformer: bracket expansion failed");
      }
    }
    mu = bisect_decreasing([&](double x) { return power(x) - pt; }, 0.0, hi,
                           1e-10);
    for (int it = 0; it < 50; ++it) {
      const double p = power(mu);
      if (std::abs(p - pt) <= 1e-12 * pt) break;
      double dp = 0.0;
      for (int i = 0; i < m; ++i) {
        const double den = lam[i] + mu;
        dp -= 2.0 * q2[i] / (den * den * den);
      }
      const double g = 1.0 / std::sqrt(p) - 1.0 / std::sqrt(pt);
      const double gp = -dp / (2.0 * p * std::sqrt(p));
      if (!(gp > 0.0)) break;
      const double next = mu - g / gp;
      if (!std::isfinite(next) || next < 0.0) break;
      mu = next;
    }
    info.used_bisection = true;
    info.power = power(mu);
  }
  info.mu = mu;

  RealVector scale(m);
  for (int i = 0; i < m; ++i) {
    const double den = lam[i] + mu;
    scale[i] = den > 0.0 ? 1.0 / den : 0.0;
  }
  ComplexMatrix w = es.eigenvectors() * (scale.asDiagonal() * q);
  return {std::move(w), info};
}

/// Exact minimizer of the augmented Lagrangian over one side's theta. The
/// quadratic data terms use c_{k,l} = D_k w_l; the ridge 1/(2 rho) comes
/// from the penalty (1/2rho)||theta_tilde - theta + rho lambda||^2.
inline SidePair update_theta(const WmmseContext& ctx, const RealVector& varpi,
                             const ComplexVector& upsilon,
                             const ComplexMatrix& w,
                             const SidePair& theta_tilde,
                             const SidePair& lambda, double rho) {
  if (!(rho > 0.0)) {
    throw InvalidInputError("update_theta: rho must be positive");
  }
  const int n = ctx.elements();
  ComplexMatrix a_t = ComplexMatrix::Zero(n, n);
  ComplexMatrix a_r = ComplexMatrix::Zero(n, n);
  ComplexVector b_t = ComplexVector::Zero(n);
  ComplexVector b_r = ComplexVector::Zero(n);
  for (int u = 0; u < ctx.users(); ++u) {
    const ComplexMatrix e = ctx.d[u] * w;
    const double wt = varpi[u] * std::norm(upsilon[u]);
    ComplexMatrix& a = ctx.side[u] == Side::Transmit ? a_t : a_r;
    ComplexVector& b = ctx.side[u] == Side::Transmit ? b_t : b_r;
    a.noalias() += wt * (e * e.adjoint()).conjugate();
    b.noalias() += (varpi[u] * upsilon[u]) * e.col(u).conjugate();
  }
  const double reg = 1.0 / (2.0 * rho);
  a_t.diagonal().array() += Complex(reg, 0.0);
  a_r.diagonal().array() += Complex(reg, 0.0);
  SidePair out;
  out.t = solve_hpd(a_t, ComplexVector(b_t + reg * (theta_tilde.t + rho * lambda.t)),
                    "update_theta (t side)");
  out.r = solve_hpd(a_r, ComplexVector(b_r + reg * (theta_tilde.r + rho * lambda.r)),
                    "update_theta (r side)");
  return out;
}

}  // namespace starpdd
