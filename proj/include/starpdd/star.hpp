#pragma once

#include <cmath>
#include <complex>
#include <utility>

#include "starpdd/errors.hpp"
#include "starpdd/numerics.hpp"

namespace starpdd {

/// Transmission/reflection coefficients of an N-element surface in polar
/// form: amplitudes in [0,1], phases in [0, 2*pi). Also used for the
/// auxiliary copy that the penalty method keeps exactly on the coupled set.
struct StarCoefficients {
  RealVector beta_t;
  RealVector beta_r;
  RealVector phi_t;
  RealVector phi_r;

  Eigen::Index size() const { return beta_t.size(); }

  void validate() const {
    const Eigen::Index n = beta_t.size();
    if (beta_r.size() != n || phi_t.size() != n || phi_r.size() != n) {
      throw InvalidInputError("StarCoefficients: vector length mismatch");
    }
    if (!beta_t.allFinite() || !beta_r.allFinite() || !phi_t.allFinite() ||
        !phi_r.allFinite()) {
      throw InvalidInputError("StarCoefficients: non-finite entry");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (beta_t[i] < 0.0 || beta_t[i] > 1.0 || beta_r[i] < 0.0 ||
          beta_r[i] > 1.0) {
        throw InvalidInputError("StarCoefficients: amplitude outside [0,1]");
      }
    }
  }
};

/// Per-element residuals of the passive-lossless constraints: energy is
/// beta_t^2 + beta_r^2 - 1, phase is cos(phi_t - phi_r). Both vanish at a
/// feasible point.
struct ConstraintResiduals {
  RealVector energy;
  RealVector phase;

  double max_abs() const {
    double m = 0.0;
    if (energy.size() > 0) m = energy.cwiseAbs().maxCoeff();
    if (phase.size() > 0) m = std::max(m, phase.cwiseAbs().maxCoeff());
    return m;
  }
};

/// Composes theta_i = beta_i .* exp(j phi_i) for both sides.
inline std::pair<ComplexVector, ComplexVector> to_complex(
    const StarCoefficients& c) {
  c.validate();
  const Eigen::Index n = c.size();
  ComplexVector theta_t(n);
  ComplexVector theta_r(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    theta_t[i] = std::polar(c.beta_t[i], c.phi_t[i]);
    theta_r[i] = std::polar(c.beta_r[i], c.phi_r[i]);
  }
  return {std::move(theta_t), std::move(theta_r)};
}

/// Decomposes complex coefficient vectors into amplitudes and canonical
/// phases. Zero entries get phase 0.
inline StarCoefficients from_complex(const ComplexVector& theta_t,
                                     const ComplexVector& theta_r) {
  if (theta_t.size() != theta_r.size()) {
    throw InvalidInputError("from_complex: vector length mismatch");
  }
  const Eigen::Index n = theta_t.size();
  StarCoefficients c;
  c.beta_t.resize(n);
  c.beta_r.resize(n);
  c.phi_t.resize(n);
  c.phi_r.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    c.beta_t[i] = std::abs(theta_t[i]);
    c.beta_r[i] = std::abs(theta_r[i]);
    c.phi_t[i] = c.beta_t[i] > 0.0 ? wrap_angle(std::arg(theta_t[i])) : 0.0;
    c.phi_r[i] = c.beta_r[i] > 0.0 ? wrap_angle(std::arg(theta_r[i])) : 0.0;
  }
  return c;
}

inline ConstraintResiduals constraint_residuals(const StarCoefficients& c) {
  c.validate();
  const Eigen::Index n = c.size();
  ConstraintResiduals r;
  r.energy.resize(n);
  r.phase.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    r.energy[i] = c.beta_t[i] * c.beta_t[i] + c.beta_r[i] * c.beta_r[i] - 1.0;
    r.phase[i] = std::cos(c.phi_t[i] - c.phi_r[i]);
  }
  return r;
}

/// True when both residual vectors are below `tol` in max-abs norm. The
/// default matches the penalty method's termination threshold.
inline bool is_feasible(const StarCoefficients& c, double tol = 1e-6) {
  return constraint_residuals(c).max_abs() <= tol;
}

}  // namespace starpdd
