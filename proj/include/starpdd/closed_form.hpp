#pragma once

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "starpdd/errors.hpp"
#include "starpdd/numerics.hpp"

namespace starpdd {

/// One element of the phase subproblem. vt/vr are the amplitude-scaled
/// targets; phi_plus/phi_minus the two candidate coefficients.
struct ElementPhaseProblem {
  Complex vt;
  Complex vr;
  Complex phi_plus;
  Complex phi_minus;
};

inline ElementPhaseProblem make_element_phase_problem(double beta_t,
                                                      double beta_r,
                                                      Complex vartheta_t,
                                                      Complex vartheta_r) {
  ElementPhaseProblem p;
  p.vt = beta_t * vartheta_t;
  p.vr = beta_r * vartheta_r;
  const Complex j{0.0, 1.0};
  p.phi_plus = std::conj(p.vt) + j * std::conj(p.vr);
  p.phi_minus = std::conj(p.vt) - j * std::conj(p.vr);
  return p;
}

/// One element of the amplitude subproblem in polar coordinates:
/// beta_t = sin(omega), beta_r = cos(omega), omega in [0, pi/2].
struct ElementAmplitudeProblem {
  Complex vt;
  Complex vr;
  double a;
  double b;
  double xi;
  double omega;
};

namespace detail {

// e^{j(pi - arg(phi))} = -conj(phi)/|phi|; the convention arg(0) := 0
// turns the degenerate case into e^{j pi} = -1.
inline Complex phase_candidate(Complex phi) {
  const double mag = std::abs(phi);
  if (mag == 0.0) return Complex{-1.0, 0.0};
  return -std::conj(phi) / mag;
}

// Exact rotations by +-90 degrees keep the coupled phase gap exact.
inline Complex times_j(Complex z) { return {-z.imag(), z.real()}; }
inline Complex times_minus_j(Complex z) { return {z.imag(), -z.real()}; }

inline double phase_objective(const ElementPhaseProblem& p, Complex psi_t,
                              Complex psi_r) {
  return (std::conj(p.vt) * psi_t).real() + (std::conj(p.vr) * psi_r).real();
}

inline void check_amplitudes_in_range(const RealVector& beta,
                                      const char* name) {
  if (!beta.allFinite()) {
    throw InvalidInputError(std::string(name) + ": non-finite amplitude");
  }
  for (Eigen::Index i = 0; i < beta.size(); ++i) {
    if (beta[i] < 0.0 || beta[i] > 1.0) {
      throw InvalidInputError(std::string(name) +
                              ": amplitude outside [0,1]");
    }
  }
}

inline void check_unit_modulus(const ComplexVector& psi, const char* name) {
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    if (std::abs(std::abs(psi[i]) - 1.0) > 1e-9) {
      throw InvalidInputError(std::string(name) + ": entry not unit-modulus");
    }
  }
}

}  // namespace detail

/// Coupled phase update. For each element, evaluates the two candidate
/// pairs (psi_t, j*psi_t) and (psi_t, -j*psi_t) built from phi_plus and
/// phi_minus, and keeps the one with the smaller objective
/// Re(vt* psi_t) + Re(vr* psi_r). Ties go to the phi_plus candidate. The
/// returned pair has a phase gap of exactly +-90 degrees per element.
inline std::pair<ComplexVector, ComplexVector> update_phases(
    const RealVector& beta_t, const RealVector& beta_r,
    const ComplexVector& vartheta_t, const ComplexVector& vartheta_r) {
  const Eigen::Index n = vartheta_t.size();
  if (vartheta_r.size() != n || beta_t.size() != n || beta_r.size() != n) {
    throw InvalidInputError("update_phases: vector length mismatch");
  }
  detail::check_amplitudes_in_range(beta_t, "update_phases");
  detail::check_amplitudes_in_range(beta_r, "update_phases");
  ComplexVector psi_t(n);
  ComplexVector psi_r(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const ElementPhaseProblem p = make_element_phase_problem(
        beta_t[i], beta_r[i], vartheta_t[i], vartheta_r[i]);
    const Complex t_plus = detail::phase_candidate(p.phi_plus);
    const Complex r_plus = detail::times_j(t_plus);
    const Complex t_minus = detail::phase_candidate(p.phi_minus);
    const Complex r_minus = detail::times_minus_j(t_minus);
    const double f_plus = detail::phase_objective(p, t_plus, r_plus);
    const double f_minus = detail::phase_objective(p, t_minus, r_minus);
    if (f_plus <= f_minus) {
      psi_t[i] = t_plus;
      psi_r[i] = r_plus;
    } else {
      psi_t[i] = t_minus;
      psi_r[i] = r_minus;
    }
  }
  return {std::move(psi_t), std::move(psi_r)};
}

struct AmplitudeUpdate {
  RealVector beta_t;
  RealVector beta_r;
  std::vector<Eigen::Index> degenerate;
};

inline ElementAmplitudeProblem make_element_amplitude_problem(
    Complex psi_t, Complex psi_r, Complex vartheta_t, Complex vartheta_r) {
  ElementAmplitudeProblem p;
  p.vt = std::conj(psi_t) * vartheta_t;
  p.vr = std::conj(psi_r) * vartheta_r;
  p.a = p.vt.real();
  p.b = p.vr.real();
  p.xi = std::atan2(p.b, p.a);
  if (p.xi < -kPi / 2.0) {
    p.omega = -kPi / 2.0 - p.xi;
  } else if (p.xi < kPi / 4.0) {
    p.omega = 0.0;
  } else {
    p.omega = kPi / 2.0;
  }
  return p;
}

/// Coupled amplitude update in polar coordinates; the energy constraint
/// holds by construction. Elements with a = b = 0 fall back to
/// (beta_t, beta_r) = (0, 1) and are reported in `degenerate`.
inline AmplitudeUpdate update_amplitudes(const ComplexVector& psi_t,
                                         const ComplexVector& psi_r,
                                         const ComplexVector& vartheta_t,
                                         const ComplexVector& vartheta_r) {
  const Eigen::Index n = vartheta_t.size();
  if (vartheta_r.size() != n || psi_t.size() != n || psi_r.size() != n) {
    throw InvalidInputError("update_amplitudes: vector length mismatch");
  }
  detail::check_unit_modulus(psi_t, "update_amplitudes");
  detail::check_unit_modulus(psi_r, "update_amplitudes");
  AmplitudeUpdate out;
  out.beta_t.resize(n);
  out.beta_r.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const ElementAmplitudeProblem p = make_element_amplitude_problem(
        psi_t[i], psi_r[i], vartheta_t[i], vartheta_r[i]);
    if (p.a == 0.0 && p.b == 0.0) {
      out.beta_t[i] = 0.0;
      out.beta_r[i] = 1.0;
      out.degenerate.push_back(i);
      continue;
    }
    if (p.omega == 0.0) {
      out.beta_t[i] = 0.0;
      out.beta_r[i] = 1.0;
    } else if (p.omega == kPi / 2.0) {
      out.beta_t[i] = 1.0;
      out.beta_r[i] = 0.0;
    } else {
      out.beta_t[i] = std::sin(p.omega);
      out.beta_r[i] = std::cos(p.omega);
    }
  }
  return out;
}

struct IndependentProjection {
  ComplexVector theta_t;
  ComplexVector theta_r;
  std::vector<Eigen::Index> degenerate;
};

/// Auxiliary update without the phase coupling: per element the energy
/// budget splits proportionally to |vartheta| and each phase opposes its
/// target, giving objective -sqrt(|vt|^2 + |vr|^2).
inline IndependentProjection project_independent(
    const ComplexVector& vartheta_t, const ComplexVector& vartheta_r) {
  const Eigen::Index n = vartheta_t.size();
  if (vartheta_r.size() != n) {
    throw InvalidInputError("project_independent: vector length mismatch");
  }
  IndependentProjection out;
  out.theta_t.resize(n);
  out.theta_r.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mt = std::abs(vartheta_t[i]);
    const double mr = std::abs(vartheta_r[i]);
    const double norm = std::hypot(mt, mr);
    if (norm == 0.0) {
      out.theta_t[i] = Complex{0.0, 0.0};
      out.theta_r[i] = Complex{1.0, 0.0};
      out.degenerate.push_back(i);
      continue;
    }
    out.theta_t[i] = -vartheta_t[i] / norm;
    out.theta_r[i] = -vartheta_r[i] / norm;
  }
  return out;
}

/// Phase-only projection: minimizer of Re(vartheta* psi) on the unit
/// circle, psi = -vartheta/|vartheta|; zero targets use arg(0) := 0 and
/// map to -1 like the degenerate coupled candidates.
inline ComplexVector project_unit_modulus(const ComplexVector& vartheta) {
  ComplexVector psi(vartheta.size());
  for (Eigen::Index i = 0; i < vartheta.size(); ++i) {
    const double mag = std::abs(vartheta[i]);
    psi[i] = mag == 0.0 ? Complex{-1.0, 0.0} : Complex(-vartheta[i] / mag);
  }
  return psi;
}

}  // namespace starpdd
