#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "starpdd/errors.hpp"

namespace starpdd {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Wraps an angle into the canonical range [0, 2*pi).
inline double wrap_angle(double phi) {
  double w = std::fmod(phi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;  // fmod can land exactly on 2*pi after the add
  return w;
}

/// Solves A x = b for Hermitian positive-definite A via Cholesky, followed by
/// one step of iterative refinement. `context` names the calling block in
/// error messages. The returned x satisfies ||Ax-b|| <= 1e-10 * ||b||.
inline ComplexVector solve_hpd(const ComplexMatrix& a, const ComplexVector& b,
                               const std::string& context = "solve_hpd") {
  if (a.rows() != a.cols() || a.rows() != b.size()) {
    throw InvalidInputError(context + ": dimension mismatch");
  }
  if (!a.allFinite() || !b.allFinite()) {
    throw InvalidInputError(context + ": non-finite input");
  }
  const double scale = a.size() > 0 ? a.cwiseAbs().maxCoeff() : 0.0;
  if ((a - a.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, scale)) {
    throw InvalidInputError(context + ": matrix is not Hermitian");
  }

  Eigen::LLT<ComplexMatrix> llt(a);
  if (llt.info() != Eigen::Success) {
    throw NumericalError(context + ": matrix is not positive definite");
  }
  ComplexVector x = llt.solve(b);
  x += llt.solve(b - a * x);

  const double residual = (a * x - b).norm();
  if (residual > 1e-10 * std::max(b.norm(), 1e-30)) {
    throw NumericalError(context + ": solve residual " +
                         std::to_string(residual) + " exceeds tolerance");
  }
  return x;
}

/// Bisection root finder for a continuous nonincreasing f with
/// f(lo) >= 0 >= f(hi). Stops once |f(mid)| <= tol or the bracket width
/// drops below tol * max(1, |mid|).
template <typename F>
double bisect_decreasing(F&& f, double lo, double hi, double tol) {
  if (!(std::isfinite(lo) && std::isfinite(hi)) || !(lo < hi) || !(tol > 0.0)) {
    throw InvalidInputError("bisect_decreasing: bad interval or tolerance");
  }
  const double flo = f(lo);
  const double fhi = f(hi);
  if (!(flo >= 0.0) || !(fhi <= 0.0)) {
    throw InvalidBracketError("bisect_decreasing: need f(lo) >= 0 >= f(hi)");
  }
  if (std::abs(flo) <= tol) return lo;
  if (std::abs(fhi) <= tol) return hi;

  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 2000; ++it) {
    mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (std::abs(fm) <= tol) return mid;
    (fm > 0.0 ? lo : hi) = mid;
    if (hi - lo <= tol * std::max(1.0, std::abs(mid))) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace starpdd
