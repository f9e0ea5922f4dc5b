#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "starpdd/errors.hpp"
#include "starpdd/numerics.hpp"
#include "starpdd/wmmse.hpp"

namespace starpdd {

struct PddOptions {
  double rho0 = 1.0;
  double c = 0.8;
  double eta0 = 1e-3;
  double delta_threshold = 1e-6;
  double inner_tol = 1e-4;
  int inner_max = 50;
  int outer_max = 200;
  bool record_trace = false;

  void validate() const {
    if (!(rho0 > 0.0)) throw InvalidInputError("PddOptions: rho0 must be > 0");
    if (!(c > 0.0 && c < 1.0)) {
      throw InvalidInputError("PddOptions: c must lie in (0,1)");
    }
    if (!(eta0 > 0.0) || !(delta_threshold > 0.0) || !(inner_tol > 0.0)) {
      throw InvalidInputError("PddOptions: tolerances must be > 0");
    }
    if (inner_max < 1 || outer_max < 1) {
      throw InvalidInputError("PddOptions: iteration caps must be >= 1");
    }
  }
};

struct PddState {
  double rho = 1.0;
  SidePair lambda;
  double eta = 1e-3;
  double c = 0.8;
  double delta = std::numeric_limits<double>::infinity();
};

struct TraceRow {
  int outer = 0;
  int inner = 0;
  double al = 0.0;
  double objective = 0.0;
  double delta = 0.0;
  double rho = 0.0;
  RealVector phase_gap;  // per element, arg(theta_t) - arg(theta_r) in [0,2pi)
};

using RunTrace = std::vector<TraceRow>;

struct PddSummary {
  bool converged = false;
  int outer_iterations = 0;
  int inner_iterations = 0;
  double final_delta = 0.0;
  double final_objective = 0.0;
  RunTrace trace;
};

/// delta = max over sides of the infinity norm of theta_tilde - theta.
inline double constraint_violation(const SidePair& theta,
                                   const SidePair& theta_tilde) {
  if (theta.t.size() != theta_tilde.t.size() ||
      theta.r.size() != theta_tilde.r.size()) {
    throw InvalidInputError("constraint_violation: length mismatch");
  }
  double d = 0.0;
  if (theta.t.size() > 0) {
    d = (theta_tilde.t - theta.t).cwiseAbs().maxCoeff();
  }
  if (theta.r.size() > 0) {
    d = std::max(d, (theta_tilde.r - theta.r).cwiseAbs().maxCoeff());
  }
  return d;
}

inline RealVector phase_gaps(const SidePair& theta) {
  RealVector gap(theta.t.size());
  for (Eigen::Index i = 0; i < gap.size(); ++i) {
    gap[i] = wrap_angle(std::arg(theta.t[i]) - std::arg(theta.r[i]));
  }
  return gap;
}

/// Dual ascent when the violation already meets eta, penalty shrink
/// otherwise; then the target tightens to 0.9 delta.
inline void outer_step(PddState& state, const SidePair& theta,
                       const SidePair& theta_tilde) {
  const double delta = constraint_violation(theta, theta_tilde);
  if (delta <= state.eta) {
    state.lambda.t += (theta_tilde.t - theta.t) / state.rho;
    state.lambda.r += (theta_tilde.r - theta.r) / state.rho;
  } else {
    state.rho *= state.c;
  }
  state.eta = 0.9 * delta;
  state.delta = delta;
}

/// One inner BCD run. Problem must provide block_count(), update_block(b,
/// state), augmented_lagrangian(state), objective_value(), theta(),
/// theta_tilde(). Every block is expected to be an exact minimizer; an AL
/// increase beyond 1e-9 is treated as a bug, not noise.
template <typename Problem>
int inner_bcd(Problem& problem, const PddState& state, double tol,
              int max_iter, RunTrace* trace = nullptr, int outer_index = 1) {
  if (!(tol > 0.0) || max_iter < 1) {
    throw InvalidInputError("inner_bcd: bad tolerance or iteration cap");
  }
  double prev = problem.augmented_lagrangian(state);
  int iters = 0;
  for (int it = 1; it <= max_iter; ++it) {
    const double sweep_start = prev;
    for (int b = 0; b < problem.block_count(); ++b) {
      problem.update_block(b, state);
      const double cur = problem.augmented_lagrangian(state);
      if (cur > prev + 1e-9) {
        throw InternalError("inner_bcd: block " + std::to_string(b) +
                            " increased the augmented Lagrangian by " +
                            std::to_string(cur - prev));
      }
      prev = cur;
    }
    iters = it;
    if (trace) {
      TraceRow row;
      row.outer = outer_index;
      row.inner = it;
      row.al = prev;
      row.objective = problem.objective_value();
      row.delta = constraint_violation(problem.theta(), problem.theta_tilde());
      row.rho = state.rho;
      row.phase_gap = phase_gaps(problem.theta());
      trace->push_back(std::move(row));
    }
    if (std::abs(sweep_start - prev) <= tol * std::max(1.0, std::abs(prev))) {
      break;
    }
  }
  return iters;
}

/// Full PDD driver. Runs inner BCD, checks the violation, then either
/// stops, updates the duals, or shrinks the penalty. If the outer cap is
/// hit the best iterate seen (smallest delta) is restored and flagged.
/// finalize(state) is always called on the returned iterate.
template <typename Problem>
PddSummary solve(Problem& problem, const PddOptions& options) {
  options.validate();
  PddState state;
  state.rho = options.rho0;
  state.c = options.c;
  state.eta = options.eta0;
  state.lambda.t = ComplexVector::Zero(problem.theta().t.size());
  state.lambda.r = ComplexVector::Zero(problem.theta().r.size());

  PddSummary out;
  Problem best = problem;
  PddState best_state = state;
  double best_delta = std::numeric_limits<double>::infinity();

  for (int outer = 1; outer <= options.outer_max; ++outer) {
    out.outer_iterations = outer;
    out.inner_iterations +=
        inner_bcd(problem, state, options.inner_tol, options.inner_max,
                  options.record_trace ? &out.trace : nullptr, outer);
    const double delta =
        constraint_violation(problem.theta(), problem.theta_tilde());
    state.delta = delta;
    if (delta < best_delta) {
      best_delta = delta;
      best = problem;
      best_state = state;
    }
    if (delta < options.delta_threshold) {
      out.converged = true;
      break;
    }
    outer_step(state, problem.theta(), problem.theta_tilde());
  }

  if (!out.converged) {
    problem = best;
    state = best_state;
  }
  out.final_delta = constraint_violation(problem.theta(), problem.theta_tilde());
  problem.finalize(state);
  out.final_objective = problem.objective_value();
  return out;
}

}  // namespace starpdd
