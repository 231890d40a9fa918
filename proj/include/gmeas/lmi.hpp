#pragma once

#include <functional>
#include <vector>

#include "gmeas/operator.hpp"

namespace gmeas::lmi {

/// maximize  objective . z
/// s.t.      constant + sum_i z_i coefficients[i]  is positive definite,
///           scalar_offset[k] + scalar_rows[k] . z > 0  for every k.
///
/// Solved by a log-det barrier method with damped Newton centering.  The
/// start point must be strictly feasible.
struct Problem {
  Matrix constant;
  std::vector<Matrix> coefficients;
  RealVector objective;
  std::vector<double> scalar_offset;
  std::vector<RealVector> scalar_rows;

  Index variables() const { return static_cast<Index>(coefficients.size()); }
  Index size() const { return constant.rows(); }
  /// Barrier parameter nu: the duality gap of a centered point is nu / tau.
  double barrier_parameter() const { return static_cast<double>(size() + static_cast<Index>(scalar_offset.size())); }
  Matrix slack(const RealVector& z) const;
};

struct Options {
  /// Stop once nu / tau drops below this.
  double gap = 1e-10;
  double tau_initial = 1.0;
  double tau_factor = 10.0;
  int max_newton_steps = 600;
  /// Called after each centering; returning true stops the solve early.
  std::function<bool(const RealVector& z, double value, double gap)> stop;
};

struct Result {
  RealVector z;
  double value = 0.0;
  /// Upper bound on (optimum - value) for a centered point.
  double gap = 0.0;
  int newton_steps = 0;
  bool converged = false;
  bool stopped_early = false;
};

Result maximize(const Problem& problem, RealVector start, const Options& options);

/// True if the slack matrix and scalar constraints are strictly positive at z.
bool strictly_feasible(const Problem& problem, const RealVector& z);

}  // namespace gmeas::lmi
