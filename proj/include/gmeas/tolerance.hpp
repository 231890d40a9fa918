#pragma once

namespace gmeas {

/// Numerical thresholds shared by every module.
///
/// Rank and positivity decisions are relative to the spectral norm of the
/// operand; equality of operators is a relative Frobenius comparison.  The
/// convex solver works to an absolute accuracy `sdp`, and any support or
/// membership decision taken on solver output uses the coarser
/// `10 * sdp` threshold returned by `after_solve()`.
struct Tolerances {
  double herm = 1e-9;
  double rank = 1e-9;
  double num = 1e-9;
  double sdp = 1e-7;

  /// Newton step cap for a single barrier solve.
  int max_newton_steps = 600;

  double after_solve() const { return 10.0 * sdp; }
};

}  // namespace gmeas
