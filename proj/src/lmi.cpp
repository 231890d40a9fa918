#include "gmeas/lmi.hpp"

#include <cmath>
#include <limits>

#include "gmeas/errors.hpp"
#include "gmeas/log.hpp"

namespace gmeas::lmi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Newton decrement (squared) at which a point counts as centered.
constexpr double kCentered = 1e-8;

struct Evaluation {
  bool feasible = false;
  double barrier = kInf;  // -log det S - sum log g
  Eigen::LLT<Matrix> chol;
  RealVector scalars;
};

Evaluation evaluate(const Problem& p, const RealVector& z) {
  Evaluation e;
  const Index ns = static_cast<Index>(p.scalar_offset.size());
  e.scalars.resize(ns);
  double log_g = 0.0;
  for (Index k = 0; k < ns; ++k) {
    const double g = p.scalar_offset[static_cast<std::size_t>(k)] + p.scalar_rows[static_cast<std::size_t>(k)].dot(z);
    if (!(g > 0.0)) return e;
    e.scalars[k] = g;
    log_g += std::log(g);
  }
  e.chol.compute(p.slack(z));
  if (e.chol.info() != Eigen::Success) return e;
  const auto diag = e.chol.matrixLLT().diagonal();
  double logdet = 0.0;
  for (Index i = 0; i < diag.size(); ++i) {
    const double v = diag[i].real();
    if (!(v > 0.0) || !std::isfinite(v)) return e;
    logdet += 2.0 * std::log(v);
  }
  e.feasible = true;
  e.barrier = -logdet - log_g;
  return e;
}

// Solves H x = b after symmetric diagonal scaling; adds a ridge if needed.
RealVector solve_spd(const RealMatrix& h, const RealVector& b) {
  const Index m = h.rows();
  RealVector scale(m);
  for (Index i = 0; i < m; ++i) scale[i] = h(i, i) > 0.0 ? 1.0 / std::sqrt(h(i, i)) : 1.0;
  RealMatrix hs = scale.asDiagonal() * h * scale.asDiagonal();
  RealVector bs = scale.asDiagonal() * b;
  for (double ridge = 0.0; ridge < 1.0; ridge = ridge == 0.0 ? 1e-14 : ridge * 100.0) {
    RealMatrix hr = hs;
    hr.diagonal().array() += ridge;
    Eigen::LDLT<RealMatrix> ldlt(hr);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
      RealVector x = ldlt.solve(bs);
      if (x.allFinite()) return scale.asDiagonal() * x;
    }
  }
  return RealVector::Zero(m);
}

}  // namespace

Matrix Problem::slack(const RealVector& z) const {
  Matrix s = constant;
  for (Index i = 0; i < variables(); ++i) s += z[i] * coefficients[static_cast<std::size_t>(i)];
  return s;
}

bool strictly_feasible(const Problem& problem, const RealVector& z) { return evaluate(problem, z).feasible; }

Result maximize(const Problem& p, RealVector z, const Options& options) {
  const Index m = p.variables();
  const Index n = p.size();
  const Index ns = static_cast<Index>(p.scalar_offset.size());
  if (z.size() != m) throw DimensionMismatch("lmi: start point has wrong length");
  Evaluation current = evaluate(p, z);
  if (!current.feasible) throw Infeasible("lmi: start point is not strictly feasible");

  Result result;
  const double nu = p.barrier_parameter();
  double tau = options.tau_initial;

  // Vectorized coefficient matrices, reused every Newton step.
  Matrix transformed(n * n, m);

  while (true) {
    // Centering for the current tau.  Exact centering is not needed: the
    // reported gap is widened by the final Newton decrement.
    double last_decrement = 0.0;
    for (int inner = 0; inner < 50; ++inner) {
      if (result.newton_steps >= options.max_newton_steps) break;
      ++result.newton_steps;

      const auto& llt = current.chol;
      for (Index i = 0; i < m; ++i) {
        Matrix g = llt.matrixL().solve(p.coefficients[static_cast<std::size_t>(i)]);
        g = llt.matrixL().solve(g.adjoint().eval());  // L^{-1} F L^{-H}
        transformed.col(i) = Eigen::Map<const ComplexVector>(g.data(), n * n);
      }
      RealVector grad(m);
      for (Index i = 0; i < m; ++i) {
        Complex tr = 0.0;
        for (Index a = 0; a < n; ++a) tr += transformed(a * n + a, i);
        grad[i] = -tau * p.objective[i] - tr.real();
      }
      RealMatrix hess = (transformed.adjoint() * transformed).real();
      for (Index k = 0; k < ns; ++k) {
        const RealVector& row = p.scalar_rows[static_cast<std::size_t>(k)];
        const double g = current.scalars[k];
        grad -= row / g;
        hess += row * row.transpose() / (g * g);
      }
      const RealVector step = solve_spd(hess, -grad);
      const double decrement = -grad.dot(step);
      last_decrement = std::max(0.0, decrement);
      if (!(decrement > 0.0) || decrement < kCentered) break;

      const double phi0 = -tau * p.objective.dot(z) + current.barrier;
      double alpha = 1.0;
      bool accepted = false;
      for (int ls = 0; ls < 80; ++ls, alpha *= 0.5) {
        RealVector trial = z + alpha * step;
        Evaluation e = evaluate(p, trial);
        if (!e.feasible) continue;
        const double phi = -tau * p.objective.dot(trial) + e.barrier;
        if (phi <= phi0 - 0.25 * alpha * decrement) {
          z = std::move(trial);
          current = std::move(e);
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
    }

    result.gap = nu / tau * (1.0 + std::sqrt(last_decrement));
    result.value = p.objective.dot(z);
    if (options.stop && options.stop(z, result.value, result.gap)) {
      result.stopped_early = true;
      break;
    }
    if (result.gap <= options.gap) {
      result.converged = true;
      break;
    }
    if (result.newton_steps >= options.max_newton_steps) {
      logger().warn("lmi: Newton step cap reached with gap {:.3e}", result.gap);
      break;
    }
    tau *= options.tau_factor;
  }
  result.z = std::move(z);
  return result;
}

}  // namespace gmeas::lmi
