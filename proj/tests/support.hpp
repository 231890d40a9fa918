#pragma once

// Shared fixtures and independent reference computations for the test suites.

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "gmeas/measurement.hpp"
#include "gmeas/psdgeo.hpp"
#include "gmeas/random.hpp"
#include "gmeas/section.hpp"
#include "gmeas/tester.hpp"

namespace gmeas::fixtures {

inline HermitianOperator half_identity() { return HermitianOperator::identity(2) / 2.0; }

inline HermitianOperator ket_bra(std::initializer_list<Complex> entries) {
  ComplexVector v(static_cast<Index>(entries.size()));
  Index i = 0;
  for (Complex z : entries) v[i++] = z;
  return HermitianOperator::outer(v.normalized());
}

// Rank of a real matrix by plain SVD, relative threshold.
inline Index reference_rank(const RealMatrix& m, double rel = 1e-9) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<RealMatrix> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  Index r = 0;
  while (r < s.size() && s[r] > rel * s[0]) ++r;
  return r;
}

// Stacks real and imaginary parts of the entries: an R-linear injection of
// the complex matrices into R^{2 d^2}.
inline RealVector flatten(const Matrix& x) {
  const Index n = x.size();
  RealVector v(2 * n);
  for (Index k = 0; k < n; ++k) {
    v[k] = x.data()[k].real();
    v[n + k] = x.data()[k].imag();
  }
  return v;
}

// Orthonormal eigenvectors of x with eigenvalue above rel * max.
inline Matrix reference_range(const Matrix& x, double rel = 1e-9) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(x);
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  std::vector<Index> keep;
  for (Index i = 0; i < x.rows(); ++i) {
    if (es.eigenvalues()[i] > rel * top) keep.push_back(i);
  }
  Matrix v(x.rows(), static_cast<Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) v.col(static_cast<Index>(k)) = es.eigenvectors().col(keep[k]);
  return v;
}

// Spanning set of {V y V^dagger : y Hermitian} for an isometry V, flattened.
inline RealMatrix corner_columns(const Matrix& v) {
  const Index d = v.rows();
  const Index r = v.cols();
  RealMatrix cols(2 * d * d, r * r);
  Index c = 0;
  for (Index i = 0; i < r; ++i) {
    for (Index j = 0; j < r; ++j) {
      Matrix y = Matrix::Zero(r, r);
      if (i == j) {
        y(i, i) = 1.0;
      } else if (i < j) {
        y(i, j) = 1.0;
        y(j, i) = 1.0;
      } else {
        y(i, j) = Complex(0.0, 1.0);
        y(j, i) = Complex(0.0, -1.0);
      }
      cols.col(c++) = flatten(v * y * v.adjoint());
    }
  }
  return cols;
}

// Ordinary POVM extremality: the corners s(M_u) A s(M_u) are linearly
// independent, i.e. their dimensions add up to the dimension of their sum.
inline bool weakly_independent(const std::vector<HermitianOperator>& elements) {
  std::vector<RealMatrix> blocks;
  Index total = 0;
  Index rows = 0;
  for (const auto& e : elements) {
    const Matrix v = reference_range(e.matrix());
    blocks.push_back(corner_columns(v));
    total += v.cols() * v.cols();
    rows = blocks.back().rows();
  }
  RealMatrix all(rows, total);
  Index c = 0;
  for (const auto& b : blocks) {
    all.middleCols(c, b.cols()) = b;
    c += b.cols();
  }
  return reference_rank(all) == total;
}

// Dimension of the span of the channel section.
inline Index channel_span_dimension(Index d_in, Index d_out) {
  return d_in * d_in * d_out * d_out - d_in * d_in + 1;
}

// Dimension of the span of {rho on K (x) H : Tr_K rho = sigma} for full-rank sigma.
inline Index marginal_span_dimension(Index d_k, Index d_h) { return d_k * d_k * d_h * d_h - d_h * d_h + 1; }

// Largest distance between the classes of corresponding elements.
inline double quotient_distance(const Section& section, const std::vector<HermitianOperator>& a,
                                const std::vector<HermitianOperator>& b) {
  double worst = 0.0;
  for (std::size_t u = 0; u < a.size(); ++u) {
    worst = std::max(worst, section.span().project(a[u] - b[u]).frobenius());
  }
  return worst;
}

// Largest t in [0, cap] with x + t d >= -slack I, by bisection (the feasible
// set of t is an interval containing 0).
inline double feasible_step(const HermitianOperator& x, const HermitianOperator& d, double cap, double slack) {
  auto ok = [&](double t) { return (x + t * d).min_eigenvalue() >= -slack; };
  if (ok(cap)) return cap;
  double lo = 0.0;
  double hi = cap;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

// Walks inside C = {a + w : w in K^perp, a + w >= 0} from `start`.  Odd steps
// move along random directions of K^perp, even steps along their compression
// to `face` so that the walk also explores the interior of that face.
inline std::vector<HermitianOperator> hit_and_run(const Section& section, const HermitianOperator& start,
                                                  const Projection& face, int steps, Rng& rng) {
  std::vector<HermitianOperator> points;
  const HermSubspace& perp = section.annihilator();
  if (perp.dim() == 0) return {start};
  const HermSubspace inner_dirs = intersect(perp, HermSubspace::corner(face));
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit;
  HermitianOperator x = start;
  const double slack = 1e-12 * std::max(1.0, start.norm());
  for (int s = 0; s < steps; ++s) {
    const HermSubspace& dirs = (s % 2 == 1 || inner_dirs.dim() == 0) ? perp : inner_dirs;
    RealVector coeffs(dirs.dim());
    for (Index i = 0; i < coeffs.size(); ++i) coeffs[i] = gauss(rng);
    const HermitianOperator dir = dirs.combine(coeffs.normalized());
    const double cap = 1e2 * std::max(1.0, x.frobenius());
    const double up = feasible_step(x, dir, cap, slack);
    const double down = feasible_step(x, -dir, cap, slack);
    x = x + (-down + (up + down) * unit(rng)) * dir;
    points.push_back(x);
  }
  return points;
}

}  // namespace gmeas::fixtures
