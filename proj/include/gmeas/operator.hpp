#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gmeas/tolerance.hpp"

namespace gmeas {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Eigen-decomposition of a Hermitian operator, eigenvalues ascending.
struct Spectrum {
  RealVector values;
  Matrix vectors;
};

/// Dense complex Hermitian matrix.
///
/// Construction checks hermiticity relative to the Frobenius norm and then
/// replaces the entries by the exact Hermitian part, so every instance is
/// exactly self-adjoint.
class HermitianOperator {
 public:
  HermitianOperator() = default;
  explicit HermitianOperator(Matrix m, double tol = Tolerances{}.herm);

  static HermitianOperator zero(Index d);
  static HermitianOperator identity(Index d);
  static HermitianOperator diagonal(const RealVector& diag);
  /// |v><v|
  static HermitianOperator outer(const ComplexVector& v);
  /// Takes the Hermitian part of `m` without checking.
  static HermitianOperator hermitian_part(const Matrix& m);

  Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  Complex operator()(Index i, Index j) const { return m_(i, j); }

  double trace() const;
  double norm() const;  // spectral
  double frobenius() const { return m_.norm(); }
  Spectrum spectrum() const;
  RealVector eigenvalues() const;
  double min_eigenvalue() const;
  double max_eigenvalue() const;
  bool is_psd(const Tolerances& tol = {}) const;

  HermitianOperator& operator+=(const HermitianOperator& o);
  HermitianOperator& operator-=(const HermitianOperator& o);
  HermitianOperator& operator*=(double s);

  friend HermitianOperator operator+(HermitianOperator a, const HermitianOperator& b) { return a += b; }
  friend HermitianOperator operator-(HermitianOperator a, const HermitianOperator& b) { return a -= b; }
  friend HermitianOperator operator*(HermitianOperator a, double s) { return a *= s; }
  friend HermitianOperator operator*(double s, HermitianOperator a) { return a *= s; }
  friend HermitianOperator operator/(HermitianOperator a, double s) { return a *= 1.0 / s; }
  HermitianOperator operator-() const { return HermitianOperator::hermitian_part(-m_); }

 private:
  struct Unchecked {};
  HermitianOperator(Matrix m, Unchecked) : m_(std::move(m)) {}
  Matrix m_;
};

/// Tr(x y) for Hermitian x, y.
double inner(const HermitianOperator& x, const HermitianOperator& y);

/// Relative Frobenius equality: ||x - y|| <= tol.num * max(1, ||x||, ||y||).
bool approx_equal(const HermitianOperator& x, const HermitianOperator& y, const Tolerances& tol = {});

/// v x v^dagger for a (possibly rectangular) v.
HermitianOperator congruence(const Matrix& v, const HermitianOperator& x);

/// Orthogonal projection, stored together with an isometry onto its range.
class Projection {
 public:
  Projection() = default;
  /// From an isometry (orthonormal columns spanning the range).
  static Projection from_isometry(Matrix range);
  /// Validates P^2 = P and rounds eigenvalues to {0, 1}.
  static Projection from_operator(const HermitianOperator& p, const Tolerances& tol = {});
  static Projection identity(Index d);
  static Projection zero(Index d);

  Index dim() const { return op_.dim(); }
  Index rank() const { return range_.cols(); }
  const HermitianOperator& op() const { return op_; }
  /// d x rank isometry onto the range.
  const Matrix& range() const { return range_; }
  Projection complement() const;
  bool is_identity() const { return rank() == dim(); }
  /// p <= q, i.e. q p = p.
  bool leq(const Projection& q, const Tolerances& tol = {}) const;
  bool operator==(const Projection& other) const;

 private:
  HermitianOperator op_;
  Matrix range_;
};

/// Factor dimensions of a bipartite space; the first factor is the output
/// side of a Choi matrix, row-major flattening (index = i_out * d_in + i_in).
struct TensorShape {
  Index first = 1;
  Index second = 1;
  Index total() const { return first * second; }
};

enum class Factor { first, second };

Matrix kron(const Matrix& a, const Matrix& b);
HermitianOperator tensor(const HermitianOperator& x, const HermitianOperator& y);
/// Traces out `traced` of `shape`.
HermitianOperator partial_trace(const HermitianOperator& x, TensorShape shape, Factor traced);
Matrix partial_trace(const Matrix& x, TensorShape shape, Factor traced);

/// Support projection: eigenvalues above tol.rank * ||x||.
/// Throws NotPositive if an eigenvalue is below -tol.rank * ||x||.
Projection support(const HermitianOperator& x, const Tolerances& tol = {});
/// Support with an explicit relative threshold (used after solver output).
Projection support_with_threshold(const HermitianOperator& x, double relative_threshold);

HermitianOperator sqrt_psd(const HermitianOperator& x, const Tolerances& tol = {});
/// x^{-1/2} on the support of x, zero on its kernel.
HermitianOperator pinv_sqrt(const HermitianOperator& x, const Tolerances& tol = {});
HermitianOperator pinv(const HermitianOperator& x, const Tolerances& tol = {});

/// Real coordinates on the Hermitian d x d matrices: the d diagonal entries
/// first, then for each pair i < j in row-major order the two coordinates
/// (sqrt2 Re x_ij, sqrt2 Im x_ij).  The map is an isometry from the trace
/// inner product to the Euclidean one.
RealVector vectorize(const HermitianOperator& x);
HermitianOperator devectorize(const RealVector& v, Index d);
/// Same coordinates applied to the Hermitian part of an arbitrary matrix.
RealVector vectorize_matrix(const Matrix& x);

}  // namespace gmeas
