#pragma once

#include <span>
#include <vector>

#include "gmeas/operator.hpp"

namespace gmeas {

/// Real-linear subspace of the d x d Hermitian matrices.
///
/// Stored as a d^2 x k matrix whose columns are the vectorized elements of an
/// orthonormal basis (trace inner product).  All constructors orthonormalize
/// with a rank-revealing SVD at the supplied tolerance.
class HermSubspace {
 public:
  HermSubspace() = default;
  /// Adopts `basis` as given; columns must already be orthonormal.
  HermSubspace(Index d, RealMatrix basis);

  static HermSubspace zero(Index d);
  static HermSubspace full(Index d);
  static HermSubspace span(Index d, std::span<const HermitianOperator> elements, const Tolerances& tol = {});
  static HermSubspace span_vectors(Index d, const RealMatrix& columns, const Tolerances& tol = {});
  /// A_p^h: Hermitian operators supported in the range of p.
  static HermSubspace corner(const Projection& p);

  Index ambient() const { return d_; }
  Index dim() const { return basis_.cols(); }
  const RealMatrix& basis_matrix() const { return basis_; }
  HermitianOperator element(Index k) const { return devectorize(basis_.col(k), d_); }
  std::vector<HermitianOperator> elements() const;

  /// Coordinates of the orthogonal projection of x in this basis.
  RealVector coordinates(const HermitianOperator& x) const;
  HermitianOperator project(const HermitianOperator& x) const;
  HermitianOperator combine(const RealVector& coefficients) const;
  /// ||x - project(x)||_F <= tol.num * max(1, ||x||_F).
  bool contains(const HermitianOperator& x, const Tolerances& tol = {}) const;
  double distance(const HermitianOperator& x) const;

 private:
  Index d_ = 0;
  RealMatrix basis_;
};

HermSubspace orthocomplement(const HermSubspace& v);
HermSubspace add(const HermSubspace& v, const HermSubspace& w, const Tolerances& tol = {});
HermSubspace intersect(const HermSubspace& v, const HermSubspace& w, const Tolerances& tol = {});
/// {s x s : x in V}, as a subspace of the ambient space.
HermSubspace compress(const HermSubspace& v, const Projection& s, const Tolerances& tol = {});
/// {W^dagger x W : x in V} for an isometry W (d x r), a subspace of Herm(r).
HermSubspace restrict_to(const HermSubspace& v, const Matrix& isometry, const Tolerances& tol = {});
/// {W y W^dagger : y in V} for an isometry W (d x r); isometric, no re-orthonormalization.
HermSubspace embed(const HermSubspace& v, const Matrix& isometry);
/// Same subspace within tolerance.
bool same_subspace(const HermSubspace& v, const HermSubspace& w, const Tolerances& tol = {});

/// Orthonormal basis of the traceless Hermitian d x d matrices.
std::vector<HermitianOperator> traceless_basis(Index d);
/// Orthonormal basis of all Hermitian d x d matrices (the coordinate basis).
std::vector<HermitianOperator> hermitian_basis(Index d);

/// Orthonormal basis of the null space of `m` (columns), singular values
/// below `threshold` counted as zero.  All singular values, descending, are
/// written to `singular_values` when given.
RealMatrix null_space(const RealMatrix& m, double threshold, RealVector* singular_values = nullptr);
/// Numerical rank with the same convention.
Index numerical_rank(const RealMatrix& m, double threshold);

}  // namespace gmeas
