#include "gmeas/subspace.hpp"

#include <algorithm>
#include <cmath>

#include "gmeas/errors.hpp"

namespace gmeas {

namespace {

// Left singular vectors of `columns` with singular value above the relative threshold.
RealMatrix orthonormal_range(const RealMatrix& columns, double relative_threshold) {
  if (columns.cols() == 0 || columns.rows() == 0) return RealMatrix(columns.rows(), 0);
  Eigen::BDCSVD<RealMatrix> svd(columns, Eigen::ComputeThinU);
  const RealVector& sv = svd.singularValues();
  const double smax = sv.size() ? sv[0] : 0.0;
  Index r = 0;
  while (r < sv.size() && sv[r] > relative_threshold * smax && sv[r] > 0.0) ++r;
  return svd.matrixU().leftCols(r);
}

void check_same_ambient(const HermSubspace& v, const HermSubspace& w) {
  if (v.ambient() != w.ambient()) throw DimensionMismatch("subspaces live in different ambient spaces");
}

}  // namespace

HermSubspace::HermSubspace(Index d, RealMatrix basis) : d_(d), basis_(std::move(basis)) {
  if (basis_.rows() != d * d) throw DimensionMismatch("subspace basis rows must equal d^2");
}

HermSubspace HermSubspace::zero(Index d) { return {d, RealMatrix(d * d, 0)}; }

HermSubspace HermSubspace::full(Index d) { return {d, RealMatrix::Identity(d * d, d * d)}; }

HermSubspace HermSubspace::span(Index d, std::span<const HermitianOperator> elements, const Tolerances& tol) {
  RealMatrix cols(d * d, static_cast<Index>(elements.size()));
  for (std::size_t k = 0; k < elements.size(); ++k) {
    if (elements[k].dim() != d) throw DimensionMismatch("span: element dimension mismatch");
    cols.col(static_cast<Index>(k)) = vectorize(elements[k]);
  }
  return span_vectors(d, cols, tol);
}

HermSubspace HermSubspace::span_vectors(Index d, const RealMatrix& columns, const Tolerances& tol) {
  if (columns.rows() != d * d) throw DimensionMismatch("span: vector length must be d^2");
  return {d, orthonormal_range(columns, tol.rank)};
}

HermSubspace HermSubspace::corner(const Projection& p) {
  const Index d = p.dim();
  const Index r = p.rank();
  RealMatrix cols(d * d, r * r);
  Index k = 0;
  for (const auto& e : hermitian_basis(r)) cols.col(k++) = vectorize(congruence(p.range(), e));
  return {d, std::move(cols)};
}

std::vector<HermitianOperator> HermSubspace::elements() const {
  std::vector<HermitianOperator> out;
  out.reserve(static_cast<std::size_t>(dim()));
  for (Index k = 0; k < dim(); ++k) out.push_back(element(k));
  return out;
}

RealVector HermSubspace::coordinates(const HermitianOperator& x) const {
  if (x.dim() != d_) throw DimensionMismatch("subspace coordinates: dimension mismatch");
  return basis_.transpose() * vectorize(x);
}

HermitianOperator HermSubspace::project(const HermitianOperator& x) const {
  return combine(coordinates(x));
}

HermitianOperator HermSubspace::combine(const RealVector& coefficients) const {
  if (dim() == 0) return HermitianOperator::zero(d_);
  return devectorize(basis_ * coefficients, d_);
}

double HermSubspace::distance(const HermitianOperator& x) const {
  const RealVector v = vectorize(x);
  if (dim() == 0) return v.norm();
  return (v - basis_ * (basis_.transpose() * v)).norm();
}

bool HermSubspace::contains(const HermitianOperator& x, const Tolerances& tol) const {
  return distance(x) <= tol.num * std::max(1.0, x.frobenius());
}

HermSubspace orthocomplement(const HermSubspace& v) {
  const Index n = v.ambient() * v.ambient();
  const Index k = v.dim();
  if (k == 0) return HermSubspace::full(v.ambient());
  if (k == n) return HermSubspace::zero(v.ambient());
  Eigen::HouseholderQR<RealMatrix> qr(v.basis_matrix());
  RealMatrix q = qr.householderQ() * RealMatrix::Identity(n, n);
  return {v.ambient(), q.rightCols(n - k)};
}

HermSubspace add(const HermSubspace& v, const HermSubspace& w, const Tolerances& tol) {
  check_same_ambient(v, w);
  RealMatrix cols(v.basis_matrix().rows(), v.dim() + w.dim());
  cols << v.basis_matrix(), w.basis_matrix();
  return HermSubspace::span_vectors(v.ambient(), cols, tol);
}

HermSubspace intersect(const HermSubspace& v, const HermSubspace& w, const Tolerances& tol) {
  check_same_ambient(v, w);
  if (v.dim() == 0 || w.dim() == 0) return HermSubspace::zero(v.ambient());
  RealMatrix stacked(v.basis_matrix().rows(), v.dim() + w.dim());
  stacked << v.basis_matrix(), -w.basis_matrix();
  const RealMatrix null = null_space(stacked, 10.0 * tol.rank);
  if (null.cols() == 0) return HermSubspace::zero(v.ambient());
  const RealMatrix common = v.basis_matrix() * null.topRows(v.dim());
  return HermSubspace::span_vectors(v.ambient(), common, tol);
}

HermSubspace compress(const HermSubspace& v, const Projection& s, const Tolerances& tol) {
  if (s.dim() != v.ambient()) throw DimensionMismatch("compress: projection dimension mismatch");
  std::vector<HermitianOperator> out;
  out.reserve(static_cast<std::size_t>(v.dim()));
  for (Index k = 0; k < v.dim(); ++k) out.push_back(congruence(s.op().matrix(), v.element(k)));
  return HermSubspace::span(v.ambient(), out, tol);
}

HermSubspace restrict_to(const HermSubspace& v, const Matrix& isometry, const Tolerances& tol) {
  if (isometry.rows() != v.ambient()) throw DimensionMismatch("restrict_to: isometry dimension mismatch");
  const Index r = isometry.cols();
  std::vector<HermitianOperator> out;
  out.reserve(static_cast<std::size_t>(v.dim()));
  for (Index k = 0; k < v.dim(); ++k) out.push_back(congruence(isometry.adjoint(), v.element(k)));
  return HermSubspace::span(r, out, tol);
}

HermSubspace embed(const HermSubspace& v, const Matrix& isometry) {
  if (isometry.cols() != v.ambient()) throw DimensionMismatch("embed: isometry dimension mismatch");
  const Index d = isometry.rows();
  RealMatrix cols(d * d, v.dim());
  for (Index k = 0; k < v.dim(); ++k) cols.col(k) = vectorize(congruence(isometry, v.element(k)));
  return {d, std::move(cols)};
}

bool same_subspace(const HermSubspace& v, const HermSubspace& w, const Tolerances& tol) {
  if (v.ambient() != w.ambient() || v.dim() != w.dim()) return false;
  if (v.dim() == 0) return true;
  const RealMatrix residual = w.basis_matrix() - v.basis_matrix() * (v.basis_matrix().transpose() * w.basis_matrix());
  return residual.norm() <= 1e3 * tol.num * std::sqrt(static_cast<double>(v.dim()));
}

std::vector<HermitianOperator> hermitian_basis(Index d) {
  std::vector<HermitianOperator> out;
  out.reserve(static_cast<std::size_t>(d * d));
  for (Index k = 0; k < d * d; ++k) {
    RealVector e = RealVector::Zero(d * d);
    e[k] = 1.0;
    out.push_back(devectorize(e, d));
  }
  return out;
}

std::vector<HermitianOperator> traceless_basis(Index d) {
  // Orthonormal complement of I/sqrt(d) inside the coordinate basis.
  std::vector<HermitianOperator> id{HermitianOperator::identity(d)};
  const HermSubspace identity_line = HermSubspace::span(d, id);
  return orthocomplement(identity_line).elements();
}

RealMatrix null_space(const RealMatrix& m, double threshold, RealVector* singular_values) {
  const Index cols = m.cols();
  if (singular_values) *singular_values = RealVector();
  if (cols == 0) return RealMatrix(0, 0);
  if (m.rows() == 0) return RealMatrix::Identity(cols, cols);
  Eigen::JacobiSVD<RealMatrix> svd(m, Eigen::ComputeFullV);
  const RealVector& sv = svd.singularValues();
  if (singular_values) *singular_values = sv;
  Index r = 0;
  while (r < sv.size() && sv[r] > threshold) ++r;
  return svd.matrixV().rightCols(cols - r);
}

Index numerical_rank(const RealMatrix& m, double threshold) {
  if (m.cols() == 0 || m.rows() == 0) return 0;
  Eigen::JacobiSVD<RealMatrix> svd(m);
  const RealVector& sv = svd.singularValues();
  Index r = 0;
  while (r < sv.size() && sv[r] > threshold) ++r;
  return r;
}

}  // namespace gmeas
