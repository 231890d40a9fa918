#include "gmeas/operator.hpp"

#include <algorithm>
#include <cmath>

#include <spdlog/sinks/stdout_color_sinks.h>

#include "gmeas/errors.hpp"
#include "gmeas/log.hpp"

namespace gmeas {

spdlog::logger& logger() {
  static std::shared_ptr<spdlog::logger> instance = [] {
    auto existing = spdlog::get("gmeas");
    if (existing) return existing;
    auto l = spdlog::stderr_color_mt("gmeas");
    l->set_level(spdlog::level::warn);
    return l;
  }();
  return *instance;
}

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// Logs when an eigenvalue sits within two decades of a rank threshold.
void warn_near_threshold(const RealVector& values, double threshold, const char* what) {
  if (threshold <= 0.0) return;
  for (Index i = 0; i < values.size(); ++i) {
    const double v = std::abs(values[i]);
    if (v > threshold * 1e-2 && v < threshold * 1e2) {
      logger().warn("{}: eigenvalue {:.3e} within two decades of threshold {:.3e}", what, values[i],
                    threshold);
    }
  }
}

}  // namespace

HermitianOperator::HermitianOperator(Matrix m, double tol) {
  if (m.rows() != m.cols()) throw DimensionMismatch("Hermitian operator must be square");
  const double scale = std::max(1.0, m.norm());
  if ((m - m.adjoint()).norm() > 2.0 * tol * scale) throw NotHermitian("matrix is not Hermitian");
  m_ = 0.5 * (m + m.adjoint());
}

HermitianOperator HermitianOperator::zero(Index d) { return {Matrix::Zero(d, d), Unchecked{}}; }

HermitianOperator HermitianOperator::identity(Index d) { return {Matrix::Identity(d, d), Unchecked{}}; }

HermitianOperator HermitianOperator::diagonal(const RealVector& diag) {
  Matrix m = Matrix::Zero(diag.size(), diag.size());
  for (Index i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return {std::move(m), Unchecked{}};
}

HermitianOperator HermitianOperator::outer(const ComplexVector& v) {
  return {v * v.adjoint(), Unchecked{}};
}

HermitianOperator HermitianOperator::hermitian_part(const Matrix& m) {
  return {0.5 * (m + m.adjoint()), Unchecked{}};
}

double HermitianOperator::trace() const { return m_.trace().real(); }

double HermitianOperator::norm() const {
  if (dim() == 0) return 0.0;
  return eigenvalues().cwiseAbs().maxCoeff();
}

Spectrum HermitianOperator::spectrum() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m_);
  return {es.eigenvalues(), es.eigenvectors()};
}

RealVector HermitianOperator::eigenvalues() const {
  if (dim() == 0) return RealVector{};
  Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double HermitianOperator::min_eigenvalue() const { return dim() == 0 ? 0.0 : eigenvalues().minCoeff(); }

double HermitianOperator::max_eigenvalue() const { return dim() == 0 ? 0.0 : eigenvalues().maxCoeff(); }

bool HermitianOperator::is_psd(const Tolerances& tol) const {
  if (dim() == 0) return true;
  const RealVector ev = eigenvalues();
  const double scale = ev.cwiseAbs().maxCoeff();
  return ev.minCoeff() >= -tol.rank * std::max(scale, 1e-300);
}

HermitianOperator& HermitianOperator::operator+=(const HermitianOperator& o) {
  if (o.dim() != dim()) throw DimensionMismatch("operator dimensions differ");
  m_ += o.m_;
  return *this;
}

HermitianOperator& HermitianOperator::operator-=(const HermitianOperator& o) {
  if (o.dim() != dim()) throw DimensionMismatch("operator dimensions differ");
  m_ -= o.m_;
  return *this;
}

HermitianOperator& HermitianOperator::operator*=(double s) {
  m_ *= s;
  return *this;
}

double inner(const HermitianOperator& x, const HermitianOperator& y) {
  if (x.dim() != y.dim()) throw DimensionMismatch("inner product of operators of different size");
  // Tr(xy) = sum_ij x_ij conj(y_ij) for Hermitian y.
  return (x.matrix().array() * y.matrix().conjugate().array()).sum().real();
}

bool approx_equal(const HermitianOperator& x, const HermitianOperator& y, const Tolerances& tol) {
  if (x.dim() != y.dim()) return false;
  const double scale = std::max({1.0, x.frobenius(), y.frobenius()});
  return (x.matrix() - y.matrix()).norm() <= tol.num * scale;
}

HermitianOperator congruence(const Matrix& v, const HermitianOperator& x) {
  if (v.cols() != x.dim()) throw DimensionMismatch("congruence: shape mismatch");
  return HermitianOperator::hermitian_part(v * x.matrix() * v.adjoint());
}

// ---------------------------------------------------------------------------

Projection Projection::from_isometry(Matrix range) {
  Projection p;
  p.op_ = HermitianOperator::hermitian_part(range * range.adjoint());
  p.range_ = std::move(range);
  return p;
}

Projection Projection::from_operator(const HermitianOperator& op, const Tolerances& tol) {
  const Spectrum sp = op.spectrum();
  const Index d = op.dim();
  std::vector<Index> keep;
  for (Index i = 0; i < d; ++i) {
    const double v = sp.values[i];
    if (std::abs(v) > 1e3 * tol.num && std::abs(v - 1.0) > 1e3 * tol.num) {
      throw Error("operator is not a projection (eigenvalue " + std::to_string(v) + ")");
    }
    if (v > 0.5) keep.push_back(i);
  }
  Matrix range(d, static_cast<Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) range.col(static_cast<Index>(k)) = sp.vectors.col(keep[k]);
  return from_isometry(std::move(range));
}

Projection Projection::identity(Index d) { return from_isometry(Matrix::Identity(d, d)); }

Projection Projection::zero(Index d) { return from_isometry(Matrix(d, 0)); }

Projection Projection::complement() const {
  const Index d = dim();
  if (rank() == 0) return identity(d);
  if (rank() == d) return zero(d);
  Eigen::HouseholderQR<Matrix> qr(range_);
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  return from_isometry(q.rightCols(d - rank()));
}

bool Projection::leq(const Projection& q, const Tolerances& tol) const {
  if (q.dim() != dim()) return false;
  const Matrix residual = range_ - q.op().matrix() * range_;
  return residual.norm() <= 1e3 * tol.num * std::max<double>(1.0, static_cast<double>(rank()));
}

bool Projection::operator==(const Projection& other) const {
  return rank() == other.rank() && leq(other) && other.leq(*this);
}

// ---------------------------------------------------------------------------

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

HermitianOperator tensor(const HermitianOperator& x, const HermitianOperator& y) {
  return HermitianOperator::hermitian_part(kron(x.matrix(), y.matrix()));
}

Matrix partial_trace(const Matrix& x, TensorShape shape, Factor traced) {
  if (x.rows() != shape.total() || x.cols() != shape.total())
    throw DimensionMismatch("partial_trace: operator size does not match tensor shape");
  const Index a = shape.first;
  const Index b = shape.second;
  if (traced == Factor::first) {
    Matrix out = Matrix::Zero(b, b);
    for (Index i = 0; i < a; ++i) out += x.block(i * b, i * b, b, b);
    return out;
  }
  Matrix out(a, a);
  for (Index i = 0; i < a; ++i)
    for (Index j = 0; j < a; ++j) out(i, j) = x.block(i * b, j * b, b, b).trace();
  return out;
}

HermitianOperator partial_trace(const HermitianOperator& x, TensorShape shape, Factor traced) {
  return HermitianOperator::hermitian_part(partial_trace(x.matrix(), shape, traced));
}

Projection support_with_threshold(const HermitianOperator& x, double relative_threshold) {
  const Index d = x.dim();
  if (d == 0) return Projection::zero(0);
  const Spectrum sp = x.spectrum();
  const double scale = sp.values.cwiseAbs().maxCoeff();
  const double threshold = relative_threshold * scale;
  if (sp.values.minCoeff() < -threshold && scale > 0.0) {
    throw NotPositive("operator has eigenvalue " + std::to_string(sp.values.minCoeff()) +
                      " below the positivity tolerance");
  }
  warn_near_threshold(sp.values, threshold, "support");
  std::vector<Index> keep;
  for (Index i = 0; i < d; ++i)
    if (sp.values[i] > threshold && scale > 0.0) keep.push_back(i);
  Matrix range(d, static_cast<Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) range.col(static_cast<Index>(k)) = sp.vectors.col(keep[k]);
  return Projection::from_isometry(std::move(range));
}

Projection support(const HermitianOperator& x, const Tolerances& tol) {
  return support_with_threshold(x, tol.rank);
}

namespace {

template <typename F>
HermitianOperator spectral_map(const HermitianOperator& x, const Tolerances& tol, F f) {
  const Index d = x.dim();
  if (d == 0) return x;
  const Spectrum sp = x.spectrum();
  const double scale = sp.values.cwiseAbs().maxCoeff();
  const double threshold = tol.rank * scale;
  if (sp.values.minCoeff() < -threshold && scale > 0.0) throw NotPositive("operator is not positive semidefinite");
  RealVector mapped(d);
  for (Index i = 0; i < d; ++i) mapped[i] = sp.values[i] > threshold && scale > 0.0 ? f(sp.values[i]) : 0.0;
  return HermitianOperator::hermitian_part(sp.vectors * mapped.asDiagonal() * sp.vectors.adjoint());
}

}  // namespace

HermitianOperator sqrt_psd(const HermitianOperator& x, const Tolerances& tol) {
  return spectral_map(x, tol, [](double v) { return std::sqrt(v); });
}

HermitianOperator pinv_sqrt(const HermitianOperator& x, const Tolerances& tol) {
  return spectral_map(x, tol, [](double v) { return 1.0 / std::sqrt(v); });
}

HermitianOperator pinv(const HermitianOperator& x, const Tolerances& tol) {
  return spectral_map(x, tol, [](double v) { return 1.0 / v; });
}

// ---------------------------------------------------------------------------

RealVector vectorize_matrix(const Matrix& x) {
  const Index d = x.rows();
  RealVector v(d * d);
  for (Index i = 0; i < d; ++i) v[i] = x(i, i).real();
  Index k = d;
  for (Index i = 0; i < d; ++i) {
    for (Index j = i + 1; j < d; ++j) {
      const Complex z = 0.5 * (x(i, j) + std::conj(x(j, i)));
      v[k++] = kSqrt2 * z.real();
      v[k++] = kSqrt2 * z.imag();
    }
  }
  return v;
}

RealVector vectorize(const HermitianOperator& x) { return vectorize_matrix(x.matrix()); }

HermitianOperator devectorize(const RealVector& v, Index d) {
  if (v.size() != d * d) throw DimensionMismatch("devectorize: vector length is not d^2");
  Matrix m(d, d);
  for (Index i = 0; i < d; ++i) m(i, i) = v[i];
  Index k = d;
  for (Index i = 0; i < d; ++i) {
    for (Index j = i + 1; j < d; ++j) {
      const Complex z(v[k] / kSqrt2, v[k + 1] / kSqrt2);
      m(i, j) = z;
      m(j, i) = std::conj(z);
      k += 2;
    }
  }
  return HermitianOperator::hermitian_part(m);
}

}  // namespace gmeas
