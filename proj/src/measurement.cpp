#include "gmeas/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gmeas/errors.hpp"

namespace gmeas {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Columns: proj_J(V_u e V_u^dagger) in J-coordinates, for each block u and
// each coordinate basis element e of Herm(r_u).
struct BlockMap {
  RealMatrix matrix;
  std::vector<Index> offsets;
  std::vector<Matrix> isometries;

  Index domain() const { return matrix.cols(); }
  Index block_size(std::size_t u) const { return offsets[u + 1] - offsets[u]; }

  std::vector<HermitianOperator> unpack(const RealVector& x) const {
    std::vector<HermitianOperator> out;
    for (std::size_t u = 0; u < isometries.size(); ++u) {
      const Index r = isometries[u].cols();
      out.push_back(congruence(isometries[u], devectorize(x.segment(offsets[u], r * r), r)));
    }
    return out;
  }
};

BlockMap block_map(const HermSubspace& j, std::span<const Projection> supports) {
  BlockMap bm;
  bm.offsets.push_back(0);
  for (const auto& s : supports) {
    bm.isometries.push_back(s.range());
    bm.offsets.push_back(bm.offsets.back() + s.rank() * s.rank());
  }
  bm.matrix.resize(j.dim(), bm.offsets.back());
  for (std::size_t u = 0; u < supports.size(); ++u) {
    Index col = bm.offsets[u];
    for (const auto& e : hermitian_basis(supports[u].rank())) {
      bm.matrix.col(col++) = j.basis_matrix().transpose() * vectorize(congruence(bm.isometries[u], e));
    }
  }
  return bm;
}

double rank_threshold(const Tolerances& tol) { return tol.after_solve(); }

// Largest eps with center_u +/- eps direction_u >= 0 for all u, halved.
double safe_epsilon(std::span<const HermitianOperator> center, std::span<const HermitianOperator> direction,
                    const Tolerances& tol) {
  double step = kInf;
  for (std::size_t u = 0; u < center.size(); ++u) {
    if (direction[u].frobenius() == 0.0) continue;
    step = std::min({step, max_step(center[u], direction[u], tol), max_step(center[u], -direction[u], tol)});
  }
  if (!std::isfinite(step)) step = 1.0;
  return 0.5 * step;
}

std::vector<Projection> supports_of(std::span<const HermitianOperator> elements, const Tolerances& tol) {
  std::vector<Projection> out;
  for (const auto& e : elements) out.push_back(support(e, tol));
  return out;
}

Perturbation push_perturbation(const Perturbation& p, const Decomposition& dec) {
  Perturbation out;
  out.epsilon = p.epsilon;
  for (const auto& x : p.center) out.center.push_back(dec.push_forward(x));
  for (const auto& x : p.direction) out.direction.push_back(dec.push_forward(x));
  return out;
}

void check_cross(const Verdict& via, const Verdict& direct, const char* what) {
  if (via.conclusive() && direct.decision != via.decision) {
    throw CrossCheckFailure(std::string(what) + ": decomposition path says " + to_string(via.decision) +
                            ", direct engine says " + to_string(direct.decision));
  }
}

}  // namespace

HermitianOperator GeneralizedPOVM::total() const {
  HermitianOperator sum = HermitianOperator::zero(section.dim());
  for (const auto& e : elements) sum += e;
  return sum;
}

GeneralizedPOVM make_gpovm(const Section& section, std::vector<HermitianOperator> elements,
                           std::vector<std::string> outcomes) {
  if (outcomes.empty()) {
    for (std::size_t u = 0; u < elements.size(); ++u) outcomes.push_back(std::to_string(u));
  }
  if (outcomes.size() != elements.size()) throw DimensionMismatch("gpovm: label count differs from element count");
  return {section, std::move(outcomes), std::move(elements)};
}

GeneralizedMeasurement::GeneralizedMeasurement(GeneralizedPOVM representative)
    : representative_(std::move(representative)) {
  for (const auto& e : representative_.elements) classes_.push_back(quotient(representative_.section, e));
}

const std::vector<SupportCertificate>& GeneralizedMeasurement::k_supports(const Tolerances& tol) const {
  if (!ksupports_) {
    auto certs = std::make_shared<std::vector<SupportCertificate>>();
    for (const auto& e : representative_.elements) certs->push_back(k_support(section(), e, tol));
    ksupports_ = std::move(certs);
  }
  return *ksupports_;
}

HermitianOperator Decomposition::push_forward(const HermitianOperator& x) const {
  return congruence(p.range(), congruence(c_sqrt.matrix(), x));
}

Verdict validate(const GeneralizedPOVM& m, const Tolerances& tol) {
  Verdict v;
  v.decision = Decision::yes;
  const Index d = m.section.dim();
  if (m.elements.empty()) {
    v.decision = Decision::no;
    v.reason = "no outcomes";
    return v;
  }
  if (m.outcomes.size() != m.elements.size()) {
    v.decision = Decision::no;
    v.reason = "label count differs from element count";
    return v;
  }
  for (std::size_t u = 0; u < m.elements.size(); ++u) {
    if (m.elements[u].dim() != d) {
      v.decision = Decision::no;
      v.reason = "element " + m.outcomes[u] + " has the wrong dimension";
      return v;
    }
  }
  for (std::size_t u = 0; u < m.elements.size(); ++u) {
    v.margins["min_eigenvalue_" + m.outcomes[u]] = m.elements[u].min_eigenvalue();
    if (!m.elements[u].is_psd(tol) && v.holds()) {
      v.decision = Decision::no;
      v.reason = "element " + m.outcomes[u] + " is not positive";
    }
  }
  const HermitianOperator excess = m.total() - HermitianOperator::identity(d);
  const double residual = m.section.span().project(excess).frobenius();
  v.margins["sum_residual"] = residual;
  if (residual > tol.num * std::max(1.0, m.total().frobenius()) && v.holds()) {
    v.decision = Decision::no;
    v.reason = "sum of elements is not in I + K^perp";
  }
  if (v.holds()) v.reason = "valid";
  return v;
}

std::vector<double> apply(const GeneralizedPOVM& m, const HermitianOperator& rho, const Tolerances& tol) {
  if (!m.section.contains_state(rho, tol)) throw NotInSection("apply: operator is not a state of the section");
  std::vector<double> p;
  p.reserve(m.size());
  for (const auto& e : m.elements) p.push_back(inner(e, rho));
  return p;
}

GeneralizedMeasurement measurement_of(const GeneralizedPOVM& m) { return GeneralizedMeasurement(m); }

bool equivalent(const GeneralizedPOVM& m, const GeneralizedPOVM& n, const Tolerances& tol) {
  if (m.size() != n.size()) throw SectionMismatch("equivalent: outcome counts differ");
  if (m.section.dim() != n.section.dim() || !m.section.same_as(n.section, tol)) {
    throw SectionMismatch("equivalent: different sections");
  }
  for (std::size_t u = 0; u < m.size(); ++u) {
    const HermitianOperator diff = m.section.span().project(m.elements[u] - n.elements[u]);
    const double scale = std::max({1.0, m.elements[u].frobenius(), n.elements[u].frobenius()});
    if (diff.frobenius() > tol.num * scale) return false;
  }
  return true;
}

Verdict is_extremal_gpovm(const GeneralizedPOVM& m, const Tolerances& tol) {
  const std::vector<Projection> supports = supports_of(m.elements, tol);
  const BlockMap bm = block_map(m.section.span(), supports);
  RealVector sv;
  const RealMatrix kernel = null_space(bm.matrix, rank_threshold(tol), &sv);
  Verdict v;
  v.margins["domain_dim"] = static_cast<double>(bm.domain());
  v.margins["dim_J"] = static_cast<double>(m.section.span().dim());
  v.margins["kernel_dim"] = static_cast<double>(kernel.cols());
  const Index kept = bm.domain() - kernel.cols();
  v.margins["smallest_kept_singular_value"] = kept > 0 ? sv[kept - 1] : 0.0;
  v.margins["largest_dropped_singular_value"] = kept < sv.size() ? sv[kept] : 0.0;
  if (kernel.cols() == 0) {
    v.decision = Decision::yes;
    v.reason = "block map is injective";
    return v;
  }
  Perturbation p;
  p.center = m.elements;
  p.direction = bm.unpack(kernel.col(0));
  p.epsilon = safe_epsilon(p.center, p.direction, tol);
  v.decision = Decision::no;
  v.reason = "nonzero (D_u) supported in s(M_u) with sum in K^perp";
  v.witness = std::move(p);
  return v;
}

Verdict is_extremal_measurement(const GeneralizedMeasurement& m, const Tolerances& tol) {
  const auto& certs = m.k_supports(tol);
  std::vector<Projection> supports;
  std::vector<HermitianOperator> centers;
  for (const auto& c : certs) {
    supports.push_back(c.support);
    centers.push_back(c.point);
  }
  const HermSubspace& j = m.section().span();
  const BlockMap bm = block_map(j, supports);
  const double thr = rank_threshold(tol);
  const RealMatrix v_basis = null_space(bm.matrix, thr);

  // W = (+)_u (A^h_{s_u} cap K^perp), block diagonal in domain coordinates.
  RealMatrix w_basis = RealMatrix::Zero(bm.domain(), 0);
  for (std::size_t u = 0; u < supports.size(); ++u) {
    const Index off = bm.offsets[u];
    const Index len = bm.block_size(u);
    const RealMatrix local = null_space(bm.matrix.middleCols(off, len), thr);
    RealMatrix grown = RealMatrix::Zero(bm.domain(), w_basis.cols() + local.cols());
    grown.leftCols(w_basis.cols()) = w_basis;
    grown.block(off, w_basis.cols(), len, local.cols()) = local;
    w_basis = std::move(grown);
  }

  Verdict v;
  v.margins["dim_V"] = static_cast<double>(v_basis.cols());
  v.margins["dim_W"] = static_cast<double>(w_basis.cols());
  double ksupport_residual = 0.0;
  for (const auto& c : certs) ksupport_residual = std::max(ksupport_residual, c.residual);
  v.margins["ksupport_residual"] = ksupport_residual;

  // Part of V orthogonal to W.
  RealMatrix escape = v_basis;
  if (w_basis.cols() > 0 && v_basis.cols() > 0) escape -= w_basis * (w_basis.transpose() * v_basis);
  double top = 0.0;
  RealVector direction;
  if (escape.cols() > 0) {
    Eigen::JacobiSVD<RealMatrix> svd(escape, Eigen::ComputeThinU);
    top = svd.singularValues()[0];
    direction = svd.matrixU().col(0);
  }
  v.margins["escape_singular_value"] = top;
  if (top <= thr) {
    v.decision = Decision::yes;
    v.reason = "every admissible (D_u) lies in K^perp";
    return v;
  }
  Perturbation p;
  p.center = centers;
  p.direction = bm.unpack(direction);
  p.epsilon = safe_epsilon(p.center, p.direction, tol);
  v.decision = Decision::no;
  v.reason = "admissible (D_u) leaving K^perp";
  v.witness = std::move(p);
  return v;
}

Verdict is_extremal_measurement(const GeneralizedPOVM& m, const Tolerances& tol) {
  return is_extremal_measurement(measurement_of(m), tol);
}

Index compressed_dimension(const HermSubspace& j, const Projection& s, const Tolerances& tol) {
  const Index r = s.rank();
  if (r == 0 || j.dim() == 0) return 0;
  RealMatrix cols(r * r, j.dim());
  for (Index k = 0; k < j.dim(); ++k) cols.col(k) = vectorize(congruence(s.range().adjoint(), j.element(k)));
  return numerical_rank(cols, rank_threshold(tol));
}

Verdict dimension_bound(const GeneralizedMeasurement& m, const Tolerances& tol) {
  const auto& certs = m.k_supports(tol);
  Index lhs = 0;
  for (const auto& c : certs) lhs += compressed_dimension(m.section().span(), c.support, tol);
  const Index rhs = m.section().span().dim();
  Verdict v;
  v.margins["sum_dim_sJs"] = static_cast<double>(lhs);
  v.margins["dim_J"] = static_cast<double>(rhs);
  v.decision = decide(lhs <= rhs);
  v.reason = lhs <= rhs ? "bound holds" : "bound violated; measurement is not extremal";
  return v;
}

Projection projection_join(std::span<const Projection> projections, const Tolerances& tol) {
  if (projections.empty()) throw DimensionMismatch("projection_join: empty list");
  const Index d = projections.front().dim();
  Matrix sum = Matrix::Zero(d, d);
  for (const auto& p : projections) sum += p.op().matrix();
  const Spectrum sp = HermitianOperator::hermitian_part(sum).spectrum();
  Index first = 0;
  while (first < d && sp.values[first] <= 1e3 * tol.num) ++first;
  return Projection::from_isometry(sp.vectors.rightCols(d - first));
}

Decomposition decompose(const GeneralizedPOVM& m, const Tolerances& tol) {
  Decomposition dec;
  dec.c = m.total();
  dec.p = support(dec.c, tol);
  const Matrix& v = dec.p.range();
  const Index r = dec.p.rank();
  const HermitianOperator c_r = congruence(v.adjoint(), dec.c);
  dec.c_sqrt = sqrt_psd(c_r, tol);
  const HermitianOperator w = pinv_sqrt(c_r, tol);
  for (const auto& e : m.elements) dec.lambda.push_back(congruence(w.matrix(), congruence(v.adjoint(), e)));

  std::vector<HermitianOperator> pushed;
  for (const auto& x : m.section.span().elements()) {
    pushed.push_back(congruence(dec.c_sqrt.matrix(), congruence(v.adjoint(), x)));
  }
  const HermSubspace span = HermSubspace::span(r, pushed, tol);
  const HermitianOperator image = congruence(dec.c_sqrt.matrix(), congruence(v.adjoint(), m.section.witness()));
  const double trace = image.trace();
  SectionDescriptor desc;
  desc.kind = SectionKind::custom;
  desc.dim = r;
  desc.basis = span.elements();
  if (trace > 0.0 && (image / trace).min_eigenvalue() > tol.rank * std::max(1.0, (image / trace).norm())) {
    dec.pushed_section = Section::from_parts(span, image / trace, desc, std::nullopt, v);
  } else {
    dec.pushed_section = custom_section(r, desc.basis, tol);
  }
  return dec;
}

GeneralizedPOVM lambda_povm(const GeneralizedPOVM& m, const Decomposition& dec) {
  return make_gpovm(dec.pushed_section, dec.lambda, m.outcomes);
}

Verdict extremal_gpovm_via_decomposition(const GeneralizedPOVM& m, const Tolerances& tol, bool cross_check) {
  const Decomposition dec = decompose(m, tol);
  Verdict v = is_extremal_gpovm(lambda_povm(m, dec), tol);
  v.margins["corner_rank"] = static_cast<double>(dec.p.rank());
  if (const Perturbation* p = v.perturbation()) v.witness = push_perturbation(*p, dec);
  if (cross_check) check_cross(v, is_extremal_gpovm(m, tol), "gpovm extremality");
  return v;
}

Verdict extremal_measurement_via_decomposition(const GeneralizedPOVM& m, const Tolerances& tol, bool cross_check) {
  const Decomposition dec = decompose(m, tol);
  const GeneralizedMeasurement meas = measurement_of(m);
  std::vector<Projection> ks;
  for (const auto& c : meas.k_supports(tol)) ks.push_back(c.support);
  const Projection join = projection_join(ks, tol);
  if (join.rank() != dec.p.rank()) {
    Verdict v;
    v.decision = Decision::inconclusive;
    v.reason = "s(sum M_u) is strictly below the join of the K-supports";
    v.margins["corner_rank"] = static_cast<double>(dec.p.rank());
    v.margins["join_rank"] = static_cast<double>(join.rank());
    return v;
  }
  Verdict v = is_extremal_measurement(lambda_povm(m, dec), tol);
  v.margins["corner_rank"] = static_cast<double>(dec.p.rank());
  v.margins["join_rank"] = static_cast<double>(join.rank());
  if (const Perturbation* p = v.perturbation()) v.witness = push_perturbation(*p, dec);
  if (cross_check) check_cross(v, is_extremal_measurement(meas, tol), "measurement extremality");
  return v;
}

bool is_pvm(std::span<const HermitianOperator> elements, const Tolerances& tol) {
  const double bound = 1e2 * tol.num;
  for (std::size_t u = 0; u < elements.size(); ++u) {
    const Matrix& a = elements[u].matrix();
    if ((a * a - a).norm() > bound) return false;
    for (std::size_t w = u + 1; w < elements.size(); ++w) {
      if ((a * elements[w].matrix()).norm() > bound) return false;
    }
  }
  return true;
}

}  // namespace gmeas
